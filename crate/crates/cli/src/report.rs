use std::path::PathBuf;

use clap::Args;

use qdcascade::kv::KvDoc;

use crate::config::{CommonArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, read_kv, write_text, MANIFEST, SUMMARY};
use crate::simulate::write_manifest;

pub const REPORT: &str = "report.txt";

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory of an earlier `analyze` or `tomo` run. Repeatable.
    #[arg(long = "in", value_name = "DIR", required = true)]
    pub inputs: Vec<PathBuf>,
}

/// Summary keys are prefixed by the command that produced them; every input
/// is listed with its seed when it has one.
pub fn run(args: ReportArgs) -> CliResult<()> {
    let cfg = RunConfig::load(&args.common, &[], &[])?;
    let mut report = KvDoc::new();
    for (k, dir) in args.inputs.iter().enumerate() {
        let summary_path = dir.join(SUMMARY);
        if !summary_path.exists() {
            return Err(CliError::new(
                "missing_input",
                format!("{} has no {SUMMARY}", dir.display()),
            ));
        }
        let summary = read_kv(&summary_path)?;
        let manifest_path = dir.join(MANIFEST);
        let manifest = if manifest_path.exists() {
            read_kv(&manifest_path)?
        } else {
            KvDoc::new()
        };
        let command = manifest.get("command").unwrap_or("input");
        report.set(&format!("source{k}"), summary_path.display());
        report.set(&format!("source{k}.command"), command);
        for seed_key in ["seed", "source_seed"] {
            if let Some(s) = manifest.get(seed_key) {
                report.set(&format!("source{k}.{seed_key}"), s);
            }
        }
        for key in summary.keys() {
            report.set(&format!("{command}.{key}"), summary.get(key).unwrap_or_default());
        }
    }
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    write_text(&out.join(REPORT), &report.render())?;
    let mut m = KvDoc::new();
    m.set("command", "report");
    m.set(
        "inputs",
        args.inputs
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    write_manifest(&out, &m)?;
    print!("{}", report.render());
    Ok(())
}
