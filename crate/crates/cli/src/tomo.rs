use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;

use qdcascade::kv::KvDoc;
use qdcascade::tomography::{bootstrap, mle_fit, TomoCounts, TomographyReport, DEFAULT_MAX_ITER, DEFAULT_TOL};

use crate::config::{CommonArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, write_text, SUMMARY};
use crate::simulate::write_manifest;

pub const REPORT_JSON: &str = "tomography.json";

#[derive(Debug, Args)]
pub struct TomoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV with `basis_xx,basis_x,counts` rows for all 36 settings.
    #[arg(long, value_name = "PATH")]
    pub counts: Option<PathBuf>,
    /// Relative loss improvement at which the fit stops [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Maximum number of loss evaluations [default: 100000].
    #[arg(long, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Number of Poisson bootstrap replicates for error bars [default: 0].
    #[arg(long, value_name = "N")]
    pub bootstrap: Option<usize>,
}

fn matrix_csv(report: &TomographyReport) -> String {
    let d = &report.density_matrix;
    let mut s = String::from("row,col,re,im,abs_im,im_sign\n");
    for i in 0..4 {
        for j in 0..4 {
            let _ = writeln!(
                s,
                "{i},{j},{},{},{},{}",
                d.re[i][j], d.im[i][j], report.abs_im[i][j], report.im_sign[i][j]
            );
        }
    }
    s
}

pub fn run(args: TomoArgs) -> CliResult<()> {
    let overrides = [
        ("counts", args.counts.as_ref().map(|p| p.display().to_string())),
        ("tol", args.tol.map(|t| t.to_string())),
        ("max_iter", args.max_iter.map(|n| n.to_string())),
        ("bootstrap", args.bootstrap.map(|n| n.to_string())),
    ];
    let mut cfg = RunConfig::load(&args.common, &["counts", "tol", "max_iter", "bootstrap"], &overrides)?;
    let path = PathBuf::from(
        cfg.get("counts")
            .ok_or_else(|| CliError::config("no counts file (use --counts)"))?,
    );
    let tol = cfg.parsed::<f64>("tol")?.unwrap_or(DEFAULT_TOL);
    let max_iter = cfg.parsed::<usize>("max_iter")?.unwrap_or(DEFAULT_MAX_ITER);
    let replicates = cfg.parsed::<usize>("bootstrap")?.unwrap_or(0);

    let file = fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
    let counts = TomoCounts::read_csv(file)
        .map_err(|e| CliError::new(e.kind(), format!("{}: {e}", path.display())))?;
    let fit = mle_fit(&counts, tol, max_iter)?;
    let mut report = TomographyReport::new(&fit);
    let mut manifest = KvDoc::new();
    manifest.set("command", "tomo");
    manifest.set("counts", path.display());
    manifest.set("tol", tol);
    manifest.set("max_iter", max_iter);
    if replicates > 0 {
        let seed = cfg.seed()?;
        report.bootstrap = Some(bootstrap(&counts, replicates, seed, tol, max_iter)?);
        manifest.set("bootstrap", replicates);
        manifest.set("seed", seed);
    }

    let out = cfg.out_dir();
    ensure_dir(&out)?;
    write_text(&out.join(REPORT_JSON), &report.to_json()?)?;
    write_text(&out.join("density_matrix.csv"), &matrix_csv(&report))?;
    let mut summary = KvDoc::new();
    for (k, v) in report.summary.to_kv() {
        summary.set(&k, v);
    }
    if let Some(b) = &report.bootstrap {
        for (k, v) in b.std.to_kv() {
            summary.set(&format!("{k}_sigma"), v);
        }
    }
    summary.set("loss_initial", report.loss_initial);
    summary.set("loss_final", report.loss_final);
    summary.set("evaluations", report.evaluations);
    write_text(&out.join(SUMMARY), &summary.render())?;
    write_manifest(&out, &manifest)?;
    print!("{}", summary.render());
    Ok(())
}
