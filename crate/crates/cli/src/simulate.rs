use std::path::Path;

use clap::Args;
use rayon::prelude::*;

use qdcascade::analysis::chsh_settings;
use qdcascade::cascade::{simulate, write_events, CascadeParams};
use qdcascade::kv::KvDoc;
use qdcascade::polarization::{Pol, SettingLabel};

use crate::config::{CommonArgs, RunConfig, PARAM_KEYS};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, write_atomic, write_text, MANIFEST};

pub const STREAM_EXT: &str = "events";
pub const DEFAULT_DURATION_S: f64 = 0.01;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Setting list: visibility (12 basis pairs), chsh (16 polar pairs), tomo (all
    /// 36 basis pairs) or fringe (θ_XX = 0°, 90° against 8 θ_X each).
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated setting labels such as `HH,HV` or `p0_45`.
    #[arg(long)]
    pub settings: Option<String>,
    /// Acquisition time per setting in seconds [default: 0.01].
    #[arg(long, value_name = "S")]
    pub duration: Option<f64>,
    /// Model parameter override, e.g. `--set p_exc=0.2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

pub fn preset(name: &str) -> CliResult<Vec<SettingLabel>> {
    let letters = |s: &[&str]| s.iter().map(|l| l.parse().unwrap()).collect();
    Ok(match name {
        "visibility" => letters(&["LR", "LL", "RR", "RL", "HH", "HV", "VH", "VV", "DD", "DA", "AD", "AA"]),
        "chsh" => chsh_settings()
            .into_iter()
            .map(|(a, b)| SettingLabel::polar(a, b))
            .collect(),
        "tomo" => Pol::ALL
            .iter()
            .flat_map(|a| Pol::ALL.iter().map(move |b| SettingLabel::pols(*a, *b)))
            .collect(),
        "fringe" => [0.0, 90.0]
            .iter()
            .flat_map(|a| (0..8).map(move |k| SettingLabel::polar(*a, 45.0 * k as f64)))
            .collect(),
        other => {
            return Err(CliError::config(format!(
                "unknown preset {other:?} (expected visibility, chsh, tomo or fringe)"
            )))
        }
    })
}

fn parse_settings(list: &str) -> CliResult<Vec<SettingLabel>> {
    let labels: Vec<SettingLabel> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(CliError::from))
        .collect::<CliResult<_>>()?;
    if labels.is_empty() {
        return Err(CliError::config("empty settings list"));
    }
    Ok(labels)
}

pub fn stream_file(label: &SettingLabel) -> String {
    format!("{label}.{STREAM_EXT}")
}

pub fn run(args: SimulateArgs) -> CliResult<()> {
    let mut overrides: Vec<(&str, Option<String>)> = vec![
        ("preset", args.preset.clone()),
        ("settings", args.settings.clone()),
        ("duration_s", args.duration.map(|d| d.to_string())),
    ];
    let set: Vec<(String, String)> = args
        .set
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got {s:?}")))
        })
        .collect::<CliResult<_>>()?;
    for (k, _) in &set {
        if !PARAM_KEYS.contains(&k.as_str()) {
            return Err(CliError::config(format!("unknown parameter {k:?}")));
        }
    }
    overrides.extend(set.iter().map(|(k, v)| (k.as_str(), Some(v.clone()))));
    let allowed: Vec<&str> = PARAM_KEYS
        .iter()
        .copied()
        .chain(["preset", "settings", "duration_s"])
        .collect();
    let mut cfg = RunConfig::load(&args.common, &allowed, &overrides)?;

    let params = CascadeParams::from_kv(&cfg.doc)?;
    let labels = match (cfg.get("settings"), cfg.get("preset")) {
        (Some(list), _) => parse_settings(list)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => preset("visibility")?,
    };
    let duration = cfg.parsed::<f64>("duration_s")?.unwrap_or(DEFAULT_DURATION_S);
    if !(duration.is_finite() && duration > 0.0) {
        return Err(CliError::config(format!("duration must be positive, got {duration} s")));
    }
    let seed = cfg.seed()?;
    let out = cfg.out_dir();
    ensure_dir(&out)?;

    let files: Vec<String> = labels
        .par_iter()
        .enumerate()
        .map(|(k, label)| {
            let streams = simulate(&params, &label.setting(), duration, setting_seed(seed, k))?;
            let name = stream_file(label);
            let path = out.join(&name);
            write_atomic(&path, |w| write_events(w, &streams).map_err(CliError::from))?;
            Ok(name)
        })
        .collect::<CliResult<_>>()?;

    let mut manifest = KvDoc::new();
    manifest.set("command", "simulate");
    manifest.set("seed", seed);
    manifest.set("setting_seed", "seed + index in settings");
    manifest.set("duration_s", duration);
    manifest.set(
        "settings",
        labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "),
    );
    manifest.set("streams", files.join(", "));
    params.to_kv(&mut manifest);
    if let Some(v) = cfg.get("preset") {
        manifest.set("preset", v);
    }
    if let Some(path) = &args.common.config {
        manifest.set("config", path.display());
    }
    write_manifest(&out, &manifest)?;
    println!(
        "wrote {} stream files to {} (seed {seed})",
        files.len(),
        out.display()
    );
    Ok(())
}

/// Seed used for the `k`-th setting of a run.
pub fn setting_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

pub fn write_manifest(dir: &Path, doc: &KvDoc) -> CliResult<()> {
    write_text(&dir.join(MANIFEST), &doc.render())
}
