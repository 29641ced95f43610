use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use qdcascade::analysis::{
    analyze_setting, basis_visibility, chsh::outcome_angles, chsh_from_outcomes,
    fidelity_from_visibilities, fit_fringe, fringe_csv, CorrelationSettingResult, Histogram,
    HistogramOptions, NormalizedCoincidence,
};
use qdcascade::cascade::read_events;
use qdcascade::kv::KvDoc;
use qdcascade::polarization::{Basis, SettingLabel};
use qdcascade::tomography::TomoCounts;
use qdcascade::Error;

use crate::config::{CommonArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, read_kv, write_atomic, write_text, MANIFEST, SUMMARY};
use crate::simulate::{write_manifest, STREAM_EXT};

pub const TOMO_COUNTS: &str = "tomo_counts.csv";
const STATS: &[&str] = &["visibility", "fidelity", "chsh", "tomo", "fringe"];

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory holding the stream files (and usually their manifest).
    #[arg(long = "in", value_name = "DIR")]
    pub input: Option<PathBuf>,
    /// Statistics that must be computable, comma-separated: visibility,
    /// fidelity, chsh, tomo, fringe.
    #[arg(long, value_name = "LIST")]
    pub require: Option<String>,
}

/// Stream files to read: the manifest's list when there is one, otherwise
/// every `*.events` file whose stem is a setting label.
fn stream_inputs(dir: &Path, manifest: Option<&KvDoc>) -> CliResult<Vec<(SettingLabel, PathBuf)>> {
    let names: Vec<String> = match manifest.and_then(|m| m.get("streams")) {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        None => {
            let mut v = Vec::new();
            for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
                let path = entry.map_err(|e| CliError::io(dir, e))?.path();
                if path.extension().is_some_and(|e| e == STREAM_EXT) {
                    if let Some(name) = path.file_name() {
                        v.push(name.to_string_lossy().into_owned());
                    }
                }
            }
            v.sort();
            v
        }
    };
    let mut out = Vec::new();
    for name in names {
        let stem = name.strip_suffix(&format!(".{STREAM_EXT}")).unwrap_or(&name);
        let label: SettingLabel = stem.parse().map_err(|_| {
            CliError::new("invalid_input", format!("stream file {name:?} is not named after a setting"))
        })?;
        out.push((label, dir.join(&name)));
    }
    if out.is_empty() {
        return Err(CliError::new(
            "missing_setting",
            format!("no stream files in {}", dir.display()),
        ));
    }
    Ok(out)
}

fn analyze_file(label: SettingLabel, path: &Path, opts: &HistogramOptions) -> CliResult<(CorrelationSettingResult, [Histogram; 2])> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let streams = read_events(BufReader::new(file))
        .map_err(|e| CliError::new(e.kind(), format!("{}: {e}", path.display())))?;
    analyze_setting(label, &streams, opts)
        .map_err(|e| CliError::new(e.kind(), format!("setting {label}: {e}")))
}

fn normalized_csv(results: &[CorrelationSettingResult]) -> String {
    let mut s = String::from("setting,port,n,sigma,central,side_total\n");
    for r in results {
        for (port, n) in [("co", &r.n_parallel), ("cross", &r.n_perp)] {
            let _ = writeln!(
                s,
                "{},{port},{},{},{},{}",
                r.label, n.n, n.poisson_sigma, n.central, n.side_total
            );
        }
    }
    s
}

fn short(b: Basis) -> &'static str {
    match b {
        Basis::Circular => "RL",
        Basis::Rectilinear => "HV",
        Basis::Diagonal => "DA",
    }
}

fn fmt_angle(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Fringe points per θ_XX: the co port sits at θ_X, the cross port at θ_X+180°.
fn fringes(results: &[CorrelationSettingResult]) -> BTreeMap<String, Vec<(f64, NormalizedCoincidence)>> {
    let mut groups: BTreeMap<String, Vec<(f64, NormalizedCoincidence)>> = BTreeMap::new();
    for r in results {
        if let Some((a, b)) = r.label.as_polar() {
            let g = groups.entry(fmt_angle(a)).or_default();
            g.push((b, r.n_parallel));
            g.push(((b + 180.0).rem_euclid(360.0), r.n_perp));
        }
    }
    for g in groups.values_mut() {
        g.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
    groups
}

struct Analysis {
    summary: KvDoc,
    missing: BTreeMap<&'static str, CliError>,
}

impl Analysis {
    fn skip(&mut self, stat: &'static str, e: Error) {
        self.missing.entry(stat).or_insert_with(|| e.into());
    }
}

pub fn run(args: AnalyzeArgs) -> CliResult<()> {
    let overrides = [
        ("input", args.input.as_ref().map(|p| p.display().to_string())),
        ("require", args.require.clone()),
    ];
    let cfg = RunConfig::load(&args.common, &["input", "require", "rep_rate_mhz"], &overrides)?;
    let input = PathBuf::from(
        cfg.get("input")
            .ok_or_else(|| CliError::config("no input directory (use --in)"))?,
    );
    let required: Vec<String> = cfg
        .get("require")
        .unwrap_or("")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if let Some(bad) = required.iter().find(|r| !STATS.contains(&r.as_str())) {
        return Err(CliError::config(format!("unknown statistic {bad:?} in require")));
    }

    let manifest_path = input.join(MANIFEST);
    let manifest = if manifest_path.exists() {
        Some(read_kv(&manifest_path)?)
    } else {
        None
    };
    let rep_rate = match cfg.parsed::<f64>("rep_rate_mhz")? {
        Some(r) => r,
        None => match manifest.as_ref().and_then(|m| m.get("rep_rate_mhz")) {
            Some(v) => v
                .parse()
                .map_err(|_| CliError::config(format!("bad rep_rate_mhz {v:?} in manifest")))?,
            None => 200.0,
        },
    };
    if !(rep_rate.is_finite() && rep_rate > 0.0) {
        return Err(CliError::config(format!("rep_rate_mhz must be positive, got {rep_rate}")));
    }
    let opts = cfg.histogram_options(1e6 / rep_rate)?;
    let inputs = stream_inputs(&input, manifest.as_ref())?;
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    let hist_dir = out.join("histograms");

    let analyzed: Vec<CorrelationSettingResult> = inputs
        .par_iter()
        .map(|(label, path)| {
            let (r, [co, cross]) = analyze_file(*label, path, &opts)?;
            write_text(&hist_dir.join(format!("{label}_co.csv")), &co.to_csv())?;
            write_text(&hist_dir.join(format!("{label}_cross.csv")), &cross.to_csv())?;
            Ok(r)
        })
        .collect::<CliResult<_>>()?;
    write_text(&out.join("normalized.csv"), &normalized_csv(&analyzed))?;

    let mut a = Analysis {
        summary: KvDoc::new(),
        missing: BTreeMap::new(),
    };
    a.summary.set("settings_analyzed", analyzed.len());

    let mut vis = Vec::new();
    for b in Basis::ALL {
        match basis_visibility(&analyzed, b) {
            Ok(v) => {
                a.summary.set(&format!("C_{}", short(b)), v.visibility);
                a.summary.set(&format!("C_{}_sigma", short(b)), v.sigma);
                vis.push(v);
            }
            Err(e) => a.skip("visibility", e),
        }
    }
    if let [c, h, d] = vis[..] {
        a.summary.set(
            "fidelity",
            fidelity_from_visibilities(c.visibility, h.visibility, d.visibility),
        );
        a.summary.set(
            "fidelity_sigma",
            (c.sigma.powi(2) + h.sigma.powi(2) + d.sigma.powi(2)).sqrt() / 4.0,
        );
    } else if let Some(e) = a.missing.get("visibility") {
        let e = CliError::new(e.kind, e.msg.clone());
        a.missing.insert("fidelity", e);
    }

    let outcomes: Vec<((f64, f64), NormalizedCoincidence)> = analyzed
        .iter()
        .filter_map(|r| r.label.as_polar().map(|ab| (ab, r)))
        .flat_map(|((x, y), r)| {
            let ang = outcome_angles(x, y);
            [(ang[0], r.n_parallel), (ang[1], r.n_perp)]
        })
        .collect();
    match chsh_from_outcomes(&outcomes) {
        Ok(c) => {
            a.summary.set("S", c.s);
            a.summary.set("S_sigma", c.sigma);
            for k in 0..4 {
                a.summary.set(&format!("E{k}"), c.e[k]);
                a.summary.set(&format!("E{k}_sigma"), c.e_sigma[k]);
            }
        }
        Err(e) => a.skip("chsh", e),
    }

    match TomoCounts::from_setting_results(&analyzed) {
        Ok(counts) => {
            let path = out.join(TOMO_COUNTS);
            write_atomic(&path, |w| counts.write_csv(w).map_err(CliError::from))?;
            a.summary.set("tomo_counts", TOMO_COUNTS);
        }
        Err(e) => a.skip("tomo", e),
    }

    let groups = fringes(&analyzed);
    if groups.is_empty() {
        a.skip("fringe", Error::MissingSetting("no polar-angle settings".into()));
    }
    for (theta_xx, points) in &groups {
        let name = format!("fringe_p{theta_xx}.csv");
        write_text(&out.join(&name), &fringe_csv(points))?;
        let angles: Vec<f64> = points.iter().map(|p| p.0).collect();
        let n: Vec<f64> = points.iter().map(|p| p.1.n).collect();
        match fit_fringe(&angles, &n) {
            Ok(f) => {
                let key = |s: &str| format!("fringe_p{theta_xx}.{s}");
                a.summary.set(&key("amplitude"), f.amplitude);
                a.summary.set(&key("phase_deg"), f.phase_deg);
                a.summary.set(&key("offset"), f.offset);
                a.summary.set(&key("contrast"), f.contrast());
                a.summary.set(&key("residual"), f.residual);
            }
            Err(e) => a.skip("fringe", e),
        }
    }

    for stat in &required {
        if let Some(e) = a.missing.remove(stat.as_str()) {
            return Err(CliError::new(e.kind, format!("{stat}: {}", e.msg)));
        }
    }

    write_text(&out.join(SUMMARY), &a.summary.render())?;
    let mut m = KvDoc::new();
    m.set("command", "analyze");
    m.set("input", input.display());
    m.set(
        "streams",
        inputs
            .iter()
            .map(|(_, p)| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    RunConfig::record_histogram(&mut m, &opts);
    if let Some(src) = &manifest {
        if let Some(seed) = src.get("seed") {
            m.set("source_seed", seed);
        }
    }
    if !required.is_empty() {
        m.set("require", required.join(", "));
    }
    write_manifest(&out, &m)?;
    print!("{}", a.summary.render());
    Ok(())
}
