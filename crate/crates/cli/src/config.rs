//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags. Flags win.

use std::path::PathBuf;

use clap::Args;
use qdcascade::analysis::{HistogramOptions, DEFAULT_BIN_PS, DEFAULT_SIDE_PEAKS};
use qdcascade::kv::KvDoc;

use crate::error::{CliError, CliResult};
use crate::output::read_kv;

/// Keys understood by the cascade model.
pub const PARAM_KEYS: &[&str] = &[
    "gamma1",
    "gamma_xx",
    "gamma_s",
    "fss_ueV",
    "rep_rate_mhz",
    "p_exc",
    "det_eff",
    "jitter_ps",
    "dark_cps",
    "visibility_override",
];

pub const COMMON_KEYS: &[&str] = &["seed", "out", "bin_ps", "window_ns", "side_peaks"];

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat key=value configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Random seed. Generated and recorded in the manifest when absent.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Histogram bin width in ps [default: 128].
    #[arg(long, value_name = "PS")]
    pub bin_ps: Option<i64>,
    /// Histogram half-window in ns, rounded up to whole bins [default: just
    /// wide enough for the side peaks].
    #[arg(long, value_name = "NS")]
    pub window_ns: Option<f64>,
    /// Number of side peaks averaged for normalization [default: 10].
    #[arg(long, value_name = "N")]
    pub side_peaks: Option<usize>,
}

/// Merged configuration for one command.
pub struct RunConfig {
    pub doc: KvDoc,
}

impl RunConfig {
    /// Loads the config file (if any), checks its keys against `allowed`, and
    /// applies the common flags followed by `overrides`.
    pub fn load(common: &CommonArgs, allowed: &[&str], overrides: &[(&str, Option<String>)]) -> CliResult<Self> {
        let mut doc = match &common.config {
            Some(path) => read_kv(path)?,
            None => KvDoc::new(),
        };
        if let Some(bad) = doc
            .keys()
            .find(|k| !allowed.contains(k) && !COMMON_KEYS.contains(k))
        {
            return Err(CliError::config(format!("unknown config key {bad:?}")));
        }
        let flags = [
            ("seed", common.seed.map(|s| s.to_string())),
            ("out", common.out.as_ref().map(|p| p.display().to_string())),
            ("bin_ps", common.bin_ps.map(|b| b.to_string())),
            ("window_ns", common.window_ns.map(|w| w.to_string())),
            ("side_peaks", common.side_peaks.map(|n| n.to_string())),
        ];
        for (k, v) in flags.iter().chain(overrides.iter()) {
            if let Some(v) = v {
                doc.set(k, v);
            }
        }
        Ok(RunConfig { doc })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.doc.get(key)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.doc
            .get_parsed(key)
            .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out").unwrap_or("out"))
    }

    /// The configured seed, or a fresh one written back into the config so
    /// that it lands in the manifest.
    pub fn seed(&mut self) -> CliResult<u64> {
        match self.parsed::<u64>("seed")? {
            Some(s) => Ok(s),
            None => {
                let s: u64 = rand::random();
                self.doc.set("seed", s);
                Ok(s)
            }
        }
    }

    /// Histogram options for a pulse period. The window is rounded up to a
    /// whole number of bins.
    pub fn histogram_options(&self, rep_period_ps: f64) -> CliResult<HistogramOptions> {
        let bin = self.parsed::<i64>("bin_ps")?.unwrap_or(DEFAULT_BIN_PS);
        if bin <= 0 {
            return Err(CliError::config(format!("bin_ps must be positive, got {bin}")));
        }
        let side = self.parsed::<usize>("side_peaks")?.unwrap_or(DEFAULT_SIDE_PEAKS);
        let mut opts = HistogramOptions::new(bin, rep_period_ps, side);
        if let Some(w) = self.parsed::<f64>("window_ns")? {
            if !(w.is_finite() && w > 0.0) {
                return Err(CliError::config(format!("window_ns must be positive, got {w}")));
            }
            let bins = (w * 1000.0 / bin as f64).ceil() as i64;
            opts = opts.with_window(bins * bin);
        }
        Ok(opts)
    }

    /// Records the effective histogram options.
    pub fn record_histogram(doc: &mut KvDoc, opts: &HistogramOptions) {
        doc.set("bin_ps", opts.bin_width_ps);
        doc.set("window_ps", opts.window_ps);
        doc.set("rep_period_ps", opts.rep_period_ps);
        doc.set("side_peaks", opts.side_peaks);
    }
}
