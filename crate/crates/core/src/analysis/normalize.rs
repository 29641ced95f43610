//! Side-peak normalization of pulsed coincidence histograms.

use serde::{Deserialize, Serialize};

use super::histogram::Histogram;
use crate::error::{Error, Result};

/// Default number of satellite peaks averaged for the flux reference.
pub const DEFAULT_SIDE_PEAKS: usize = 10;

/// Central-peak area over the mean side-peak area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCoincidence {
    pub n: f64,
    pub poisson_sigma: f64,
    pub central: u64,
    pub side_total: u64,
    pub side_peaks: usize,
}

impl NormalizedCoincidence {
    pub fn side_mean(&self) -> f64 {
        self.side_total as f64 / self.side_peaks as f64
    }
}

/// Satellite peak orders `+1, −1, +2, −2, …`, the first `n` of them.
pub fn side_peak_orders(n: usize) -> Vec<i64> {
    (0..n)
        .map(|k| {
            let j = (k / 2 + 1) as i64;
            if k % 2 == 0 {
                j
            } else {
                -j
            }
        })
        .collect()
}

/// Integrates the central peak and `n_side_peaks` satellites and normalizes.
///
/// Every bin is assigned to the pulse order `round(centre / period)`, so each
/// peak integrates the bins whose centres lie within half a period of it.
pub fn integrate_and_normalize(
    h: &Histogram,
    rep_period_ps: f64,
    n_side_peaks: usize,
) -> Result<NormalizedCoincidence> {
    let bw = h.bin_width_ps() as f64;
    if !(rep_period_ps.is_finite() && rep_period_ps >= 2.0 * bw) {
        return Err(Error::Window(format!(
            "repetition period {rep_period_ps} ps must span at least two {bw} ps bins"
        )));
    }
    if n_side_peaks < 2 {
        return Err(Error::Window(format!(
            "need at least 2 side peaks, got {n_side_peaks}"
        )));
    }
    let orders = side_peak_orders(n_side_peaks);
    let max_order = orders.iter().map(|j| j.unsigned_abs()).max().unwrap_or(0) as f64;
    let covered = h.range_ps() as f64 + 0.5 * bw;
    if (max_order + 0.5) * rep_period_ps > covered + 1e-9 {
        return Err(Error::Window(format!(
            "window ±{} ps cannot hold {n_side_peaks} side peaks at period {rep_period_ps} ps (needs ±{} ps)",
            h.range_ps(),
            (max_order + 0.5) * rep_period_ps - 0.5 * bw
        )));
    }
    let mut central = 0u64;
    let mut side_total = 0u64;
    for (i, &c) in h.counts().iter().enumerate() {
        let j = (h.delay_of(i) as f64 / rep_period_ps).round() as i64;
        if j == 0 {
            central += c;
        } else if orders.contains(&j) {
            side_total += c;
        }
    }
    if side_total == 0 {
        return Err(Error::ZeroFlux(
            "no counts in the side peaks; cannot normalize".into(),
        ));
    }
    let mean = side_total as f64 / n_side_peaks as f64;
    let n = central as f64 / mean;
    let poisson_sigma = if central > 0 {
        n * (1.0 / central as f64 + 1.0 / side_total as f64).sqrt()
    } else {
        1.0 / mean
    };
    Ok(NormalizedCoincidence {
        n,
        poisson_sigma,
        central,
        side_total,
        side_peaks: n_side_peaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::histogram::cross_correlate;
    use crate::cascade::stream::EventStream;

    #[test]
    fn orders_alternate() {
        assert_eq!(side_peak_orders(5), vec![1, -1, 2, -2, 3]);
    }

    fn comb(offset: i64, period: i64, n: i64) -> Vec<i64> {
        (0..n).map(|k| k * period + offset).collect()
    }

    #[test]
    fn regular_combs_give_unity() {
        // one click per pulse on both channels: every peak has the same area
        let a = EventStream::new(0, comb(0, 5000, 200)).unwrap();
        let b = EventStream::new(1, comb(300, 5000, 200)).unwrap();
        let h = cross_correlate(&a, &b, 100, 30_000).unwrap();
        let n = integrate_and_normalize(&h, 5000.0, 4).unwrap();
        // peaks ±1, ±2 hold 199 and 198 pairs, central 200
        assert_eq!(n.central, 200);
        assert_eq!(n.side_total, 2 * 199 + 2 * 198);
        assert!((n.n - 200.0 / 198.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_window_and_few_peaks() {
        let h = Histogram::new(128, 128 * 40).unwrap();
        assert!(matches!(integrate_and_normalize(&h, 5000.0, 2), Err(Error::Window(_))));
        let h = Histogram::new(128, 128 * 440).unwrap();
        assert!(matches!(integrate_and_normalize(&h, 5000.0, 1), Err(Error::Window(_))));
        assert!(matches!(integrate_and_normalize(&h, 5000.0, 10), Err(Error::ZeroFlux(_))));
    }

    #[test]
    fn odd_count_uses_positive_extra_peak() {
        let a = EventStream::new(0, vec![0]).unwrap();
        let b = EventStream::new(1, vec![-10_000, -5_000, 0, 5_000, 10_000, 15_000]).unwrap();
        let h = cross_correlate(&a, &b, 100, 20_000).unwrap();
        let n = integrate_and_normalize(&h, 5000.0, 3).unwrap();
        // orders 1, −1, 2 are counted; −2 and 3 are not
        assert_eq!(n.side_total, 3);
        assert_eq!(n.central, 1);
        assert!((n.n - 1.0).abs() < 1e-12);
    }
}
