//! Start–all-stops coincidence histograms between two click streams.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cascade::stream::EventStream;
use crate::error::{Error, Result};

/// Default time bin, ps.
pub const DEFAULT_BIN_PS: i64 = 128;

/// Delay histogram with bins centred on integer multiples of the bin width.
///
/// Bin `k` (for `k ∈ [−m, m]`) collects delays `d` whose ratio `d/width`
/// rounds to `k`, ties rounding away from zero. The window therefore covers
/// `|d| < (m + ½)·width` and mirror-imaged delays land in mirror-imaged bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bin_width_ps: i64,
    half_bins: usize,
    counts: Vec<u64>,
}

/// `round(d / w)` with ties away from zero, in exact integer arithmetic.
fn round_div(d: i64, w: i64) -> i64 {
    if d >= 0 {
        (2 * d + w) / (2 * w)
    } else {
        -((-2 * d + w) / (2 * w))
    }
}

impl Histogram {
    /// `window_ps` is the half-width of the delay range and must be a
    /// multiple of the bin width.
    pub fn new(bin_width_ps: i64, window_ps: i64) -> Result<Self> {
        if bin_width_ps <= 0 {
            return Err(Error::Window(format!("bin width {bin_width_ps} ps must be > 0")));
        }
        if window_ps < 0 || window_ps % bin_width_ps != 0 {
            return Err(Error::Window(format!(
                "window {window_ps} ps is not a nonnegative multiple of the bin width {bin_width_ps} ps"
            )));
        }
        let half_bins = (window_ps / bin_width_ps) as usize;
        Ok(Histogram {
            bin_width_ps,
            half_bins,
            counts: vec![0; 2 * half_bins + 1],
        })
    }

    pub fn bin_width_ps(&self) -> i64 {
        self.bin_width_ps
    }

    /// Half-width of the delay range (centre of the outermost bin).
    pub fn range_ps(&self) -> i64 {
        self.half_bins as i64 * self.bin_width_ps
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Centre delay of bin `i`.
    pub fn delay_of(&self, i: usize) -> i64 {
        (i as i64 - self.half_bins as i64) * self.bin_width_ps
    }

    pub fn bin_of(&self, delay_ps: i64) -> Option<usize> {
        let k = round_div(delay_ps, self.bin_width_ps);
        let m = self.half_bins as i64;
        (-m..=m).contains(&k).then(|| (k + m) as usize)
    }

    /// Count at the bin containing `delay_ps`, zero outside the window.
    pub fn at_delay(&self, delay_ps: i64) -> u64 {
        self.bin_of(delay_ps).map_or(0, |i| self.counts[i])
    }

    /// Bin-wise sum of two histograms with the same binning.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.bin_width_ps != other.bin_width_ps || self.half_bins != other.half_bins {
            return Err(Error::Window("cannot merge histograms with different binning".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// `delay_ps,counts` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("delay_ps,counts\n");
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(s, "{},{}", self.delay_of(i), c);
        }
        s
    }

    /// Adds every `(t_a, t_b)` pair whose delay `t_b − t_a` is in range.
    fn accumulate(&mut self, a: &[i64], b: &[i64]) {
        let reach = (self.half_bins as i64 + 1) * self.bin_width_ps;
        let mut start = b.partition_point(|&t| t < a.first().copied().unwrap_or(0) - reach);
        for &ta in a {
            while start < b.len() && b[start] < ta - reach {
                start += 1;
            }
            for &tb in &b[start..] {
                if tb > ta + reach {
                    break;
                }
                if let Some(i) = self.bin_of(tb - ta) {
                    self.counts[i] += 1;
                }
            }
        }
    }
}

const SHARD: usize = 1 << 15;

/// Histogram of delays `t_b − t_a` over all pairs within the window.
/// Positive delays mean the `b` click came after the `a` click; with the XX
/// detector as `a` and an X detector as `b` the cascade peak sits at positive
/// delay.
pub fn cross_correlate(
    a: &EventStream,
    b: &EventStream,
    bin_width_ps: i64,
    window_ps: i64,
) -> Result<Histogram> {
    for s in [a, b] {
        if let Some(i) = s.timestamps().windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Unsorted {
                channel: s.channel(),
                index: i + 1,
            });
        }
    }
    let empty = Histogram::new(bin_width_ps, window_ps)?;
    let ta = a.timestamps();
    let tb = b.timestamps();
    let h = ta
        .par_chunks(SHARD)
        .map(|chunk| {
            let mut h = empty.clone();
            h.accumulate(chunk, tb);
            h
        })
        .reduce(
            || empty.clone(),
            |mut x, y| {
                x.merge(&y).expect("same binning");
                x
            },
        );
    Ok(h)
}
