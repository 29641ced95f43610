//! Correlation visibilities and the Bell-state fidelity estimate.

use serde::{Deserialize, Serialize};

use super::histogram::{cross_correlate, Histogram};
use super::normalize::{integrate_and_normalize, NormalizedCoincidence, DEFAULT_SIDE_PEAKS};
use crate::cascade::stream::{EventStream, CH_X_CO, CH_X_CROSS, CH_XX};
use crate::error::{Error, Result};
use crate::polarization::state::{Basis, SettingLabel};

/// `C = |n∥ − n⊥| / (n∥ + n⊥)`
pub fn visibility(n_par: f64, n_perp: f64) -> Result<f64> {
    Ok(signed_visibility(n_par, n_perp)?.abs())
}

/// `(n₁ − n₂)/(n₁ + n₂)` without the absolute value.
pub fn signed_visibility(n1: f64, n2: f64) -> Result<f64> {
    let s = n1 + n2;
    if !(s > 0.0) {
        return Err(Error::ZeroFlux(format!(
            "visibility needs n_par + n_perp > 0 (got {n1}, {n2})"
        )));
    }
    Ok((n1 - n2) / s)
}

/// Propagated error of [`signed_visibility`] for independent errors.
pub fn visibility_sigma(n1: f64, s1: f64, n2: f64, s2: f64) -> f64 {
    let s = n1 + n2;
    2.0 * ((n2 * s1).powi(2) + (n1 * s2).powi(2)).sqrt() / (s * s)
}

/// `f = (1 + C_R/L + C_H/V + C_D/A) / 4`
pub fn fidelity_from_visibilities(c_circ: f64, c_hv: f64, c_da: f64) -> f64 {
    (1.0 + c_circ + c_hv + c_da) / 4.0
}

/// Histogram binning and normalization options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramOptions {
    pub bin_width_ps: i64,
    pub window_ps: i64,
    pub rep_period_ps: f64,
    pub side_peaks: usize,
}

impl HistogramOptions {
    /// The smallest window holding `side_peaks` satellites, rounded up to a
    /// whole number of bins.
    pub fn new(bin_width_ps: i64, rep_period_ps: f64, side_peaks: usize) -> Self {
        let max_order = side_peaks.div_ceil(2) as f64;
        let need = (max_order + 0.5) * rep_period_ps - 0.5 * bin_width_ps as f64;
        let bins = (need / bin_width_ps as f64).ceil().max(0.0) as i64;
        HistogramOptions {
            bin_width_ps,
            window_ps: bins * bin_width_ps,
            rep_period_ps,
            side_peaks,
        }
    }

    pub fn with_window(mut self, window_ps: i64) -> Self {
        self.window_ps = window_ps;
        self
    }
}

impl Default for HistogramOptions {
    fn default() -> Self {
        Self::new(super::histogram::DEFAULT_BIN_PS, 5000.0, DEFAULT_SIDE_PEAKS)
    }
}

/// Both X-channel results of one analyzer setting. `n_parallel` comes from the
/// detector behind the analyzer's transmitted port, `n_perp` from the
/// orthogonal port; both are referenced to the same XX detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSettingResult {
    pub label: SettingLabel,
    pub n_parallel: NormalizedCoincidence,
    pub n_perp: NormalizedCoincidence,
}

impl CorrelationSettingResult {
    pub fn visibility(&self) -> Result<f64> {
        visibility(self.n_parallel.n, self.n_perp.n)
    }

    /// Estimate of `⟨σ⊗σ⟩` in the setting's basis pair, with its error. Only
    /// defined for lettered settings.
    pub fn basis_correlation(&self) -> Result<(f64, f64)> {
        let (xx, x) = self.label.as_pols().ok_or_else(|| {
            Error::InvalidInput(format!("setting {} is not a basis setting", self.label))
        })?;
        let (a, b) = (self.n_parallel, self.n_perp);
        let v = signed_visibility(a.n, b.n)?;
        let sign = xx.sign() * x.sign();
        Ok((sign * v, visibility_sigma(a.n, a.poisson_sigma, b.n, b.poisson_sigma)))
    }
}

/// Histograms of the XX channel against both X channels (co port first).
pub fn setting_histograms(
    streams: &[EventStream; 3],
    opts: &HistogramOptions,
) -> Result<[Histogram; 2]> {
    let xx = &streams[CH_XX as usize];
    Ok([
        cross_correlate(xx, &streams[CH_X_CO as usize], opts.bin_width_ps, opts.window_ps)?,
        cross_correlate(xx, &streams[CH_X_CROSS as usize], opts.bin_width_ps, opts.window_ps)?,
    ])
}

/// Normalized coincidences of both X channels of one setting.
pub fn analyze_setting(
    label: SettingLabel,
    streams: &[EventStream; 3],
    opts: &HistogramOptions,
) -> Result<(CorrelationSettingResult, [Histogram; 2])> {
    let hists = setting_histograms(streams, opts)?;
    let n_parallel = integrate_and_normalize(&hists[0], opts.rep_period_ps, opts.side_peaks)?;
    let n_perp = integrate_and_normalize(&hists[1], opts.rep_period_ps, opts.side_peaks)?;
    Ok((
        CorrelationSettingResult {
            label,
            n_parallel,
            n_perp,
        },
        hists,
    ))
}

/// Visibility of one basis with its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisVisibility {
    pub visibility: f64,
    pub sigma: f64,
    pub settings: usize,
}

/// Visibilities of the three bases and the implied fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub circular: BasisVisibility,
    pub rectilinear: BasisVisibility,
    pub diagonal: BasisVisibility,
    pub fidelity: f64,
    pub fidelity_sigma: f64,
}

impl VisibilityReport {
    pub fn get(&self, b: Basis) -> &BasisVisibility {
        match b {
            Basis::Circular => &self.circular,
            Basis::Rectilinear => &self.rectilinear,
            Basis::Diagonal => &self.diagonal,
        }
    }
}

/// Averages the per-setting basis correlations of every lettered setting
/// whose two arms share a basis. The visibility of a basis is the magnitude
/// of that average, so noise on uncorrelated data does not accumulate a bias.
pub fn basis_visibility(results: &[CorrelationSettingResult], basis: Basis) -> Result<BasisVisibility> {
    let mut sum = 0.0;
    let mut var = 0.0;
    let mut k = 0usize;
    for r in results {
        if let Some((xx, x)) = r.label.as_pols() {
            if xx.basis() == basis && x.basis() == basis {
                let (e, s) = r.basis_correlation()?;
                sum += e;
                var += s * s;
                k += 1;
            }
        }
    }
    if k == 0 {
        let (p, _) = basis.states();
        return Err(Error::MissingSetting(format!(
            "no setting in the {} basis (e.g. {p}{p})",
            basis.label()
        )));
    }
    Ok(BasisVisibility {
        visibility: (sum / k as f64).abs(),
        sigma: var.sqrt() / k as f64,
        settings: k,
    })
}

pub fn visibility_report(results: &[CorrelationSettingResult]) -> Result<VisibilityReport> {
    let circular = basis_visibility(results, Basis::Circular)?;
    let rectilinear = basis_visibility(results, Basis::Rectilinear)?;
    let diagonal = basis_visibility(results, Basis::Diagonal)?;
    let fidelity = fidelity_from_visibilities(
        circular.visibility,
        rectilinear.visibility,
        diagonal.visibility,
    );
    let fidelity_sigma =
        (circular.sigma.powi(2) + rectilinear.sigma.powi(2) + diagonal.sigma.powi(2)).sqrt() / 4.0;
    Ok(VisibilityReport {
        circular,
        rectilinear,
        diagonal,
        fidelity,
        fidelity_sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_visibilities() {
        assert_eq!(visibility(2.0, 0.0).unwrap(), 1.0);
        assert_eq!(visibility(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(visibility(0.5, 1.5).unwrap(), visibility(1.5, 0.5).unwrap());
        assert!(matches!(visibility(0.0, 0.0), Err(Error::ZeroFlux(_))));
    }

    #[test]
    fn fidelity_formula() {
        assert_eq!(fidelity_from_visibilities(1.0, 1.0, 1.0), 1.0);
        assert_eq!(fidelity_from_visibilities(0.0, 0.0, 0.0), 0.25);
        assert!((fidelity_from_visibilities(0.87, 0.78, 0.77) - 0.855).abs() < 1e-12);
    }

    #[test]
    fn sigma_matches_finite_difference() {
        let (n1, n2, s1, s2) = (1.3, 0.4, 0.05, 0.02);
        let h = 1e-6;
        let d1 = (signed_visibility(n1 + h, n2).unwrap() - signed_visibility(n1 - h, n2).unwrap()) / (2.0 * h);
        let d2 = (signed_visibility(n1, n2 + h).unwrap() - signed_visibility(n1, n2 - h).unwrap()) / (2.0 * h);
        let expect = ((d1 * s1).powi(2) + (d2 * s2).powi(2)).sqrt();
        assert!((visibility_sigma(n1, s1, n2, s2) - expect).abs() < 1e-9);
    }

    #[test]
    fn default_window_holds_ten_side_peaks() {
        let o = HistogramOptions::default();
        assert_eq!(o.window_ps % 128, 0);
        let h = Histogram::new(o.bin_width_ps, o.window_ps).unwrap();
        // empty but geometrically valid: only the flux check fails
        assert!(matches!(
            integrate_and_normalize(&h, o.rep_period_ps, o.side_peaks),
            Err(Error::ZeroFlux(_))
        ));
        let smaller = Histogram::new(o.bin_width_ps, o.window_ps - 128).unwrap();
        assert!(matches!(
            integrate_and_normalize(&smaller, o.rep_period_ps, o.side_peaks),
            Err(Error::Window(_))
        ));
    }

    #[test]
    fn missing_basis_is_reported() {
        let err = visibility_report(&[]).unwrap_err();
        assert!(matches!(err, Error::MissingSetting(_)));
    }
}
