//! From click streams to correlation figures: coincidence histograms,
//! side-peak normalization, visibilities, fidelity, CHSH, and curve fits.

pub mod chsh;
pub mod fit;
pub mod histogram;
pub mod normalize;
pub mod visibility;

use std::fmt::Write as _;

pub use chsh::{
    chsh_from_outcomes, chsh_from_state, chsh_s, chsh_settings, correlation_e,
    correlation_e_values, ChshResult, CHSH_PAIRS,
};
pub use fit::{fit_exponential, fit_fringe, ExpFit, FringeFit};
pub use histogram::{cross_correlate, Histogram, DEFAULT_BIN_PS};
pub use normalize::{integrate_and_normalize, NormalizedCoincidence, DEFAULT_SIDE_PEAKS};
pub use visibility::{
    analyze_setting, basis_visibility, fidelity_from_visibilities, setting_histograms,
    signed_visibility, visibility, visibility_report, visibility_sigma, BasisVisibility, CorrelationSettingResult,
    HistogramOptions, VisibilityReport,
};

/// `theta_deg,n,sigma` with a header row.
pub fn fringe_csv(points: &[(f64, NormalizedCoincidence)]) -> String {
    let mut s = String::from("theta_deg,n,sigma\n");
    for (t, n) in points {
        let _ = writeln!(s, "{t},{},{}", n.n, n.poisson_sigma);
    }
    s
}
