//! Two-qubit state reconstruction from the 36 product projections of the
//! six analyzer states.

pub mod counts;
pub mod linear;
pub mod mle;
pub mod optimizer;
pub mod params;
pub mod report;

pub use counts::TomoCounts;
pub use linear::{linear_inversion, physical_projection, seed_params, stokes_parameters};
pub use mle::{mle_fit, mle_reconstruct, Likelihood, MleFit, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use optimizer::{bfgs, BfgsOptions, BfgsResult};
pub use params::{rho_of_params, TParams};
pub use report::{bootstrap, BootstrapSummary, TomographyReport};
