//! Polarization-entangled photon pairs from a quantum-dot biexciton–exciton
//! cascade.
//!
//! - [`polarization`]: two-qubit state algebra and entanglement measures.
//! - [`cascade`]: source model, ensemble state, and a time-tagged event
//!   generator with detector imperfections.
//! - [`analysis`]: coincidence histograms, side-peak normalization,
//!   visibilities, fidelity, CHSH, and fringe/decay fits.
//! - [`tomography`]: 36-setting linear inversion and maximum-likelihood
//!   reconstruction.

pub mod analysis;
pub mod cascade;
pub mod error;
pub mod kv;
pub mod polarization;
pub mod tomography;

pub use error::{Error, Result};
