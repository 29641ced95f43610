//! Two-photon polarization algebra: single-photon states, density matrices,
//! their standard constructors, and entanglement measures.

pub mod density;
pub mod linalg;
pub mod measures;
pub mod state;

pub use density::{
    basis_correlation, bell_diagonal_from_visibilities, bell_psi, coincidence_probability,
    fidelity_to_bell, werner, DensityMatrix4, DensityMatrixDoc, BASIS_ORDER,
};
pub use linalg::{eig_hermitian4, CMat2, CMat4, Eigen4, C64};
pub use measures::{
    binary_entropy, concurrence, eof, eof_from_tangle, linear_entropy, peres_min_eigenvalue,
    state_fidelity, tangle, StateSummary,
};
pub use state::{ArmLabel, Basis, MeasurementSetting, PoincareAngle, Pol, PolState, SettingLabel};

/// `cos(θ/2)|R⟩ + e^{iφ} sin(θ/2)|L⟩`
pub fn state_from_angles(a: PoincareAngle) -> PolState {
    PolState::from_angles(a)
}
