//! Two-photon polarization density matrices.
//!
//! The first tensor factor is the XX photon, the second the X photon; rows
//! and columns are ordered RR, RL, LR, LL.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::linalg::{eig_hermitian4, CMat2, CMat4, Eigen4, C64, ZERO};
use super::state::{product, MeasurementSetting, Pol};
use crate::error::{Error, Result};

pub const BASIS_ORDER: &str = "RR,RL,LR,LL";

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    m: CMat4,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMat4) -> Result<Self> {
        let herr = m.hermiticity_error();
        if !(herr <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(herr));
        }
        let tr = m.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = eig_hermitian4(&m)?.values[3];
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityMatrix4 { m })
    }

    /// For matrices that are density matrices by construction.
    pub(crate) fn new_unchecked(m: CMat4) -> Self {
        DensityMatrix4 { m }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn maximally_mixed() -> Self {
        Self::new_unchecked(CMat4::identity() * 0.25)
    }

    pub fn from_pure(v: &[C64; 4]) -> Result<Self> {
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if !((n2 - 1.0).abs() <= 1e-12) {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self::new_unchecked(CMat4::outer(v, v)))
    }

    pub fn eigen(&self) -> Eigen4 {
        eig_hermitian4(&self.m).expect("density matrix is Hermitian")
    }

    pub fn purity(&self) -> f64 {
        self.m.trace_product(&self.m).re
    }

    /// `Tr[ρ (P_xx ⊗ P_x)]`
    pub fn coincidence_probability(&self, s: &MeasurementSetting) -> f64 {
        self.m.expectation(&s.product_vector()).re
    }

    /// Probability of each of the four outcomes (a,b), (a,b⊥), (a⊥,b),
    /// (a⊥,b⊥) of a setting with its orthogonal complements.
    pub fn outcome_probabilities(&self, s: &MeasurementSetting) -> [f64; 4] {
        let a = s.proj_xx;
        let b = s.proj_x;
        let ao = a.orthogonal();
        let bo = b.orthogonal();
        [
            self.m.expectation(&product(&a, &b)).re,
            self.m.expectation(&product(&a, &bo)).re,
            self.m.expectation(&product(&ao, &b)).re,
            self.m.expectation(&product(&ao, &bo)).re,
        ]
    }

    /// `⟨Ψ|ρ|Ψ⟩` with `|Ψ⟩ = (|LR⟩+|RL⟩)/√2`.
    pub fn fidelity_to_bell(&self) -> f64 {
        self.m.expectation(&bell_psi_vector()).re
    }

    /// `⟨σ_a ⊗ σ_b⟩`
    pub fn correlation(&self, a: &CMat2, b: &CMat2) -> f64 {
        self.m.trace_product(&a.kron(b)).re
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DensityMatrixDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: DensityMatrixDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

/// Serialized form: real and imaginary parts as 4×4 arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixDoc {
    pub basis_order: String,
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
}

impl From<&DensityMatrix4> for DensityMatrixDoc {
    fn from(rho: &DensityMatrix4) -> Self {
        let mut re = [[0.0; 4]; 4];
        let mut im = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                re[i][j] = rho.m[(i, j)].re;
                im[i][j] = rho.m[(i, j)].im;
            }
        }
        DensityMatrixDoc {
            basis_order: BASIS_ORDER.to_string(),
            re,
            im,
        }
    }
}

impl TryFrom<DensityMatrixDoc> for DensityMatrix4 {
    type Error = Error;
    fn try_from(doc: DensityMatrixDoc) -> Result<Self> {
        if doc.basis_order.replace(' ', "") != BASIS_ORDER {
            return Err(Error::InvalidInput(format!(
                "basis_order must be {BASIS_ORDER:?}, got {:?}",
                doc.basis_order
            )));
        }
        let mut m = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = C64::new(doc.re[i][j], doc.im[i][j]);
            }
        }
        DensityMatrix4::new(m)
    }
}

pub(crate) fn bell_psi_vector() -> [C64; 4] {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [ZERO, h, h, ZERO]
}

/// `|Ψ⟩⟨Ψ|` for `|Ψ⟩ = (|LR⟩+|RL⟩)/√2 = (|HH⟩+|VV⟩)/√2`.
pub fn bell_psi() -> DensityMatrix4 {
    let v = bell_psi_vector();
    DensityMatrix4::new_unchecked(CMat4::outer(&v, &v))
}

/// Bell-diagonal state with the given co/cross visibilities in the three
/// analyzer bases:
/// `ρ = (I⊗I − c_circ σz⊗σz + c_hv σx⊗σx + c_da σy⊗σy)/4`.
pub fn bell_diagonal_from_visibilities(c_circ: f64, c_hv: f64, c_da: f64) -> Result<DensityMatrix4> {
    for (name, c) in [("c_circ", c_circ), ("c_hv", c_hv), ("c_da", c_da)] {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::OutOfRange(format!("{name} = {c} not in [0, 1]")));
        }
    }
    let zz = CMat2::sigma_z().kron(&CMat2::sigma_z());
    let xx = CMat2::sigma_x().kron(&CMat2::sigma_x());
    let yy = CMat2::sigma_y().kron(&CMat2::sigma_y());
    let m = (CMat4::identity() - zz * c_circ + xx * c_hv + yy * c_da) * 0.25;
    let min = eig_hermitian4(&m)?.values[3];
    if min < -PSD_TOL {
        return Err(Error::NotPositive(min));
    }
    Ok(DensityMatrix4::new_unchecked(m))
}

/// `v|Ψ⟩⟨Ψ| + (1−v) I/4`.
pub fn werner(v: f64) -> Result<DensityMatrix4> {
    if !(-1.0 / 3.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(format!("werner weight {v} not in [-1/3, 1]")));
    }
    let m = *bell_psi().matrix() * v + CMat4::identity() * ((1.0 - v) / 4.0);
    Ok(DensityMatrix4::new_unchecked(m))
}

/// Convenience for the expected outcome of a labelled analyzer pair.
pub fn coincidence_probability(rho: &DensityMatrix4, s: &MeasurementSetting) -> f64 {
    rho.coincidence_probability(s)
}

pub fn fidelity_to_bell(rho: &DensityMatrix4) -> f64 {
    rho.fidelity_to_bell()
}

/// Expected `⟨σ_a⊗σ_b⟩` for two analyzer bases.
pub fn basis_correlation(rho: &DensityMatrix4, xx: Pol, x: Pol) -> f64 {
    rho.correlation(&xx.basis().pauli(), &x.basis().pauli())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::state::{PoincareAngle, PolState};

    fn setting(a: Pol, b: Pol) -> MeasurementSetting {
        MeasurementSetting::from_pols(a, b)
    }

    #[test]
    fn bell_linear_form() {
        // (|HH⟩ + |VV⟩)/√2 built from the single-photon states
        let h = Pol::H.state();
        let v = Pol::V.state();
        let hh = product(&h, &h);
        let vv = product(&v, &v);
        let mut psi = [ZERO; 4];
        for k in 0..4 {
            psi[k] = (hh[k] + vv[k]) * FRAC_1_SQRT_2;
        }
        let rho = DensityMatrix4::from_pure(&psi).unwrap();
        assert!(rho.matrix().max_abs_diff(bell_psi().matrix()) < 1e-15);
    }

    #[test]
    fn bell_probabilities() {
        let b = bell_psi();
        assert!(b.coincidence_probability(&setting(Pol::R, Pol::R)).abs() < 1e-15);
        assert!(b.coincidence_probability(&setting(Pol::L, Pol::L)).abs() < 1e-15);
        assert!((b.coincidence_probability(&setting(Pol::L, Pol::R)) - 0.5).abs() < 1e-15);
        assert!((b.coincidence_probability(&setting(Pol::H, Pol::H)) - 0.5).abs() < 1e-15);
        assert!((b.coincidence_probability(&setting(Pol::D, Pol::D)) - 0.5).abs() < 1e-15);
        assert!(b.coincidence_probability(&setting(Pol::H, Pol::V)).abs() < 1e-15);
        assert!((b.fidelity_to_bell() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_fidelity() {
        assert!((DensityMatrix4::maximally_mixed().fidelity_to_bell() - 0.25).abs() < 1e-15);
        let w0 = werner(0.0).unwrap();
        for a in Pol::ALL {
            for b in Pol::ALL {
                assert!((w0.coincidence_probability(&setting(a, b)) - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bell_diagonal_limits() {
        let b = bell_diagonal_from_visibilities(1.0, 1.0, 1.0).unwrap();
        assert!(b.matrix().max_abs_diff(bell_psi().matrix()) < 1e-15);
        let p = bell_diagonal_from_visibilities(0.87, 0.78, 0.77).unwrap();
        assert!((p.fidelity_to_bell() - 0.855).abs() < 1e-12);
        for v in [0.0, 0.3, 0.8133, 1.0] {
            let w = werner(v).unwrap();
            let bd = bell_diagonal_from_visibilities(v, v, v).unwrap();
            assert!(w.matrix().max_abs_diff(bd.matrix()) < 1e-15);
        }
    }

    #[test]
    fn bell_diagonal_rejects_unphysical() {
        // (1,1,0) has eigenvalue (1 − 1 − 1 + 0)/4 < 0 in the Bell basis
        assert!(matches!(
            bell_diagonal_from_visibilities(1.0, 1.0, 0.0),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            bell_diagonal_from_visibilities(1.2, 0.5, 0.5),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn werner_range() {
        assert!(werner(-0.34).is_err());
        assert!(werner(1.0001).is_err());
        assert!(werner(-1.0 / 3.0).is_ok());
        let w = werner(0.8133).unwrap();
        assert!((w.fidelity_to_bell() - (1.0 + 3.0 * 0.8133) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn werner_closed_form_on_great_circle() {
        let v = 0.62;
        let w = werner(v).unwrap();
        for txx in [0.0, 33.0, 90.0, 200.0] {
            for tx in [0.0, 45.0, 135.0, 300.0] {
                let s = MeasurementSetting::from_polar(txx, tx);
                let closed = (1.0 - v * (txx + tx).to_radians().cos()) / 4.0;
                assert!((w.coincidence_probability(&s) - closed).abs() < 1e-14);
            }
        }
        let rr = w.coincidence_probability(&setting(Pol::R, Pol::R));
        assert!((rr - (1.0 - v) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn outcome_completeness() {
        let rho = bell_diagonal_from_visibilities(0.87, 0.78, 0.77).unwrap();
        let s = MeasurementSetting::new(
            PolState::from_angles(PoincareAngle::new(37.0, 12.0)),
            PolState::from_angles(PoincareAngle::new(101.0, 250.0)),
        );
        let p = rho.outcome_probabilities(&s);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let rho = bell_diagonal_from_visibilities(0.87, 0.78, 0.77).unwrap();
        let text = rho.to_json().unwrap();
        assert!(text.contains("\"basis_order\": \"RR,RL,LR,LL\""));
        let back = DensityMatrix4::from_json(&text).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn json_rejects_wrong_basis_and_invalid_state() {
        let mut doc = DensityMatrixDoc::from(&bell_psi());
        doc.basis_order = "HH,HV,VH,VV".into();
        assert!(DensityMatrix4::try_from(doc.clone()).is_err());
        doc.basis_order = BASIS_ORDER.into();
        doc.re[0][0] += 0.5;
        assert!(matches!(
            DensityMatrix4::try_from(doc),
            Err(Error::InvalidTrace(_))
        ));
    }
}
