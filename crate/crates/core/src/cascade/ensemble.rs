//! Time-integrated two-photon state of the cascade and the exciton decay
//! curves.

use super::params::CascadeParams;
use crate::error::{Error, Result};
use crate::polarization::density::DensityMatrix4;
use crate::polarization::linalg::{CMat4, C64};
use crate::polarization::state::{product, Pol};
use crate::polarization::bell_diagonal_from_visibilities;

/// `(|HH⟩, |VV⟩)` in the circular product basis.
pub(crate) fn hh_vv() -> ([C64; 4], [C64; 4]) {
    let h = Pol::H.state();
    let v = Pol::V.state();
    (product(&h, &h), product(&v, &v))
}

/// Complex HH–VV coherence `⟨HH|ρ|VV⟩* = ⟨VV|ρ|HH⟩` of the ensemble state,
/// `(1/2)·Γ₁/(Γ₁+Γs−i s/ħ)`.
pub fn hh_vv_coherence(p: &CascadeParams) -> C64 {
    let denom = C64::new(p.gamma1 + p.gamma_s, -p.fss_omega());
    C64::new(0.5 * p.gamma1, 0.0) / denom
}

/// Weight of the undepolarized part, `Γ₁/(Γ₁+Γs)`.
pub fn coherent_weight(p: &CascadeParams) -> f64 {
    p.gamma1 / (p.gamma1 + p.gamma_s)
}

/// Two-photon state averaged over the exciton dwell time:
/// `∫ Γ₁e^{−Γ₁τ}[e^{−Γsτ}|Ψ(τ)⟩⟨Ψ(τ)| + (1−e^{−Γsτ}) I/4] dτ` with
/// `|Ψ(τ)⟩ = (|HH⟩ + e^{isτ/ħ}|VV⟩)/√2`.
pub fn ensemble_state(p: &CascadeParams) -> Result<DensityMatrix4> {
    if !(p.gamma1 > 0.0) || !(p.gamma_s >= 0.0) || !p.fss_uev.is_finite() {
        return Err(Error::OutOfRange(format!(
            "ensemble state needs gamma1 > 0 and gamma_s ≥ 0 (got {}, {})",
            p.gamma1, p.gamma_s
        )));
    }
    let w = coherent_weight(p);
    let c = hh_vv_coherence(p);
    let (hh, vv) = hh_vv();
    let m = (CMat4::outer(&hh, &hh) + CMat4::outer(&vv, &vv)) * (0.5 * w)
        + CMat4::outer(&vv, &hh).scale(c)
        + CMat4::outer(&hh, &vv).scale(c.conj())
        + CMat4::identity() * ((1.0 - w) / 4.0);
    Ok(DensityMatrix4::new_unchecked(m.hermitian_part()))
}

/// The state the simulator emits: the visibility override when set,
/// otherwise [`ensemble_state`].
pub fn source_state(p: &CascadeParams) -> Result<DensityMatrix4> {
    match p.visibility_override {
        Some([a, b, c]) => bell_diagonal_from_visibilities(a, b, c),
        None => ensemble_state(p),
    }
}

/// Normalized exciton population after pulsed excitation, `e^{−Γ₁t}`.
pub fn pl_decay(p: &CascadeParams, t_ns: f64) -> f64 {
    (-p.gamma1 * t_ns).exp()
}

/// Degree of circular polarization after circular excitation, `e^{−Γs t}`.
pub fn dcp_curve(p: &CascadeParams, t_ns: f64) -> f64 {
    (-p.gamma_s * t_ns).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::{bell_psi, werner};

    #[test]
    fn reference_dot_is_werner() {
        let p = CascadeParams::default();
        let v = coherent_weight(&p);
        assert!((v - 0.728).abs() < 5e-4, "{v}");
        let rho = ensemble_state(&p).unwrap();
        assert!(rho.matrix().max_abs_diff(werner(v).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn no_depolarization_is_bell() {
        for g1 in [0.5, 1.0 / 0.56, 7.0] {
            let p = CascadeParams {
                gamma1: g1,
                gamma_s: 0.0,
                ..CascadeParams::default()
            };
            let rho = ensemble_state(&p).unwrap();
            assert!(rho.matrix().max_abs_diff(bell_psi().matrix()) < 1e-15);
        }
    }

    #[test]
    fn fss_coherence_magnitude() {
        let p = CascadeParams {
            gamma_s: 0.0,
            fss_uev: 10.0,
            ..CascadeParams::default()
        };
        let w = p.fss_uev / HBAR;
        let expected = 0.5 * p.gamma1 / (p.gamma1.powi(2) + w * w).sqrt();
        let rho = ensemble_state(&p).unwrap();
        let (hh, vv) = hh_vv();
        let elem = rho.matrix().scale(C64::new(1.0, 0.0)).mul_vec(&hh);
        let coh: C64 = vv.iter().zip(elem.iter()).map(|(a, b)| a.conj() * b).sum();
        assert!((coh.norm() - expected).abs() < 1e-14);
        DensityMatrix4::new(*rho.matrix()).unwrap();
    }

    const HBAR: f64 = super::super::params::HBAR_UEV_NS;

    #[test]
    fn decay_curves() {
        let p = CascadeParams::default();
        assert_eq!(dcp_curve(&p, 0.0), 1.0);
        assert!((pl_decay(&p, 0.560) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((dcp_curve(&p, 1.5) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_radiative_rate() {
        let p = CascadeParams {
            gamma1: 0.0,
            ..CascadeParams::default()
        };
        assert!(ensemble_state(&p).is_err());
    }
}
