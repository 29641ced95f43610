//! Entanglement and mixedness measures of two-photon states.

use serde::{Deserialize, Serialize};

use super::density::DensityMatrix4;
use super::linalg::{eig_hermitian4, sqrt_psd, CMat2, CMat4, ZERO};

/// Minimum eigenvalue of the partial transpose over the X photon. A negative
/// value certifies entanglement.
pub fn peres_min_eigenvalue(rho: &DensityMatrix4) -> f64 {
    let pt = rho.matrix().partial_transpose_second();
    eig_hermitian4(&pt)
        .expect("partial transpose of a Hermitian matrix is Hermitian")
        .values[3]
}

/// Wootters concurrence `max(0, λ₁−λ₂−λ₃−λ₄)`.
///
/// With `ρ = Σ|w_k⟩⟨w_k|` from its eigen-decomposition, the λ are the square
/// roots of the eigenvalues of `τ τ†`, where `τ_jk = ⟨w_j|(σy⊗σy)|w_k*⟩`. They
/// coincide with the square roots of the eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
/// Eigenvalues of ρ below `1e-13` are dropped so that rank-deficient states do
/// not pick up square-root noise.
pub fn concurrence(rho: &DensityMatrix4) -> f64 {
    let yy = CMat2::sigma_y().kron(&CMat2::sigma_y());
    let e = rho.eigen();
    let mut w = [[ZERO; 4]; 4];
    for k in 0..4 {
        if e.values[k] > 1e-13 {
            let s = e.values[k].sqrt();
            w[k] = e.vector(k).map(|z| z * s);
        }
    }
    let mut tau = CMat4::zeros();
    for j in 0..4 {
        for k in 0..4 {
            let flipped = yy.mul_vec(&w[k].map(|z| z.conj()));
            tau[(j, k)] = w[j].iter().zip(flipped.iter()).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let r = (tau * tau.dagger()).hermitian_part();
    let ev = eig_hermitian4(&r).expect("hermitian part").values;
    let l = ev.map(|x| x.max(0.0).sqrt());
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

pub fn tangle(rho: &DensityMatrix4) -> f64 {
    concurrence(rho).powi(2)
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation from the tangle, `h((1+√(1−T))/2)`.
pub fn eof_from_tangle(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - t).sqrt()) / 2.0)
}

pub fn eof(rho: &DensityMatrix4) -> f64 {
    eof_from_tangle(tangle(rho))
}

/// Normalized linear entropy `(4/3)(1 − Tr ρ²)`; 0 for pure states and 1 for
/// the maximally mixed state.
pub fn linear_entropy(rho: &DensityMatrix4) -> f64 {
    (4.0 / 3.0) * (1.0 - rho.purity())
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` between two states.
pub fn state_fidelity(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> f64 {
    let r = sqrt_psd(rho.matrix()).expect("density matrices are Hermitian");
    let m = (r * *sigma.matrix() * r).hermitian_part();
    let ev = eig_hermitian4(&m).expect("hermitian part").values;
    ev.iter().map(|x| x.max(0.0).sqrt()).sum::<f64>().powi(2)
}

/// All scalar figures of merit of a reconstructed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub fidelity: f64,
    pub chsh_s: f64,
    pub min_pt_eigenvalue: f64,
    pub concurrence: f64,
    pub tangle: f64,
    pub linear_entropy: f64,
    pub eof: f64,
}

impl StateSummary {
    pub fn of(rho: &DensityMatrix4) -> Self {
        let c = concurrence(rho);
        StateSummary {
            fidelity: rho.fidelity_to_bell(),
            chsh_s: crate::analysis::chsh::chsh_from_state(rho),
            min_pt_eigenvalue: peres_min_eigenvalue(rho),
            concurrence: c,
            tangle: c * c,
            linear_entropy: linear_entropy(rho),
            eof: eof_from_tangle(c * c),
        }
    }

    pub fn to_kv(&self) -> Vec<(String, String)> {
        vec![
            ("fidelity".into(), format!("{}", self.fidelity)),
            ("chsh_s".into(), format!("{}", self.chsh_s)),
            ("min_pt_eigenvalue".into(), format!("{}", self.min_pt_eigenvalue)),
            ("concurrence".into(), format!("{}", self.concurrence)),
            ("tangle".into(), format!("{}", self.tangle)),
            ("linear_entropy".into(), format!("{}", self.linear_entropy)),
            ("eof".into(), format!("{}", self.eof)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::density::{bell_diagonal_from_visibilities, bell_psi, werner};
    use crate::polarization::linalg::C64;

    #[test]
    fn fidelity_between_states() {
        let b = bell_psi();
        assert!((state_fidelity(&b, &b) - 1.0).abs() < 1e-12);
        let w = werner(0.6).unwrap();
        // overlap with a pure state is ⟨ψ|ρ|ψ⟩
        assert!((state_fidelity(&w, &b) - w.fidelity_to_bell()).abs() < 1e-9);
        assert!((state_fidelity(&b, &w) - state_fidelity(&w, &b)).abs() < 1e-9);
        let m = DensityMatrix4::maximally_mixed();
        assert!((state_fidelity(&m, &m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_measures() {
        let b = bell_psi();
        assert!((concurrence(&b) - 1.0).abs() < 1e-12);
        assert!((tangle(&b) - 1.0).abs() < 1e-12);
        assert!((eof(&b) - 1.0).abs() < 1e-9);
        assert!(linear_entropy(&b).abs() < 1e-14);
        assert!((peres_min_eigenvalue(&b) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_measures() {
        let m = DensityMatrix4::maximally_mixed();
        assert_eq!(concurrence(&m), 0.0);
        assert_eq!(eof(&m), 0.0);
        assert!((linear_entropy(&m) - 1.0).abs() < 1e-14);
        assert!((peres_min_eigenvalue(&m) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn werner_closed_forms() {
        for v in [0.0, 0.25, 1.0 / 3.0, 0.5, 0.728, 0.8133, 1.0] {
            let w = werner(v).unwrap();
            assert!((peres_min_eigenvalue(&w) - (1.0 - 3.0 * v) / 4.0).abs() < 1e-9);
            let c = ((3.0 * v - 1.0) / 2.0).max(0.0);
            assert!((concurrence(&w) - c).abs() < 1e-9, "v={v}");
            assert!((linear_entropy(&w) - (1.0 - v * v)).abs() < 1e-12);
        }
    }

    #[test]
    fn measured_visibility_state_partial_transpose() {
        let rho = bell_diagonal_from_visibilities(0.87, 0.78, 0.77).unwrap();
        assert!((peres_min_eigenvalue(&rho) + 0.355).abs() < 1e-12);
    }

    #[test]
    fn eof_of_measured_tangle() {
        // h((1+√0.47)/2), evaluated by hand: 0.6275
        let e = eof_from_tangle(0.53);
        assert!((e - 0.6275).abs() < 5e-4, "{e}");
    }

    #[test]
    fn product_state_has_no_concurrence() {
        let a = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let b = [C64::new(0.8, 0.0), C64::new(0.36, 0.48)];
        let v = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
        let rho = DensityMatrix4::from_pure(&v).unwrap();
        assert!(concurrence(&rho) < 1e-9);
        assert!(peres_min_eigenvalue(&rho) > -1e-12);
    }

    #[test]
    fn pure_state_concurrence_is_twice_determinant() {
        // C(|ψ⟩) = 2|ad − bc| for |ψ⟩ = a|RR⟩+b|RL⟩+c|LR⟩+d|LL⟩
        let v = [
            C64::new(0.5, 0.1),
            C64::new(0.3, -0.2),
            C64::new(0.1, 0.4),
            C64::new(-0.4, 0.2),
        ];
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v = v.map(|z| z / n);
        let rho = DensityMatrix4::from_pure(&v).unwrap();
        let expected = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
        assert!((concurrence(&rho) - expected).abs() < 1e-9);
    }

    #[test]
    fn eof_monotone_in_concurrence() {
        let mut prev = -1.0;
        for k in 0..=200 {
            let c = k as f64 / 200.0;
            let e = eof_from_tangle(c * c);
            assert!(e >= prev - 1e-15);
            prev = e;
        }
    }
}
