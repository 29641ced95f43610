//! Maximum-likelihood reconstruction over physical states.
//!
//! The objective is the Gaussian approximation of the Poisson likelihood,
//! `L(T) = Σ_ν (N_ν p_ν − n_ν)² / (2 N_ν p_ν)` with `p_ν = Tr[ρ(T) P_ν]` and
//! `N_ν` the total of the basis-pair quadruple that contains setting ν.

use super::counts::TomoCounts;
use super::linear::{linear_inversion, physical_projection, seed_params};
use super::optimizer::{bfgs, BfgsOptions};
use super::params::TParams;
use crate::error::Result;
use crate::polarization::density::DensityMatrix4;
use crate::polarization::linalg::{CMat4, C64};
use crate::polarization::state::{MeasurementSetting, Pol};

/// Probabilities below this are clamped inside the objective.
pub const P_FLOOR: f64 = 1e-12;

/// Default relative tolerance on the objective.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default budget of objective evaluations.
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// The 36 projections with their counts and fluxes.
#[derive(Debug, Clone)]
pub struct Likelihood {
    vectors: Vec<[C64; 4]>,
    counts: Vec<f64>,
    flux: Vec<f64>,
}

impl Likelihood {
    pub fn new(c: &TomoCounts) -> Self {
        let mut vectors = Vec::with_capacity(36);
        let mut counts = Vec::with_capacity(36);
        let mut flux = Vec::with_capacity(36);
        for xx in Pol::ALL {
            for x in Pol::ALL {
                vectors.push(MeasurementSetting::from_pols(xx, x).product_vector());
                counts.push(c.get(xx, x));
                flux.push(c.flux(xx.basis(), x.basis()));
            }
        }
        Likelihood {
            vectors,
            counts,
            flux,
        }
    }

    /// `L` for a state.
    pub fn loss_of_state(&self, rho: &DensityMatrix4) -> f64 {
        self.terms(rho.matrix(), 1.0).0
    }

    /// Value and, per setting, `∂L/∂p_ν`.
    fn terms(&self, m: &CMat4, trace: f64) -> (f64, Vec<f64>) {
        let mut total = 0.0;
        let mut dldp = Vec::with_capacity(self.vectors.len());
        for ((v, &n), &nf) in self.vectors.iter().zip(&self.counts).zip(&self.flux) {
            if nf <= 0.0 {
                dldp.push(0.0);
                continue;
            }
            let raw = m.expectation(v).re / trace;
            let p = raw.max(P_FLOOR);
            let mu = nf * p;
            total += (mu - n).powi(2) / (2.0 * mu);
            dldp.push(if raw > P_FLOOR {
                nf / 2.0 - n * n / (2.0 * nf * p * p)
            } else {
                0.0
            });
        }
        (total, dldp)
    }

    pub fn loss(&self, t: &TParams) -> f64 {
        let (m, tr) = t.gram();
        if !(tr > 0.0) {
            return f64::INFINITY;
        }
        self.terms(&m, tr).0
    }

    /// `L` and `∂L/∂t` for the 16 parameters.
    ///
    /// With `G = Σ_ν (∂L/∂p_ν) P_ν`, `ρ = T†T/t` and `G' = G − Tr(Gρ)·I`,
    /// `∂L/∂Re T_ij = 2 Re(T G')_ij / t` and `∂L/∂Im T_ij = 2 Im(T G')_ij / t`.
    pub fn loss_and_gradient(&self, t: &TParams) -> (f64, [f64; 16]) {
        let (m, tr) = t.gram();
        if !(tr > 0.0) {
            return (f64::INFINITY, [0.0; 16]);
        }
        let (value, dldp) = self.terms(&m, tr);
        let mut g = CMat4::zeros();
        for (v, &d) in self.vectors.iter().zip(&dldp) {
            if d != 0.0 {
                g = g + CMat4::outer(v, v) * d;
            }
        }
        let shift = g.trace_product(&m).re / tr;
        let gp = g - CMat4::identity() * shift;
        let tg = t.to_matrix() * gp;
        let mut grad = [0.0; 16];
        for k in 0..4 {
            grad[k] = 2.0 * tg[(k, k)].re / tr;
        }
        for (n, &(i, j)) in super::params::OFF_DIAGONAL.iter().enumerate() {
            grad[4 + 2 * n] = 2.0 * tg[(i, j)].re / tr;
            grad[5 + 2 * n] = 2.0 * tg[(i, j)].im / tr;
        }
        (value, grad)
    }
}

/// Result of a reconstruction.
#[derive(Debug, Clone)]
pub struct MleFit {
    pub rho: DensityMatrix4,
    pub params: TParams,
    pub loss_initial: f64,
    pub loss_final: f64,
    pub grad_norm: f64,
    /// Loss at the seed and after every accepted optimizer step.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Full reconstruction with diagnostics. The search starts from the
/// physically projected linear inversion.
pub fn mle_fit(c: &TomoCounts, tol: f64, max_iter: usize) -> Result<MleFit> {
    let lin = linear_inversion(c)?;
    let seed = seed_params(&physical_projection(&lin)?)?;
    let like = Likelihood::new(c);
    let opts = BfgsOptions {
        tol,
        max_evals: max_iter,
    };
    let r = bfgs(
        |x| {
            let (f, g) = like.loss_and_gradient(&TParams(x.try_into().expect("16 parameters")));
            (f, g.to_vec())
        },
        &seed.0,
        &opts,
    )?;
    let params = TParams(r.x.as_slice().try_into().expect("16 parameters"));
    Ok(MleFit {
        rho: params.rho()?,
        params,
        loss_initial: r.history[0],
        loss_final: r.f,
        grad_norm: r.grad_norm,
        history: r.history,
        evaluations: r.evaluations,
    })
}

/// The maximum-likelihood state.
pub fn mle_reconstruct(c: &TomoCounts, tol: f64, max_iter: usize) -> Result<DensityMatrix4> {
    Ok(mle_fit(c, tol, max_iter)?.rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::{bell_psi, werner};

    #[test]
    fn exact_bell_counts() {
        let c = TomoCounts::expected(&bell_psi(), 1e6);
        let rho = mle_reconstruct(&c, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(rho.fidelity_to_bell() >= 0.9999, "{}", rho.fidelity_to_bell());
    }

    #[test]
    fn isotropic_counts() {
        let c = TomoCounts::from_array([[250.0; 6]; 6]).unwrap();
        let rho = mle_reconstruct(&c, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix4::maximally_mixed().matrix()) < 1e-3);
    }

    #[test]
    fn loss_never_increases() {
        let c = TomoCounts::expected(&werner(0.6).unwrap(), 1e4);
        let fit = mle_fit(&c, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(fit.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(fit.loss_final <= fit.loss_initial);
    }
}
