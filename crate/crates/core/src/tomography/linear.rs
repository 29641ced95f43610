//! Linear (Stokes-parameter) inversion and the physical seed for the
//! likelihood search.

use super::counts::TomoCounts;
use super::params::TParams;
use crate::error::{Error, Result};
use crate::polarization::density::DensityMatrix4;
use crate::polarization::linalg::{cholesky4, eig_hermitian4, CMat2, CMat4, C64};
use crate::polarization::state::Basis;

/// Two-photon Stokes parameters `T_ij = ⟨σ_i ⊗ σ_j⟩`, with index 0 the
/// identity and 1, 2, 3 the Pauli operators of the circular, rectilinear and
/// diagonal bases.
pub fn stokes_parameters(c: &TomoCounts) -> Result<[[f64; 4]; 4]> {
    let mut t = [[0.0; 4]; 4];
    t[0][0] = 1.0;
    for (i, bi) in Basis::ALL.iter().enumerate() {
        for (j, bj) in Basis::ALL.iter().enumerate() {
            let q = c.quadruple(*bi, *bj);
            let s: f64 = q.iter().sum();
            if !(s > 0.0) {
                return Err(Error::ZeroFlux(format!(
                    "basis pair {} × {} has no counts",
                    bi.label(),
                    bj.label()
                )));
            }
            let p = q.map(|x| x / s);
            t[i + 1][j + 1] = p[0] - p[1] - p[2] + p[3];
            // single-photon terms are averaged over the partner's bases
            t[i + 1][0] += (p[0] + p[1] - p[2] - p[3]) / 3.0;
            t[0][j + 1] += (p[0] - p[1] + p[2] - p[3]) / 3.0;
        }
    }
    Ok(t)
}

fn paulis() -> [CMat2; 4] {
    [
        CMat2::identity(),
        Basis::Circular.pauli(),
        Basis::Rectilinear.pauli(),
        Basis::Diagonal.pauli(),
    ]
}

/// `ρ = ¼ Σ T_ij σ_i ⊗ σ_j`. Hermitian with unit trace, but not necessarily
/// positive.
pub fn linear_inversion(c: &TomoCounts) -> Result<CMat4> {
    let t = stokes_parameters(c)?;
    let s = paulis();
    let mut m = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m = m + s[i].kron(&s[j]) * (t[i][j] / 4.0);
        }
    }
    Ok(m.hermitian_part())
}

/// Nearest-by-spectrum physical state: negative eigenvalues clipped, trace
/// renormalized. A matrix with no positive eigenvalue maps to I/4.
pub fn physical_projection(m: &CMat4) -> Result<DensityMatrix4> {
    let e = eig_hermitian4(m)?;
    let tr: f64 = e.values.iter().map(|x| x.max(0.0)).sum();
    if !(tr > 0.0) {
        return Ok(DensityMatrix4::maximally_mixed());
    }
    let p = e.reconstruct_with(|x| x.max(0.0) / tr);
    Ok(DensityMatrix4::new_unchecked(p.hermitian_part()))
}

/// Weight of I/4 mixed into the seed so that it has full rank.
pub const SEED_MIXING: f64 = 1e-6;

fn reversal() -> CMat4 {
    let mut j = CMat4::zeros();
    for k in 0..4 {
        j[(k, 3 - k)] = C64::new(1.0, 0.0);
    }
    j
}

/// Lower-triangular `T` with `T†T = ρ'`, where `ρ'` is `ρ` mixed with a
/// fraction [`SEED_MIXING`] of I/4. With `J` the index reversal,
/// `JρJ = L L†` (Cholesky) gives `T = J L† J`.
pub fn seed_params(rho: &DensityMatrix4) -> Result<TParams> {
    let mixed = *rho.matrix() * (1.0 - SEED_MIXING) + CMat4::identity() * (SEED_MIXING / 4.0);
    let j = reversal();
    let l = cholesky4(&(j * mixed * j).hermitian_part())?;
    Ok(TParams::from_matrix(&(j * l.dagger() * j)))
}
