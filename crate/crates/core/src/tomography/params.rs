//! Cholesky-type parameterization `ρ = T†T / Tr(T†T)` of two-qubit states.

use crate::error::{Error, Result};
use crate::polarization::density::DensityMatrix4;
use crate::polarization::linalg::{CMat4, C64};

/// Strictly-lower positions in parameter order.
pub(crate) const OFF_DIAGONAL: [(usize, usize); 6] = [(1, 0), (2, 1), (3, 2), (2, 0), (3, 1), (3, 0)];

/// 16 reals: the 4 real diagonal entries of a lower-triangular `T`, then the
/// real and imaginary parts of its 6 strictly-lower entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TParams(pub [f64; 16]);

impl TParams {
    pub fn to_matrix(&self) -> CMat4 {
        let t = &self.0;
        let mut m = CMat4::zeros();
        for k in 0..4 {
            m[(k, k)] = C64::new(t[k], 0.0);
        }
        for (n, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
            m[(i, j)] = C64::new(t[4 + 2 * n], t[5 + 2 * n]);
        }
        m
    }

    /// Reads the lower triangle; imaginary parts of the diagonal and the
    /// upper triangle are ignored.
    pub fn from_matrix(m: &CMat4) -> Self {
        let mut t = [0.0; 16];
        for k in 0..4 {
            t[k] = m[(k, k)].re;
        }
        for (n, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
            t[4 + 2 * n] = m[(i, j)].re;
            t[5 + 2 * n] = m[(i, j)].im;
        }
        TParams(t)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// `T†T` and its trace.
    pub(crate) fn gram(&self) -> (CMat4, f64) {
        let t = self.to_matrix();
        let m = (t.dagger() * t).hermitian_part();
        let tr = m.trace().re;
        (m, tr)
    }

    /// The normalized state. Fails only for the all-zero (or non-finite)
    /// parameter vector.
    pub fn rho(&self) -> Result<DensityMatrix4> {
        let (m, tr) = self.gram();
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "T parameters give Tr(T†T) = {tr}; no state"
            )));
        }
        Ok(DensityMatrix4::new_unchecked(m * (1.0 / tr)))
    }
}

/// `T†T / Tr(T†T)`
pub fn rho_of_params(t: &TParams) -> Result<DensityMatrix4> {
    t.rho()
}
