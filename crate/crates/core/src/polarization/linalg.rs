//! Fixed-size complex matrices for one and two polarization qubits, and a
//! cyclic Jacobi eigensolver for 4×4 Hermitian matrices.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2(pub [[C64; 2]; 2]);

impl CMat2 {
    pub fn identity() -> Self {
        CMat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        CMat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        CMat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        CMat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: [C64; 2], b: [C64; 2]) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i] * b[j].conj();
            }
        }
        CMat2(m)
    }

    /// Kronecker product `self ⊗ other`, first factor on the slow index.
    pub fn kron(&self, other: &CMat2) -> CMat4 {
        let mut m = CMat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[(2 * i + k, 2 * j + l)] = self.0[i][j] * other.0[k][l];
                    }
                }
            }
        }
        m
    }
}

/// Row-major 4×4 complex matrix in the two-photon product basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat4(pub [[C64; 4]; 4]);

impl Index<(usize, usize)> for CMat4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for CMat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for CMat4 {
    type Output = CMat4;
    fn add(self, rhs: CMat4) -> CMat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for CMat4 {
    type Output = CMat4;
    fn sub(self, rhs: CMat4) -> CMat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: CMat4) -> CMat4 {
        let mut m = CMat4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl Mul<f64> for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: f64) -> CMat4 {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl CMat4 {
    pub fn zeros() -> Self {
        CMat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64; 4], b: &[C64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x = x.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &CMat4) -> C64 {
        let mut t = ZERO;
        for i in 0..4 {
            for k in 0..4 {
                t += self.0[i][k] * other.0[k][i];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.0[i][j] * v[j];
            }
        }
        out
    }

    /// `⟨v|self|v⟩`
    pub fn expectation(&self, v: &[C64; 4]) -> C64 {
        let mv = self.mul_vec(v);
        v.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Transpose on the second tensor factor.
    pub fn partial_transpose_second(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[2 * i + l][2 * j + k];
                    }
                }
            }
        }
        m
    }

    /// Largest absolute deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..4 {
            for j in i..4 {
                err = err.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        err
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMat4) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()) * 0.5
    }
}

/// Eigen-decomposition of a Hermitian 4×4 matrix.
#[derive(Debug, Clone, Copy)]
pub struct Eigen4 {
    /// Eigenvalues in descending order.
    pub values: [f64; 4],
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMat4,
}

impl Eigen4 {
    pub fn vector(&self, k: usize) -> [C64; 4] {
        [
            self.vectors[(0, k)],
            self.vectors[(1, k)],
            self.vectors[(2, k)],
            self.vectors[(3, k)],
        ]
    }

    /// `Q f(Λ) Q†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat4 {
        let mut m = CMat4::zeros();
        for k in 0..4 {
            let v = self.vector(k);
            m = m + CMat4::outer(&v, &v) * f(self.values[k]);
        }
        m
    }

    pub fn reconstruct(&self) -> CMat4 {
        self.reconstruct_with(|x| x)
    }
}

const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi eigensolver for a Hermitian 4×4 matrix.
pub fn eig_hermitian4(m: &CMat4) -> Result<Eigen4> {
    let herr = m.hermiticity_error();
    if !(herr <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(herr));
    }
    let mut a = m.hermitian_part();
    let mut v = CMat4::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let mut values = [0.0; 4];
    let mut vectors = CMat4::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = a[(src, src)].re;
        for r in 0..4 {
            vectors[(r, k)] = v[(r, src)];
        }
    }
    Ok(Eigen4 { values, vectors })
}

/// Zero `a[p][q]` with the unitary `J = D·R`, where `D` removes the phase of
/// the off-diagonal element and `R` is a real Jacobi rotation.
fn jacobi_rotate(a: &mut CMat4, v: &mut CMat4, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J restricted to (p, q): [[c, s], [-s·e^{-iα}, c·e^{-iα}]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    // A ← A J (columns p, q)
    for r in 0..4 {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * jpp + arq * jqp;
        a[(r, q)] = arp * jpq + arq * jqq;
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * jpp + vrq * jqp;
        v[(r, q)] = vrp * jpq + vrq * jqq;
    }
    // A ← J† A (rows p, q)
    for col in 0..4 {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = jpp.conj() * apc + jqp.conj() * aqc;
        a[(q, col)] = jpq.conj() * apc + jqq.conj() * aqc;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Lower-triangular `L` with `m = L L†` for a Hermitian positive-definite `m`.
pub fn cholesky4(m: &CMat4) -> Result<CMat4> {
    let mut l = CMat4::zeros();
    for j in 0..4 {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::NotPositive(d));
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in (j + 1)..4 {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Square root of a positive semidefinite Hermitian matrix; negative
/// eigenvalues are clipped to zero.
pub fn sqrt_psd(m: &CMat4) -> Result<CMat4> {
    Ok(eig_hermitian4(m)?.reconstruct_with(|x| x.max(0.0).sqrt()))
}
