//! Quasi-Newton (BFGS) minimization with an Armijo backtracking line search.
//! Every accepted step lowers the objective.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Stop once an accepted step improves `f` by less than `tol·|f|`.
    pub tol: f64,
    /// Budget of objective evaluations.
    pub max_evals: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            tol: 1e-10,
            max_evals: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    /// Objective at the start and after every accepted step.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f`, where `fg(x)` returns the value and gradient. Terminates
/// when the relative improvement of an accepted step drops below `tol`, when
/// the gradient vanishes, or when the line search can no longer find a lower
/// value (the objective is flat to machine precision). Running out of
/// evaluations is an error.
pub fn bfgs<F>(mut fg: F, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut f, mut g) = fg(&x);
    let mut evals = 1usize;
    let mut history = vec![f];
    if !f.is_finite() {
        return Err(Error::InvalidInput(format!("objective is {f} at the start point")));
    }
    // inverse Hessian approximation, row-major
    let mut h = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>, scale: f64| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = scale;
        }
    };
    let g0 = norm(&g);
    reset(&mut h, if g0 > 0.0 { 1.0 / g0 } else { 1.0 });

    loop {
        let gn = norm(&g);
        if gn == 0.0 {
            break;
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            reset(&mut h, 1.0 / gn);
            d = g.iter().map(|v| -v / gn).collect();
            slope = dot(&g, &d);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            if evals >= opts.max_evals {
                return Err(Error::NotConverged {
                    evaluations: evals,
                    loss: f,
                    grad_norm: gn,
                });
            }
            let xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let (ft, gt) = fg(&xt);
            evals += 1;
            if ft.is_finite() && ft <= f + ARMIJO * alpha * slope && ft < f {
                accepted = Some((xt, ft, gt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            break;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let improvement = f - fnew;
        let f_old = f;
        x = xn;
        f = fnew;
        g = gnew;
        history.push(f);

        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if history.len() == 2 {
                reset(&mut h, sy / dot(&y, &y));
            }
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }

        if improvement <= opts.tol * f_old.abs() {
            break;
        }
    }
    let grad_norm = norm(&g);
    Ok(BfgsResult {
        x,
        f,
        grad_norm,
        history,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ];
        (f, g)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let r = bfgs(rosenbrock, &[-1.2, 1.0], &BfgsOptions { tol: 0.0, max_evals: 10_000 }).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
        assert!(r.history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let e = bfgs(rosenbrock, &[-1.2, 1.0], &BfgsOptions { tol: 0.0, max_evals: 5 }).unwrap_err();
        assert!(matches!(e, Error::NotConverged { .. }));
    }

    #[test]
    fn quadratic_converges_fast() {
        let q = |x: &[f64]| {
            let f = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum::<f64>() + 1.0;
            let g = x.iter().enumerate().map(|(i, v)| 2.0 * (i + 1) as f64 * v).collect();
            (f, g)
        };
        let r = bfgs(q, &[1.0, -2.0, 3.0, 0.5], &BfgsOptions::default()).unwrap();
        assert!((r.f - 1.0).abs() < 1e-9);
        assert!(r.evaluations < 200);
    }
}
