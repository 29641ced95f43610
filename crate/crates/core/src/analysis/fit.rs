//! Closed-form least-squares fits: sinusoidal fringes and exponential decays.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n(θ) = offset + amplitude·cos(θ + phase)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub amplitude: f64,
    pub phase_deg: f64,
    pub offset: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

impl FringeFit {
    pub fn eval(&self, theta_deg: f64) -> f64 {
        self.offset + self.amplitude * (theta_deg + self.phase_deg).to_radians().cos()
    }

    /// `amplitude / offset`, the fringe visibility.
    pub fn contrast(&self) -> f64 {
        self.amplitude / self.offset
    }
}

/// Solves the 3×3 system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when the matrix is numerically singular.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn distinct_angles(angles: &[f64]) -> usize {
    let mut w: Vec<f64> = angles.iter().map(|a| a.rem_euclid(360.0)).collect();
    w.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &x in &w {
        if last.is_none_or(|l| x - l > 1e-9) {
            count += 1;
            last = Some(x);
        }
    }
    if count > 1 && w[0] + 360.0 - w[w.len() - 1] <= 1e-9 {
        count -= 1;
    }
    count
}

/// Least-squares fringe with a fixed 360° period, by linear regression on
/// `(1, cos θ, sin θ)`.
pub fn fit_fringe(angles_deg: &[f64], n: &[f64]) -> Result<FringeFit> {
    if angles_deg.len() != n.len() {
        return Err(Error::InvalidInput(format!(
            "{} angles but {} values",
            angles_deg.len(),
            n.len()
        )));
    }
    if distinct_angles(angles_deg) < 4 {
        return Err(Error::DegenerateFit("fringe fit needs at least 4 distinct angles".into()));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (&th, &y) in angles_deg.iter().zip(n) {
        let (s, c) = th.to_radians().sin_cos();
        let row = [1.0, c, s];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let [offset, c1, c2] = solve3(ata, atb)
        .ok_or_else(|| Error::DegenerateFit("singular fringe design matrix".into()))?;
    // c1 cos θ + c2 sin θ = A cos(θ + φ) with A cos φ = c1, A sin φ = −c2
    let amplitude = c1.hypot(c2);
    let phase_deg = if amplitude > 0.0 {
        (-c2).atan2(c1).to_degrees()
    } else {
        0.0
    };
    let fit = FringeFit {
        amplitude,
        phase_deg,
        offset,
        residual: 0.0,
    };
    let ss: f64 = angles_deg
        .iter()
        .zip(n)
        .map(|(&t, &y)| (y - fit.eval(t)).powi(2))
        .sum();
    Ok(FringeFit {
        residual: (ss / n.len() as f64).sqrt(),
        ..fit
    })
}

/// `y(t) = amplitude·e^{−rate·t}`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    /// 1/ns
    pub rate: f64,
    pub amplitude: f64,
}

/// Weighted log-linear least squares. Each point of `ln y` gets weight `y`,
/// the inverse variance of `ln y` for Poisson-distributed samples.
pub fn fit_exponential(t_ns: &[f64], y: &[f64]) -> Result<ExpFit> {
    if t_ns.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} times but {} values",
            t_ns.len(),
            y.len()
        )));
    }
    if y.len() < 3 {
        return Err(Error::DegenerateFit("exponential fit needs at least 3 points".into()));
    }
    if let Some(bad) = y.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("exponential fit needs y > 0, got {bad}")));
    }
    let sw: f64 = y.iter().sum();
    let t_mean = t_ns.iter().zip(y).map(|(t, w)| w * t).sum::<f64>() / sw;
    let l_mean = y.iter().map(|w| w * w.ln()).sum::<f64>() / sw;
    let mut stt = 0.0;
    let mut stl = 0.0;
    for (&t, &w) in t_ns.iter().zip(y) {
        let dt = t - t_mean;
        stt += w * dt * dt;
        stl += w * dt * (w.ln() - l_mean);
    }
    if !(stt > 1e-300) {
        return Err(Error::DegenerateFit("all sample times coincide".into()));
    }
    let slope = stl / stt;
    Ok(ExpFit {
        rate: -slope,
        amplitude: (l_mean - slope * t_mean).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fringe() {
        let th: Vec<f64> = (0..8).map(|k| k as f64 * 45.0).collect();
        let n: Vec<f64> = th.iter().map(|t| 0.5 + 0.4 * (t + 30.0f64).to_radians().cos()).collect();
        let f = fit_fringe(&th, &n).unwrap();
        assert!((f.amplitude - 0.4).abs() < 1e-9);
        assert!((f.phase_deg - 30.0).abs() < 1e-9);
        assert!((f.offset - 0.5).abs() < 1e-9);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn constant_fringe() {
        let th = [0.0, 90.0, 180.0, 270.0, 45.0];
        let f = fit_fringe(&th, &[2.0; 5]).unwrap();
        assert!(f.amplitude < 1e-12);
        assert!((f.offset - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fringes() {
        assert!(matches!(
            fit_fringe(&[0.0, 90.0, 180.0, 360.0], &[1.0; 4]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_fringe(&[0.0, 90.0, 180.0], &[1.0; 2]).is_err());
    }

    #[test]
    fn exact_decays() {
        let t: Vec<f64> = (0..30).map(|k| k as f64 * 0.2).collect();
        for tau in [1.5, 0.56] {
            let y: Vec<f64> = t.iter().map(|x| 3.0 * (-x / tau).exp()).collect();
            let f = fit_exponential(&t, &y).unwrap();
            assert!((f.rate - 1.0 / tau).abs() < 1e-9);
            assert!((f.amplitude - 3.0).abs() < 1e-9);
        }
        let f = fit_exponential(&t, &vec![4.0; t.len()]).unwrap();
        assert!(f.rate.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(fit_exponential(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0]).is_err());
        assert!(fit_exponential(&[0.0, 1.0], &[1.0, 0.5]).is_err());
        assert!(fit_exponential(&[1.0; 3], &[1.0, 2.0, 3.0]).is_err());
    }
}
