//! CHSH test on the RL–HV great circle.
//!
//! With the analyzers at polar angles θ_XX and θ_X the correlation of the
//! reference state is `E = −cos(θ_XX + θ_X)`. The XX analyzer takes a = 0° and
//! a′ = 90°; the X analyzer takes b = 135° and b′ = 45°, which is the
//! assignment that maximizes `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`
//! for this sign convention. Orthogonal analyzers sit 180° further along.

use super::normalize::NormalizedCoincidence;
use crate::error::{Error, Result};
use crate::polarization::density::DensityMatrix4;
use crate::polarization::state::MeasurementSetting;

pub const CHSH_A: f64 = 0.0;
pub const CHSH_A_PRIME: f64 = 90.0;
pub const CHSH_B: f64 = 135.0;
pub const CHSH_B_PRIME: f64 = 45.0;

/// The four (θ_XX, θ_X) pairs entering S, in the order
/// (a,b), (a,b′), (a′,b), (a′,b′).
pub const CHSH_PAIRS: [(f64, f64); 4] = [
    (CHSH_A, CHSH_B),
    (CHSH_A, CHSH_B_PRIME),
    (CHSH_A_PRIME, CHSH_B),
    (CHSH_A_PRIME, CHSH_B_PRIME),
];

/// All 16 analyzer settings of the run: θ_XX ∈ {0, 90, 180, 270} against
/// θ_X ∈ {45, 135, 225, 315}.
pub fn chsh_settings() -> Vec<(f64, f64)> {
    let mut v = Vec::with_capacity(16);
    for a in [0.0, 90.0, 180.0, 270.0] {
        for b in [45.0, 135.0, 225.0, 315.0] {
            v.push((a, b));
        }
    }
    v
}

/// The outcomes (a,b), (a,b⊥), (a⊥,b), (a⊥,b⊥) of one pair as polar angles.
pub fn outcome_angles(a: f64, b: f64) -> [(f64, f64); 4] {
    let (ao, bo) = (wrap(a + 180.0), wrap(b + 180.0));
    let (a, b) = (wrap(a), wrap(b));
    [(a, b), (a, bo), (ao, b), (ao, bo)]
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(360.0);
    if (360.0 - r).abs() < 1e-9 {
        0.0
    } else {
        r
    }
}

/// Do two polar angles name the same analyzer (modulo 360°)?
pub fn same_angle(x: f64, y: f64) -> bool {
    let d = (x - y).rem_euclid(360.0);
    d < 1e-6 || 360.0 - d < 1e-6
}

/// `E = (n_ab + n_a⊥b⊥ − n_ab⊥ − n_a⊥b) / Σn`
pub fn correlation_e_values(n: &[f64; 4]) -> Result<f64> {
    let total: f64 = n.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroFlux("correlation with zero total flux".into()));
    }
    Ok((n[0] + n[3] - n[1] - n[2]) / total)
}

/// Correlation of one analyzer pair with its propagated Poisson error.
pub fn correlation_e(n: &[NormalizedCoincidence; 4]) -> Result<(f64, f64)> {
    let e = correlation_e_values(&n.map(|x| x.n))?;
    let p = n[0].n + n[3].n;
    let q = n[1].n + n[2].n;
    let var_p = n[0].poisson_sigma.powi(2) + n[3].poisson_sigma.powi(2);
    let var_q = n[1].poisson_sigma.powi(2) + n[2].poisson_sigma.powi(2);
    let s = p + q;
    let sigma = 2.0 * (q * q * var_p + p * p * var_q).sqrt() / (s * s);
    Ok((e, sigma))
}

/// `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`
pub fn chsh_s(e: [f64; 4]) -> f64 {
    (e[0] - e[1] + e[2] + e[3]).abs()
}

/// Correlation of a state at the polar analyzer angles.
pub fn state_correlation(rho: &DensityMatrix4, theta_xx: f64, theta_x: f64) -> f64 {
    let p = rho.outcome_probabilities(&MeasurementSetting::from_polar(theta_xx, theta_x));
    p[0] + p[3] - p[1] - p[2]
}

/// S of a state at the standard settings.
pub fn chsh_from_state(rho: &DensityMatrix4) -> f64 {
    chsh_s(CHSH_PAIRS.map(|(a, b)| state_correlation(rho, a, b)))
}

/// S with its error and the four correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub s: f64,
    pub sigma: f64,
    pub e: [f64; 4],
    pub e_sigma: [f64; 4],
}

/// S from normalized coincidences keyed by the clicked outcome
/// `(θ_XX, θ_X)`. When an outcome appears more than once (as it does with
/// two X detectors) the entries are averaged.
pub fn chsh_from_outcomes(outcomes: &[((f64, f64), NormalizedCoincidence)]) -> Result<ChshResult> {
    let find = |a: f64, b: f64| -> Result<NormalizedCoincidence> {
        let hits: Vec<_> = outcomes
            .iter()
            .filter(|((x, y), _)| same_angle(*x, a) && same_angle(*y, b))
            .map(|(_, n)| *n)
            .collect();
        if hits.is_empty() {
            return Err(Error::MissingSetting(format!(
                "p{}_{}",
                wrap(a) as i64,
                wrap(b) as i64
            )));
        }
        Ok(average(&hits))
    };
    let mut e = [0.0; 4];
    let mut e_sigma = [0.0; 4];
    for (k, (a, b)) in CHSH_PAIRS.iter().enumerate() {
        let ang = outcome_angles(*a, *b);
        let n = [
            find(ang[0].0, ang[0].1)?,
            find(ang[1].0, ang[1].1)?,
            find(ang[2].0, ang[2].1)?,
            find(ang[3].0, ang[3].1)?,
        ];
        (e[k], e_sigma[k]) = correlation_e(&n)?;
    }
    Ok(ChshResult {
        s: chsh_s(e),
        sigma: e_sigma.iter().map(|s| s * s).sum::<f64>().sqrt(),
        e,
        e_sigma,
    })
}

/// Mean of independent estimates of the same quantity.
pub fn average(xs: &[NormalizedCoincidence]) -> NormalizedCoincidence {
    let k = xs.len() as f64;
    NormalizedCoincidence {
        n: xs.iter().map(|x| x.n).sum::<f64>() / k,
        poisson_sigma: xs.iter().map(|x| x.poisson_sigma.powi(2)).sum::<f64>().sqrt() / k,
        central: xs.iter().map(|x| x.central).sum(),
        side_total: xs.iter().map(|x| x.side_total).sum(),
        side_peaks: xs.iter().map(|x| x.side_peaks).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::{bell_psi, werner};
    use std::f64::consts::SQRT_2;

    #[test]
    fn bell_reaches_tsirelson() {
        assert!((chsh_from_state(&bell_psi()) - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn werner_scales_linearly() {
        for v in [0.0, 0.3, 0.8249, 1.0] {
            let s = chsh_from_state(&werner(v).unwrap());
            assert!((s - 2.0 * SQRT_2 * v).abs() < 1e-12, "{v}: {s}");
        }
        assert!((chsh_from_state(&werner(0.8249).unwrap()) - 2.333).abs() < 1e-3);
    }

    #[test]
    fn correlation_closed_form() {
        let rho = werner(0.6).unwrap();
        for (a, b) in chsh_settings() {
            let e = state_correlation(&rho, a, b);
            let expect = -0.6 * (a + b).to_radians().cos();
            assert!((e - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_correlations() {
        assert_eq!(chsh_s([0.0; 4]), 0.0);
        assert!(correlation_e_values(&[0.0; 4]).is_err());
        assert_eq!(correlation_e_values(&[1.0, 0.0, 0.0, 1.0]).unwrap(), 1.0);
    }

    fn nc(n: f64) -> NormalizedCoincidence {
        NormalizedCoincidence {
            n,
            poisson_sigma: 0.01,
            central: 100,
            side_total: 1000,
            side_peaks: 10,
        }
    }

    #[test]
    fn from_outcomes_uses_state_probabilities() {
        let rho = werner(0.7).unwrap();
        let mut outcomes = Vec::new();
        for (a, b) in chsh_settings() {
            let p = rho.outcome_probabilities(&MeasurementSetting::from_polar(a, b));
            let ang = outcome_angles(a, b);
            // the two X detectors of the setting: (a,b) and (a,b⊥)
            outcomes.push((ang[0], nc(4.0 * p[0])));
            outcomes.push((ang[1], nc(4.0 * p[1])));
        }
        let r = chsh_from_outcomes(&outcomes).unwrap();
        assert!((r.s - 2.0 * SQRT_2 * 0.7).abs() < 1e-12);
        assert!(r.sigma > 0.0);
        // each outcome is seen by two settings; drop both
        outcomes.retain(|((a, b), _)| !(same_angle(*a, 0.0) && same_angle(*b, 45.0)));
        assert_eq!(outcomes.len(), 30);
        assert!(matches!(chsh_from_outcomes(&outcomes), Err(Error::MissingSetting(_))));
    }

    #[test]
    fn sigma_matches_finite_difference() {
        let base = [0.9, 0.2, 0.3, 1.1];
        let sig = [0.03, 0.01, 0.02, 0.04];
        let n = [0, 1, 2, 3].map(|k| NormalizedCoincidence {
            poisson_sigma: sig[k],
            ..nc(base[k])
        });
        let (_, s) = correlation_e(&n).unwrap();
        let mut var = 0.0;
        for k in 0..4 {
            let mut up = base;
            let mut dn = base;
            up[k] += 1e-6;
            dn[k] -= 1e-6;
            let d = (correlation_e_values(&up).unwrap() - correlation_e_values(&dn).unwrap()) / 2e-6;
            var += (d * sig[k]).powi(2);
        }
        assert!((s - var.sqrt()).abs() < 1e-8);
    }
}
