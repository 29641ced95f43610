//! Monte-Carlo generator of three-channel click streams.
//!
//! Each excited pulse emits an XX photon after an `Exp(gamma_xx)` delay and an
//! X photon a further `Exp(gamma1)` dwell time `τ` later. The pair state is
//! drawn per event: with probability `1−e^{−Γsτ}` the exciton has lost its
//! spin and the pair is white noise, otherwise it is
//! `(|HH⟩ + e^{isτ/ħ}|VV⟩)/√2`. Averaging over `τ` gives
//! [`ensemble_state`](super::ensemble::ensemble_state).
//!
//! The XX photon passes its analyzer into channel 0; the X photon goes to
//! channel 1 (projected on `proj_x`) or channel 2 (orthogonal port). Clicks
//! are thinned by detector efficiency, blurred by Gaussian jitter, and merged
//! with homogeneous Poisson dark counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Geometric, Normal, Poisson};
use rayon::prelude::*;

use super::ensemble::hh_vv;
use super::params::CascadeParams;
use super::stream::{EventStream, NUM_CHANNELS};
use crate::error::{Error, Result};
use crate::polarization::bell_diagonal_from_visibilities;
use crate::polarization::linalg::C64;
use crate::polarization::state::{product, MeasurementSetting};

/// Pulses per independently seeded chunk.
pub const CHUNK_PULSES: u64 = 1 << 20;

/// Per-outcome amplitudes `⟨i j|HH⟩` and `⟨i j|VV⟩` for the four outcomes
/// (a,b), (a,b⊥), (a⊥,b), (a⊥,b⊥).
struct OutcomeAmplitudes {
    hh: [C64; 4],
    vv: [C64; 4],
}

impl OutcomeAmplitudes {
    fn new(s: &MeasurementSetting) -> Self {
        let a = s.proj_xx;
        let b = s.proj_x;
        let (ao, bo) = (a.orthogonal(), b.orthogonal());
        let (hh, vv) = hh_vv();
        let outcomes = [product(&a, &b), product(&a, &bo), product(&ao, &b), product(&ao, &bo)];
        let dot = |u: &[C64; 4], v: &[C64; 4]| -> C64 {
            u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum()
        };
        OutcomeAmplitudes {
            hh: outcomes.map(|o| dot(&o, &hh)),
            vv: outcomes.map(|o| dot(&o, &vv)),
        }
    }

    /// Outcome probabilities of `(|HH⟩ + e^{iφ}|VV⟩)/√2`.
    fn probabilities(&self, phase: f64) -> [f64; 4] {
        let e = C64::from_polar(1.0, phase);
        let mut p = [0.0; 4];
        for k in 0..4 {
            p[k] = 0.5 * (self.hh[k] + e * self.vv[k]).norm_sqr();
        }
        p
    }
}

enum PairModel {
    Physical {
        amps: OutcomeAmplitudes,
        gamma_s: f64,
        omega: f64,
    },
    Fixed([f64; 4]),
}

impl PairModel {
    fn outcome_probabilities(&self, dwell_ns: f64, rng: &mut ChaCha8Rng) -> [f64; 4] {
        match self {
            PairModel::Fixed(p) => *p,
            PairModel::Physical {
                amps,
                gamma_s,
                omega,
            } => {
                let survive = (-gamma_s * dwell_ns).exp();
                if rng.random::<f64>() >= survive {
                    [0.25; 4]
                } else {
                    amps.probabilities(omega * dwell_ns)
                }
            }
        }
    }
}

fn sample_outcome(p: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &pk) in p.iter().enumerate().take(3) {
        acc += pk;
        if u < acc {
            return k;
        }
    }
    3
}

/// Number of whole pulses in `duration_s`.
pub fn pulse_count(p: &CascadeParams, duration_s: f64) -> u64 {
    let n = duration_s * p.rep_rate_mhz * 1e6;
    if n.is_finite() && n > 0.0 {
        (n + 1e-9).floor() as u64
    } else {
        0
    }
}

/// Simulated click streams for one analyzer setting, indexed by channel.
/// Output is a pure function of the arguments.
pub fn simulate(
    p: &CascadeParams,
    setting: &MeasurementSetting,
    duration_s: f64,
    seed: u64,
) -> Result<[EventStream; NUM_CHANNELS]> {
    p.validate()?;
    setting.validate()?;
    if !(p.gamma1 > 0.0 && p.gamma_xx > 0.0) {
        return Err(Error::OutOfRange(
            "simulation needs gamma1 > 0 and gamma_xx > 0".into(),
        ));
    }
    let pulses = pulse_count(p, duration_s);
    if pulses == 0 {
        return Err(Error::InvalidInput(format!(
            "duration {duration_s} s contains no excitation pulse"
        )));
    }

    let model = match p.visibility_override {
        Some([a, b, c]) => {
            let rho = bell_diagonal_from_visibilities(a, b, c)?;
            let mut probs = rho.outcome_probabilities(setting);
            for x in probs.iter_mut() {
                *x = x.max(0.0);
            }
            PairModel::Fixed(probs)
        }
        None => PairModel::Physical {
            amps: OutcomeAmplitudes::new(setting),
            gamma_s: p.gamma_s,
            omega: p.fss_omega(),
        },
    };

    let n_chunks = pulses.div_ceil(CHUNK_PULSES);
    let chunks: Vec<[Vec<i64>; NUM_CHANNELS]> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let first = c * CHUNK_PULSES;
            let last = ((c + 1) * CHUNK_PULSES).min(pulses);
            simulate_chunk(p, &model, seed, c, first, last)
        })
        .collect();

    let mut merged: [Vec<i64>; NUM_CHANNELS] = Default::default();
    for chunk in chunks {
        for (dst, src) in merged.iter_mut().zip(chunk) {
            dst.extend(src);
        }
    }
    let [a, b, c] = merged;
    Ok([
        EventStream::from_unsorted(0, a)?,
        EventStream::from_unsorted(1, b)?,
        EventStream::from_unsorted(2, c)?,
    ])
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn simulate_chunk(
    p: &CascadeParams,
    model: &PairModel,
    seed: u64,
    chunk: u64,
    first: u64,
    last: u64,
) -> [Vec<i64>; NUM_CHANNELS] {
    let mut rng = chunk_rng(seed, chunk);
    let mut out: [Vec<i64>; NUM_CHANNELS] = Default::default();
    let period = p.period_ps();
    let exp_xx = Exp::new(p.gamma_xx).expect("gamma_xx > 0");
    let exp_x = Exp::new(p.gamma1).expect("gamma1 > 0");
    let jitter = (p.jitter_ps > 0.0).then(|| Normal::new(0.0, p.jitter_ps).expect("σ > 0"));
    let skip = (p.p_exc > 0.0 && p.p_exc < 1.0)
        .then(|| Geometric::new(p.p_exc).expect("0 < p_exc < 1"));

    let mut click = |rng: &mut ChaCha8Rng, ch: usize, t_ps: f64| {
        if rng.random::<f64>() < p.det_eff[ch] {
            let dt = jitter.as_ref().map_or(0.0, |j| j.sample(rng));
            out[ch].push((t_ps + dt).round() as i64);
        }
    };

    if p.p_exc > 0.0 {
        let mut k = first;
        loop {
            if let Some(g) = &skip {
                k = k.saturating_add(g.sample(&mut rng));
            }
            if k >= last {
                break;
            }
            let t0 = k as f64 * period;
            let t_xx = t0 + 1e3 * exp_xx.sample(&mut rng);
            let dwell = exp_x.sample(&mut rng);
            let t_x = t_xx + 1e3 * dwell;
            let probs = model.outcome_probabilities(dwell, &mut rng);
            let outcome = sample_outcome(&probs, rng.random::<f64>());
            // outcomes 0,1: XX passes its analyzer; 0,2: X leaves the co-port
            if outcome < 2 {
                click(&mut rng, 0, t_xx);
            }
            let x_ch = if outcome % 2 == 0 { 1 } else { 2 };
            click(&mut rng, x_ch, t_x);
            k += 1;
        }
    }

    let span_start = first as f64 * period;
    let span_s = (last - first) as f64 * period * 1e-12;
    for ch in 0..NUM_CHANNELS {
        let mean = p.dark_cps[ch] * span_s;
        if mean > 0.0 {
            let n = Poisson::new(mean).expect("mean > 0").sample(&mut rng) as u64;
            for _ in 0..n {
                let t = span_start + rng.random::<f64>() * (last - first) as f64 * period;
                out[ch].push(t.round() as i64);
            }
        }
    }
    out
}
