use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdcascade::analysis::{
    analyze_setting, cross_correlate, integrate_and_normalize, signed_visibility,
    visibility_sigma, HistogramOptions, NormalizedCoincidence,
};
use qdcascade::cascade::{simulate, source_state, CascadeParams, EventStream};
use qdcascade::polarization::{MeasurementSetting, Pol, SettingLabel};

fn fast_ideal() -> CascadeParams {
    // short lifetimes keep every pair inside its own pulse window
    CascadeParams {
        gamma1: 5.0,
        gamma_xx: 10.0,
        gamma_s: 2.0,
        ..CascadeParams::default()
    }
    .ideal_detection()
}

fn normalized(
    p: &CascadeParams,
    label: SettingLabel,
    duration: f64,
    seed: u64,
) -> (NormalizedCoincidence, NormalizedCoincidence) {
    let streams = simulate(p, &label.setting(), duration, seed).unwrap();
    let (r, _) = analyze_setting(label, &streams, &HistogramOptions::default()).unwrap();
    (r.n_parallel, r.n_perp)
}

#[test]
fn normalized_coincidences_follow_the_state() {
    let p = fast_ideal();
    let rho = source_state(&p).unwrap();
    let labels = [
        SettingLabel::pols(Pol::L, Pol::R),
        SettingLabel::pols(Pol::H, Pol::H),
        SettingLabel::pols(Pol::D, Pol::A),
        SettingLabel::pols(Pol::R, Pol::H),
        SettingLabel::polar(30.0, 75.0),
    ];
    for (k, label) in labels.into_iter().enumerate() {
        let (par, perp) = normalized(&p, label, 0.01, 100 + k as u64);
        let probs = rho.outcome_probabilities(&label.setting());
        // marginals are 1/2, so n = P(ab) / (p_exc · 1/4)
        for (n, pr) in [(par, probs[0]), (perp, probs[1])] {
            let want = 4.0 * pr / p.p_exc;
            assert!(
                (n.n - want).abs() < 4.0 * n.poisson_sigma,
                "{label}: n = {} ± {} vs {want}",
                n.n,
                n.poisson_sigma
            );
        }
    }
}

#[test]
fn werner_ratio_of_parallel_to_perpendicular() {
    let v = 0.6;
    let p = CascadeParams {
        visibility_override: Some([v, v, v]),
        ..fast_ideal()
    };
    let (par, perp) = normalized(&p, SettingLabel::pols(Pol::H, Pol::H), 0.01, 3);
    let ratio = par.n / perp.n;
    let sigma = ratio * ((par.poisson_sigma / par.n).powi(2) + (perp.poisson_sigma / perp.n).powi(2)).sqrt();
    let want = (1.0 + v) / (1.0 - v);
    assert!((ratio - want).abs() < 4.0 * sigma, "{ratio} ± {sigma} vs {want}");
}

#[test]
fn crossed_circular_peak_vanishes() {
    let p = CascadeParams {
        gamma_s: 0.0,
        ..fast_ideal()
    };
    let (co, cross) = normalized(&p, SettingLabel::pols(Pol::L, Pol::R), 0.005, 9);
    assert!(co.n > 1.0);
    // channel 2 of the LR setting is the LL outcome
    assert_eq!(cross.central, 0);
}

fn poisson_stream(ch: u8, rate_per_ps: f64, span_ps: i64, rng: &mut ChaCha8Rng) -> EventStream {
    let n = (rate_per_ps * span_ps as f64) as usize;
    let t: Vec<i64> = (0..n).map(|_| rng.random_range(0..span_ps)).collect();
    EventStream::from_unsorted(ch, t).unwrap()
}

#[test]
fn uncorrelated_streams_are_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let span = 2_000_000_000_000i64; // 2 s
    let (r1, r2) = (2e-7, 3e-7); // 200 kHz and 300 kHz
    let a = poisson_stream(0, r1, span, &mut rng);
    let b = poisson_stream(1, r2, span, &mut rng);
    let opts = HistogramOptions::default();
    let h = cross_correlate(&a, &b, opts.bin_width_ps, opts.window_ps).unwrap();
    let expect = a.len() as f64 * b.len() as f64 / span as f64 * opts.bin_width_ps as f64;
    let mean = h.total() as f64 / h.len() as f64;
    let sigma = (expect / h.len() as f64).sqrt();
    assert!((mean - expect).abs() < 3.0 * sigma, "{mean} vs {expect} ± {sigma}");
    let n = integrate_and_normalize(&h, opts.rep_period_ps, opts.side_peaks).unwrap();
    assert!((n.n - 1.0).abs() < 3.0 * n.poisson_sigma, "{} ± {}", n.n, n.poisson_sigma);
}

#[test]
fn cascade_peak_sits_at_positive_delay() {
    let p = CascadeParams::default().ideal_detection();
    let label = SettingLabel::pols(Pol::L, Pol::R);
    let streams = simulate(&p, &label.setting(), 0.005, 21).unwrap();
    let opts = HistogramOptions::default();
    let (r, [h, _]) = analyze_setting(label, &streams, &opts).unwrap();
    assert!(r.n_parallel.n > 2.0);
    let after: u64 = (1..20).map(|k| h.at_delay(k * 128)).sum();
    let before: u64 = (1..20).map(|k| h.at_delay(-k * 128)).sum();
    assert!(after > 5 * before, "{after} vs {before}");
    // side peaks at whole periods dominate the gap between them (on the
    // positive side the gap still holds the central peak's decay tail)
    let on: u64 = (-1..=1).map(|k| h.at_delay(-5000 + k * 128)).sum();
    let off: u64 = (-1..=1).map(|k| h.at_delay(-7500 + k * 128)).sum();
    assert!(on > 10 * off.max(1), "{on} vs {off}");
}

fn visibility_of(par: &NormalizedCoincidence, perp: &NormalizedCoincidence) -> (f64, f64) {
    (
        signed_visibility(par.n, perp.n).unwrap(),
        visibility_sigma(par.n, par.poisson_sigma, perp.n, perp.poisson_sigma),
    )
}

#[test]
fn simultaneous_channels_cancel_flux_changes() {
    let label = SettingLabel::pols(Pol::H, Pol::H);
    let low = CascadeParams {
        p_exc: 0.05,
        ..fast_ideal()
    };
    let high = CascadeParams {
        p_exc: 0.2,
        ..fast_ideal()
    };
    let (a_par, a_perp) = normalized(&low, label, 0.02, 5);
    let (b_par, b_perp) = normalized(&high, label, 0.02, 6);
    let (va, sa) = visibility_of(&a_par, &a_perp);
    let (vb, sb) = visibility_of(&b_par, &b_perp);
    assert!((va - vb).abs() < 4.0 * (sa * sa + sb * sb).sqrt(), "{va} vs {vb}");
    // pairing channels recorded at different excitation strengths is biased
    let (mixed, sm) = visibility_of(&a_par, &b_perp);
    assert!((mixed - va).abs() > 10.0 * (sm * sm + sa * sa).sqrt(), "{mixed} vs {va}");
}

#[test]
fn visibility_ignores_xx_thinning() {
    let p = fast_ideal();
    let label = SettingLabel::pols(Pol::D, Pol::D);
    let [xx, co, cross] = simulate(&p, &MeasurementSetting::from_pols(Pol::D, Pol::D), 0.02, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let thinned: Vec<i64> = xx.timestamps().iter().copied().filter(|_| rng.random::<f64>() < 0.3).collect();
    let opts = HistogramOptions::default();
    let full = [xx.clone(), co.clone(), cross.clone()];
    let thin = [EventStream::new(0, thinned).unwrap(), co, cross];
    let (a, _) = analyze_setting(label, &full, &opts).unwrap();
    let (b, _) = analyze_setting(label, &thin, &opts).unwrap();
    let (va, _) = visibility_of(&a.n_parallel, &a.n_perp);
    let (vb, sb) = visibility_of(&b.n_parallel, &b.n_perp);
    assert!((va - vb).abs() < 4.0 * sb, "{va} vs {vb} ± {sb}");
}
