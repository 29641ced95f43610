use proptest::prelude::*;

use qdcascade::analysis::{
    chsh_from_state, correlation_e_values, cross_correlate, visibility, Histogram,
};
use qdcascade::cascade::{read_events, write_events, EventStream};
use qdcascade::polarization::{
    concurrence, linear_entropy, peres_min_eigenvalue, DensityMatrix4, PoincareAngle, PolState,
};
use qdcascade::tomography::{rho_of_params, TParams};

fn params() -> impl Strategy<Value = TParams> {
    prop::array::uniform16(-2.0f64..2.0)
        .prop_filter("nonzero", |t| t.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(TParams)
}

fn sorted_times(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50_000i64..50_000, 0..max_len).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

proptest! {
    #[test]
    fn t_parameterization_is_always_physical(t in params()) {
        let rho = rho_of_params(&t).unwrap();
        // revalidate through the checked constructor
        let checked = DensityMatrix4::new(*rho.matrix()).unwrap();
        prop_assert!((checked.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.eigen().values[3] > -1e-12);
    }

    #[test]
    fn measures_stay_in_range(t in params()) {
        let rho = rho_of_params(&t).unwrap();
        let c = concurrence(&rho);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&c));
        let sl = linear_entropy(&rho);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&sl));
        let f = rho.fidelity_to_bell();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!(chsh_from_state(&rho) <= 2.0 * 2f64.sqrt() + 1e-9);
        // a negative partial transpose and nonzero concurrence go together
        let pt = peres_min_eigenvalue(&rho);
        prop_assert!(!(pt < -1e-6 && c < 1e-9));
        prop_assert!(!(pt > 1e-6 && c > 1e-6));
    }

    #[test]
    fn json_round_trip_is_bit_exact(t in params()) {
        let rho = rho_of_params(&t).unwrap();
        let back = DensityMatrix4::from_json(&rho.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn orthogonal_state_is_antipodal(theta in 0.0f64..180.0, phi in 0.0f64..360.0) {
        let s = PolState::from_angles(PoincareAngle::new(theta, phi));
        prop_assert!(s.overlap(&s.orthogonal()) < 1e-24);
        let a = s.angles();
        if theta > 1e-3 && theta < 180.0 - 1e-3 {
            prop_assert!((a.theta() - theta).abs() < 1e-7);
            let dphi = (a.phi() - phi).rem_euclid(360.0);
            prop_assert!(dphi < 1e-6 || 360.0 - dphi < 1e-6);
        }
    }

    #[test]
    fn histogram_mirrors_under_swap(a in sorted_times(200), b in sorted_times(200), m in 0i64..40) {
        let sa = EventStream::new(0, a).unwrap();
        let sb = EventStream::new(1, b).unwrap();
        let ab = cross_correlate(&sa, &sb, 128, 128 * m).unwrap();
        let ba = cross_correlate(&sb, &sa, 128, 128 * m).unwrap();
        let n = ab.len();
        for i in 0..n {
            prop_assert_eq!(ab.counts()[i], ba.counts()[n - 1 - i]);
        }
    }

    #[test]
    fn histogram_total_matches_pair_count(a in sorted_times(300), b in sorted_times(300), w in 1i64..300, m in 0i64..60) {
        let sa = EventStream::new(0, a.clone()).unwrap();
        let sb = EventStream::new(2, b.clone()).unwrap();
        let h = cross_correlate(&sa, &sb, w, w * m).unwrap();
        let empty = Histogram::new(w, w * m).unwrap();
        let brute = a.iter()
            .flat_map(|ta| b.iter().map(move |tb| tb - ta))
            .filter(|&d| empty.bin_of(d).is_some())
            .count() as u64;
        prop_assert_eq!(h.total(), brute);
    }

    #[test]
    fn visibility_is_bounded_and_symmetric(x in 0.0f64..100.0, y in 0.0f64..100.0) {
        prop_assume!(x + y > 0.0);
        let c = visibility(x, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert_eq!(c, visibility(y, x).unwrap());
    }

    #[test]
    fn correlation_is_bounded(n in prop::array::uniform4(0.0f64..10.0)) {
        prop_assume!(n.iter().sum::<f64>() > 0.0);
        let e = correlation_e_values(&n).unwrap();
        prop_assert!((-1.0..=1.0).contains(&e));
    }

    #[test]
    fn event_text_round_trip(a in sorted_times(100), b in sorted_times(100), c in sorted_times(100)) {
        let s = [
            EventStream::new(0, a).unwrap(),
            EventStream::new(1, b).unwrap(),
            EventStream::new(2, c).unwrap(),
        ];
        let mut buf = Vec::new();
        write_events(&mut buf, &s).unwrap();
        prop_assert_eq!(read_events(&buf[..]).unwrap(), s);
    }
}
