//! Property tests over randomized inputs for the algebraic invariants the
//! rest of the pipeline leans on.

use gaborpol::io::{read_measurements, write_measurements};
use gaborpol::{
    dft, inverse_dft, phase_distance, random_window, tf_shift, translate, IndexSet, Lattice,
    MultiWindowGaborFrame, Signal, TFIndex, C64,
};
use proptest::prelude::*;

fn signal_strategy(max_dim: usize) -> impl Strategy<Value = Signal> {
    (1..=max_dim)
        .prop_flat_map(|m| {
            prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), m..=m)
        })
        .prop_map(|pairs| {
            Signal::new(pairs.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tf_shift_is_unitary_and_composes(x in signal_strategy(12), k in 0i64..24, l in 0i64..24) {
        let m = x.dim();
        let index = TFIndex::new(k, l, m);
        let shifted = tf_shift(&x, index);
        prop_assert!((shifted.norm() - x.norm()).abs() <= 1e-12 * x.norm().max(1.0));
        // applying the inverse shift undoes it up to the commutation phase
        let back = translate(&gaborpol::modulate(&shifted, -(index.l as i64)), -(index.k as i64));
        prop_assert!(phase_distance(&back, &x).unwrap() <= 1e-10 * x.norm().max(1.0));
    }

    #[test]
    fn dft_round_trips(x in signal_strategy(16)) {
        let back = inverse_dft(&dft(&x));
        for i in 0..x.dim() {
            prop_assert!((back.get(i) - x.get(i)).norm() <= 1e-10 * x.norm().max(1.0));
        }
    }

    #[test]
    fn bias_never_exceeds_density(m in 1usize..24, mask in 1u32..u32::MAX) {
        let members: Vec<usize> = (0..m).filter(|&i| mask & (1 << (i % 32)) != 0).collect();
        prop_assume!(!members.is_empty());
        let set = IndexSet::new(m, members).unwrap();
        prop_assert!(set.fourier_bias() <= set.density() + 1e-12);
    }

    #[test]
    fn measurement_csv_round_trip_is_exact(seed in 0u64..1000, xs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 5..=5)) {
        let m = 5;
        let frame = MultiWindowGaborFrame::assemble(
            random_window(m, seed),
            Lattice::full(m),
            IndexSet::new(m, vec![0, 1]).unwrap(),
            IndexSet::new(m, vec![0, 3]).unwrap(),
        ).unwrap();
        let x = Signal::new(xs.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap();
        let b = frame.measure(&x).unwrap();
        let mut buffer = Vec::new();
        write_measurements(&mut buffer, &b).unwrap();
        let back = read_measurements(buffer.as_slice()).unwrap();
        prop_assert_eq!(back.values(), b.values());
        prop_assert_eq!(back.index(), b.index());
    }
}
