use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simex::prob::Pmf;
use simex::types::{
    definetti_dominance_check, enumerate_types, log_conditional_class_size, log_type_class_size, nearest_type,
    TypeMixture,
};
use simex::verify::random_conditional_type;

fn log_sum_exp(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn type_classes_partition_all_sequences(k in 1usize..5, n in 1usize..12) {
        let types = enumerate_types(k, n).unwrap();
        prop_assert!(types.iter().all(|t| t.n() == n && t.counts().iter().sum::<usize>() == n));
        let total = log_sum_exp(types.iter().map(log_type_class_size));
        prop_assert!((total - n as f64 * (k as f64).ln()).abs() <= 1e-9);
    }

    #[test]
    fn nearest_type_is_within_one_over_n(p in prop::collection::vec(0.0f64..1.0, 1..6), n in 1usize..200) {
        prop_assume!(p.iter().sum::<f64>() > 0.0);
        let p = Pmf::normalized(p).unwrap();
        let t = nearest_type(&p, n);
        prop_assert_eq!(t.counts().iter().sum::<usize>(), n);
        for (c, px) in t.counts().iter().zip(p.probs()) {
            prop_assert!((*c as f64 / n as f64 - px).abs() <= 1.0 / n as f64 + 1e-12);
        }
    }

    #[test]
    fn conditional_class_size_is_sandwiched(seed in any::<u64>(), nx in 1usize..4, ny in 1usize..4, n in 1usize..40) {
        let v = random_conditional_type(&mut ChaCha8Rng::seed_from_u64(seed), nx, ny, n);
        let log_size = log_conditional_class_size(&v);
        let nh = n as f64 * v.conditional_entropy();
        let poly = (nx * ny) as f64 * ((n + 1) as f64).ln();
        prop_assert!(log_size <= nh + 1e-9);
        prop_assert!(log_size >= nh - poly - 1e-9);
    }

    #[test]
    fn exchangeable_mixtures_are_dominated(k in 2usize..4, n in 1usize..8, raw in prop::collection::vec(0.0f64..1.0, 1..40)) {
        let types = enumerate_types(k, n).unwrap();
        let mut weights: Vec<(_, f64)> = types.into_iter().zip(raw.iter().cycle()).map(|(t, w)| (t, *w)).collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        prop_assume!(total > 0.0);
        for (_, w) in &mut weights {
            *w /= total;
        }
        let report = definetti_dominance_check(&TypeMixture::new(weights).unwrap());
        prop_assert!(report.holds, "ratio {}", report.max_ratio);
    }
}
