use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simex::msgsize::MessageSize;
use simex::nsdist::{
    distortion_at, eps_ns_iid, eps_ns_iid_bruteforce, eps_ns_oneshot, eps_ns_oneshot_relaxed, SolveStatus,
};
use simex::prob::Channel;
use simex::verify::random_channel;

fn channel(seed: u64, nx: usize, ny: usize) -> Channel<f64> {
    random_channel(&mut ChaCha8Rng::seed_from_u64(seed), nx, ny)
}

/// `Σ_y max_x W(y|x)`, the smallest message size with zero distortion.
fn column_max_sum(w: &Channel<f64>) -> f64 {
    (0..w.output_size())
        .map(|y| (0..w.input_size()).map(|x| *w.get(x, y)).fold(0.0, f64::max))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oneshot_is_certified_bounded_and_matches_relaxation(seed in any::<u64>(), nx in 1usize..5, ny in 1usize..5, m in 1u64..7) {
        let w = channel(seed, nx, ny);
        let rep = eps_ns_oneshot::<f64>(&w, m).unwrap();
        prop_assert_eq!(rep.status, SolveStatus::Optimal);
        prop_assert!((0.0..=1.0).contains(&rep.value));
        let q = rep.reference_pmf().unwrap();
        let at_q = distortion_at(&w, &(m as f64), q.probs());
        prop_assert!((at_q - rep.value).abs() <= 1e-9, "{} vs {}", at_q, rep.value);
        let relaxed = eps_ns_oneshot_relaxed::<f64>(&w, m).unwrap();
        prop_assert!((relaxed.value - rep.value).abs() <= 1e-8);
    }

    #[test]
    fn oneshot_is_monotone_and_vanishes_exactly_at_threshold(seed in any::<u64>(), nx in 1usize..5, ny in 2usize..5) {
        let w = channel(seed, nx, ny);
        let threshold = column_max_sum(&w);
        let mut last = f64::INFINITY;
        for m in 1..=(nx.min(ny) as u64 + 1) {
            let v = eps_ns_oneshot::<f64>(&w, m).unwrap().value;
            prop_assert!(v <= last + 1e-9);
            last = v;
            let mf = m as f64;
            if mf >= threshold * (1.0 + 1e-9) {
                prop_assert!(v <= 1e-9, "M = {} above threshold {} but eps = {}", m, threshold, v);
            } else {
                // Averaging the per-input gaps over inputs gives (threshold − M)/|X|.
                prop_assert!(v >= (threshold - mf) / nx as f64 - 1e-9, "M = {}: eps = {}", m, v);
            }
        }
    }

    #[test]
    fn reduced_program_matches_bruteforce(seed in any::<u64>(), ny in 2usize..4, n in 1usize..4, m in 1u64..9) {
        let w = channel(seed, 2, ny);
        let brute = eps_ns_iid_bruteforce::<f64>(&w, n, m).unwrap();
        let reduced = eps_ns_iid::<f64>(&w, n, &MessageSize::new(m).unwrap()).unwrap();
        prop_assert_eq!(reduced.status, SolveStatus::Optimal);
        prop_assert!((brute.value - reduced.value).abs() <= 1e-8, "{} vs {}", brute.value, reduced.value);
        prop_assert!(reduced.certificate_gap <= 1e-8);
    }
}

#[test]
fn exact_arithmetic_agrees_with_floating_point() {
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    let rows = [vec![(3, 4), (1, 4)], vec![(1, 5), (4, 5)], vec![(1, 2), (1, 2)]];
    let exact = Channel::new(
        rows.iter()
            .map(|r| r.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect())
            .collect(),
    )
    .unwrap();
    let float = Channel::new(
        rows.iter()
            .map(|r| r.iter().map(|&(a, b)| a as f64 / b as f64).collect())
            .collect(),
    )
    .unwrap();
    for m in 1..=2 {
        let e = eps_ns_oneshot::<BigRational>(&exact, m).unwrap();
        assert_eq!(e.certificate_gap, BigRational::from_integer(0.into()));
        let f = eps_ns_oneshot::<f64>(&float, m).unwrap();
        assert!((e.value.to_f64().unwrap() - f.value).abs() <= 1e-12);
    }
}
