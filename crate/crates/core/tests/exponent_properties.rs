use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simex::exponents::{correction_sequences, ExponentSolver};
use simex::msgsize::MessageSize;
use simex::nsdist::eps_ns_iid;
use simex::renyi::{renyi_capacity, RenyiOrder};
use simex::verify::random_channel;

fn solver(seed: u64, ny: usize) -> ExponentSolver {
    ExponentSolver::new(random_channel(&mut ChaCha8Rng::seed_from_u64(seed), 2, ny))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exponents_vanish_on_the_right_side_of_capacity(seed in any::<u64>(), ny in 2usize..4, t in 0.01f64..0.99) {
        let s = solver(seed, ny);
        let i1 = s.capacity(1.0).unwrap();
        let imax = s.max_information().unwrap();
        prop_assume!(imax - i1 > 1e-2 && i1 > 1e-2);

        let below = i1 * t;
        prop_assert_eq!(s.error_exponent(below).unwrap().value, 0.0);
        prop_assert!(s.sc_exponent(below).unwrap().value > 0.0);

        let between = i1 + (imax - i1) * t;
        prop_assert_eq!(s.sc_exponent(between).unwrap().value, 0.0);
        let ee = s.error_exponent(between).unwrap();
        prop_assert!(ee.finite && ee.value > 0.0);

        // Re-evaluate the objective at the reported maximizer with an independent solve.
        let a = ee.argmax_alpha;
        let cap = renyi_capacity(s.channel(), RenyiOrder::new(1.0 + a).unwrap(), 1e-12).unwrap().value;
        prop_assert!((a * (between - cap) - ee.value).abs() <= 1e-8 * (1.0 + a));

        prop_assert!(s.error_exponent(imax * 1.01 + 1e-6).unwrap().value.is_infinite());
    }

    #[test]
    fn finite_bounds_bracket_the_exact_distortion(seed in any::<u64>(), t in 0.05f64..0.95) {
        let s = solver(seed, 2);
        let i1 = s.capacity(1.0).unwrap();
        let imax = s.max_information().unwrap();
        prop_assume!(imax - i1 > 1e-2);
        let r = i1 + (imax - i1) * t;
        for n in [3usize, 4, 6] {
            let c = correction_sequences(s.channel(), r, n).unwrap();
            prop_assert!(c.r_n <= r);
            let eps = eps_ns_iid::<f64>(s.channel(), n, &MessageSize::from_rate(n, r).unwrap()).unwrap().value;
            let ach = s.ee_ach_bound(r, n).unwrap();
            let conv = s.ee_conv_bound(r, n).unwrap();
            prop_assert!(conv.valid && ach.valid);
            prop_assert!(conv.value <= ach.value);
            if eps > 0.0 {
                let obs = eps.ln() / n as f64;
                prop_assert!(conv.value <= obs + 1e-9 && obs <= ach.value + 1e-9, "n={}: {} {} {}", n, conv.value, obs, ach.value);
            }
            if n >= 6 {
                let obs = (1.0 - eps).ln() / n as f64;
                let lo = s.sce_ach_bound(r, n).unwrap();
                let hi = s.sce_conv_bound(r, n).unwrap();
                prop_assert!(lo.valid);
                prop_assert!(lo.value <= obs + 1e-9 && obs <= hi.value + 1e-9, "n={}: {} {} {}", n, lo.value, obs, hi.value);
            }
        }
    }
}
