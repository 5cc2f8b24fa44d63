#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simex::prob::{tensor_power, Channel, Pmf};
use simex::renyi::{renyi_capacity, renyi_divergence, sibson_inner_inf, RenyiOrder};
use simex::verify::random_channel;

const ORDERS: [f64; 20] = [
    0.0,
    0.05,
    0.1,
    0.2,
    0.3,
    0.45,
    0.6,
    0.75,
    0.9,
    0.99,
    1.0,
    1.01,
    1.2,
    1.5,
    2.0,
    3.0,
    5.0,
    10.0,
    50.0,
    f64::INFINITY,
];

fn order(a: f64) -> RenyiOrder<f64> {
    RenyiOrder::new(a).unwrap()
}

fn pmf(k: usize) -> impl Strategy<Value = Pmf<f64>> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|v| Pmf::normalized(v).unwrap())
}

fn sibson(p: &[f64], w: &Channel<f64>, alpha: f64) -> f64 {
    let s: f64 = (0..w.output_size())
        .map(|y| {
            let inner: f64 = p.iter().enumerate().map(|(x, px)| px * w.get(x, y).powf(alpha)).sum();
            inner.powf(1.0 / alpha)
        })
        .sum();
    if alpha == 1.0 {
        let py: Vec<f64> = (0..w.output_size())
            .map(|y| p.iter().enumerate().map(|(x, px)| px * w.get(x, y)).sum())
            .collect();
        let mut acc = 0.0;
        for (x, px) in p.iter().enumerate() {
            for y in 0..w.output_size() {
                let v = *w.get(x, y);
                if v > 0.0 && *px > 0.0 {
                    acc += px * v * (v / py[y]).ln();
                }
            }
        }
        return acc;
    }
    alpha / (alpha - 1.0) * s.ln()
}

/// Simplex grid at step 1e-4 followed by two rounds of local refinement.
fn grid_capacity(w: &Channel<f64>, alpha: f64) -> f64 {
    let f = |t: f64| sibson(&[t, 1.0 - t], w, alpha);
    let (mut best_t, mut best) = (0.0, f(0.0));
    for i in 0..=10_000 {
        let t = i as f64 * 1e-4;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let mut step = 1e-4;
    for _ in 0..2 {
        let lo = (best_t - step).max(0.0);
        for i in 0..=2000 {
            let t = (lo + i as f64 * step / 1000.0).min(1.0);
            let v = f(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        step /= 1000.0;
    }
    best
}

/// Direct `log Σ p^α q^{1−α} / (α − 1)`.
fn divergence_direct(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum();
    s.ln() / (alpha - 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orders_near_one_match_direct_formulas(
        (p, q) in (2usize..6).prop_flat_map(|k| (pmf(k), pmf(k))),
        seed in any::<u64>(),
        alpha in prop::sample::select(vec![0.76, 0.8, 0.9, 0.99, 1.05, 1.2, 1.24]),
    ) {
        let lib = renyi_divergence(&p, &q, order(alpha)).unwrap();
        let direct = divergence_direct(p.probs(), q.probs(), alpha);
        prop_assert!((lib - direct).abs() <= 1e-10 * (1.0 + direct), "{} vs {}", lib, direct);

        let w = random_channel(&mut ChaCha8Rng::seed_from_u64(seed), p.len(), 3);
        let lib = sibson_inner_inf(&p, &w, order(alpha)).unwrap();
        let direct = sibson(p.probs(), &w, alpha);
        prop_assert!((lib - direct).abs() <= 1e-10 * (1.0 + direct), "{} vs {}", lib, direct);
    }

    #[test]
    fn divergence_is_continuous_through_order_one((p, q) in (2usize..6).prop_flat_map(|k| (pmf(k), pmf(k)))) {
        let kl = renyi_divergence(&p, &q, order(1.0)).unwrap();
        // The slope in the order at one is half the variance of log(p/q).
        let second_moment: f64 = p.probs().iter().zip(q.probs()).map(|(a, b)| a * (a / b).ln().powi(2)).sum();
        for eps in [1e-6, 1e-9, 1e-12] {
            for a in [1.0 - eps, 1.0 + eps] {
                let d = renyi_divergence(&p, &q, order(a)).unwrap();
                prop_assert!((d - kl).abs() <= eps * second_moment + 1e-12, "alpha {}: {} vs {}", a, d, kl);
            }
        }
    }

    #[test]
    fn divergence_is_monotone_in_order((p, q) in (2usize..6).prop_flat_map(|k| (pmf(k), pmf(k)))) {
        let values: Vec<f64> = ORDERS.iter().map(|&a| renyi_divergence(&p, &q, order(a)).unwrap()).collect();
        for pair in values.windows(2) {
            prop_assert!(pair[0] <= pair[1] + 1e-10, "{:?}", values);
        }
    }

    #[test]
    fn capacity_is_monotone_and_certified(seed in any::<u64>(), nx in 2usize..4, ny in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_channel(&mut rng, nx, ny);
        let mut last = f64::NEG_INFINITY;
        for &a in &ORDERS {
            let res = renyi_capacity(&w, order(a), 1e-10).unwrap();
            prop_assert!(res.value >= last - 1e-8, "alpha {a}: {} < {last}", res.value);
            last = res.value;
            if a > 0.0 && a.is_finite() {
                let at_opt = sibson_inner_inf(&res.optimal_input, &w, order(a)).unwrap();
                prop_assert!((at_opt - res.value).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn capacity_matches_grid_oracle_on_random_binary_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let w = random_channel(&mut rng, 2, 2);
        for alpha in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0] {
            let lib = renyi_capacity(&w, order(alpha), 1e-12).unwrap().value;
            let oracle = grid_capacity(&w, alpha);
            assert!((lib - oracle).abs() <= 1e-6, "alpha {alpha}: {lib} vs {oracle}");
        }
    }
}

#[test]
fn capacity_is_additive_on_two_copies() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let w = random_channel(&mut rng, 2, 2);
        let w2 = tensor_power(&w, 2).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let one = renyi_capacity(&w, order(alpha), 1e-12).unwrap().value;
            let two = renyi_capacity(&w2, order(alpha), 1e-12).unwrap().value;
            assert!((two - 2.0 * one).abs() <= 1e-6, "alpha {alpha}: {two} vs 2 x {one}");
        }
    }
}
