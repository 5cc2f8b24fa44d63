//! Self-verification suites: every check is an inequality `lhs ≤ rhs`
//! reported with its margin.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ExponentSolver;
use crate::msgsize::MessageSize;
use crate::nsdist::{eps_ns_iid, eps_ns_iid_bruteforce, eps_ns_oneshot, eps_ns_oneshot_relaxed};
use crate::prob::{Channel, Pmf};
use crate::scalar::Real;
use crate::types::{
    compositions, definetti_dominance_check, enumerate_types, kl_continuity_check, log_conditional_class_size,
    log_type_class_size, mi_continuity_check, nearest_type, ConditionalType, MiPerturbation, TypeMixture, TypeVector,
};

/// Absolute slack granted to inequalities that hold exactly in real arithmetic.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Oracle,
    Sandwich,
    Types,
    Continuity,
    Definetti,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "oracle" => Suite::Oracle,
            "sandwich" => Suite::Sandwich,
            "types" => Suite::Types,
            "continuity" => Suite::Continuity,
            "definetti" => Suite::Definetti,
            other => return Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        })
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Oracle => "oracle",
            Suite::Sandwich => "sandwich",
            Suite::Types => "types",
            Suite::Continuity => "continuity",
            Suite::Definetti => "definetti",
        }
    }
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub lhs: f64,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub rhs: f64,
    /// `rhs − lhs` (zero when both sides are the same infinity).
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    fn le(suite: &'static str, name: String, lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = if lhs == rhs { 0.0 } else { rhs - lhs };
        Self {
            suite,
            name,
            lhs,
            rhs,
            margin,
            pass: !lhs.is_nan() && !rhs.is_nan() && (lhs <= rhs || margin >= -slack),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }
}

/// Parameters of the suites; `None` selects the built-in default.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub channel: Option<Channel<f64>>,
    /// Rate for both sandwich halves (defaults: 0.6 for the error side, 0.2 for the success side).
    pub rate: Option<f64>,
    pub ns: Option<Vec<usize>>,
    /// Largest alphabet for the de Finetti suite.
    pub alphabet: Option<usize>,
    /// Largest `n` for the de Finetti suite.
    pub n: Option<usize>,
    /// Random instances per continuity property.
    pub instances: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            channel: None,
            rate: None,
            ns: None,
            alphabet: None,
            n: None,
            instances: 1000,
        }
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Oracle {
        oracle_suite(cfg, &mut report)?;
    }
    if all || suite == Suite::Sandwich {
        sandwich_suite(cfg, &mut report)?;
    }
    if all || suite == Suite::Types {
        types_suite(cfg, &mut report)?;
    }
    if all || suite == Suite::Continuity {
        continuity_suite(cfg, &mut report)?;
    }
    if all || suite == Suite::Definetti {
        definetti_suite(cfg, &mut report)?;
    }
    Ok(report)
}

/// Dirichlet(1) sample on `k` symbols.
pub fn random_pmf<R: Rng>(rng: &mut R, k: usize) -> Pmf<f64> {
    let v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    Pmf::normalized(v).expect("positive weights")
}

pub fn random_channel<R: Rng>(rng: &mut R, nx: usize, ny: usize) -> Channel<f64> {
    Channel::new((0..nx).map(|_| random_pmf(rng, ny).into_vec()).collect()).expect("rows are pmfs")
}

/// `(1−t)·p + t·s`.
fn mix(p: &[f64], s: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(s).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

const ORACLE_TOL: f64 = 1e-6;

fn oracle_suite(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<()> {
    const S: &str = "oracle";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shapes = std::iter::repeat_n((2, 2), 25).chain(std::iter::repeat_n((2, 3), 10));
    for (i, (nx, ny)) in shapes.enumerate() {
        let w = random_channel(&mut rng, nx, ny);
        for n in 1..=3 {
            for m in [1u64, 2, 3, 5] {
                let reduced = eps_ns_iid(&w, n, &MessageSize::new(m)?)?.value;
                let brute = eps_ns_iid_bruteforce(&w, n, m)?.value;
                report.push(Check::le(
                    S,
                    format!("channel {i} ({nx}x{ny}) n={n} M={m}: |reduced - bruteforce|"),
                    (reduced - brute).abs(),
                    ORACLE_TOL,
                    0.0,
                ));
            }
        }
    }
    for i in 0..10 {
        let w = random_channel(&mut rng, 3, 3);
        for m in 1..=3u64 {
            let a = eps_ns_oneshot(&w, m)?.value;
            let b = eps_ns_oneshot_relaxed(&w, m)?.value;
            report.push(Check::le(
                S,
                format!("channel {i} (3x3) M={m}: |per-input form - relaxed form|"),
                (a - b).abs(),
                1e-8,
                0.0,
            ));
        }
    }
    let id2 = Channel::<f64>::identity(2);
    for n in 1..=12usize {
        let d = 1u64 << n;
        for m in [1, d / 2, d.saturating_sub(1).max(1), d] {
            let v = eps_ns_iid(&id2, n, &MessageSize::new(m)?)?.value;
            let exact = (1.0 - m as f64 / d as f64).max(0.0);
            report.push(Check::le(
                S,
                format!("identity n={n} M={m}: |value - (1 - M/2^n)_+|"),
                (v - exact).abs(),
                1e-9,
                0.0,
            ));
        }
    }
    Ok(())
}

fn log_or_neg_inf(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn sandwich_suite(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<()> {
    const S: &str = "sandwich";
    let w = cfg.channel.clone().unwrap_or_else(|| Channel::bsc(0.1).expect("valid"));
    let solver = ExponentSolver::new(w.clone());
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![4, 6, 8, 10, 12, 14]);
    let r_ee = cfg.rate.unwrap_or(0.6);
    let r_sce = cfg.rate.unwrap_or(0.2);
    for &n in &ns {
        let nf = n as f64;
        let eps = eps_ns_iid(&w, n, &MessageSize::from_rate(n, r_ee)?)?.value;
        let le = log_or_neg_inf(eps) / nf;
        let ach = solver.ee_ach_bound(r_ee, n)?;
        report.push(Check::le(
            S,
            format!("r={r_ee} n={n}: (1/n) log eps <= error achievability bound"),
            le,
            ach.value,
            ROUNDING_SLACK,
        ));
        let conv = solver.ee_conv_bound(r_ee, n)?;
        if conv.valid {
            report.push(Check::le(
                S,
                format!("r={r_ee} n={n}: error converse bound <= (1/n) log eps"),
                conv.value,
                le,
                ROUNDING_SLACK,
            ));
        }

        let eps = eps_ns_iid(&w, n, &MessageSize::from_rate(n, r_sce)?)?.value;
        let ls = log_or_neg_inf(1.0 - eps) / nf;
        let conv = solver.sce_conv_bound(r_sce, n)?;
        report.push(Check::le(
            S,
            format!("r={r_sce} n={n}: (1/n) log(1 - eps) <= success converse bound"),
            ls,
            conv.value,
            ROUNDING_SLACK,
        ));
        let ach = solver.sce_ach_bound(r_sce, n)?;
        if ach.valid {
            report.push(Check::le(
                S,
                format!("r={r_sce} n={n}: success achievability bound <= (1/n) log(1 - eps)"),
                ach.value,
                ls,
                ROUNDING_SLACK,
            ));
        }
    }
    Ok(())
}

/// A random conditional type with the given shape and blocklength.
pub fn random_conditional_type<R: Rng>(rng: &mut R, nx: usize, ny: usize, n: usize) -> ConditionalType {
    let p = random_pmf(rng, nx);
    let input = nearest_type(&p, n);
    let joint = input
        .counts()
        .iter()
        .map(|&c| {
            let q = random_pmf(rng, ny);
            nearest_type_counts(&q, c, ny)
        })
        .collect();
    ConditionalType::new(joint).expect("consistent counts")
}

fn nearest_type_counts(q: &Pmf<f64>, c: usize, ny: usize) -> Vec<usize> {
    if c == 0 {
        vec![0; ny]
    } else {
        nearest_type(q, c).counts().to_vec()
    }
}

fn types_suite(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<()> {
    const S: &str = "types";
    for k in 1..=3usize {
        for n in 1..=8usize {
            let logs: Vec<f64> = enumerate_types(k, n)?.iter().map(log_type_class_size).collect();
            let total = f64::log_sum_exp(&logs);
            report.push(Check::le(
                S,
                format!("k={k} n={n}: |log sum |T| - n log k|"),
                (total - n as f64 * (k as f64).ln()).abs(),
                1e-9,
                0.0,
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7459_7065);
    for i in 0..200 {
        let k = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=40);
        let p = random_pmf(&mut rng, k);
        let t = nearest_type(&p, n).to_pmf();
        let dev = p
            .probs()
            .iter()
            .zip(t.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        report.push(Check::le(
            S,
            format!("instance {i} (k={k}, n={n}): max |p - nearest type|"),
            dev,
            1.0 / n as f64,
            ROUNDING_SLACK,
        ));
    }
    for i in 0..200 {
        let nx = rng.gen_range(1..=4);
        let ny = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=60);
        let v = random_conditional_type(&mut rng, nx, ny, n);
        let log_size = log_conditional_class_size(&v);
        let nh = n as f64 * v.conditional_entropy();
        let poly = (nx * ny) as f64 * ((n + 1) as f64).ln();
        report.push(Check::le(
            S,
            format!("conditional type {i} ({nx}x{ny}, n={n}): n H(Y|X) - |X||Y| log(n+1) <= log |shell|"),
            nh - poly,
            log_size,
            1e-9,
        ));
        report.push(Check::le(
            S,
            format!("conditional type {i} ({nx}x{ny}, n={n}): log |shell| <= n H(Y|X)"),
            log_size,
            nh,
            1e-9,
        ));
    }
    Ok(())
}

fn continuity_suite(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<()> {
    const S: &str = "continuity";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x636f_6e74);
    let inv_e = (-1.0f64).exp();
    for i in 0..cfg.instances {
        // Divergence continuity: p, p' ≪ q with |p − p'| ≤ ξ.
        let k = rng.gen_range(2..=5);
        let mut q = random_pmf(&mut rng, k).into_vec();
        if rng.gen_bool(0.3) {
            q[rng.gen_range(0..k)] = 0.0;
        }
        let q = Pmf::normalized(q)?;
        let on_support = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let s = random_pmf(rng, k).into_vec();
            let masked: Vec<f64> = s
                .iter()
                .zip(q.probs())
                .map(|(a, b)| if *b > 0.0 { *a } else { 0.0 })
                .collect();
            Pmf::normalized(masked).expect("support is nonempty").into_vec()
        };
        let xi = inv_e * rng.gen_range(1e-6..1.0);
        let p = on_support(&mut rng);
        let s = on_support(&mut rng);
        let p2 = mix(&p, &s, xi * rng.gen_range(0.0..=1.0));
        let c = kl_continuity_check(&Pmf::normalized(p)?, &Pmf::normalized(p2)?, &q, xi)?;
        report.push(Check::le(
            S,
            format!("divergence instance {i} (k={k})"),
            c.lhs,
            c.bound,
            0.0,
        ));

        // Mutual-information continuity, channel perturbation.
        let nx = rng.gen_range(1..=5);
        let ny = rng.gen_range(2..=5);
        let xi = rng.gen_range(1e-6..=1.0) / (nx as f64 * std::f64::consts::E);
        let p = random_pmf(&mut rng, nx);
        let v = random_channel(&mut rng, nx, ny);
        let rows: Vec<Vec<f64>> = (0..nx)
            .map(|x| {
                let t = (xi / p.get(x)).min(1.0) * rng.gen_range(0.0..=1.0);
                let s = random_pmf(&mut rng, ny);
                mix(v.row(x), s.probs(), t)
            })
            .collect();
        let vt = Channel::with_row_tolerance(v.input_labels().to_vec(), v.output_labels().to_vec(), rows, 1e-9)?;
        let c = mi_continuity_check(
            MiPerturbation::Channel {
                p: &p,
                v: &v,
                v_tilde: &vt,
            },
            xi,
        )?;
        report.push(Check::le(
            S,
            format!("mutual-information channel instance {i} ({nx}x{ny})"),
            c.lhs,
            c.bound,
            0.0,
        ));

        // Mutual-information continuity, input perturbation.
        let s = random_pmf(&mut rng, nx);
        let pt = Pmf::normalized(mix(p.probs(), s.probs(), xi * rng.gen_range(0.0..=1.0)))?;
        let c = mi_continuity_check(
            MiPerturbation::Input {
                p: &p,
                p_tilde: &pt,
                v: &v,
            },
            xi,
        )?;
        report.push(Check::le(
            S,
            format!("mutual-information input instance {i} ({nx}x{ny})"),
            c.lhs,
            c.bound,
            0.0,
        ));
    }
    Ok(())
}

const DOMINANCE_TOL: f64 = 1e-12;

fn definetti_suite(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<()> {
    const S: &str = "definetti";
    let max_k = cfg.alphabet.unwrap_or(3);
    let max_n = cfg.n.unwrap_or(6);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6465_6669);
    for k in 2..=max_k {
        for n in 1..=max_n {
            let types = enumerate_types(k, n)?;
            // Extreme points: uniform laws on single type classes, where equality holds.
            for t in &types {
                let r = definetti_dominance_check(&TypeMixture::single_class(t.clone()));
                report.push(Check::le(
                    S,
                    format!("k={k} n={n} class {:?}: |ratio - 1|", t.counts()),
                    (r.max_ratio - 1.0).abs(),
                    DOMINANCE_TOL,
                    0.0,
                ));
            }
            for j in 0..5 {
                let w = random_pmf(&mut rng, types.len());
                let mixture: Vec<(TypeVector, f64)> = types.iter().cloned().zip(w.into_vec()).collect();
                let r = definetti_dominance_check(&TypeMixture::new(mixture)?);
                report.push(Check::le(
                    S,
                    format!("k={k} n={n} random mixture {j}: max ratio"),
                    r.max_ratio,
                    1.0 + DOMINANCE_TOL,
                    0.0,
                ));
            }
            let q = random_pmf(&mut rng, k);
            let r = definetti_dominance_check(&TypeMixture::iid(&q, n)?);
            report.push(Check::le(
                S,
                format!("k={k} n={n} i.i.d. law: max ratio"),
                r.max_ratio,
                1.0 + DOMINANCE_TOL,
                0.0,
            ));
        }
    }
    Ok(())
}

/// Every composition of `total` into `parts` parts (exposed for exhaustive tests).
pub fn all_compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    compositions(&mut cur, 0, total, &mut |c| out.push(c.to_vec()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        assert_eq!("oracle".parse::<Suite>().unwrap(), Suite::Oracle);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        let cfg = VerifyConfig {
            instances: 50,
            ..VerifyConfig::default()
        };
        for s in [Suite::Types, Suite::Continuity, Suite::Definetti] {
            let r = run(s, &cfg).unwrap();
            assert!(r.passed(), "{:?}", r.failures().next());
        }
    }

    #[test]
    fn infinite_sides_compare() {
        let c = Check::le("x", "inf".into(), f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0);
        assert!(c.pass && c.margin == 0.0);
        assert!(!Check::le("x", "nan".into(), f64::NAN, 0.0, 0.0).pass);
    }
}
