//! Method-of-types combinatorics.
//!
//! Types are integer count vectors with a fixed denominator `n`; class sizes
//! are handled exclusively through log-factorials so that nothing
//! astronomically large is ever materialised.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::prob::{Channel, Pmf};

/// Default cap on the number of types an enumeration may produce.
pub const DEFAULT_TYPE_CAP: usize = 10_000_000;

/// Empirical distribution with denominator `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<usize>,
    n: usize,
}

impl TypeVector {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("type over an empty alphabet".into()));
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidArgument("type with denominator 0".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// The pmf `counts / n`.
    pub fn to_pmf(&self) -> Pmf<f64> {
        Pmf::normalized(self.counts.iter().map(|&c| c as f64).collect()).expect("positive denominator")
    }
}

/// Joint type of an input/output sequence pair (a `V`-shell together with its input type).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalType {
    joint: Vec<Vec<usize>>,
    n: usize,
}

impl ConditionalType {
    pub fn new(joint: Vec<Vec<usize>>) -> Result<Self> {
        let ny = joint.first().map_or(0, |r| r.len());
        if ny == 0 || joint.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidArgument(
                "joint counts must be a non-empty rectangle".into(),
            ));
        }
        let n = joint.iter().flatten().sum();
        if n == 0 {
            return Err(Error::InvalidArgument("joint type with denominator 0".into()));
        }
        Ok(Self { joint, n })
    }

    pub fn joint(&self) -> &[Vec<usize>] {
        &self.joint
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Input (row-marginal) type.
    pub fn input_type(&self) -> TypeVector {
        TypeVector {
            counts: self.joint.iter().map(|r| r.iter().sum()).collect(),
            n: self.n,
        }
    }

    /// Output (column-marginal) type.
    pub fn output_type(&self) -> TypeVector {
        let ny = self.joint[0].len();
        TypeVector {
            counts: (0..ny).map(|y| self.joint.iter().map(|r| r[y]).sum()).collect(),
            n: self.n,
        }
    }

    /// Conditional entropy `H(Y|X)` of the joint type, in nats.
    pub fn conditional_entropy(&self) -> f64 {
        let n = self.n as f64;
        let mut h = 0.0;
        for row in &self.joint {
            let rx: usize = row.iter().sum();
            for &c in row {
                if c > 0 {
                    h += c as f64 / n * (rx as f64 / c as f64).ln();
                }
            }
        }
        h
    }
}

/// `log C(n + k − 1, k − 1)`, the log-number of types on `k` symbols.
pub fn log_num_types(k: usize, n: usize) -> f64 {
    log_multinomial(&[n, k - 1])
}

/// `log (Σc)! / Π c!`.
pub fn log_multinomial(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    let mut acc = ln_factorial(n as u64);
    for &c in counts {
        acc -= ln_factorial(c as u64);
    }
    acc.max(0.0)
}

/// All compositions of `n` into `k` parts in lexicographic order.
pub fn enumerate_types(k: usize, n: usize) -> Result<Vec<TypeVector>> {
    enumerate_types_capped(k, n, DEFAULT_TYPE_CAP)
}

pub fn enumerate_types_capped(k: usize, n: usize, cap: usize) -> Result<Vec<TypeVector>> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument("need k >= 1 and n >= 1".into()));
    }
    let count = log_num_types(k, n).exp();
    if count > cap as f64 + 0.5 {
        return Err(Error::SizeCap(format!(
            "about {count:.3e} types for k = {k}, n = {n} exceed the cap of {cap}"
        )));
    }
    let mut out = Vec::with_capacity(count.round() as usize);
    let mut cur = vec![0usize; k];
    compositions(&mut cur, 0, n, &mut |c| out.push(TypeVector { counts: c.to_vec(), n }));
    Ok(out)
}

/// Visit every vector with the given prefix whose remaining entries sum to `left`.
pub(crate) fn compositions(cur: &mut [usize], pos: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        visit(cur);
        return;
    }
    for c in 0..=left {
        cur[pos] = c;
        compositions(cur, pos + 1, left - c, visit);
    }
}

/// `log |T_n(t)|`.
pub fn log_type_class_size(t: &TypeVector) -> f64 {
    log_multinomial(&t.counts)
}

/// `log |T_n(V, x^n)| = Σ_x log multinomial(row_x)`.
pub fn log_conditional_class_size(v: &ConditionalType) -> f64 {
    v.joint.iter().map(|r| log_multinomial(r)).sum()
}

/// Rounds `targets` (which sum to the integer `total`) to integers that sum
/// to `total`, each within one of its target, using largest remainders with
/// lowest-index tie-breaking. Only entries with positive target receive
/// round-up units.
fn largest_remainder(targets: &[f64], total: usize) -> Vec<usize> {
    const SNAP: f64 = 1e-9;
    let mut out = Vec::with_capacity(targets.len());
    let mut fracs = Vec::with_capacity(targets.len());
    for &t in targets {
        let t = t.max(0.0);
        let mut f = t.floor();
        if t - f > 1.0 - SNAP {
            f += 1.0;
        }
        let frac = (t - f).max(0.0);
        let frac = if frac < SNAP { 0.0 } else { frac };
        out.push(f as usize);
        fracs.push(frac);
    }
    let assigned: usize = out.iter().sum();
    let mut order: Vec<usize> = (0..targets.len()).collect();
    if assigned < total {
        order.sort_by(|&a, &b| fracs[b].partial_cmp(&fracs[a]).unwrap().then(a.cmp(&b)));
        let eligible: Vec<usize> = order.iter().copied().filter(|&i| targets[i] > 0.0).collect();
        let mut left = total - assigned;
        let mut k = 0;
        while left > 0 && !eligible.is_empty() {
            out[eligible[k % eligible.len()]] += 1;
            left -= 1;
            k += 1;
        }
    } else if assigned > total {
        order.sort_by(|&a, &b| fracs[a].partial_cmp(&fracs[b]).unwrap().then(b.cmp(&a)));
        let mut extra = assigned - total;
        for &i in order.iter().cycle() {
            if extra == 0 {
                break;
            }
            if out[i] > 0 {
                out[i] -= 1;
                extra -= 1;
            }
        }
    }
    out
}

/// A type with denominator `n` within `1/n` of `p` in every coordinate.
pub fn nearest_type(p: &Pmf<f64>, n: usize) -> TypeVector {
    assert!(n >= 1, "denominator must be positive");
    let targets: Vec<f64> = p.probs().iter().map(|v| v * n as f64).collect();
    TypeVector {
        counts: largest_remainder(&targets, n),
        n,
    }
}

/// Joint counts with row marginals `t` approximating `t(x)·V(y|x)` entrywise within one count.
pub fn nearest_conditional_type(v: &Channel<f64>, t: &TypeVector) -> Result<ConditionalType> {
    if t.alphabet_size() != v.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "type over {} symbols for a channel with {} inputs",
            t.alphabet_size(),
            v.input_size()
        )));
    }
    let joint = (0..v.input_size())
        .map(|x| {
            let tx = t.counts[x];
            let targets: Vec<f64> = v.row(x).iter().map(|w| w * tx as f64).collect();
            largest_remainder(&targets, tx)
        })
        .collect();
    Ok(ConditionalType { joint, n: t.n })
}

/// Per-sequence probability of the universal mixture `∫ q^{⊗n} dν`:
/// uniform over types, then uniform within the type class.
pub fn universal_type_mixture_mass(t: &TypeVector) -> f64 {
    (-log_num_types(t.alphabet_size(), t.n) - log_type_class_size(t)).exp()
}

/// Permutation-invariant pmf over `A^n`, stored as weights over types.
#[derive(Debug, Clone)]
pub struct TypeMixture {
    k: usize,
    n: usize,
    weights: Vec<(TypeVector, f64)>,
}

impl TypeMixture {
    /// Weights must be non-negative and sum to one; types must share `k` and `n`.
    pub fn new(weights: Vec<(TypeVector, f64)>) -> Result<Self> {
        let first = weights
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let (k, n) = (first.0.alphabet_size(), first.0.n);
        if weights.iter().any(|(t, _)| t.alphabet_size() != k || t.n != n) {
            return Err(Error::DimensionMismatch(
                "mixture types differ in alphabet or denominator".into(),
            ));
        }
        Pmf::new(weights.iter().map(|(_, w)| *w).collect())?;
        Ok(Self { k, n, weights })
    }

    /// Uniform distribution over one type class.
    pub fn single_class(t: TypeVector) -> Self {
        Self {
            k: t.alphabet_size(),
            n: t.n,
            weights: vec![(t, 1.0)],
        }
    }

    /// The i.i.d. law `q^{⊗n}` expressed through its type weights.
    pub fn iid(q: &Pmf<f64>, n: usize) -> Result<Self> {
        let weights = enumerate_types(q.len(), n)?
            .into_iter()
            .map(|t| {
                let mut lw = log_type_class_size(&t);
                for (c, p) in t.counts.iter().zip(q.probs()) {
                    if *c > 0 {
                        lw += *c as f64 * p.ln();
                    }
                }
                (t, lw.exp())
            })
            .collect();
        Ok(Self { k: q.len(), n, weights })
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[(TypeVector, f64)] {
        &self.weights
    }
}

/// Outcome of [`definetti_dominance_check`].
#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub holds: bool,
    /// `max_a p(a) / (C(n+|A|−1, n) · u(a))` over sequences with `p(a) > 0`.
    pub max_ratio: f64,
    pub argmax: Option<TypeVector>,
}

/// Checks `p(a) ≤ C(n+|A|−1, n)·u(a)` for every sequence `a`, where `u` is the
/// universal type mixture. Evaluated once per type since both sides are
/// constant on type classes.
pub fn definetti_dominance_check(p: &TypeMixture) -> DominanceReport {
    let log_poly = log_multinomial(&[p.n, p.k - 1]);
    let mut max_ratio = 0.0f64;
    let mut argmax = None;
    for (t, w) in &p.weights {
        if *w <= 0.0 {
            continue;
        }
        let log_class = log_type_class_size(t);
        let log_lhs = w.ln() - log_class;
        let log_rhs = log_poly + universal_type_mixture_mass(t).ln();
        let ratio = (log_lhs - log_rhs).exp();
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = Some(t.clone());
        }
    }
    DominanceReport {
        holds: max_ratio <= 1.0 + 1e-12,
        max_ratio,
        argmax,
    }
}

/// Outcome of a continuity-bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityCheck {
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

const PRECONDITION_SLACK: f64 = 1e-12;

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}

/// `|D(p‖q) − D(p′‖q)|` against `ξ|A| log(1/q_min) + |A| ξ log(1/ξ)`.
pub fn kl_continuity_check(p: &Pmf<f64>, p2: &Pmf<f64>, q: &Pmf<f64>, xi: f64) -> Result<ContinuityCheck> {
    let k = q.len();
    if p.len() != k || p2.len() != k {
        return Err(Error::DimensionMismatch("pmfs over different alphabets".into()));
    }
    if !(xi > 0.0 && xi < (-1.0f64).exp()) {
        return Err(Error::InvalidArgument(format!("xi = {xi} outside (0, 1/e)")));
    }
    for a in 0..k {
        if (p.get(a) - p2.get(a)).abs() > xi + PRECONDITION_SLACK {
            return Err(Error::InvalidArgument(format!("|p - p'| exceeds xi at symbol {a}")));
        }
        if *q.get(a) == 0.0 && (*p.get(a) > 0.0 || *p2.get(a) > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "symbol {a} has positive mass but zero reference mass"
            )));
        }
    }
    let lhs = (kl(p.probs(), q.probs()) - kl(p2.probs(), q.probs())).abs();
    let kf = k as f64;
    let bound = xi * kf * (1.0 / q.min_positive()).ln() + kf * xi * (1.0 / xi).ln();
    Ok(ContinuityCheck {
        lhs,
        bound,
        holds: lhs <= bound,
    })
}

/// Instance for [`mi_continuity_check`].
#[derive(Debug, Clone, Copy)]
pub enum MiPerturbation<'a> {
    /// Same input law, channel `v` replaced by `v_tilde` with `|p(x)(Ṽ − V)| ≤ ξ`.
    Channel {
        p: &'a Pmf<f64>,
        v: &'a Channel<f64>,
        v_tilde: &'a Channel<f64>,
    },
    /// Same channel, input law `p` replaced by `p_tilde` with `|p̃ − p| ≤ ξ`.
    Input {
        p: &'a Pmf<f64>,
        p_tilde: &'a Pmf<f64>,
        v: &'a Channel<f64>,
    },
}

fn mutual_info(p: &[f64], v: &Channel<f64>) -> f64 {
    let ny = v.output_size();
    let mut py = vec![0.0; ny];
    for (x, px) in p.iter().enumerate() {
        for y in 0..ny {
            py[y] += px * v.get(x, y);
        }
    }
    let mut acc = 0.0;
    for (x, px) in p.iter().enumerate() {
        for y in 0..ny {
            let w = *v.get(x, y);
            if *px > 0.0 && w > 0.0 {
                acc += px * w * (w / py[y]).ln();
            }
        }
    }
    acc
}

/// Mutual-information continuity under channel or input perturbations.
pub fn mi_continuity_check(instance: MiPerturbation<'_>, xi: f64) -> Result<ContinuityCheck> {
    let v = match instance {
        MiPerturbation::Channel { v, .. } | MiPerturbation::Input { v, .. } => v,
    };
    let nx = v.input_size();
    let ny = v.output_size();
    let (fx, fy) = (nx as f64, ny as f64);
    if !(xi > 0.0 && xi <= 1.0 / (fx * std::f64::consts::E)) {
        return Err(Error::InvalidArgument(format!("xi = {xi} outside (0, 1/(|X| e)]")));
    }
    let (lhs, bound) = match instance {
        MiPerturbation::Channel { p, v, v_tilde } => {
            if p.len() != nx || v_tilde.input_size() != nx || v_tilde.output_size() != ny {
                return Err(Error::DimensionMismatch("instance shapes disagree".into()));
            }
            for x in 0..nx {
                for y in 0..ny {
                    if (p.get(x) * (v_tilde.get(x, y) - v.get(x, y))).abs() > xi + PRECONDITION_SLACK {
                        return Err(Error::InvalidArgument(format!(
                            "channel perturbation exceeds xi at ({x}, {y})"
                        )));
                    }
                }
            }
            let lhs = (mutual_info(p.probs(), v) - mutual_info(p.probs(), v_tilde)).abs();
            (lhs, xi * fx * fy * ((1.0 / xi).ln() + (1.0 / (xi * fx)).ln()))
        }
        MiPerturbation::Input { p, p_tilde, v } => {
            if p.len() != nx || p_tilde.len() != nx {
                return Err(Error::DimensionMismatch("instance shapes disagree".into()));
            }
            for x in 0..nx {
                if (p.get(x) - p_tilde.get(x)).abs() > xi + PRECONDITION_SLACK {
                    return Err(Error::InvalidArgument(format!("input perturbation exceeds xi at {x}")));
                }
            }
            let lhs = (mutual_info(p.probs(), v) - mutual_info(p_tilde.probs(), v)).abs();
            (lhs, xi * fx * fy.ln() + xi * fx * fy * (1.0 / (xi * fx)).ln())
        }
    };
    Ok(ContinuityCheck {
        lhs,
        bound,
        holds: lhs <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(c: &[usize]) -> TypeVector {
        TypeVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let t = enumerate_types(2, 3).unwrap();
        let counts: Vec<_> = t.iter().map(|t| t.counts().to_vec()).collect();
        assert_eq!(counts, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(enumerate_types(1, 7).unwrap().len(), 1);
        assert_eq!(enumerate_types(3, 2).unwrap().len(), 6);
        assert!(matches!(enumerate_types_capped(5, 40, 1000), Err(Error::SizeCap(_))));
    }

    #[test]
    fn class_sizes() {
        assert!((log_type_class_size(&tv(&[1, 2])) - 3f64.ln()).abs() < 1e-12);
        assert_eq!(log_type_class_size(&tv(&[5, 0])), 0.0);
        assert!((log_type_class_size(&tv(&[2, 2])) - 6f64.ln()).abs() < 1e-12);
        let diag = ConditionalType::new(vec![vec![3, 0], vec![0, 2]]).unwrap();
        assert_eq!(log_conditional_class_size(&diag), 0.0);
        let v = ConditionalType::new(vec![vec![1, 1], vec![0, 0]]).unwrap();
        assert!((log_conditional_class_size(&v) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn nearest_type_examples() {
        let t = nearest_type(&Pmf::uniform(2), 3);
        assert_eq!(t.counts(), &[2, 1]);
        let p = Pmf::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(nearest_type(&p, 4).counts(), &[1, 2, 1]);
        assert_eq!(nearest_type(&Pmf::point(2, 0), 9).counts(), &[9, 0]);
        // 0.3 * 10 is 2.9999999999999996 in binary floating point.
        let p = Pmf::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(nearest_type(&p, 10).counts(), &[3, 7]);
    }

    #[test]
    fn nearest_conditional_type_examples() {
        let det = Channel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let j = nearest_conditional_type(&det, &tv(&[3, 2])).unwrap();
        assert_eq!(j.joint(), &[vec![0, 3], vec![2, 0]]);
        let bsc = Channel::bsc(0.25).unwrap();
        let j = nearest_conditional_type(&bsc, &tv(&[2, 2])).unwrap();
        let target = [[0.375, 0.125], [0.125, 0.375]];
        for x in 0..2 {
            assert_eq!(j.joint()[x].iter().sum::<usize>(), 2);
            for y in 0..2 {
                assert!((j.joint()[x][y] as f64 / 4.0 - target[x][y]).abs() <= 0.25);
            }
        }
    }

    #[test]
    fn mixture_masses() {
        assert!((universal_type_mixture_mass(&tv(&[1, 1])) - 1.0 / 6.0).abs() < 1e-15);
        assert!((universal_type_mixture_mass(&tv(&[4, 0])) - 1.0 / 5.0).abs() < 1e-15);
        for (k, n) in [(2, 5), (3, 4)] {
            let total: f64 = enumerate_types(k, n)
                .unwrap()
                .iter()
                .map(|t| log_type_class_size(t).exp() * universal_type_mixture_mass(t))
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dominance_examples() {
        let r = definetti_dominance_check(&TypeMixture::single_class(tv(&[2, 3])));
        assert!(r.holds && (r.max_ratio - 1.0).abs() < 1e-12);
        let iid = TypeMixture::iid(&Pmf::uniform(2), 6).unwrap();
        let r = definetti_dominance_check(&iid);
        assert!(r.holds && r.max_ratio < 1.0);
    }

    #[test]
    fn continuity_examples() {
        let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let q = Pmf::new(vec![0.3, 0.3, 0.4]).unwrap();
        let c = kl_continuity_check(&p, &p, &q, 0.1).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.holds);
        assert!(kl_continuity_check(&p, &p, &q, 0.4).is_err());

        let v = Channel::bsc(0.2).unwrap();
        let u = Pmf::uniform(2);
        let c = mi_continuity_check(
            MiPerturbation::Channel {
                p: &u,
                v: &v,
                v_tilde: &v,
            },
            0.01,
        )
        .unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!((c.bound - 0.01 * 4.0 * (100f64.ln() + 50f64.ln())).abs() < 1e-15);
        assert!((c.bound - 0.340687).abs() < 1e-6);
        assert!(mi_continuity_check(
            MiPerturbation::Input {
                p: &u,
                p_tilde: &u,
                v: &v
            },
            0.2
        )
        .is_err());
    }
}
