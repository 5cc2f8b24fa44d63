//! Probability vectors, channels and distortion measures.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on the number of entries of an explicit tensor-power channel.
pub const DEFAULT_TENSOR_CAP: usize = 10_000_000;

/// How a constructor treats a mass vector whose sum is not exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Reject unless the sum is within the scalar's normalization tolerance.
    Strict,
    /// Divide by the sum (which must be positive).
    Renormalize,
}

/// A probability mass function over a finite alphabet in dense index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T: Scalar> {
    probs: Vec<T>,
}

impl<T: Scalar> Pmf<T> {
    /// Strict constructor: entries must be non-negative and sum to one within tolerance.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        Self::with_mode(probs, Normalization::Strict)
    }

    /// Constructor that rescales non-negative mass to sum to one.
    pub fn normalized(probs: Vec<T>) -> Result<Self> {
        Self::with_mode(probs, Normalization::Renormalize)
    }

    pub fn with_mode(probs: Vec<T>, mode: Normalization) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        let tol = T::normalization_tolerance();
        let mut sum = T::zero();
        for (i, p) in probs.iter().enumerate() {
            if p.to_f64().map(|v| v.is_nan()).unwrap_or(true) {
                return Err(Error::InvalidPmf(format!("entry {i} is not a number")));
            }
            if *p < T::zero() {
                return Err(Error::InvalidPmf(format!(
                    "entry {i} is negative ({})",
                    p.to_f64_lossy()
                )));
            }
            sum = sum + p.clone();
        }
        match mode {
            Normalization::Strict => {
                if (sum.clone() - T::one()).abs() > tol {
                    return Err(Error::InvalidPmf(format!(
                        "entries sum to {} instead of 1",
                        sum.to_f64_lossy()
                    )));
                }
                Ok(Self { probs })
            }
            Normalization::Renormalize => {
                if sum <= T::zero() {
                    return Err(Error::InvalidPmf("total mass is zero".into()));
                }
                if (sum.clone() - T::one()).abs() <= tol {
                    return Ok(Self { probs });
                }
                Ok(Self {
                    probs: probs.into_iter().map(|p| p / sum.clone()).collect(),
                })
            }
        }
    }

    /// Uniform distribution on `k` symbols.
    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "uniform pmf needs a non-empty alphabet");
        let w = T::one() / T::from_usize(k).expect("alphabet size");
        Self { probs: vec![w; k] }
    }

    /// Point mass at symbol `i` of a `k`-symbol alphabet.
    pub fn point(k: usize, i: usize) -> Self {
        assert!(i < k);
        let mut probs = vec![T::zero(); k];
        probs[i] = T::one();
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> &T {
        &self.probs[i]
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probs
    }

    /// Indices with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] > T::zero()).collect()
    }

    /// Smallest strictly positive entry.
    pub fn min_positive(&self) -> T {
        let mut best: Option<T> = None;
        for p in &self.probs {
            if *p > T::zero() && best.as_ref().is_none_or(|b| p < b) {
                best = Some(p.clone());
            }
        }
        best.expect("a pmf has positive mass somewhere")
    }
}

/// A row-stochastic matrix `W(y|x)` with labelled input and output alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<T: Scalar> {
    input: Vec<String>,
    output: Vec<String>,
    rows: Vec<Vec<T>>,
    w_min: T,
}

fn default_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

impl<T: Scalar> Channel<T> {
    /// Channel with labels `0..|X|` and `0..|Y|`; rows must be strict pmfs.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, |r| r.len());
        Self::with_labels(default_labels(nx), default_labels(ny), rows)
    }

    pub fn with_labels(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        Self::build(input, output, rows, None)
    }

    /// Accept rows whose sums are within `tol` of one, renormalizing them.
    pub fn with_row_tolerance(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<T>>, tol: T) -> Result<Self> {
        Self::build(input, output, rows, Some(tol))
    }

    fn build(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<T>>, loose: Option<T>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidChannel("no input symbols".into()));
        }
        if input.len() != rows.len() {
            return Err(Error::InvalidChannel(format!(
                "{} input labels for {} rows",
                input.len(),
                rows.len()
            )));
        }
        if output.is_empty() {
            return Err(Error::InvalidChannel("no output symbols".into()));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != output.len() {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {}",
                    row.len(),
                    output.len()
                )));
            }
            let pmf = match &loose {
                None => Pmf::new(row),
                Some(tol) => {
                    let sum = row.iter().fold(T::zero(), |a, b| a + b.clone());
                    if (sum.clone() - T::one()).abs() > *tol {
                        return Err(Error::InvalidChannel(format!(
                            "row {x} sums to {} instead of 1",
                            sum.to_f64_lossy()
                        )));
                    }
                    // Rows already stochastic to working precision are kept verbatim.
                    let strict = (sum - T::one()).abs() <= T::normalization_tolerance();
                    if strict {
                        Pmf::new(row)
                    } else {
                        Pmf::normalized(row)
                    }
                }
            }
            .map_err(|e| Error::InvalidChannel(format!("row {x}: {e}")))?;
            clean.push(pmf.into_vec());
        }
        let mut w_min: Option<T> = None;
        for row in &clean {
            for w in row {
                if *w > T::zero() && w_min.as_ref().is_none_or(|m| w < m) {
                    w_min = Some(w.clone());
                }
            }
        }
        Ok(Self {
            input,
            output,
            rows: clean,
            w_min: w_min.expect("rows are pmfs"),
        })
    }

    /// Noiseless channel on `d` symbols.
    pub fn identity(d: usize) -> Self {
        let rows = (0..d).map(|x| Pmf::<T>::point(d, x).into_vec()).collect();
        Self::new(rows).expect("identity is stochastic")
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: T) -> Result<Self> {
        let q = T::one() - p.clone();
        Self::new(vec![vec![q.clone(), p.clone()], vec![p, q]])
    }

    /// Channel whose every one of `nx` rows equals `row`.
    pub fn constant(nx: usize, row: Pmf<T>) -> Self {
        Self::new(vec![row.into_vec(); nx]).expect("rows are pmfs")
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.output.len()
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[T] {
        &self.rows[x]
    }

    pub fn row_pmf(&self, x: usize) -> Pmf<T> {
        Pmf {
            probs: self.rows[x].clone(),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.rows[x][y]
    }

    /// Minimum over the strictly positive entries.
    pub fn w_min(&self) -> &T {
        &self.w_min
    }

    /// Output distribution `Σ_x p(x) W(·|x)`.
    pub fn output_distribution(&self, p: &Pmf<T>) -> Result<Pmf<T>> {
        if p.len() != self.input_size() {
            return Err(Error::DimensionMismatch(format!(
                "input pmf has {} entries, channel has {} inputs",
                p.len(),
                self.input_size()
            )));
        }
        let mut out = vec![T::zero(); self.output_size()];
        for (x, row) in self.rows.iter().enumerate() {
            for (y, w) in row.iter().enumerate() {
                out[y] = out[y].clone() + p.probs[x].clone() * w.clone();
            }
        }
        Ok(Pmf { probs: out })
    }

    /// Convert entries to `f64`.
    pub fn to_f64(&self) -> Channel<f64> {
        Channel {
            input: self.input.clone(),
            output: self.output.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_f64_lossy()).collect())
                .collect(),
            w_min: self.w_min.to_f64_lossy(),
        }
    }
}

/// Total variation distance `½ Σ |p − q|`.
pub fn tvd<T: Scalar>(p: &Pmf<T>, q: &Pmf<T>) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "pmfs over {} and {} symbols",
            p.len(),
            q.len()
        )));
    }
    Ok(half_l1(p.probs(), q.probs()))
}

fn half_l1<T: Scalar>(a: &[T], b: &[T]) -> T {
    let s = a
        .iter()
        .zip(b)
        .fold(T::zero(), |acc, (u, v)| acc + (u.clone() - v.clone()).abs());
    s / T::from_u8(2).unwrap()
}

/// Worst-case-over-inputs TVD between two channels.
pub fn channel_tvd<T: Scalar>(w: &Channel<T>, v: &Channel<T>) -> Result<T> {
    if w.input_size() != v.input_size() || w.output_size() != v.output_size() {
        return Err(Error::DimensionMismatch(format!(
            "channels of shape {}x{} and {}x{}",
            w.input_size(),
            w.output_size(),
            v.input_size(),
            v.output_size()
        )));
    }
    let mut best = T::zero();
    for x in 0..w.input_size() {
        best = T::max_of(best, half_l1(w.row(x), v.row(x)));
    }
    Ok(best)
}

/// Value `Σ (p − f)_+` of bringing `p` under the envelope `f`, and the
/// minimizing pmf `p̃ ≤ f` realising it as a TVD.
///
/// Mass above the envelope is clipped to `f` and redistributed onto the
/// symbols with slack, proportionally to their slack `f − p`.
pub fn positive_part_gap<T: Scalar>(p: &Pmf<T>, f: &[T]) -> Result<(T, Pmf<T>)> {
    if f.len() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "envelope has {} entries, pmf has {}",
            f.len(),
            p.len()
        )));
    }
    let mut total = T::zero();
    for (i, v) in f.iter().enumerate() {
        if *v < T::zero() {
            return Err(Error::InvalidArgument(format!("envelope entry {i} is negative")));
        }
        total = total + v.clone();
    }
    if total < T::one() - T::normalization_tolerance() {
        return Err(Error::InvalidArgument(format!(
            "envelope mass {} is below one; no pmf fits underneath",
            total.to_f64_lossy()
        )));
    }
    let mut excess = T::zero();
    let mut slack = T::zero();
    for (pa, fa) in p.probs().iter().zip(f) {
        excess = excess + (pa.clone() - fa.clone()).positive_part();
        slack = slack + (fa.clone() - pa.clone()).positive_part();
    }
    if excess.is_zero() {
        return Ok((T::zero(), p.clone()));
    }
    let ratio = excess.clone() / slack;
    let probs = p
        .probs()
        .iter()
        .zip(f)
        .map(|(pa, fa)| {
            if fa < pa {
                fa.clone()
            } else {
                pa.clone() + (fa.clone() - pa.clone()) * ratio.clone()
            }
        })
        .collect();
    Ok((excess, Pmf { probs }))
}

/// Explicit `n`-fold product channel, inputs and outputs in lexicographic
/// order of sequences (first letter most significant).
pub fn tensor_power<T: Scalar>(w: &Channel<T>, n: usize) -> Result<Channel<T>> {
    tensor_power_capped(w, n, DEFAULT_TENSOR_CAP)
}

pub fn tensor_power_capped<T: Scalar>(w: &Channel<T>, n: usize, cap: usize) -> Result<Channel<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
    }
    let nx = w.input_size();
    let ny = w.output_size();
    let too_big = || Error::SizeCap(format!("{nx}^{n} x {ny}^{n} entries exceed the cap of {cap}"));
    let sx = checked_pow(nx, n).ok_or_else(too_big)?;
    let sy = checked_pow(ny, n).ok_or_else(too_big)?;
    if sx.checked_mul(sy).is_none_or(|e| e > cap) {
        return Err(too_big());
    }
    let mut rows = vec![vec![T::one()]];
    let mut inputs = vec![String::new()];
    let mut outputs = vec![String::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(rows.len() * nx);
        for r in &rows {
            for x in 0..nx {
                let mut row = Vec::with_capacity(r.len() * ny);
                for a in r {
                    for y in 0..ny {
                        row.push(a.clone() * w.get(x, y).clone());
                    }
                }
                next.push(row);
            }
        }
        rows = next;
        inputs = extend_labels(&inputs, w.input_labels());
        outputs = extend_labels(&outputs, w.output_labels());
    }
    // Products of exact pmfs are exact; for floats allow accumulated rounding.
    let tol = T::normalization_tolerance() * T::from_usize(n * ny.max(2)).unwrap();
    Channel::with_row_tolerance(inputs, outputs, rows, tol)
}

fn extend_labels(prefixes: &[String], alphabet: &[String]) -> Vec<String> {
    let sep = if alphabet.iter().all(|a| a.chars().count() == 1) {
        ""
    } else {
        ","
    };
    let mut out = Vec::with_capacity(prefixes.len() * alphabet.len());
    for p in prefixes {
        for a in alphabet {
            if p.is_empty() {
                out.push(a.clone());
            } else {
                out.push(format!("{p}{sep}{a}"));
            }
        }
    }
    out
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn pmf(v: &[f64]) -> Pmf<f64> {
        Pmf::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tvd_examples() {
        assert_eq!(tvd(&pmf(&[0.3, 0.7]), &pmf(&[0.3, 0.7])).unwrap(), 0.0);
        assert_eq!(tvd(&pmf(&[1.0, 0.0]), &pmf(&[0.0, 1.0])).unwrap(), 1.0);
        assert!((tvd(&pmf(&[0.9, 0.1]), &pmf(&[0.5, 0.5])).unwrap() - 0.4).abs() < 1e-15);
        assert!(tvd(&pmf(&[1.0]), &pmf(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn channel_tvd_examples() {
        let bsc1 = Channel::<f64>::bsc(0.1).unwrap();
        let bsc2 = Channel::<f64>::bsc(0.2).unwrap();
        assert_eq!(channel_tvd(&bsc1, &bsc1).unwrap(), 0.0);
        assert!((channel_tvd(&bsc1, &bsc2).unwrap() - 0.1).abs() < 1e-15);
        let id2 = Channel::<f64>::identity(2);
        let flat = Channel::constant(2, Pmf::uniform(2));
        assert_eq!(channel_tvd(&id2, &flat).unwrap(), 0.5);
    }

    #[test]
    fn positive_part_gap_examples() {
        let (v, opt) = positive_part_gap(&pmf(&[0.6, 0.4]), &[0.5, 0.7]).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
        assert!((opt.probs()[0] - 0.5).abs() < 1e-15 && (opt.probs()[1] - 0.5).abs() < 1e-15);

        let (v, opt) = positive_part_gap(&pmf(&[0.2, 0.8]), &[0.3, 0.9]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(opt.probs(), &[0.2, 0.8]);

        let (v, opt) = positive_part_gap(&pmf(&[1.0, 0.0]), &[0.25, 1.0]).unwrap();
        assert_eq!(v, 0.75);
        assert_eq!(opt.probs(), &[0.25, 0.75]);

        assert!(positive_part_gap(&pmf(&[0.5, 0.5]), &[0.2, 0.3]).is_err());
    }

    #[test]
    fn positive_part_gap_is_exact_over_rationals() {
        let p = Pmf::new(vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        let (v, opt) = positive_part_gap(&p, &[ratio(1, 2), ratio(7, 10)]).unwrap();
        assert_eq!(v, ratio(1, 10));
        assert_eq!(opt.probs(), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(tvd(&opt, &p).unwrap(), v);
    }

    #[test]
    fn strictness_flag() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        let p = Pmf::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::<f64>::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn w_min_ignores_zeros() {
        let w = Channel::new(vec![vec![1.0, 0.0], vec![0.25, 0.75]]).unwrap();
        assert_eq!(*w.w_min(), 0.25);
    }

    #[test]
    fn tensor_power_examples() {
        let w = Channel::<f64>::bsc(0.1).unwrap();
        assert_eq!(tensor_power(&w, 1).unwrap(), w);
        let id4 = tensor_power(&Channel::<f64>::identity(2), 2).unwrap();
        assert_eq!(id4.rows(), Channel::<f64>::identity(4).rows());
        assert_eq!(id4.input_labels(), &["00", "01", "10", "11"]);
        let w2 = tensor_power(&w, 2).unwrap();
        assert!((w2.get(0, 1) - 0.09).abs() < 1e-15);
        assert!(matches!(tensor_power_capped(&w, 3, 10), Err(Error::SizeCap(_))));
    }

    #[test]
    fn exact_tensor_power_stays_exact() {
        let w: Channel<BigRational> = Channel::bsc(ratio(1, 10)).unwrap();
        let w3 = tensor_power(&w, 3).unwrap();
        assert_eq!(*w3.get(0, 7), ratio(1, 1000));
        assert_eq!(*w3.w_min(), ratio(1, 1000));
    }
}
