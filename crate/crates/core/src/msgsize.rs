//! Message sizes, including the exact `⌊e^{n r}⌋` convention for rates.
//!
//! `e^{x}` is evaluated in big-integer fixed point with enough guard bits
//! that the floor is certain; when the fractional part lands too close to an
//! integer to decide, the precision is doubled and the evaluation repeated.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A positive message-alphabet size kept both exactly and as a log.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageSize {
    exact: BigUint,
    ln: f64,
}

impl MessageSize {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("message size must be at least 1".into()));
        }
        Ok(Self {
            exact: BigUint::from(m),
            ln: (m as f64).ln(),
        })
    }

    /// `M = ⌊e^{n r}⌋` computed exactly for the binary value of `r`.
    pub fn from_rate(n: usize, r: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rate must be positive and finite, got {r}"
            )));
        }
        let exact = floor_exp_scaled(n as u64, r)?;
        let ln = ln_biguint(&exact);
        Ok(Self { exact, ln })
    }

    pub fn exact(&self) -> &BigUint {
        &self.exact
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.exact.to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Natural log of the size.
    pub fn ln(&self) -> f64 {
        self.ln
    }
}

impl std::fmt::Display for MessageSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.exact)
    }
}

/// Effective rate `r_n = (1/n) log ⌊e^{n r}⌋`.
pub fn effective_rate(n: usize, r: f64) -> Result<f64> {
    Ok(MessageSize::from_rate(n, r)?.ln() / n as f64)
}

/// Natural log of a positive big integer, accurate to double precision.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Splits a finite positive `f64` as `mantissa · 2^exponent`.
fn decompose(r: f64) -> (u64, i64) {
    let bits = r.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

/// `⌊e^{n·r}⌋` with `n·r` taken exactly.
fn floor_exp_scaled(n: u64, r: f64) -> Result<BigUint> {
    let (mant, e2) = decompose(r);
    let num = BigUint::from(mant) * BigUint::from(n);
    let x_approx = n as f64 * r;
    if x_approx > 1.0e6 {
        return Err(Error::InvalidArgument(format!("n*r = {x_approx} is too large")));
    }
    let mut guard = 96u64;
    for _ in 0..6 {
        if let Some(v) = try_floor_exp(&num, e2, x_approx, guard) {
            return Ok(v);
        }
        guard *= 2;
    }
    // e^x for rational x != 0 is irrational, so this is unreachable in practice.
    try_floor_exp(&num, e2, x_approx, guard)
        .map_or_else(|| Err(Error::Solver("could not resolve floor(exp(n r))".into())), Ok)
}

/// One fixed-point evaluation; `None` when the floor is undecidable at this precision.
fn try_floor_exp(num: &BigUint, e2: i64, x_approx: f64, guard: u64) -> Option<BigUint> {
    // Argument reduction: y = x / 2^k with y < 2^-8.
    let k: u64 = if x_approx <= 0.0 {
        0
    } else {
        (x_approx.log2().ceil().max(0.0) as u64) + 8
    };
    let int_bits = (x_approx * std::f64::consts::LOG2_E).ceil() as u64 + 2;
    let p = int_bits + 2 * k + guard;
    // X = floor(x · 2^p), y = X >> k.
    let shift = p as i64 + e2;
    let x_fixed = if shift >= 0 {
        num << (shift as u64)
    } else {
        num >> ((-shift) as u64)
    };
    let y = x_fixed >> k;
    let one = BigUint::one() << p;
    // Taylor series for e^y.
    let mut sum = one.clone();
    let mut term = one;
    let mut i = 1u64;
    loop {
        term = (&term * &y) >> p;
        term /= i;
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..k {
        sum = (&sum * &sum) >> p;
    }
    let floor = &sum >> p;
    let frac = &sum - (&floor << p);
    // Accumulated error is far below 2^(p - guard/2) units; demand that margin.
    let margin = BigUint::one() << (p - guard / 2);
    let top = (BigUint::one() << p) - &margin;
    if frac < margin || frac > top {
        return None;
    }
    Some(floor)
}

/// `(1 − 1/M)^{M′}` evaluated as `exp(M′ · log1p(−1/M))`.
pub fn miss_probability(m: f64, m_prime: f64) -> f64 {
    if m <= 1.0 {
        return if m_prime > 0.0 { 0.0 } else { 1.0 };
    }
    (m_prime * (-1.0 / m).ln_1p()).exp()
}
