//! Shared-randomness simulation, bracketed through NS values.
//!
//! The SR distortion itself is a bilinear program and is never optimized;
//! instead NS values at two message sizes sandwich it via a rounding
//! argument, and the SR exponents coincide with the NS ones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{ExponentResult, ExponentSolver};
use crate::msgsize::{miss_probability, MessageSize};
use crate::prob::Channel;

/// Bracket on the SR distortion at message size `M′`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrSandwich {
    /// `ε^NS(M′)`.
    pub lower: f64,
    /// `(1 − (1−1/M)^{M′})·ε^NS(M) + (1−1/M)^{M′}`.
    pub upper: f64,
    /// The residual `(1−1/M)^{M′}`.
    pub residual: f64,
    pub m: f64,
    pub m_prime: f64,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Sandwich for `ε^SR(M′)` from `ε^NS(M)` and `ε^NS(M′)`.
///
/// Sizes are taken as reals so that astronomically large `⌊e^{nr}⌋` can be
/// passed through; they must be at least one.
pub fn sr_sandwich(eps_ns_at_m: f64, eps_ns_at_m_prime: f64, m: f64, m_prime: f64) -> Result<SrSandwich> {
    check_unit("eps_ns_at_M", eps_ns_at_m)?;
    check_unit("eps_ns_at_M'", eps_ns_at_m_prime)?;
    if !(m >= 1.0) || !(m_prime >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "message sizes must be >= 1, got {m} and {m_prime}"
        )));
    }
    let residual = miss_probability(m, m_prime);
    // 1 − residual without cancellation.
    let hit = if m > 1.0 {
        -(m_prime * (-1.0 / m).ln_1p()).exp_m1()
    } else {
        1.0
    };
    Ok(SrSandwich {
        lower: eps_ns_at_m_prime,
        upper: (hit * eps_ns_at_m + residual).min(1.0),
        residual,
        m,
        m_prime,
    })
}

/// Sandwich with exact sizes, e.g. from [`MessageSize::from_rate`].
pub fn sr_sandwich_sizes(
    eps_ns_at_m: f64,
    eps_ns_at_m_prime: f64,
    m: &MessageSize,
    m_prime: &MessageSize,
) -> Result<SrSandwich> {
    sr_sandwich(eps_ns_at_m, eps_ns_at_m_prime, m.to_f64(), m_prime.to_f64())
}

/// Bounds `((1 − 1/e)(1 − ε), 1 − ε)` on the SR success probability at `M = M′`.
pub fn sr_success_sandwich(eps_ns: f64) -> Result<(f64, f64)> {
    check_unit("eps_ns", eps_ns)?;
    let success = 1.0 - eps_ns;
    Ok((-(-1.0f64).exp_m1() * success, success))
}

/// Residual `(1 − 1/⌊e^{n(r−δ)}⌋)^{⌊e^{nr}⌋}` of the rate-shift argument,
/// decaying like `exp(−e^{nδ})`.
pub fn rounding_residual(n: usize, r: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !(delta < r) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < delta < r, got delta = {delta}, r = {r}"
        )));
    }
    let m = MessageSize::from_rate(n, r - delta)?;
    let mp = MessageSize::from_rate(n, r)?;
    Ok(miss_probability(m.to_f64(), mp.to_f64()))
}

/// SR exponents, which equal the NS ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrExponents {
    pub ee: ExponentResult,
    pub sce: ExponentResult,
    pub note: &'static str,
}

const SR_NOTE: &str = "SR exponents equal the NS exponents: the rounding sandwich loses only a \
doubly-exponentially small residual after an arbitrarily small rate shift";

pub fn sr_exponents(w: &Channel<f64>, r: f64) -> Result<SrExponents> {
    let s = ExponentSolver::new(w.clone());
    sr_exponents_with(&s, r)
}

pub fn sr_exponents_with(s: &ExponentSolver, r: f64) -> Result<SrExponents> {
    Ok(SrExponents {
        ee: s.error_exponent(r)?,
        sce: s.sc_exponent(r)?,
        note: SR_NOTE,
    })
}
