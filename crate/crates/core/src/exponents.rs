//! Error and strong converse exponents of NS simulation, and the finite-n
//! bound curves that sandwich the exact distortion.
//!
//! Every quantity is a one-dimensional optimization over a Rényi order of
//! `I_α(W)`; capacities are memoized per channel in an [`ExponentSolver`].

use std::collections::HashMap;
use std::f64::consts::E;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::msgsize::effective_rate;
use crate::optim::{golden_max, linear_grid, log_grid};
use crate::prob::Channel;
use crate::renyi::{renyi_capacity_with, CapacityOptions, RenyiOrder};

/// Capacity tolerance used inside exponent searches.
const CAPACITY_TOL: f64 = 1e-11;
/// How close a rate must be to a threshold before the result is flagged.
const BOUNDARY_TOL: f64 = 1e-9;
const EE_ALPHA_MIN: f64 = 1e-4;
const EE_ALPHA_MAX: f64 = 64.0;
const EE_ALPHA_CAP: f64 = 1e6;
const EE_GRID_POINTS: usize = 81;
const SCE_GRID_POINTS: usize = 101;
const GOLDEN_TOL: f64 = 1e-9;

/// A supremum over the Rényi order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    /// Value in nats; `+∞` when the objective is unbounded.
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub value: f64,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub argmax_alpha: f64,
    pub finite: bool,
    /// Spacing of the search grid around the reported argmax.
    pub grid_resolution: f64,
    pub warnings: Vec<String>,
}

impl ExponentResult {
    fn infinite(warning: Option<String>) -> Self {
        Self {
            value: f64::INFINITY,
            argmax_alpha: f64::INFINITY,
            finite: false,
            grid_resolution: 0.0,
            warnings: warning.into_iter().collect(),
        }
    }

    fn zero() -> Self {
        Self {
            value: 0.0,
            argmax_alpha: 0.0,
            finite: true,
            grid_resolution: 0.0,
            warnings: Vec::new(),
        }
    }
}

/// A finite-n bound on a normalized log-probability, with its validity flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteBound {
    /// Bound in nats per channel use; `−∞` is meaningful (exact zero).
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub value: f64,
    /// Whether `n` meets the hypothesis under which the bound is proven.
    pub valid: bool,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub argmax_alpha: f64,
    pub warnings: Vec<String>,
}

/// Correction terms of the finite-n converse/achievability bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionSequences {
    pub n: usize,
    pub r_n: f64,
    pub f_n: f64,
    pub g_n: f64,
    pub f_tilde_n: f64,
    pub g_tilde_n: f64,
    pub log_a_n: f64,
    pub log_b_n: f64,
    pub log_b_tilde_n: f64,
    pub w_min: f64,
    pub input_size: usize,
    pub output_size: usize,
    /// `n ≥ 3`, required by `f_n`, `g_n`.
    pub ee_valid: bool,
    /// `n ≥ 3|X|`, required by `f̃_n`, `g̃_n`.
    pub sce_valid: bool,
}

/// `f_n, g_n, f̃_n, g̃_n` and friends for channel `w` at rate `r`.
pub fn correction_sequences(w: &Channel<f64>, r: f64, n: usize) -> Result<CorrectionSequences> {
    check_rate(r)?;
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
    }
    let nx = w.input_size() as f64;
    let ny = w.output_size() as f64;
    let xy = nx * ny;
    let nf = n as f64;
    let w_min = *w.w_min();
    let log_a = xy * (2.0 * w_min.ln() - nf.ln());
    let log_b = ny + (ny - 1.0) * (nf + 1.0).ln() + xy * (nf.ln() + 2.0 * (nf + ny).ln());
    let log_bt = 3.0 * xy * nf.ln() - 2.0 * xy * nx.ln() + nx * ny.ln();
    Ok(CorrectionSequences {
        n,
        r_n: effective_rate(n, r)?,
        f_n: xy / nf * (nf * (nf + 1.0) / (w_min * w_min)).ln() + 1.0 / nf,
        g_n: (1.0 + log_b - (E - 1.0).ln() - log_a) / nf,
        f_tilde_n: (xy + nx - 1.0) / nf * (nf + 1.0).ln() + log_bt / nf,
        g_tilde_n: (log_a + log_bt) / nf,
        log_a_n: log_a,
        log_b_n: log_b,
        log_b_tilde_n: log_bt,
        w_min,
        input_size: w.input_size(),
        output_size: w.output_size(),
        ee_valid: n >= 3,
        sce_valid: n >= 3 * w.input_size(),
    })
}

fn check_rate(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rate must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

/// Exponent computations for one channel, sharing a capacity memo.
///
/// The memo is read-mostly: lookups take a shared lock and a miss computes
/// outside the lock, so concurrent callers may race to fill the same key with
/// the same value.
pub struct ExponentSolver {
    channel: Channel<f64>,
    memo: RwLock<HashMap<u64, f64>>,
}

impl ExponentSolver {
    pub fn new(channel: Channel<f64>) -> Self {
        Self {
            channel,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn channel(&self) -> &Channel<f64> {
        &self.channel
    }

    /// `I_α(W)` for any `α ∈ [0, ∞]`.
    pub fn capacity(&self, alpha: f64) -> Result<f64> {
        let key = alpha.to_bits();
        if let Some(v) = self.memo.read().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let opts = CapacityOptions {
            tol: CAPACITY_TOL,
            ..CapacityOptions::default()
        };
        let res = renyi_capacity_with(&self.channel, RenyiOrder::new(alpha)?, &opts)
            .map_err(|e| Error::Solver(format!("capacity at alpha = {alpha}: {e}")))?;
        self.memo.write().expect("memo lock").insert(key, res.value);
        Ok(res.value)
    }

    pub fn max_information(&self) -> Result<f64> {
        self.capacity(f64::INFINITY)
    }

    /// `sup_{α ≥ 0} α (s − I_{1+α}(W))`.
    fn sup_ee(&self, s: f64) -> Result<ExponentResult> {
        let i1 = self.capacity(1.0)?;
        let imax = self.max_information()?;
        if s <= i1 {
            return Ok(ExponentResult::zero());
        }
        if s > imax + BOUNDARY_TOL {
            return Ok(ExponentResult::infinite(None));
        }
        let mut warnings = Vec::new();
        if (s - imax).abs() <= BOUNDARY_TOL {
            warnings.push(format!(
                "rate {s} is at the max-information threshold {imax}; the supremum may be infinite, reporting the searched value"
            ));
        }
        let objective = |a: f64| -> Result<f64> { Ok(a * (s - self.capacity(1.0 + a)?)) };
        let mut grid = log_grid(EE_ALPHA_MIN, EE_ALPHA_MAX, EE_GRID_POINTS);
        let mut vals = grid.iter().map(|&a| objective(a)).collect::<Result<Vec<_>>>()?;
        // Keep extending while the maximum sits on the upper edge.
        while argmax(&vals) == vals.len() - 1 && *grid.last().unwrap() < EE_ALPHA_CAP {
            let a = grid.last().unwrap() * 2.0;
            grid.push(a);
            vals.push(objective(a)?);
        }
        let k = argmax(&vals);
        if k == vals.len() - 1 {
            warnings.push(format!("supremum not attained for alpha up to {}", grid[k]));
        }
        refine(grid, vals, k, objective, warnings, 0.0)
    }

    /// `sup_{α ∈ [0,1]} (1−α)(I_α(W) − s) − α·penalty`.
    fn sup_sce(&self, s: f64, penalty: f64) -> Result<ExponentResult> {
        let objective = |a: f64| -> Result<f64> { Ok((1.0 - a) * (self.capacity(a)? - s) - a * penalty) };
        let grid = linear_grid(0.0, 1.0, SCE_GRID_POINTS);
        let vals = grid.iter().map(|&a| objective(a)).collect::<Result<Vec<_>>>()?;
        let k = argmax(&vals);
        refine(grid, vals, k, objective, Vec::new(), f64::NEG_INFINITY)
    }

    /// Error exponent `sup_{α ≥ 0} α (r − I_{1+α}(W))`.
    pub fn error_exponent(&self, r: f64) -> Result<ExponentResult> {
        check_rate(r)?;
        self.sup_ee(r)
    }

    /// Strong converse exponent `sup_{α ∈ [0,1]} (1−α)(I_α(W) − r)`.
    pub fn sc_exponent(&self, r: f64) -> Result<ExponentResult> {
        check_rate(r)?;
        let mut res = self.sup_sce(r, 0.0)?;
        // α = 1 contributes 0; the value is never negative.
        if res.value <= 0.0 {
            res.value = 0.0;
            res.argmax_alpha = 1.0;
        }
        Ok(res)
    }

    /// Upper bound on `(1/n) log ε(⌊e^{nr}⌋, W^{⊗n})`, valid for every `n ≥ 1`.
    pub fn ee_ach_bound(&self, r: f64, n: usize) -> Result<FiniteBound> {
        check_rate(r)?;
        let rn = effective_rate(n, r)?;
        let sup = self.sup_ee(rn)?;
        Ok(bound_from(-sup.value, true, sup))
    }

    /// Lower bound on `(1/n) log ε(⌊e^{nr}⌋, W^{⊗n})`; proven for `n ≥ 3`.
    pub fn ee_conv_bound(&self, r: f64, n: usize) -> Result<FiniteBound> {
        let c = correction_sequences(&self.channel, r, n)?;
        let sup = self.sup_ee(r + c.g_n)?;
        let mut b = bound_from(-sup.value - c.f_n, c.ee_valid, sup);
        if !c.ee_valid {
            b.warnings.push(format!("bound requires n >= 3, got n = {n}"));
        }
        Ok(b)
    }

    /// Upper bound on `(1/n) log(1 − ε(⌊e^{nr}⌋, W^{⊗n}))`, valid for every `n ≥ 1`.
    pub fn sce_conv_bound(&self, r: f64, n: usize) -> Result<FiniteBound> {
        check_rate(r)?;
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
        }
        // sup_{α∈[0,1]} α(I_{1−α} − r) is the same supremum with α ↦ 1 − α.
        let sup = self.sup_sce(r, 0.0)?;
        let value = (-sup.value).min(0.0);
        Ok(bound_from(value, true, sup))
    }

    /// Lower bound on `(1/n) log(1 − ε(⌊e^{nr}⌋, W^{⊗n}))`; proven for `n ≥ 3|X|`.
    ///
    /// The `α·g̃_n` correction is applied inside the supremum over `α`.
    pub fn sce_ach_bound(&self, r: f64, n: usize) -> Result<FiniteBound> {
        let c = correction_sequences(&self.channel, r, n)?;
        let sup = self.sup_sce(c.r_n, c.g_tilde_n)?;
        let mut b = bound_from(-sup.value - c.f_tilde_n, c.sce_valid, sup);
        if !c.sce_valid {
            b.warnings.push(format!(
                "bound requires n >= 3|X| = {}, got n = {n}",
                3 * self.channel.input_size()
            ));
        }
        Ok(b)
    }
}

fn bound_from(value: f64, valid: bool, sup: ExponentResult) -> FiniteBound {
    FiniteBound {
        value,
        valid,
        argmax_alpha: sup.argmax_alpha,
        warnings: sup.warnings,
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut k = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[k] {
            k = i;
        }
    }
    k
}

/// Golden-section polish between the grid neighbours of `grid[k]`.
fn refine<F: Fn(f64) -> Result<f64>>(
    grid: Vec<f64>,
    vals: Vec<f64>,
    k: usize,
    objective: F,
    warnings: Vec<String>,
    floor: f64,
) -> Result<ExponentResult> {
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let resolution = (hi - lo) / 2.0;
    let mut failure = None;
    let (a, v) = golden_max(
        |a| match objective(a) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        GOLDEN_TOL,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (alpha, value) = if v >= vals[k] { (a, v) } else { (grid[k], vals[k]) };
    Ok(ExponentResult {
        value: value.max(floor),
        argmax_alpha: alpha,
        finite: true,
        grid_resolution: resolution,
        warnings,
    })
}

/// Error exponent of NS simulation of `w` at rate `r`.
pub fn error_exponent(w: &Channel<f64>, r: f64) -> Result<ExponentResult> {
    ExponentSolver::new(w.clone()).error_exponent(r)
}

/// Strong converse exponent of NS simulation of `w` at rate `r`.
pub fn sc_exponent(w: &Channel<f64>, r: f64) -> Result<ExponentResult> {
    ExponentSolver::new(w.clone()).sc_exponent(r)
}

pub fn ee_ach_bound(w: &Channel<f64>, r: f64, n: usize) -> Result<FiniteBound> {
    ExponentSolver::new(w.clone()).ee_ach_bound(r, n)
}

pub fn ee_conv_bound(w: &Channel<f64>, r: f64, n: usize) -> Result<FiniteBound> {
    ExponentSolver::new(w.clone()).ee_conv_bound(r, n)
}

pub fn sce_conv_bound(w: &Channel<f64>, r: f64, n: usize) -> Result<FiniteBound> {
    ExponentSolver::new(w.clone()).sce_conv_bound(r, n)
}

pub fn sce_ach_bound(w: &Channel<f64>, r: f64, n: usize) -> Result<FiniteBound> {
    ExponentSolver::new(w.clone()).sce_ach_bound(r, n)
}
