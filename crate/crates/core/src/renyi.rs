//! Rényi divergences, the Sibson inner infimum and Rényi capacities.
//!
//! All quantities are in nats. Orders `0`, `1` and `∞` are handled by
//! dedicated code paths rather than by evaluating nearby finite orders.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense};
use crate::optim::golden_max;
use crate::prob::{Channel, Pmf};
use crate::scalar::Real;

/// Order `α ∈ [0, ∞]` of a Rényi quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder<T> {
    Zero,
    /// Kullback–Leibler limit.
    One,
    Infinity,
    /// Any other finite positive order.
    Finite(T),
}

impl<T: Real> RenyiOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_nan() || alpha < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "Renyi order must lie in [0, inf], got {}",
                alpha.to_f64_lossy()
            )));
        }
        Ok(if alpha.is_zero() {
            RenyiOrder::Zero
        } else if alpha == T::one() {
            RenyiOrder::One
        } else if alpha.is_infinite() {
            RenyiOrder::Infinity
        } else {
            RenyiOrder::Finite(alpha)
        })
    }

    pub fn value(&self) -> T {
        match self {
            RenyiOrder::Zero => T::zero(),
            RenyiOrder::One => T::one(),
            RenyiOrder::Infinity => T::infinity(),
            RenyiOrder::Finite(a) => *a,
        }
    }
}

fn check_same_len<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "pmfs over {} and {} symbols",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// Rényi divergence `D_α(p‖q)` in nats (possibly `+∞`).
pub fn renyi_divergence<T: Real>(p: &Pmf<T>, q: &Pmf<T>, alpha: RenyiOrder<T>) -> Result<T> {
    check_same_len(p, q)?;
    Ok(divergence_slices(p.probs(), q.probs(), alpha))
}

pub(crate) fn divergence_slices<T: Real>(p: &[T], q: &[T], alpha: RenyiOrder<T>) -> T {
    let zero = T::zero();
    match alpha {
        RenyiOrder::Zero => {
            let mass = p
                .iter()
                .zip(q)
                .filter(|(a, _)| **a > zero)
                .fold(zero, |s, (_, b)| s + *b);
            clamp_nonneg(-mass.ln())
        }
        RenyiOrder::One => {
            let mut acc = zero;
            for (a, b) in p.iter().zip(q) {
                if *a > zero {
                    if *b <= zero {
                        return T::infinity();
                    }
                    acc = acc + *a * (a.ln() - b.ln());
                }
            }
            clamp_nonneg(acc)
        }
        RenyiOrder::Infinity => {
            let mut best = T::neg_infinity();
            for (a, b) in p.iter().zip(q) {
                if *a > zero {
                    if *b <= zero {
                        return T::infinity();
                    }
                    best = best.max(a.ln() - b.ln());
                }
            }
            clamp_nonneg(best)
        }
        RenyiOrder::Finite(a) if near_one(a) => {
            // log Σ p·e^{βL} = log1p(Σ p·expm1(βL) − missing mass), L = log(p/q),
            // which keeps relative accuracy as β = α − 1 → 0.
            let beta = a - T::one();
            let mut excess = zero;
            for (pa, qa) in p.iter().zip(q) {
                if *pa > zero {
                    if *qa <= zero {
                        if a > T::one() {
                            return T::infinity();
                        }
                        excess = excess - *pa;
                    } else {
                        excess = excess + *pa * (beta * (pa.ln() - qa.ln())).exp_m1();
                    }
                }
            }
            if excess <= -T::one() {
                return T::infinity();
            }
            clamp_nonneg(excess.ln_1p() / beta)
        }
        RenyiOrder::Finite(a) => {
            let mut terms = Vec::with_capacity(p.len());
            for (pa, qa) in p.iter().zip(q) {
                if *pa > zero {
                    if *qa <= zero {
                        if a > T::one() {
                            return T::infinity();
                        }
                        continue;
                    }
                    terms.push(a * pa.ln() + (T::one() - a) * qa.ln());
                }
            }
            let l = T::log_sum_exp(&terms);
            if l == T::neg_infinity() {
                return T::infinity();
            }
            clamp_nonneg(l / (a - T::one()))
        }
    }
}

/// Orders close enough to one that `log(·)/(α − 1)` is evaluated via `log1p`/`expm1`.
fn near_one<T: Real>(a: T) -> bool {
    (a - T::one()).abs() < T::lit(0.25)
}

fn clamp_nonneg<T: Real>(v: T) -> T {
    if v < T::zero() {
        T::zero()
    } else {
        v
    }
}

/// Mutual information `I(p, W)` in nats.
pub fn mutual_information<T: Real>(p: &Pmf<T>, w: &Channel<T>) -> Result<T> {
    sibson_inner_inf(p, w, RenyiOrder::One)
}

/// `inf_q D_α(p·W ‖ p×q)` in closed form.
pub fn sibson_inner_inf<T: Real>(p: &Pmf<T>, w: &Channel<T>, alpha: RenyiOrder<T>) -> Result<T> {
    Ok(sibson_minimizer(p, w, alpha)?.0)
}

/// Value and minimizing reference `q` of the Sibson inner infimum.
pub fn sibson_minimizer<T: Real>(p: &Pmf<T>, w: &Channel<T>, alpha: RenyiOrder<T>) -> Result<(T, Pmf<T>)> {
    if p.len() != w.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "input pmf has {} entries, channel has {} inputs",
            p.len(),
            w.input_size()
        )));
    }
    let zero = T::zero();
    let ny = w.output_size();
    let support = p.support();
    match alpha {
        RenyiOrder::Zero => {
            let mut best = zero;
            let mut arg = 0;
            for y in 0..ny {
                let mass = support
                    .iter()
                    .filter(|&&x| *w.get(x, y) > zero)
                    .fold(zero, |s, &x| s + *p.get(x));
                if mass > best {
                    best = mass;
                    arg = y;
                }
            }
            Ok((clamp_nonneg(-best.ln()), Pmf::point(ny, arg)))
        }
        RenyiOrder::One => {
            let q = w.output_distribution(p)?;
            let mut acc = zero;
            for &x in &support {
                let mut d = zero;
                for y in 0..ny {
                    let v = *w.get(x, y);
                    if v > zero {
                        d = d + v * (v.ln() - q.get(y).ln());
                    }
                }
                acc = acc + *p.get(x) * d;
            }
            Ok((clamp_nonneg(acc), q))
        }
        RenyiOrder::Infinity => {
            let m: Vec<T> = (0..ny)
                .map(|y| support.iter().fold(zero, |s, &x| s.max(*w.get(x, y))))
                .collect();
            let total = m.iter().fold(zero, |s, v| s + *v);
            let q = Pmf::normalized(m)?;
            Ok((clamp_nonneg(total.ln()), q))
        }
        RenyiOrder::Finite(a) if near_one(a) => {
            // With P = p·W, Σ_x p W^α = P_y (1 + u_y) and the Sibson sum is
            // Σ_y P_y e^{v_y}, v_y = (log1p(u_y) − β log P_y)/α; every
            // quantity is O(β), so the ratio log(·)/β stays accurate near α = 1.
            let beta = a - T::one();
            let out = w.output_distribution(p)?;
            let mut v = vec![T::neg_infinity(); ny];
            let mut excess = zero;
            for y in 0..ny {
                let py = *out.get(y);
                if py <= zero {
                    continue;
                }
                let mut u = zero;
                for &x in &support {
                    let wxy = *w.get(x, y);
                    if wxy > zero {
                        u = u + *p.get(x) * wxy / py * (beta * wxy.ln()).exp_m1();
                    }
                }
                v[y] = (u.ln_1p() - beta * py.ln()) / a;
                excess = excess + py * v[y].exp_m1();
            }
            let log_sum = excess.ln_1p();
            let q: Vec<T> = (0..ny)
                .map(|y| {
                    if v[y] == T::neg_infinity() {
                        zero
                    } else {
                        *out.get(y) * (v[y] - log_sum).exp()
                    }
                })
                .collect();
            Ok((clamp_nonneg(a / beta * log_sum), Pmf::normalized(q)?))
        }
        RenyiOrder::Finite(a) => {
            let mut z = Vec::with_capacity(ny);
            let mut buf = Vec::with_capacity(support.len());
            for y in 0..ny {
                buf.clear();
                for &x in &support {
                    let v = *w.get(x, y);
                    if v > zero {
                        buf.push(p.get(x).ln() + a * v.ln());
                    }
                }
                z.push(T::log_sum_exp(&buf) / a);
            }
            let norm = T::log_sum_exp(&z);
            let q: Vec<T> = z.iter().map(|v| (*v - norm).exp()).collect();
            let value = a / (a - T::one()) * norm;
            Ok((clamp_nonneg(value), Pmf::normalized(q)?))
        }
    }
}

/// Outcome of a Rényi capacity computation.
#[derive(Debug, Clone)]
pub struct CapacityResult<T: Real> {
    pub alpha: RenyiOrder<T>,
    /// `I_α(W)` in nats.
    pub value: T,
    pub optimal_input: Pmf<T>,
    pub optimal_reference: Pmf<T>,
    pub iterations: usize,
    /// Width of the certified bracket `max_x D_α(W_x‖q) − I_α(p)` at termination.
    pub residual: T,
}

/// Knobs for [`renyi_capacity_with`].
#[derive(Debug, Clone, Copy)]
pub struct CapacityOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 20_000,
            random_starts: 8,
            seed: 0x5eed,
        }
    }
}

/// Rényi capacity `I_α(W) = sup_p inf_q D_α(p·W ‖ p×q)`.
pub fn renyi_capacity<T: Real>(w: &Channel<T>, alpha: RenyiOrder<T>, tol: T) -> Result<CapacityResult<T>> {
    let opts = CapacityOptions {
        tol: tol.to_f64_lossy(),
        ..CapacityOptions::default()
    };
    renyi_capacity_with(w, alpha, &opts)
}

pub fn renyi_capacity_with<T: Real>(
    w: &Channel<T>,
    alpha: RenyiOrder<T>,
    opts: &CapacityOptions,
) -> Result<CapacityResult<T>> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("capacity tolerance must be positive".into()));
    }
    match alpha {
        RenyiOrder::Zero => order_zero_capacity(w),
        RenyiOrder::Infinity => {
            let (value, q) = max_information_lp(w)?;
            Ok(CapacityResult {
                alpha,
                value,
                optimal_input: Pmf::uniform(w.input_size()),
                optimal_reference: q,
                iterations: 0,
                residual: T::zero(),
            })
        }
        _ => iterative_capacity(w, alpha, opts),
    }
}

/// Max-information `inf_q max_{x,y: W>0} log(W(y|x)/q(y))`, the zero-distortion threshold.
pub fn max_information<T: Real>(w: &Channel<T>) -> Result<T> {
    Ok(max_information_lp(w)?.0)
}

/// Solves `min Σ_y z_y` s.t. `z_y ≥ W(y|x)`; the optimal `q` is `z/Σz`.
fn max_information_lp<T: Real>(w: &Channel<T>) -> Result<(T, Pmf<T>)> {
    let ny = w.output_size();
    let mut lp = LinearProgram::<T>::new(ny, Sense::Minimize);
    for y in 0..ny {
        lp.set_objective(y, T::one());
        for x in 0..w.input_size() {
            if *w.get(x, y) > T::zero() {
                lp.add_constraint(vec![(y, T::one())], Relation::Ge, *w.get(x, y));
            }
        }
    }
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("max-information LP ended with {:?}", sol.status)));
    }
    let q = Pmf::normalized(sol.x)?;
    Ok((clamp_nonneg(sol.objective.ln()), q))
}

/// Order-0 capacity `−log min_p max_y Σ_{x: W(y|x)>0} p(x)` via an LP.
fn order_zero_capacity<T: Real>(w: &Channel<T>) -> Result<CapacityResult<T>> {
    let nx = w.input_size();
    let z = nx;
    let mut lp = LinearProgram::<T>::new(nx + 1, Sense::Minimize);
    lp.set_objective(z, T::one());
    for y in 0..w.output_size() {
        let mut row: Vec<(usize, T)> = (0..nx)
            .filter(|&x| *w.get(x, y) > T::zero())
            .map(|x| (x, T::one()))
            .collect();
        row.push((z, -T::one()));
        lp.add_constraint(row, Relation::Le, T::zero());
    }
    lp.add_constraint((0..nx).map(|x| (x, T::one())).collect(), Relation::Eq, T::one());
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!(
            "order-0 capacity LP ended with {:?}",
            sol.status
        )));
    }
    let p = Pmf::normalized(sol.x[..nx].to_vec())?;
    let (value, q) = sibson_minimizer(&p, w, RenyiOrder::Zero)?;
    let lp_value = clamp_nonneg(-sol.objective.ln());
    Ok(CapacityResult {
        alpha: RenyiOrder::Zero,
        value,
        optimal_input: p,
        optimal_reference: q,
        iterations: sol.iterations,
        residual: (value - lp_value).abs(),
    })
}

struct Ascent<T: Real> {
    p: Pmf<T>,
    lower: T,
    upper: T,
    q: Pmf<T>,
    iterations: usize,
}

/// Per-input divergences `D_α(W_x‖q)` and their maximum.
fn radius<T: Real>(w: &Channel<T>, q: &Pmf<T>, alpha: RenyiOrder<T>) -> (Vec<T>, T) {
    let d: Vec<T> = (0..w.input_size())
        .map(|x| divergence_slices(w.row(x), q.probs(), alpha))
        .collect();
    let m = d.iter().fold(T::neg_infinity(), |a, b| a.max(*b));
    (d, m)
}

fn bracket<T: Real>(w: &Channel<T>, p: &Pmf<T>, alpha: RenyiOrder<T>) -> Result<(T, T, Pmf<T>, Vec<T>)> {
    let (lower, q) = sibson_minimizer(p, w, alpha)?;
    let (d, upper) = radius(w, &q, alpha);
    Ok((lower, upper, q, d))
}

/// Multiplicative ascent `p ← p·exp(η·D_α(W_x‖q*(p)))` with step halving on
/// any decrease; stops once the minimax bracket is narrower than `tol`.
fn ascend<T: Real>(w: &Channel<T>, alpha: RenyiOrder<T>, start: Pmf<T>, tol: T, max_iter: usize) -> Result<Ascent<T>> {
    let mut p = start;
    let (mut lower, mut upper, mut q, mut d) = bracket(w, &p, alpha)?;
    // Divergences of small order scale like the order itself, so the step
    // cap scales inversely to keep the update comparable across orders.
    let max_step = match alpha {
        RenyiOrder::Finite(a) if a < T::one() => T::one() / a,
        _ => T::one(),
    };
    let mut eta = T::one();
    let mut it = 0;
    while upper - lower > tol && it < max_iter {
        it += 1;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<T> = p
                .probs()
                .iter()
                .zip(&d)
                .map(|(px, dx)| {
                    if dx.is_infinite() {
                        *px * T::lit(2.0)
                    } else {
                        *px * (eta * (*dx - upper)).exp()
                    }
                })
                .collect();
            let cand = Pmf::normalized(cand)?;
            let (l2, u2, q2, d2) = bracket(w, &cand, alpha)?;
            if l2 >= lower - T::epsilon() * T::lit(4.0) {
                p = cand;
                lower = l2;
                upper = u2;
                q = q2;
                d = d2;
                accepted = true;
                eta = (eta * T::lit(1.25)).min(max_step);
                break;
            }
            eta = eta * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    Ok(Ascent {
        p,
        lower,
        upper,
        q,
        iterations: it,
    })
}

/// Inputs whose mass falls below this are treated as off the support by the polish.
const SUPPORT_FLOOR: f64 = 1e-9;

/// Newton iterations on `D_α(W_x‖q*(p)) = D_α(W_{x0}‖q*(p))` over the
/// current support, each step accepted only if it narrows the bracket.
/// Finite differences are enough for the Jacobian: the bracket itself is
/// evaluated exactly, so a poor Jacobian costs iterations, not accuracy.
fn polish<T: Real>(w: &Channel<T>, alpha: RenyiOrder<T>, run: Ascent<T>, tol: T) -> Result<Ascent<T>> {
    let mut best = run;
    for _ in 0..60 {
        if best.upper - best.lower <= tol {
            break;
        }
        let (_, _, _, d) = bracket(w, &best.p, alpha)?;
        // Inputs whose divergence sits well below the bracket are inactive at
        // the optimum; they are dropped rather than forced onto the equalities.
        let band = (T::lit(1e3) * (best.upper - best.lower)).max(T::lit(1e-9));
        let support: Vec<usize> = (0..w.input_size())
            .filter(|&x| best.p.probs()[x] > T::lit(SUPPORT_FLOOR) && d[x].is_finite() && d[x] >= best.upper - band)
            .collect();
        if support.len() < 2 {
            break;
        }
        let k = support.len() - 1;
        let pivot = support[0];
        let residual = |d: &[T]| -> Vec<T> { support[1..].iter().map(|&x| d[x] - d[pivot]).collect() };
        let base: Vec<T> = (0..w.input_size())
            .map(|x| {
                if support.contains(&x) {
                    best.p.probs()[x]
                } else {
                    T::zero()
                }
            })
            .collect();
        let (_, _, _, d) = bracket(w, &Pmf::normalized(base.clone())?, alpha)?;
        let r0 = residual(&d);
        let mut jac = vec![vec![T::zero(); k]; k];
        for (j, &xj) in support[1..].iter().enumerate() {
            let h = T::lit(1e-7) * best.p.probs()[xj].min(best.p.probs()[pivot]).max(T::lit(1e-3));
            let mut v = base.clone();
            v[xj] = v[xj] + h;
            v[pivot] = v[pivot] - h;
            let (_, _, _, dh) = bracket(w, &Pmf::normalized(v)?, alpha)?;
            for (i, ri) in residual(&dh).into_iter().enumerate() {
                jac[i][j] = (ri - r0[i]) / h;
            }
        }
        let Some(step) = solve_dense(jac, r0.iter().map(|v| -*v).collect()) else {
            break;
        };
        let mut t = T::one();
        let mut improved = false;
        for _ in 0..30 {
            let mut v = base.clone();
            for (j, &xj) in support[1..].iter().enumerate() {
                v[xj] = v[xj] + t * step[j];
                v[pivot] = v[pivot] - t * step[j];
            }
            if v.iter().all(|x| *x >= T::zero()) {
                let cand = Pmf::normalized(v)?;
                let (lower, upper, q, _) = bracket(w, &cand, alpha)?;
                if upper - lower < best.upper - best.lower && lower >= best.lower - tol {
                    best = Ascent {
                        p: cand,
                        lower,
                        upper,
                        q,
                        iterations: best.iterations + 1,
                    };
                    improved = true;
                    break;
                }
            }
            t = t * T::lit(0.5);
        }
        if !improved {
            break;
        }
    }
    Ok(best)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(a[piv][col].abs() > T::zero()) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[row][c] = a[row][c] - f * v;
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc = acc - a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Gap at which the ascent hands over to the Newton polish.
const POLISH_GAP: f64 = 1e-6;

/// Coarse ascent, polish, and a full-length ascent from the polished point
/// only if the polish did not close the bracket.
fn descend_and_polish<T: Real>(
    w: &Channel<T>,
    alpha: RenyiOrder<T>,
    start: Pmf<T>,
    tol: T,
    max_iter: usize,
) -> Result<Ascent<T>> {
    let coarse = ascend(w, alpha, start, tol.max(T::lit(POLISH_GAP)), max_iter)?;
    let used = coarse.iterations;
    let run = polish(w, alpha, coarse, tol)?;
    if run.upper - run.lower <= tol {
        return Ok(run);
    }
    let mut fine = ascend(w, alpha, run.p, tol, max_iter)?;
    fine.iterations += used;
    polish(w, alpha, fine, tol)
}

fn iterative_capacity<T: Real>(
    w: &Channel<T>,
    alpha: RenyiOrder<T>,
    opts: &CapacityOptions,
) -> Result<CapacityResult<T>> {
    let nx = w.input_size();
    let tol = T::lit(opts.tol);
    let finish = |run: Ascent<T>, iterations: usize| CapacityResult {
        alpha,
        value: run.lower,
        residual: (run.upper - run.lower).max(T::zero()),
        optimal_input: run.p,
        optimal_reference: run.q,
        iterations,
    };
    let mut total_iter = 0;
    let first = descend_and_polish(w, alpha, Pmf::uniform(nx), tol, opts.max_iterations)?;
    total_iter += first.iterations;
    if first.upper - first.lower <= tol {
        return Ok(finish(first, total_iter));
    }

    // Fallbacks: random restarts, then a 1-D search for binary inputs.
    let mut best = first;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let start: Vec<T> = (0..nx).map(|_| T::lit(-(1.0 - rng.gen::<f64>()).ln())).collect();
        let run = descend_and_polish(w, alpha, Pmf::normalized(start)?, tol, opts.max_iterations)?;
        total_iter += run.iterations;
        let better_gap = run.upper - run.lower < best.upper - best.lower;
        if run.lower > best.lower || (run.lower == best.lower && better_gap) {
            best = run;
        }
        if best.upper - best.lower <= tol {
            return Ok(finish(best, total_iter));
        }
    }
    if nx == 2 {
        let f = |t: f64| {
            let p = Pmf::new(vec![T::lit(t), T::one() - T::lit(t)]).expect("binary pmf");
            sibson_inner_inf(&p, w, alpha).map_or(f64::NEG_INFINITY, |v| v.to_f64_lossy())
        };
        let (t, _) = golden_max(f, 0.0, 1.0, 1e-14, 200);
        let p = Pmf::new(vec![T::lit(t), T::one() - T::lit(t)])?;
        let (lower, upper, q, _) = bracket(w, &p, alpha)?;
        if lower > best.lower {
            best = Ascent {
                p,
                lower,
                upper,
                q,
                iterations: 0,
            };
        }
        if best.upper - best.lower <= tol {
            return Ok(finish(best, total_iter));
        }
    }
    Err(Error::NonConvergence(format!(
        "Renyi capacity of order {}: best value {} with certified gap {} after {} iterations",
        alpha.value().to_f64_lossy(),
        best.lower.to_f64_lossy(),
        (best.upper - best.lower).to_f64_lossy(),
        total_iter
    )))
}

/// Binary Rényi entropy `H_α(Bern(p))` in nats.
pub fn binary_renyi_entropy(p: f64, alpha: f64) -> f64 {
    let q = 1.0 - p;
    if alpha == 1.0 {
        -(p * p.ln() + q * q.ln())
    } else if alpha.is_infinite() {
        -p.max(q).ln()
    } else {
        (p.powf(alpha) + q.powf(alpha)).ln() / (1.0 - alpha)
    }
}
