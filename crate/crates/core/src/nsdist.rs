//! Minimal distortion of non-signaling assisted channel simulation.
//!
//! For a channel `W` and message size `M` the optimal distortion is
//! `ε(M, W) = inf_q max_x Σ_y (W(y|x) − M q(y))_+`, a linear program. Three
//! solvers are provided: the one-shot LP, a brute-force oracle on the explicit
//! tensor power, and a solver for `W^{⊗n}` that works on types and needs only
//! polynomially many variables in `n`.
//!
//! Every report carries a certificate: `value` is the objective re-evaluated
//! at the returned reference (an upper bound) and `lower_bound` is a
//! feasible point of the dual problem re-evaluated from scratch, so
//! `certificate_gap = value − lower_bound` bounds the error rigorously (up to
//! floating-point rounding of the re-evaluations themselves).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::msgsize::MessageSize;
use crate::prob::{tensor_power, Channel, Pmf};
use crate::scalar::{Real, Scalar};
use crate::types::{
    compositions, enumerate_types, log_conditional_class_size, log_type_class_size, ConditionalType, TypeVector,
};

/// Gap below which a float solve counts as optimal.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-8;

/// Default cap on the constraint nonzeros of a type-space LP.
pub const DEFAULT_MAX_LP_NONZEROS: usize = 2_000_000;

/// Default cap on the dense tableau size (rows × columns) of a type-space LP.
pub const DEFAULT_MAX_DENSE_CELLS: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical-failure",
        }
    }
}

/// The optimizer accompanying a distortion value.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference<T: Scalar> {
    /// Output reference `q` (one-shot) or input law `p` (relaxed form).
    Pmf(Pmf<T>),
    /// Total reference mass per output type (type-space solver).
    TypeMasses(Vec<(TypeVector, T)>),
}

/// Value, optimizer and certificate of a distortion computation.
#[derive(Debug, Clone)]
pub struct SolveReport<T: Scalar> {
    pub value: T,
    pub optimal_reference: Reference<T>,
    pub status: SolveStatus,
    /// Certified lower bound on the optimum.
    pub lower_bound: T,
    /// `value − lower_bound`.
    pub certificate_gap: T,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl<T: Scalar> SolveReport<T> {
    pub fn reference_pmf(&self) -> Option<&Pmf<T>> {
        match &self.optimal_reference {
            Reference::Pmf(p) => Some(p),
            Reference::TypeMasses(_) => None,
        }
    }
}

fn finish<T: Scalar>(
    value: T,
    lower: T,
    reference: Reference<T>,
    iterations: usize,
    mut warnings: Vec<String>,
) -> SolveReport<T> {
    let lower = T::min_of(lower, value.clone());
    let gap = value.clone() - lower.clone();
    let status = if gap.to_f64_lossy() <= CERTIFICATE_TOLERANCE {
        SolveStatus::Optimal
    } else {
        warnings.push(format!("certificate gap {:.3e} exceeds tolerance", gap.to_f64_lossy()));
        SolveStatus::NumericalFailure
    };
    SolveReport {
        value,
        optimal_reference: reference,
        status,
        lower_bound: lower,
        certificate_gap: gap,
        iterations,
        warnings,
    }
}

fn lp_failure<T: Scalar>(sol: &LpSolution<T>, what: &str) -> Error {
    Error::Solver(format!("{what} LP ended with status {:?}", sol.status))
}

/// `max_x Σ_y (W(y|x) − M q(y))_+`.
pub fn distortion_at<T: Scalar>(w: &Channel<T>, m: &T, q: &[T]) -> T {
    let mut best = T::zero();
    for x in 0..w.input_size() {
        let s = w.row(x).iter().zip(q).fold(T::zero(), |a, (wy, qy)| {
            a + (wy.clone() - m.clone() * qy.clone()).positive_part()
        });
        best = T::max_of(best, s);
    }
    best
}

/// Dual objective `Σ λW − M max_y Σ_x λ(x,y)` after projecting `λ` onto the
/// feasible set `0 ≤ λ(x,y) ≤ p(x)`, `Σ p ≤ 1`.
pub fn dual_value_at<T: Scalar>(w: &Channel<T>, m: &T, lambda: &[Vec<T>]) -> T {
    let nx = w.input_size();
    let ny = w.output_size();
    let mut lam: Vec<Vec<T>> = lambda
        .iter()
        .map(|r| r.iter().map(|v| v.positive_part()).collect())
        .collect();
    let total = lam.iter().fold(T::zero(), |a, r| {
        a + r.iter().fold(T::zero(), |b, v| T::max_of(b, v.clone()))
    });
    if total > T::one() {
        for r in lam.iter_mut() {
            for v in r.iter_mut() {
                *v = v.clone() / total.clone();
            }
        }
    }
    let mut gain = T::zero();
    let mut worst = T::zero();
    for y in 0..ny {
        let mut col = T::zero();
        for x in 0..nx {
            gain = gain + lam[x][y].clone() * w.get(x, y).clone();
            col = col + lam[x][y].clone();
        }
        worst = T::max_of(worst, col);
    }
    gain - m.clone() * worst
}

/// `Σ_y max_x W(y|x)`; distortion vanishes iff `M` is at least this.
fn zero_threshold<T: Scalar>(w: &Channel<T>) -> T {
    (0..w.output_size()).fold(T::zero(), |a, y| {
        a + (0..w.input_size()).fold(T::zero(), |b, x| T::max_of(b, w.get(x, y).clone()))
    })
}

/// One-shot distortion `ε(M, W)` via the LP
/// `min t` s.t. `s(x,y) + M q(y) ≥ W(y|x)`, `Σ_y s(x,y) ≤ t`, `Σ q = 1`.
pub fn eps_ns_oneshot<T: Scalar>(w: &Channel<T>, m: u64) -> Result<SolveReport<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("message size must be at least 1".into()));
    }
    let mt = T::from_u64(m).expect("message size fits the scalar type");
    let nx = w.input_size();
    let ny = w.output_size();

    let threshold = zero_threshold(w);
    if mt >= threshold {
        // q ∝ max_x W(·|x) puts M q above every row.
        let q: Vec<T> = (0..ny)
            .map(|y| (0..nx).fold(T::zero(), |b, x| T::max_of(b, w.get(x, y).clone())) / threshold.clone())
            .collect();
        let residual = distortion_at(w, &mt, &q);
        let q = Pmf::normalized(q)?;
        let mut rep = finish(T::zero(), T::zero(), Reference::Pmf(q), 0, Vec::new());
        rep.certificate_gap = residual;
        return Ok(rep);
    }

    // Variables: q (ny), s for each positive entry, t.
    let mut s_index = vec![vec![None; ny]; nx];
    let mut nvars = ny;
    for x in 0..nx {
        for y in 0..ny {
            if *w.get(x, y) > T::zero() {
                s_index[x][y] = Some(nvars);
                nvars += 1;
            }
        }
    }
    let t = nvars;
    nvars += 1;
    let mut lp = LinearProgram::<T>::new(nvars, Sense::Minimize);
    lp.set_objective(t, T::one());
    let mut cover_rows = vec![vec![None; ny]; nx];
    for x in 0..nx {
        for y in 0..ny {
            if let Some(s) = s_index[x][y] {
                cover_rows[x][y] =
                    Some(lp.add_constraint(vec![(s, T::one()), (y, mt.clone())], Relation::Ge, w.get(x, y).clone()));
            }
        }
    }
    for row in s_index.iter() {
        let mut coeffs: Vec<(usize, T)> = row.iter().flatten().map(|&s| (s, T::one())).collect();
        coeffs.push((t, -T::one()));
        lp.add_constraint(coeffs, Relation::Le, T::zero());
    }
    lp.add_constraint((0..ny).map(|y| (y, T::one())).collect(), Relation::Eq, T::one());
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(lp_failure(&sol, "one-shot"));
    }
    let q = Pmf::normalized(sol.x[..ny].iter().map(|v| v.positive_part()).collect())?;
    let value = distortion_at(w, &mt, q.probs());
    let lambda: Vec<Vec<T>> = (0..nx)
        .map(|x| {
            (0..ny)
                .map(|y| cover_rows[x][y].map_or(T::zero(), |r| sol.duals[r].clone()))
                .collect()
        })
        .collect();
    let lower = T::max_of(T::zero(), dual_value_at(w, &mt, &lambda));
    Ok(finish(value, lower, Reference::Pmf(q), sol.iterations, Vec::new()))
}

/// The same optimum computed from the relaxed sup-over-inputs form
/// `max Σ λW − M z` s.t. `λ(x,y) ≤ p(x)`, `Σ_x λ(x,y) ≤ z`, `Σ p = 1`.
/// The reported reference is the optimal input law `p`.
pub fn eps_ns_oneshot_relaxed<T: Scalar>(w: &Channel<T>, m: u64) -> Result<SolveReport<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("message size must be at least 1".into()));
    }
    let mt = T::from_u64(m).expect("message size fits the scalar type");
    let nx = w.input_size();
    let ny = w.output_size();
    let lam = |x: usize, y: usize| x * ny + y;
    let p0 = nx * ny;
    let z = p0 + nx;
    let mut lp = LinearProgram::<T>::new(z + 1, Sense::Maximize);
    for x in 0..nx {
        for y in 0..ny {
            lp.set_objective(lam(x, y), w.get(x, y).clone());
            lp.add_constraint(
                vec![(lam(x, y), T::one()), (p0 + x, -T::one())],
                Relation::Le,
                T::zero(),
            );
        }
    }
    lp.set_objective(z, -mt.clone());
    let mut col_rows = Vec::with_capacity(ny);
    for y in 0..ny {
        let mut coeffs: Vec<(usize, T)> = (0..nx).map(|x| (lam(x, y), T::one())).collect();
        coeffs.push((z, -T::one()));
        col_rows.push(lp.add_constraint(coeffs, Relation::Le, T::zero()));
    }
    lp.add_constraint((0..nx).map(|x| (p0 + x, T::one())).collect(), Relation::Eq, T::one());
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(lp_failure(&sol, "relaxed one-shot"));
    }
    let lambda: Vec<Vec<T>> = (0..nx)
        .map(|x| (0..ny).map(|y| sol.x[lam(x, y)].clone()).collect())
        .collect();
    let lower = T::max_of(T::zero(), dual_value_at(w, &mt, &lambda));
    // The multipliers of the column constraints form an output reference q.
    let q: Vec<T> = col_rows.iter().map(|&r| sol.duals[r].positive_part()).collect();
    let upper = match Pmf::normalized(q) {
        Ok(q) => distortion_at(w, &mt, q.probs()),
        Err(_) => T::one(),
    };
    let p = Pmf::normalized(sol.x[p0..p0 + nx].iter().map(|v| v.positive_part()).collect())
        .unwrap_or_else(|_| Pmf::uniform(nx));
    let mut rep = finish(upper, lower.clone(), Reference::Pmf(p), sol.iterations, Vec::new());
    // The value of this route is its own optimum; the primal re-evaluation only certifies it.
    rep.value = T::max_of(lower.clone(), T::min_of(sol.objective.clone(), rep.value.clone()));
    rep.lower_bound = lower;
    Ok(rep)
}

/// Brute-force oracle: the one-shot LP on the explicit tensor power.
pub fn eps_ns_iid_bruteforce<T: Scalar>(w: &Channel<T>, n: usize, m: u64) -> Result<SolveReport<T>> {
    let wn = tensor_power(w, n)?;
    eps_ns_oneshot(&wn, m)
}

/// One `(input type, conditional type)` cell of the type-space problem.
#[derive(Debug, Clone)]
pub struct Shell {
    /// Index into [`ReducedInstance::input_types`].
    pub input: usize,
    /// Index into [`ReducedInstance::output_types`].
    pub output: usize,
    pub joint: ConditionalType,
    /// `log W^{⊗n}(shell | x^n)`: total probability of the shell from any fixed input sequence.
    pub log_mass: f64,
    /// `log |shell| − log |T_n(output type)|`.
    pub log_ratio: f64,
}

/// Coefficient table of the type-space LP for `W^{⊗n}`.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub n: usize,
    pub input_types: Vec<TypeVector>,
    pub output_types: Vec<TypeVector>,
    pub shells: Vec<Shell>,
}

impl ReducedInstance {
    /// Build the table, pruning shells that have probability zero under `W`.
    pub fn build(w: &Channel<f64>, n: usize, max_nonzeros: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
        }
        let nx = w.input_size();
        let ny = w.output_size();
        let input_types = enumerate_types(nx, n)?;
        let log_w: Vec<Vec<f64>> = (0..nx)
            .map(|x| {
                w.row(x)
                    .iter()
                    .map(|v| if *v > 0.0 { v.ln() } else { f64::NEG_INFINITY })
                    .collect()
            })
            .collect();
        let mut output_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut output_types: Vec<TypeVector> = Vec::new();
        let mut shells = Vec::new();
        for (pi, p) in input_types.iter().enumerate() {
            // Per input letter, all ways to split its count over outputs with W > 0.
            let mut per_row: Vec<Vec<Vec<usize>>> = Vec::with_capacity(nx);
            for x in 0..nx {
                let support: Vec<usize> = (0..ny).filter(|&y| w.get(x, y) > &0.0).collect();
                let mut rows = Vec::new();
                let mut cur = vec![0usize; support.len()];
                compositions(&mut cur, 0, p.counts()[x], &mut |c| {
                    let mut full = vec![0usize; ny];
                    for (k, &y) in support.iter().enumerate() {
                        full[y] = c[k];
                    }
                    rows.push(full);
                });
                per_row.push(rows);
            }
            let mut pick = vec![0usize; nx];
            loop {
                let joint: Vec<Vec<usize>> = (0..nx).map(|x| per_row[x][pick[x]].clone()).collect();
                let cond = ConditionalType::new(joint)?;
                let out = cond.output_type();
                let oi = *output_index.entry(out.counts().to_vec()).or_insert_with(|| {
                    output_types.push(out.clone());
                    output_types.len() - 1
                });
                let log_shell = log_conditional_class_size(&cond);
                let mut log_prob = 0.0;
                for x in 0..nx {
                    for y in 0..ny {
                        let c = cond.joint()[x][y];
                        if c > 0 {
                            log_prob += c as f64 * log_w[x][y];
                        }
                    }
                }
                shells.push(Shell {
                    input: pi,
                    output: oi,
                    joint: cond,
                    log_mass: (log_shell + log_prob).min(0.0),
                    log_ratio: (log_shell - log_type_class_size(&out)).min(0.0),
                });
                if 3 * shells.len() > max_nonzeros {
                    return Err(Error::SizeCap(format!(
                        "type-space LP for n = {n} exceeds {max_nonzeros} nonzeros"
                    )));
                }
                // Odometer over the per-row choices.
                let mut k = 0;
                while k < nx {
                    pick[k] += 1;
                    if pick[k] < per_row[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == nx {
                    break;
                }
            }
        }
        Ok(Self {
            n,
            input_types,
            output_types,
            shells,
        })
    }

    /// Number of constraint nonzeros of the type-space LP.
    pub fn nonzeros(&self) -> usize {
        3 * self.shells.len() + self.input_types.len()
    }

    /// `max_P Σ_{V} (e^{A} − M e^{R} Q_T)_+` for given output-type masses.
    pub fn distortion_at<T: Real>(&self, log_m: f64, q: &[T]) -> T {
        let mut per_input = vec![T::zero(); self.input_types.len()];
        for s in &self.shells {
            let gap = T::lit(s.log_mass.exp()) - T::lit((log_m + s.log_ratio).exp()) * q[s.output];
            per_input[s.input] = per_input[s.input] + gap.max(T::zero());
        }
        per_input.into_iter().fold(T::zero(), |a, b| a.max(b))
    }
}

/// Which LP formulation the type-space solver hands to the simplex method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedFormulation {
    /// Minimise `t` over output-type masses and per-shell slacks.
    Primal,
    /// The LP dual (a packing problem needing no phase one); the masses are
    /// recovered as its constraint multipliers.
    Dual,
}

#[derive(Debug, Clone, Copy)]
pub struct ReducedConfig {
    pub max_nonzeros: usize,
    pub max_dense_cells: usize,
    pub formulation: ReducedFormulation,
}

impl Default for ReducedConfig {
    fn default() -> Self {
        Self {
            max_nonzeros: DEFAULT_MAX_LP_NONZEROS,
            max_dense_cells: DEFAULT_MAX_DENSE_CELLS,
            formulation: ReducedFormulation::Dual,
        }
    }
}

/// `ε(M, W^{⊗n})` over type space with default configuration.
pub fn eps_ns_iid<T: Real>(w: &Channel<T>, n: usize, m: &MessageSize) -> Result<SolveReport<T>> {
    eps_ns_iid_with(w, n, m, &ReducedConfig::default())
}

pub fn eps_ns_iid_with<T: Real>(
    w: &Channel<T>,
    n: usize,
    m: &MessageSize,
    cfg: &ReducedConfig,
) -> Result<SolveReport<T>> {
    let w64 = w.to_f64();
    let inst = ReducedInstance::build(&w64, n, cfg.max_nonzeros)?;
    let log_m = m.ln();
    let masses =
        |q: Vec<T>| -> Reference<T> { Reference::TypeMasses(inst.output_types.iter().cloned().zip(q).collect()) };

    // Zero distortion iff M ≥ (Σ_y max_x W)^n.
    let threshold = zero_threshold(&w64);
    if log_m >= n as f64 * threshold.ln() - 1e-12 {
        let log_q: Vec<f64> = (0..w64.output_size())
            .map(|y| ((0..w64.input_size()).fold(0.0f64, |b, x| b.max(*w64.get(x, y))) / threshold).ln())
            .collect();
        let q: Vec<T> = inst
            .output_types
            .iter()
            .map(|t| {
                let lq: f64 = t
                    .counts()
                    .iter()
                    .zip(&log_q)
                    .map(|(c, l)| if *c > 0 { *c as f64 * l } else { 0.0 })
                    .sum();
                T::lit((log_type_class_size(t) + lq).exp())
            })
            .collect();
        let residual = inst.distortion_at(log_m, &q);
        let mut rep = finish(T::zero(), T::zero(), masses(q), 0, Vec::new());
        rep.certificate_gap = residual;
        return Ok(rep);
    }

    let rows = inst.shells.len() + inst.output_types.len() + 1;
    let cols = inst.shells.len() + inst.input_types.len() + 1 + 2 * rows;
    if rows.saturating_mul(cols) > cfg.max_dense_cells {
        return Err(Error::SizeCap(format!(
            "type-space LP for n = {n} needs a {rows} x {cols} tableau (cap {})",
            cfg.max_dense_cells
        )));
    }
    match cfg.formulation {
        ReducedFormulation::Dual => solve_reduced_dual(&inst, log_m),
        ReducedFormulation::Primal => solve_reduced_primal(&inst, log_m),
    }
}

/// Lower bound from any nonnegative shell weights `λ` with per-input caps `μ`.
fn reduced_dual_value<T: Real>(inst: &ReducedInstance, log_m: f64, lambda: &[T]) -> T {
    let np = inst.input_types.len();
    let mut mu = vec![T::zero(); np];
    let lam: Vec<T> = lambda.iter().map(|v| v.max(T::zero())).collect();
    for (s, l) in inst.shells.iter().zip(&lam) {
        mu[s.input] = mu[s.input].max(*l);
    }
    let total = mu.iter().fold(T::zero(), |a, b| a + *b);
    let scale = if total > T::one() { T::one() / total } else { T::one() };
    let mut gain = T::zero();
    let mut cover = vec![T::zero(); inst.output_types.len()];
    for (s, l) in inst.shells.iter().zip(&lam) {
        let l = *l * scale;
        gain = gain + T::lit(s.log_mass.exp()) * l;
        cover[s.output] = cover[s.output] + T::lit((log_m + s.log_ratio).exp()) * l;
    }
    let z = cover.into_iter().fold(T::zero(), |a, b| a.max(b));
    (gain - z).max(T::zero())
}

fn solve_reduced_dual<T: Real>(inst: &ReducedInstance, log_m: f64) -> Result<SolveReport<T>> {
    let ns = inst.shells.len();
    let np = inst.input_types.len();
    let mu0 = ns;
    let z = ns + np;
    let mut lp = LinearProgram::<T>::new(z + 1, Sense::Maximize);
    lp.set_objective(z, -T::one());
    for (k, s) in inst.shells.iter().enumerate() {
        lp.set_objective(k, T::lit(s.log_mass.exp()));
        lp.add_constraint(vec![(k, T::one()), (mu0 + s.input, -T::one())], Relation::Le, T::zero());
    }
    lp.add_constraint((0..np).map(|p| (mu0 + p, T::one())).collect(), Relation::Le, T::one());
    let mut per_output: Vec<Vec<(usize, T)>> = vec![vec![(z, -T::one())]; inst.output_types.len()];
    for (k, s) in inst.shells.iter().enumerate() {
        per_output[s.output].push((k, T::lit((log_m + s.log_ratio).exp())));
    }
    let out_rows: Vec<usize> = per_output
        .into_iter()
        .map(|c| lp.add_constraint(c, Relation::Le, T::zero()))
        .collect();
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(lp_failure(&sol, "type-space"));
    }
    let q = normalize_masses(out_rows.iter().map(|&r| sol.duals[r]).collect());
    let value = inst.distortion_at(log_m, &q);
    let lower = reduced_dual_value(inst, log_m, &sol.x[..ns]);
    let refm = Reference::TypeMasses(inst.output_types.iter().cloned().zip(q).collect());
    Ok(finish(value, lower, refm, sol.iterations, Vec::new()))
}

fn solve_reduced_primal<T: Real>(inst: &ReducedInstance, log_m: f64) -> Result<SolveReport<T>> {
    let ns = inst.shells.len();
    let nt = inst.output_types.len();
    let u0 = nt;
    let t = nt + ns;
    let mut lp = LinearProgram::<T>::new(t + 1, Sense::Minimize);
    lp.set_objective(t, T::one());
    let mut shell_rows = Vec::with_capacity(ns);
    for (k, s) in inst.shells.iter().enumerate() {
        shell_rows.push(lp.add_constraint(
            vec![(u0 + k, T::one()), (s.output, T::lit((log_m + s.log_ratio).exp()))],
            Relation::Ge,
            T::lit(s.log_mass.exp()),
        ));
    }
    let mut per_input: Vec<Vec<(usize, T)>> = vec![vec![(t, -T::one())]; inst.input_types.len()];
    for (k, s) in inst.shells.iter().enumerate() {
        per_input[s.input].push((u0 + k, T::one()));
    }
    for c in per_input {
        lp.add_constraint(c, Relation::Le, T::zero());
    }
    lp.add_constraint((0..nt).map(|j| (j, T::one())).collect(), Relation::Eq, T::one());
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(lp_failure(&sol, "type-space"));
    }
    let q = normalize_masses(sol.x[..nt].to_vec());
    let value = inst.distortion_at(log_m, &q);
    let lambda: Vec<T> = shell_rows.iter().map(|&r| sol.duals[r]).collect();
    let lower = reduced_dual_value(inst, log_m, &lambda);
    let refm = Reference::TypeMasses(inst.output_types.iter().cloned().zip(q).collect());
    Ok(finish(value, lower, refm, sol.iterations, Vec::new()))
}

fn normalize_masses<T: Real>(q: Vec<T>) -> Vec<T> {
    let q: Vec<T> = q.into_iter().map(|v| v.max(T::zero())).collect();
    let s = q.iter().fold(T::zero(), |a, b| a + *b);
    if s > T::zero() {
        q.into_iter().map(|v| v / s).collect()
    } else {
        let k = T::from_usize(q.len()).unwrap();
        vec![T::one() / k; q.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn bsc01() -> Channel<f64> {
        Channel::bsc(0.1).unwrap()
    }

    #[test]
    fn oneshot_examples() {
        let flat = Channel::constant(3, Pmf::new(vec![0.2, 0.8]).unwrap());
        assert_eq!(eps_ns_oneshot(&flat, 1).unwrap().value, 0.0);
        let id4 = Channel::<f64>::identity(4);
        let r = eps_ns_oneshot(&id4, 2).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert_eq!(r.status, SolveStatus::Optimal);
        let r = eps_ns_oneshot(&bsc01(), 1).unwrap();
        assert!((r.value - 0.4).abs() < 1e-12);
        assert!(r.certificate_gap < 1e-12);
        assert_eq!(eps_ns_oneshot(&bsc01(), 2).unwrap().value, 0.0);
    }

    #[test]
    fn oneshot_exact_rational() {
        let w: Channel<BigRational> = Channel::bsc(ratio(1, 10)).unwrap();
        let r = eps_ns_oneshot(&w, 1).unwrap();
        assert_eq!(r.value, ratio(2, 5));
        assert_eq!(r.lower_bound, ratio(2, 5));
        let id4: Channel<BigRational> = Channel::identity(4);
        for m in 1..=4u64 {
            let r = eps_ns_oneshot(&id4, m).unwrap();
            assert_eq!(r.value, ratio(4 - m as i64, 4));
        }
        let skew: Channel<BigRational> = Channel::new(vec![
            vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)],
            vec![ratio(1, 5), ratio(3, 5), ratio(1, 5)],
        ])
        .unwrap();
        let r = eps_ns_oneshot(&skew, 1).unwrap();
        let d = eps_ns_oneshot_relaxed(&skew, 1).unwrap();
        assert_eq!(r.value, d.value);
        assert_eq!(r.certificate_gap, ratio(0, 1));
    }

    #[test]
    fn relaxed_form_agrees() {
        let w = Channel::<f64>::new(vec![vec![0.6, 0.3, 0.1], vec![0.05, 0.15, 0.8], vec![0.3, 0.4, 0.3]]).unwrap();
        for m in 1..4 {
            let a = eps_ns_oneshot(&w, m).unwrap();
            let b = eps_ns_oneshot_relaxed(&w, m).unwrap();
            assert!((a.value - b.value).abs() < 1e-10, "M = {m}");
        }
    }

    #[test]
    fn bruteforce_examples() {
        let id2 = Channel::<f64>::identity(2);
        assert!((eps_ns_iid_bruteforce(&id2, 3, 2).unwrap().value - 0.75).abs() < 1e-12);
        assert_eq!(eps_ns_iid_bruteforce(&bsc01(), 2, 4).unwrap().value, 0.0);
        let w = bsc01();
        assert_eq!(
            eps_ns_iid_bruteforce(&w, 1, 1).unwrap().value,
            eps_ns_oneshot(&w, 1).unwrap().value
        );
    }

    #[test]
    fn reduced_instance_rows_are_stochastic() {
        let w = Channel::<f64>::new(vec![vec![0.7, 0.2, 0.1], vec![0.0, 0.5, 0.5]]).unwrap();
        let inst = ReducedInstance::build(&w, 4, DEFAULT_MAX_LP_NONZEROS).unwrap();
        let mut mass = vec![0.0; inst.input_types.len()];
        for s in &inst.shells {
            assert!(s.log_mass <= 1e-9 && s.log_ratio <= 1e-9);
            mass[s.input] += s.log_mass.exp();
        }
        for m in mass {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_matches_bruteforce() {
        let w = Channel::<f64>::new(vec![vec![0.8, 0.2], vec![0.35, 0.65]]).unwrap();
        for n in 1..=3 {
            for m in [1u64, 2, 3, 5] {
                let ms = MessageSize::new(m).unwrap();
                let a = eps_ns_iid(&w, n, &ms).unwrap();
                let b = eps_ns_iid_bruteforce(&w, n, m).unwrap();
                let c = eps_ns_iid_with(
                    &w,
                    n,
                    &ms,
                    &ReducedConfig {
                        formulation: ReducedFormulation::Primal,
                        ..ReducedConfig::default()
                    },
                )
                .unwrap();
                assert!(
                    (a.value - b.value).abs() < 1e-9,
                    "n={n} M={m}: {} vs {}",
                    a.value,
                    b.value
                );
                assert!((a.value - c.value).abs() < 1e-9);
                assert_eq!(a.status, SolveStatus::Optimal);
            }
        }
    }

    #[test]
    fn reduced_identity_closed_form() {
        let id2 = Channel::<f64>::identity(2);
        let r = eps_ns_iid(&id2, 10, &MessageSize::new(512).unwrap()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reduced_zero_regime() {
        // ⌊e^{0.6 n}⌋ ≥ 1.8^n for n ≥ 3: the simulation is perfect.
        let w = bsc01();
        let r = eps_ns_iid(&w, 10, &MessageSize::from_rate(10, 0.6).unwrap()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.certificate_gap < 1e-12);
        let r = eps_ns_iid(&w, 10, &MessageSize::new(300).unwrap()).unwrap();
        assert!(r.value > 0.0 && r.value < 1.0);
    }

    #[test]
    fn size_caps() {
        let w = bsc01();
        let cfg = ReducedConfig {
            max_nonzeros: 100,
            ..ReducedConfig::default()
        };
        assert!(matches!(
            eps_ns_iid_with(&w, 20, &MessageSize::new(3).unwrap(), &cfg),
            Err(Error::SizeCap(_))
        ));
    }
}
