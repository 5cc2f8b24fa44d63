//! Dense two-phase tableau simplex method, generic over [`Scalar`].
//!
//! Variables are non-negative. Pricing is Dantzig's most-negative reduced
//! cost, switching to Bland's smallest-index rule after a run of degenerate
//! pivots so that the method cannot cycle. With an exact scalar type
//! (e.g. `BigRational`) the returned optimum is exact.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
struct Row<T> {
    coeffs: Vec<(usize, T)>,
    rel: Relation,
    rhs: T,
}

/// A linear program over non-negative variables.
#[derive(Debug, Clone)]
pub struct LinearProgram<T: Scalar> {
    sense: Sense,
    objective: Vec<T>,
    rows: Vec<Row<T>>,
}

/// Result of [`LinearProgram::solve`].
#[derive(Debug, Clone)]
pub struct LpSolution<T: Scalar> {
    pub status: LpStatus,
    /// Objective value in the problem's own sense.
    pub objective: T,
    pub x: Vec<T>,
    /// Dual multipliers, one per constraint, with `bᵀy = objective` at optimality.
    pub duals: Vec<T>,
    pub iterations: usize,
}

/// Solver knobs.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iterations: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_switch: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            degenerate_switch: 32,
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        Self {
            sense,
            objective: vec![T::zero(); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Number of stored constraint coefficients.
    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn set_objective(&mut self, var: usize, coeff: T) {
        self.objective[var] = coeff;
    }

    /// Add `Σ coeff·x[var] (rel) rhs`; returns the constraint index.
    pub fn add_constraint(&mut self, coeffs: Vec<(usize, T)>, rel: Relation, rhs: T) -> usize {
        for (v, _) in &coeffs {
            assert!(*v < self.num_vars(), "variable index {v} out of range");
        }
        self.rows.push(Row { coeffs, rel, rhs });
        self.rows.len() - 1
    }

    pub fn solve(&self) -> LpSolution<T> {
        self.solve_with(SimplexOptions::default())
    }

    pub fn solve_with(&self, opts: SimplexOptions) -> LpSolution<T> {
        Tableau::build(self).run(self, opts)
    }
}

struct Tableau<T> {
    m: usize,
    n: usize,
    /// Total columns excluding the right-hand side.
    cols: usize,
    width: usize,
    /// `m + 1` rows; row `m` holds the reduced costs and `-objective`.
    data: Vec<T>,
    basis: Vec<usize>,
    /// Column that formed the identity for each row in the initial basis.
    init_col: Vec<usize>,
    /// Row was multiplied by -1 to make its right-hand side non-negative.
    flipped: Vec<bool>,
    first_artificial: usize,
    iterations: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.rows.len();
        let n = lp.num_vars();
        let mut rels = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for r in &lp.rows {
            let flip = r.rhs < T::zero();
            flipped.push(flip);
            rels.push(match (r.rel, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (rel, _) => rel,
            });
        }
        let n_slack = rels.iter().filter(|r| **r != Relation::Eq).count();
        let n_art = rels.iter().filter(|r| **r != Relation::Le).count();
        let first_artificial = n + n_slack;
        let cols = n + n_slack + n_art;
        let width = cols + 1;
        let mut data = vec![T::zero(); (m + 1) * width];
        let mut basis = vec![0; m];
        let mut init_col = vec![0; m];
        let mut next_slack = n;
        let mut next_art = first_artificial;
        for (i, r) in lp.rows.iter().enumerate() {
            let sign = if flipped[i] { -T::one() } else { T::one() };
            let base = i * width;
            for (v, c) in &r.coeffs {
                let cell = &mut data[base + v];
                *cell = cell.clone() + sign.clone() * c.clone();
            }
            data[base + cols] = sign * r.rhs.clone();
            match rels[i] {
                Relation::Le => {
                    data[base + next_slack] = T::one();
                    basis[i] = next_slack;
                    init_col[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    data[base + next_slack] = -T::one();
                    next_slack += 1;
                    data[base + next_art] = T::one();
                    basis[i] = next_art;
                    init_col[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    data[base + next_art] = T::one();
                    basis[i] = next_art;
                    init_col[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Self {
            m,
            n,
            cols,
            width,
            data,
            basis,
            init_col,
            flipped,
            first_artificial,
            iterations: 0,
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.width + c]
    }

    /// Reset the objective row to reduced costs of `cost` under the current basis.
    fn price(&mut self, cost: &[T]) {
        let m = self.m;
        let w = self.width;
        let mut obj = vec![T::zero(); w];
        obj[..self.cols].clone_from_slice(&cost[..self.cols]);
        for i in 0..m {
            let cb = cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            let row = &self.data[i * w..(i + 1) * w];
            for (o, a) in obj.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o = o.clone() - cb.clone() * a.clone();
                }
            }
        }
        self.data[m * w..].clone_from_slice(&obj);
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = T::one() / self.at(pr, pc).clone();
        {
            let row = &mut self.data[pr * w..(pr + 1) * w];
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() * inv.clone();
                }
            }
            row[pc] = T::one();
        }
        let prow: Vec<T> = self.data[pr * w..(pr + 1) * w].to_vec();
        let nz: Vec<usize> = (0..w).filter(|&j| !prow[j].is_zero()).collect();
        let tiny = if T::EXACT {
            T::zero()
        } else {
            T::pivot_tolerance() * T::lit(1e-6)
        };
        for r in 0..=self.m {
            if r == pr {
                continue;
            }
            let factor = self.data[r * w + pc].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.data[r * w..(r + 1) * w];
            for &j in &nz {
                let v = row[j].clone() - factor.clone() * prow[j].clone();
                row[j] = if !T::EXACT && v.abs() < tiny { T::zero() } else { v };
            }
            row[pc] = T::zero();
        }
        self.basis[pr] = pc;
        self.iterations += 1;
    }

    /// Run simplex iterations on the current objective row. Columns at or
    /// beyond `col_limit` may not enter the basis.
    fn iterate(&mut self, col_limit: usize, opts: &SimplexOptions, max_iter: usize) -> PivotOutcome {
        let tol = T::pivot_tolerance();
        let neg_tol = -tol.clone();
        let mut degenerate_run = 0usize;
        let m = self.m;
        let w = self.width;
        let cols = self.cols;
        loop {
            if self.iterations >= max_iter {
                return PivotOutcome::IterationLimit;
            }
            let bland = degenerate_run >= opts.degenerate_switch;
            let obj = &self.data[m * w..];
            let mut enter: Option<usize> = None;
            let mut best = neg_tol.clone();
            for (j, d) in obj.iter().enumerate().take(col_limit) {
                if *d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d.clone();
                }
            }
            let Some(pc) = enter else {
                return PivotOutcome::Optimal;
            };
            // Ratio test; ties broken by smallest basic variable index.
            let mut leave: Option<usize> = None;
            let mut best_ratio = T::zero();
            for i in 0..m {
                let a = &self.data[i * w + pc];
                if *a > tol {
                    let ratio = self.data[i * w + cols].clone() / a.clone();
                    let better = match &leave {
                        None => true,
                        Some(l) => ratio < best_ratio || (ratio == best_ratio && self.basis[i] < self.basis[*l]),
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(pr) = leave else {
                return PivotOutcome::Unbounded;
            };
            if best_ratio.is_zero() || (!T::EXACT && best_ratio.abs() < tol) {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(pr, pc);
        }
    }

    fn run(mut self, lp: &LinearProgram<T>, opts: SimplexOptions) -> LpSolution<T> {
        let m = self.m;
        let n = self.n;
        let cols = self.cols;
        let max_iter = opts.max_iterations.unwrap_or(50 * (m + cols) + 1000);
        let fail = |status: LpStatus, iterations: usize| LpSolution {
            status,
            objective: T::zero(),
            x: vec![T::zero(); n],
            duals: vec![T::zero(); m],
            iterations,
        };

        // Phase 1: minimise the sum of artificial variables.
        if self.first_artificial < cols {
            let mut cost = vec![T::zero(); cols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = T::one();
            }
            self.price(&cost);
            match self.iterate(cols, &opts, max_iter) {
                PivotOutcome::Optimal => {}
                PivotOutcome::IterationLimit => return fail(LpStatus::IterationLimit, self.iterations),
                PivotOutcome::Unbounded => return fail(LpStatus::Infeasible, self.iterations),
            }
            let infeas = -self.at(m, cols).clone();
            let scale = (0..m).fold(T::one(), |a, i| T::max_of(a, lp.rows[i].rhs.abs()));
            let feas_tol = if T::EXACT { T::zero() } else { T::lit(1e-9) * scale };
            if infeas > feas_tol {
                return fail(LpStatus::Infeasible, self.iterations);
            }
            // Drive zero-level artificials out of the basis where possible.
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    let tol = T::pivot_tolerance();
                    if let Some(j) = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > tol) {
                        self.pivot(i, j);
                    }
                }
            }
        }

        // Phase 2.
        let mut cost = vec![T::zero(); cols];
        for (j, c) in lp.objective.iter().enumerate() {
            cost[j] = match lp.sense {
                Sense::Minimize => c.clone(),
                Sense::Maximize => -c.clone(),
            };
        }
        self.price(&cost);
        match self.iterate(self.first_artificial, &opts, max_iter) {
            PivotOutcome::Optimal => {}
            PivotOutcome::IterationLimit => return fail(LpStatus::IterationLimit, self.iterations),
            PivotOutcome::Unbounded => return fail(LpStatus::Unbounded, self.iterations),
        }

        let mut x = vec![T::zero(); n];
        for i in 0..m {
            let b = self.basis[i];
            if b < n {
                let v = self.at(i, cols).clone();
                x[b] = if v < T::zero() { T::zero() } else { v };
            }
        }
        let mut objective = lp
            .objective
            .iter()
            .zip(&x)
            .fold(T::zero(), |a, (c, v)| a + c.clone() * v.clone());
        // y = c_Bᵀ B⁻¹ where B⁻¹ is read off the initial identity columns.
        let mut duals = Vec::with_capacity(m);
        for i in 0..m {
            let col = self.init_col[i];
            let mut y = T::zero();
            for k in 0..m {
                let a = self.at(k, col);
                if !a.is_zero() {
                    y = y + cost[self.basis[k]].clone() * a.clone();
                }
            }
            if self.flipped[i] {
                y = -y;
            }
            if lp.sense == Sense::Maximize {
                y = -y;
            }
            duals.push(y);
        }
        if T::EXACT {
            // Basic solution is exact; keep the objective as computed.
        } else if objective.to_f64().is_none_or(|v| !v.is_finite()) {
            objective = T::zero();
        }
        LpSolution {
            status: LpStatus::Optimal,
            objective,
            x,
            duals,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    #[test]
    fn textbook_max() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::<f64>::new(2, Sense::Maximize);
        lp.set_objective(0, 3.0);
        lp.set_objective(1, 5.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(1, 2.0)], Relation::Le, 12.0);
        lp.add_constraint(vec![(0, 3.0), (1, 2.0)], Relation::Le, 18.0);
        let s = lp.solve();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        let by: f64 = s.duals.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert!((by - 36.0).abs() < 1e-12);
        assert!(s.duals.iter().all(|y| *y >= -1e-12));
    }

    #[test]
    fn two_phase_with_equalities_and_ge() {
        // min x + y s.t. x + 2y >= 4, x - y = 1 -> x = 2, y = 1, value 3
        let mut lp = LinearProgram::<f64>::new(2, Sense::Minimize);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, 2.0)], Relation::Ge, 4.0);
        lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 1.0);
        let s = lp.solve();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
        let by = s.duals[0] * 4.0 + s.duals[1];
        assert!((by - 3.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min x s.t. -x <= -2  (x >= 2)
        let mut lp = LinearProgram::<f64>::new(1, Sense::Minimize);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, -1.0)], Relation::Le, -2.0);
        let s = lp.solve();
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!((s.duals[0] * -2.0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1, Sense::Minimize);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 1.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 2.0);
        assert_eq!(lp.solve().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::<f64>::new(2, Sense::Maximize);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
        assert_eq!(lp.solve().status, LpStatus::Unbounded);
    }

    #[test]
    fn exact_rational_solution() {
        // max x + y s.t. 3x + y <= 1, x + 3y <= 1 -> 1/2 at (1/4, 1/4)
        let mut lp = LinearProgram::<BigRational>::new(2, Sense::Maximize);
        lp.set_objective(0, ratio(1, 1));
        lp.set_objective(1, ratio(1, 1));
        lp.add_constraint(vec![(0, ratio(3, 1)), (1, ratio(1, 1))], Relation::Le, ratio(1, 1));
        lp.add_constraint(vec![(0, ratio(1, 1)), (1, ratio(3, 1))], Relation::Le, ratio(1, 1));
        let s = lp.solve();
        assert_eq!(s.objective, ratio(1, 2));
        assert_eq!(s.x, vec![ratio(1, 4), ratio(1, 4)]);
        assert_eq!(s.duals, vec![ratio(1, 4), ratio(1, 4)]);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance (cycles under naive Dantzig pricing).
        let mut lp = LinearProgram::<BigRational>::new(4, Sense::Minimize);
        let c = [ratio(-3, 4), ratio(150, 1), ratio(-1, 50), ratio(6, 1)];
        for (j, v) in c.into_iter().enumerate() {
            lp.set_objective(j, v);
        }
        lp.add_constraint(
            vec![
                (0, ratio(1, 4)),
                (1, ratio(-60, 1)),
                (2, ratio(-1, 25)),
                (3, ratio(9, 1)),
            ],
            Relation::Le,
            ratio(0, 1),
        );
        lp.add_constraint(
            vec![
                (0, ratio(1, 2)),
                (1, ratio(-90, 1)),
                (2, ratio(-1, 50)),
                (3, ratio(3, 1)),
            ],
            Relation::Le,
            ratio(0, 1),
        );
        lp.add_constraint(vec![(2, ratio(1, 1))], Relation::Le, ratio(1, 1));
        let s = lp.solve_with(SimplexOptions {
            max_iterations: Some(500),
            degenerate_switch: 2,
        });
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, ratio(-1, 20));
    }

    #[test]
    fn redundant_equalities() {
        // x + y = 1 twice; min x -> 0.
        let mut lp = LinearProgram::<f64>::new(2, Sense::Minimize);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        let s = lp.solve();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective.abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
    }
}
