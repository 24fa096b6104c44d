//! Two-phase primal simplex with variable bounds.
//!
//! The tableau treats every variable as boxed between a finite lower
//! bound and a finite-or-infinite upper bound; nonbasic variables sit at
//! one of their bounds and may *flip* to the other without a basis
//! change. Phase 1 minimizes the total artificial infeasibility, phase 2
//! the real objective with the artificials pinned at zero. Entering and
//! leaving choices follow Bland's smallest-index rule throughout, which
//! rules out cycling, and all comparisons use a single absolute
//! tolerance — the systems built here carry integer-scaled data, so no
//! scaling pass is needed.

use super::{LpResult, LpStatus};
use crate::linear::{ConstraintSystem, Relation};
use crate::num::Scalar;

/// Where a nonbasic column currently sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Tableau<T> {
    /// Row-major `m x n_total` coefficients, kept equal to `B^-1 A`.
    rows: Vec<Vec<T>>,
    /// Right-hand side, kept equal to `B^-1 b`.
    rhs: Vec<T>,
    cost: Vec<T>,
    lower: Vec<T>,
    upper: Vec<T>,
    state: Vec<ColumnState>,
    basis: Vec<usize>,
    tol: T,
}

impl<T: Scalar> Tableau<T> {
    /// Current value of a nonbasic column.
    fn nonbasic_value(&self, j: usize) -> T {
        match self.state[j] {
            ColumnState::AtLower => self.lower[j],
            ColumnState::AtUpper => self.upper[j],
            ColumnState::Basic(_) => unreachable!("basic column asked for a bound value"),
        }
    }

    /// Values of the basic variables implied by the nonbasic bounds.
    fn basic_values(&self) -> Vec<T> {
        let mut vals = self.rhs.clone();
        for j in 0..self.cost.len() {
            if matches!(self.state[j], ColumnState::Basic(_)) {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != T::zero() {
                for (row, val) in self.rows.iter().zip(vals.iter_mut()) {
                    let a = row[j];
                    if a != T::zero() {
                        *val -= a * v;
                    }
                }
            }
        }
        vals
    }

    /// Reduced cost of column `j` under the current cost vector.
    fn reduced_cost(&self, j: usize, duals: &[T]) -> T {
        let mut d = self.cost[j];
        for (i, &y) in duals.iter().enumerate() {
            let a = self.rows[i][j];
            if a != T::zero() {
                d -= y * a;
            }
        }
        d
    }

    /// Simplex multipliers `y_i = cost of the basic variable of row i`
    /// (the tableau rows are already `B^-1 A`, so the multiplier of row
    /// `i` is just the basic cost).
    fn duals(&self) -> Vec<T> {
        self.basis.iter().map(|&j| self.cost[j]).collect()
    }

    /// Run the simplex until optimal, unbounded, or the pivot budget is
    /// spent. Returns `None` on optimality, otherwise the failure.
    fn iterate(&mut self, max_pivots: usize) -> Option<LpStatus> {
        let m = self.rows.len();
        let n = self.cost.len();
        for _ in 0..max_pivots {
            let duals = self.duals();
            // Entering column: Bland's rule — the smallest index that
            // can improve the objective by moving off its bound.
            let mut entering = None;
            for j in 0..n {
                let dir = match self.state[j] {
                    ColumnState::Basic(_) => continue,
                    ColumnState::AtLower => {
                        if self.upper[j] <= self.lower[j] {
                            continue; // fixed column
                        }
                        T::one()
                    }
                    ColumnState::AtUpper => -T::one(),
                };
                let d = self.reduced_cost(j, &duals);
                if d * dir < -self.tol {
                    entering = Some((j, dir));
                    break;
                }
            }
            let (j, dir) = entering?;

            // Ratio test: how far can x_j move before the entering
            // column hits its other bound or a basic hits one of its?
            // First find the minimum ratio, then — Bland again — the
            // smallest-index basic among the rows that attain it.
            let values = self.basic_values();
            let flip_limit = if self.upper[j].is_finite() {
                self.upper[j] - self.lower[j]
            } else {
                T::infinity()
            };
            let row_ratio = |i: usize| -> Option<(T, bool)> {
                let delta = self.rows[i][j] * dir; // basic decreases by delta * t
                let b = self.basis[i];
                if delta > self.tol {
                    let room = values[i] - self.lower[b];
                    Some(((room / delta).max(T::zero()), false))
                } else if delta < -self.tol && self.upper[b].is_finite() {
                    let room = self.upper[b] - values[i];
                    Some(((room / -delta).max(T::zero()), true))
                } else {
                    None
                }
            };
            let mut row_min = T::infinity();
            for i in 0..m {
                if let Some((t, _)) = row_ratio(i) {
                    row_min = row_min.min(t);
                }
            }
            let limit = row_min.min(flip_limit);
            if !limit.is_finite() {
                return Some(LpStatus::Unbounded);
            }
            // A tie between a blocking row and the entering column's own
            // span is resolved in favor of the pivot (progress is the
            // same either way); only a strictly shorter span flips.
            let mut leaving: Option<(usize, bool)> = None; // (row, leaves at upper)
            if row_min <= flip_limit + self.tol {
                for i in 0..m {
                    if let Some((t, at_upper)) = row_ratio(i) {
                        if t <= row_min + self.tol
                            && leaving
                                .map_or(true, |(r, _)| self.basis[r] > self.basis[i])
                        {
                            leaving = Some((i, at_upper));
                        }
                    }
                }
            }
            match leaving {
                None => {
                    // Bound flip: the entering column crosses to its
                    // other bound before any basic variable blocks.
                    self.state[j] = match self.state[j] {
                        ColumnState::AtLower => ColumnState::AtUpper,
                        ColumnState::AtUpper => ColumnState::AtLower,
                        ColumnState::Basic(_) => unreachable!(),
                    };
                }
                Some((row, leaves_at_upper)) => {
                    let old = self.basis[row];
                    self.state[old] = if leaves_at_upper {
                        ColumnState::AtUpper
                    } else {
                        ColumnState::AtLower
                    };
                    self.state[j] = ColumnState::Basic(row);
                    self.basis[row] = j;
                    self.pivot(row, j);
                }
            }
        }
        // Pivot budget spent; treat as a solver failure loudly rather
        // than silently returning a wrong answer.
        panic!("simplex exceeded its pivot budget; the system is badly scaled");
    }

    /// Gaussian elimination making column `j` the unit vector of `row`.
    fn pivot(&mut self, row: usize, j: usize) {
        let m = self.rows.len();
        let piv = self.rows[row][j];
        debug_assert!(piv.abs() > self.tol, "numerically singular pivot");
        let inv = T::one() / piv;
        for a in self.rows[row].iter_mut() {
            *a *= inv;
        }
        self.rhs[row] *= inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..m {
            if i == row {
                continue;
            }
            let factor = self.rows[i][j];
            if factor == T::zero() {
                continue;
            }
            for (a, &p) in self.rows[i].iter_mut().zip(&pivot_row) {
                *a -= factor * p;
            }
            self.rhs[i] -= factor * pivot_rhs;
        }
    }
}

/// Solve the LP relaxation of `sys` under explicit bounds (one pair per
/// variable; integrality is ignored). Lower bounds must be finite.
pub fn solve_lp<T: Scalar>(sys: &ConstraintSystem<T>, lower: &[T], upper: &[T]) -> LpResult<T> {
    let n = sys.num_vars();
    let m = sys.num_cons();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);
    let tol = T::from_f64_const(1e-9);

    for j in 0..n {
        assert!(lower[j].is_finite(), "lower bounds must be finite");
        if lower[j] > upper[j] {
            return LpResult::infeasible();
        }
    }

    // Columns: structural, then one slack per inequality row, then one
    // artificial per row (bounded to zero unless phase 1 needs it).
    let slack_count = sys
        .cons()
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let total = n + slack_count + m;
    let mut rows = vec![vec![T::zero(); total]; m];
    let mut rhs = vec![T::zero(); m];
    let mut col_lower = vec![T::zero(); total];
    let mut col_upper = vec![T::zero(); total];
    col_lower[..n].copy_from_slice(lower);
    col_upper[..n].copy_from_slice(upper);

    let mut slack_col = n;
    let mut slack_of = vec![None; m];
    for (i, con) in sys.cons().iter().enumerate() {
        for &(v, c) in &con.terms {
            rows[i][v.0] = c;
        }
        rhs[i] = con.rhs;
        match con.relation {
            Relation::Le => {
                rows[i][slack_col] = T::one();
                col_upper[slack_col] = T::infinity();
                slack_of[i] = Some(slack_col);
                slack_col += 1;
            }
            Relation::Ge => {
                rows[i][slack_col] = -T::one();
                col_upper[slack_col] = T::infinity();
                slack_of[i] = Some(slack_col);
                slack_col += 1;
            }
            Relation::Eq => {}
        }
    }

    // Initial point: structurals at their lower bounds. Each row's
    // residual is absorbed by its slack when the sign allows, otherwise
    // by an artificial opened up just for phase 1. The tableau invariant
    // is `rows = B^-1 A` with the basis scaled to +1 columns, so any row
    // whose initial basic column carries -1 (a >= slack, or an
    // artificial for a negative residual) is negated here.
    let mut state = vec![ColumnState::AtLower; total];
    let mut basis = vec![0usize; m];
    let mut cost = vec![T::zero(); total];
    for (i, con) in sys.cons().iter().enumerate() {
        let activity: T = con.terms.iter().map(|&(v, c)| c * lower[v.0]).sum();
        let residual = con.rhs - activity;
        let fits_slack = match con.relation {
            Relation::Le => residual >= T::zero(),
            Relation::Ge => residual <= T::zero(),
            Relation::Eq => false,
        };
        if fits_slack {
            let s = slack_of[i].expect("inequality rows have slacks");
            if con.relation == Relation::Ge {
                for a in rows[i].iter_mut() {
                    *a = -*a;
                }
                rhs[i] = -rhs[i];
            }
            basis[i] = s;
            state[s] = ColumnState::Basic(i);
        } else {
            if residual < T::zero() {
                for a in rows[i].iter_mut() {
                    *a = -*a;
                }
                rhs[i] = -rhs[i];
            }
            let a = n + slack_count + i;
            rows[i][a] = T::one();
            col_upper[a] = T::infinity();
            cost[a] = T::one();
            basis[i] = a;
            state[a] = ColumnState::Basic(i);
        }
    }

    let max_pivots = 2000 + 200 * (m + total);
    let mut tab = Tableau {
        rows,
        rhs,
        cost,
        lower: col_lower,
        upper: col_upper,
        state,
        basis,
        tol,
    };

    // Phase 1: minimize total artificial usage.
    if let Some(status) = tab.iterate(max_pivots) {
        debug_assert_ne!(status, LpStatus::Unbounded, "phase 1 is bounded below by 0");
        return LpResult::infeasible();
    }
    let values = tab.basic_values();
    let mut infeasibility = T::zero();
    for (i, &b) in tab.basis.iter().enumerate() {
        if b >= n + slack_count {
            infeasibility += values[i].abs();
        }
    }
    for j in n + slack_count..total {
        if tab.state[j] == ColumnState::AtUpper {
            infeasibility += tab.upper[j];
        }
    }
    if infeasibility > T::from_f64_const(1e-7) {
        return LpResult::infeasible();
    }

    // Phase 2: real costs; artificials pinned to zero so they can never
    // re-enter with weight.
    for j in 0..total {
        tab.cost[j] = T::zero();
    }
    for (j, var) in sys.vars().iter().enumerate() {
        tab.cost[j] = var.objective;
    }
    for j in n + slack_count..total {
        tab.upper[j] = T::zero();
        if tab.state[j] == ColumnState::AtUpper {
            tab.state[j] = ColumnState::AtLower;
        }
    }
    if let Some(status) = tab.iterate(max_pivots) {
        return match status {
            LpStatus::Unbounded => LpResult::unbounded(),
            _ => LpResult::infeasible(),
        };
    }

    let basics = tab.basic_values();
    let mut out = vec![T::zero(); n];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = match tab.state[j] {
            ColumnState::Basic(i) => basics[i],
            ColumnState::AtLower => tab.lower[j],
            ColumnState::AtUpper => tab.upper[j],
        };
    }
    let objective = sys.objective_value(&out);
    LpResult {
        status: LpStatus::Optimal,
        objective,
        values: out,
    }
}

/// Solve the relaxation with the system's own bounds.
pub fn solve_lp_default<T: Scalar>(sys: &ConstraintSystem<T>) -> LpResult<T> {
    let lower: Vec<T> = sys.vars().iter().map(|v| v.lower).collect();
    let upper: Vec<T> = sys.vars().iter().map(|v| v.upper).collect();
    solve_lp(sys, &lower, &upper)
}
