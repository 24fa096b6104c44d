//! Best-first branch and bound over the LP relaxation.
//!
//! Nodes live in an arena and carry only the single bound change that
//! created them; a node's full variable box is reconstructed by walking
//! its parent chain, so memory stays proportional to the tree rather
//! than to `tree x variables`. Before each LP solve the box is tightened
//! by activity-based bound propagation, which closes many roster
//! subproblems without a pivot. The search pops the node with the
//! smallest inherited bound first, so the first moment the queue head
//! cannot beat the incumbent, the incumbent is proven optimal.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::simplex::solve_lp;
use super::LpStatus;
use crate::linear::{ConstraintSystem, Relation, VarKind};
use crate::num::{Scalar, TotalOrd};

/// Caps on the search effort.
#[derive(Debug, Clone, Copy)]
pub struct SolveLimits {
    /// Maximum number of nodes to process (LP solves); `None` means run
    /// until the tree is exhausted.
    pub max_nodes: Option<usize>,
    /// Stop as proven once the relative gap between incumbent and best
    /// outstanding bound drops to this value.
    pub gap_tolerance: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_nodes: None,
            gap_tolerance: 1e-9,
        }
    }
}

impl SolveLimits {
    /// Limits that stop after `n` nodes, keeping the best roster found.
    pub fn node_capped(n: usize) -> Self {
        SolveLimits {
            max_nodes: Some(n),
            ..SolveLimits::default()
        }
    }
}

/// How a search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Incumbent proven optimal (within the gap tolerance).
    Optimal,
    /// Node limit hit with an incumbent in hand but no proof.
    Feasible,
    /// Search exhausted without finding any integer-feasible point.
    Infeasible,
    /// The relaxation has no finite optimum.
    Unbounded,
    /// Node limit hit before any integer-feasible point appeared.
    Unknown,
}

/// Result of a branch-and-bound run.
#[derive(Debug, Clone)]
pub struct MilpSolution<T> {
    pub status: SolveStatus,
    /// Incumbent objective; `+inf` when no incumbent exists and `-inf`
    /// for an unbounded relaxation.
    pub objective: T,
    /// Incumbent variable values (empty when no incumbent exists).
    pub values: Vec<T>,
    /// Best lower bound proven for the whole problem.
    pub bound: T,
    /// Number of nodes processed.
    pub nodes: usize,
}

impl<T: Scalar> MilpSolution<T> {
    /// Relative optimality gap between incumbent and proven bound.
    pub fn gap(&self) -> T {
        (self.objective - self.bound) / self.objective.abs().max(T::one())
    }

    /// Whether `values` holds a usable integer-feasible point.
    pub fn has_solution(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

/// A search node: the bound patch that distinguishes it from its parent.
/// The relaxation bound inherited at creation time lives in the queue
/// key, not here.
struct Node<T> {
    parent: Option<usize>,
    patch: Option<(usize, T, T)>,
}

/// Queue entry: reversed (bound, insertion order) key plus node index.
type HeapEntry<T> = (Reverse<(TotalOrd<T>, u64)>, usize);

/// Tighten `lower`/`upper` in place by propagating row activities; ten
/// rounds is plenty for the near-network rows produced here. Returns
/// `false` when the box becomes empty.
fn propagate<T: Scalar>(
    sys: &ConstraintSystem<T>,
    kinds: &[VarKind],
    lower: &mut [T],
    upper: &mut [T],
) -> bool {
    let eps = T::from_f64_const(1e-9);
    let int_tol = T::from_f64_const(1e-6);
    // Integer boxes shrink to whole numbers before any row is inspected.
    for (j, &kind) in kinds.iter().enumerate() {
        if kind != VarKind::Continuous {
            lower[j] = (lower[j] - int_tol).ceil();
            if upper[j].is_finite() {
                upper[j] = (upper[j] + int_tol).floor();
            }
        }
        if lower[j] > upper[j] + eps {
            return false;
        }
    }
    for _ in 0..10 {
        let mut changed = false;
        for con in sys.cons() {
            let le_side = matches!(con.relation, Relation::Le | Relation::Eq);
            let ge_side = matches!(con.relation, Relation::Ge | Relation::Eq);
            if le_side && !tighten(&con.terms, false, con.rhs, kinds, lower, upper, &mut changed) {
                return false;
            }
            if ge_side && !tighten(&con.terms, true, con.rhs, kinds, lower, upper, &mut changed) {
                return false;
            }
        }
        if !changed {
            break;
        }
    }
    true
}

/// Propagate one `<=` row (`flip` negates it, turning a `>=` row into
/// this form). Returns `false` when a variable's box empties.
fn tighten<T: Scalar>(
    terms: &[(crate::linear::VarId, T)],
    flip: bool,
    rhs: T,
    kinds: &[VarKind],
    lower: &mut [T],
    upper: &mut [T],
    changed: &mut bool,
) -> bool {
    let eps = T::from_f64_const(1e-9);
    let int_tol = T::from_f64_const(1e-6);
    let sgn = if flip { -T::one() } else { T::one() };
    let rhs = rhs * sgn;

    // Minimum activity of the row, tracking how many terms are unbounded
    // below so a single infinite term can still bound its own variable.
    let mut min_sum = T::zero();
    let mut inf_count = 0usize;
    for &(v, c0) in terms {
        let c = c0 * sgn;
        let contrib = if c > T::zero() {
            c * lower[v.0]
        } else {
            c * upper[v.0]
        };
        if contrib.is_finite() {
            min_sum += contrib;
        } else {
            inf_count += 1;
        }
    }

    for &(v, c0) in terms {
        let c = c0 * sgn;
        if c == T::zero() {
            continue;
        }
        let j = v.0;
        let own = if c > T::zero() {
            c * lower[j]
        } else {
            c * upper[j]
        };
        let rest = if inf_count == 0 {
            min_sum - own
        } else if inf_count == 1 && !own.is_finite() {
            min_sum
        } else {
            continue;
        };
        let slack = rhs - rest;
        if c > T::zero() {
            let mut nb = slack / c;
            if kinds[j] != VarKind::Continuous {
                nb = (nb + int_tol).floor();
            }
            if nb < upper[j] - eps {
                upper[j] = nb;
                *changed = true;
                if lower[j] > upper[j] + eps {
                    return false;
                }
            }
        } else {
            let mut nb = slack / c;
            if kinds[j] != VarKind::Continuous {
                nb = (nb - int_tol).ceil();
            }
            if nb > lower[j] + eps {
                lower[j] = nb;
                *changed = true;
                if lower[j] > upper[j] + eps {
                    return false;
                }
            }
        }
    }
    true
}

/// Solve the mixed-integer system to a proven optimum or until a limit
/// fires. Minimization throughout; deterministic given the same input.
pub fn solve_milp<T: Scalar>(sys: &ConstraintSystem<T>, limits: &SolveLimits) -> MilpSolution<T> {
    let n = sys.num_vars();
    let kinds: Vec<VarKind> = sys.vars().iter().map(|v| v.kind).collect();
    let root_lower: Vec<T> = sys.vars().iter().map(|v| v.lower).collect();
    let root_upper: Vec<T> = sys.vars().iter().map(|v| v.upper).collect();
    let int_tol = T::from_f64_const(1e-6);
    let gap_tol = T::from_f64_const(limits.gap_tolerance);

    let mut nodes: Vec<Node<T>> = vec![Node {
        parent: None,
        patch: None,
    }];
    // Min-heap on (inherited bound, insertion order): best-first with
    // first-created-first ties, so runs are reproducible.
    let mut heap: BinaryHeap<HeapEntry<T>> = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push((Reverse((TotalOrd(T::neg_infinity()), seq)), 0));

    let mut incumbent: Option<(T, Vec<T>)> = None;
    let mut processed = 0usize;
    let mut final_status: Option<SolveStatus> = None;
    let mut final_bound: Option<T> = None;

    while let Some((Reverse((TotalOrd(bound), _)), idx)) = heap.pop() {
        // Best-first makes popped bounds non-decreasing, so the first
        // head that cannot beat the incumbent closes the whole search.
        if let Some((inc_obj, _)) = &incumbent {
            let cutoff = *inc_obj - T::from_f64_const(1e-9) * inc_obj.abs().max(T::one());
            let within_gap = *inc_obj - bound <= gap_tol * inc_obj.abs().max(T::one());
            if bound >= cutoff || within_gap {
                final_status = Some(SolveStatus::Optimal);
                final_bound = Some(bound);
                break;
            }
        }
        if limits.max_nodes.is_some_and(|cap| processed >= cap) {
            final_status = Some(if incumbent.is_some() {
                SolveStatus::Feasible
            } else {
                SolveStatus::Unknown
            });
            final_bound = Some(bound);
            break;
        }
        processed += 1;

        // Rebuild this node's box from the patch chain, then tighten it.
        let mut lower = root_lower.clone();
        let mut upper = root_upper.clone();
        let mut walk = Some(idx);
        while let Some(i) = walk {
            if let Some((j, lo, hi)) = nodes[i].patch {
                lower[j] = lower[j].max(lo);
                upper[j] = upper[j].min(hi);
            }
            walk = nodes[i].parent;
        }
        if !propagate(sys, &kinds, &mut lower, &mut upper) {
            continue;
        }

        let relax = solve_lp(sys, &lower, &upper);
        match relax.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                // Only the root can be unbounded: every other node's box
                // is contained in a box whose relaxation was finite.
                debug_assert_eq!(idx, 0, "child relaxation cannot be unbounded");
                return MilpSolution {
                    status: SolveStatus::Unbounded,
                    objective: T::neg_infinity(),
                    values: Vec::new(),
                    bound: T::neg_infinity(),
                    nodes: processed,
                };
            }
            LpStatus::Optimal => {}
        }
        let obj = relax.objective;
        if let Some((inc_obj, _)) = &incumbent {
            let cutoff = *inc_obj - T::from_f64_const(1e-9) * inc_obj.abs().max(T::one());
            if obj >= cutoff {
                continue;
            }
        }

        // Pick the fractional integer variable closest to half-way;
        // registry order breaks ties so runs stay deterministic.
        let mut branch: Option<(usize, T, T)> = None; // (var, value, score)
        for (j, &kind) in kinds.iter().enumerate().take(n) {
            if kind == VarKind::Continuous {
                continue;
            }
            let v = relax.values[j];
            let frac = v - v.floor();
            if (v - v.round()).abs() <= int_tol {
                continue;
            }
            let score = (frac - T::from_f64_const(0.5)).abs();
            if branch.map_or(true, |(_, _, s)| score < s) {
                branch = Some((j, v, score));
            }
        }

        match branch {
            None => {
                // Integral relaxation: snap and re-verify against the
                // original system. A point that fails verification both
                // snapped and raw is a solver malfunction, not a roster —
                // it must never become the incumbent.
                let mut snapped = relax.values.clone();
                for j in 0..n {
                    if kinds[j] != VarKind::Continuous {
                        snapped[j] = snapped[j].round();
                    }
                }
                let check_tol = T::from_f64_const(1e-5);
                let candidate = if sys.violations(&snapped, check_tol).is_empty() {
                    Some((sys.objective_value(&snapped), snapped))
                } else if sys.violations(&relax.values, check_tol).is_empty() {
                    Some((obj, relax.values))
                } else {
                    debug_assert!(
                        false,
                        "relaxation returned an unusable point: {:?}",
                        sys.violations(&relax.values, check_tol)
                    );
                    None
                };
                if let Some((cand_obj, cand_vals)) = candidate {
                    let better = incumbent
                        .as_ref()
                        .map_or(true, |(inc_obj, _)| cand_obj < *inc_obj);
                    if better {
                        incumbent = Some((cand_obj, cand_vals));
                    }
                }
            }
            Some((j, v, _)) => {
                let down = v.floor();
                let lo = lower[j];
                let hi = upper[j];
                for patch in [(j, lo, down), (j, down + T::one(), hi)] {
                    nodes.push(Node {
                        parent: Some(idx),
                        patch: Some(patch),
                    });
                    seq += 1;
                    heap.push((Reverse((TotalOrd(obj), seq)), nodes.len() - 1));
                }
            }
        }
    }

    match incumbent {
        Some((obj, values)) => {
            let status = final_status.unwrap_or(SolveStatus::Optimal);
            let bound = match status {
                SolveStatus::Optimal => final_bound.unwrap_or(obj).min(obj),
                _ => final_bound.unwrap_or(obj),
            };
            MilpSolution {
                status,
                objective: obj,
                values,
                bound,
                nodes: processed,
            }
        }
        None => {
            let status = final_status.unwrap_or(SolveStatus::Infeasible);
            let bound = match status {
                SolveStatus::Infeasible => T::infinity(),
                _ => final_bound.unwrap_or(T::neg_infinity()),
            };
            MilpSolution {
                status,
                objective: T::infinity(),
                values: Vec::new(),
                bound,
                nodes: processed,
            }
        }
    }
}
