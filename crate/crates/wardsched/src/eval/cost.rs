//! Pricing of rosters and multistage solutions.
//!
//! Every function here computes a cost with plain arithmetic from the
//! decision data alone, so the optimization models can be tested against
//! these evaluators: a model's objective value at a feasible point must
//! equal the evaluator's price for the extracted solution.

use super::solution::MultistageSolution;
use crate::domain::{
    soft_counts, soft_counts_in_range, CostParams, Horizon, NurseProfile, Roster, ShiftCatalog,
    Slot,
};
use crate::num::Scalar;
use crate::scenario::ScenarioTree;
use serde::{Deserialize, Serialize};

/// One solution's cost, split by objective term.
///
/// Stage-0 plans only ever use the first four terms; the last three are
/// the per-node recourse charges. [`CostBreakdown::total`] is the single
/// number the optimization models minimize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown<T> {
    /// Nurses placed on the roster.
    pub staffing: T,
    /// Under- and over-coverage slack.
    pub coverage: T,
    /// Denied requests of scheduled nurses.
    pub requests: T,
    /// Graded soft-pattern charges.
    pub violations: T,
    /// Staff called in at stage boundaries.
    pub understaffing: T,
    /// Staff released at stage boundaries.
    pub overstaffing: T,
    /// Assignment cells changed when a stage was rescheduled.
    pub adjustments: T,
}

impl<T: Scalar> CostBreakdown<T> {
    pub fn zero() -> Self {
        CostBreakdown {
            staffing: T::zero(),
            coverage: T::zero(),
            requests: T::zero(),
            violations: T::zero(),
            understaffing: T::zero(),
            overstaffing: T::zero(),
            adjustments: T::zero(),
        }
    }

    /// Sum of all terms.
    pub fn total(&self) -> T {
        self.staffing
            + self.coverage
            + self.requests
            + self.violations
            + self.understaffing
            + self.overstaffing
            + self.adjustments
    }

    /// Add `weight * other` term by term (used to fold probability-
    /// weighted recourse costs into an expected total).
    pub fn add_weighted(&mut self, weight: T, other: &CostBreakdown<T>) {
        self.staffing += weight * other.staffing;
        self.coverage += weight * other.coverage;
        self.requests += weight * other.requests;
        self.violations += weight * other.violations;
        self.understaffing += weight * other.understaffing;
        self.overstaffing += weight * other.overstaffing;
        self.adjustments += weight * other.adjustments;
    }
}

/// Price of `total` soft violations under the graded schedule. A total
/// beyond the schedule already breaks a hard rule (the cap is at most the
/// schedule length); it is charged at the top price so that evaluation of
/// rule-breaking rosters still returns a number.
pub(crate) fn violation_charge<T: Scalar>(costs: &CostParams<T>, total: u32) -> T {
    if total == 0 {
        T::zero()
    } else {
        costs.violation_price((total as usize).min(costs.violation.len()))
    }
}

fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count fits the scalar")
}

/// Number of assignment cells that differ between two rosters over a day
/// range — the quantity the per-cell adjustment price applies to.
pub(crate) fn changed_cells(a: &Roster, b: &Roster, days: std::ops::Range<usize>) -> usize {
    let mut changed = 0;
    for i in 0..a.nurses() {
        for d in days.clone() {
            let x = a.shifts_at(i, d);
            let y = b.shifts_at(i, d);
            changed += x.iter().filter(|s| !y.contains(s)).count();
            changed += y.iter().filter(|s| !x.contains(s)).count();
        }
    }
    changed
}

/// Total coverage slack (under plus over) a roster carries on a day range.
pub(crate) fn slack_in_range(roster: &Roster, days: std::ops::Range<usize>) -> u64 {
    let mut slack = 0u64;
    for slot in Slot::ALL {
        for d in days.clone() {
            slack +=
                u64::from(roster.under().get(slot, d)) + u64::from(roster.over().get(slot, d));
        }
    }
    slack
}

/// Price a stand-alone roster: staffing, coverage slack, denied requests
/// and graded violations. Requests and violations are charged only for
/// scheduled nurses; the slacks are read off the roster, so they must
/// already reconcile supply with the demand being priced against (see
/// [`crate::domain::structural_errors`]).
pub fn roster_cost<T: Scalar>(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    costs: &CostParams<T>,
    roster: &Roster,
) -> CostBreakdown<T> {
    assert_eq!(profiles.len(), roster.nurses());
    let mut out = CostBreakdown::zero();
    out.staffing = costs.staffing * count(roster.scheduled_count());
    let slack = roster.under().total() + roster.over().total();
    out.coverage = costs.coverage * count(slack as usize);
    for (i, p) in profiles.iter().enumerate() {
        if !roster.is_scheduled(i) {
            continue;
        }
        let denied = p
            .requests
            .iter()
            .filter(|&&(d, s)| !roster.shifts_at(i, d).contains(&s))
            .count();
        out.requests += costs.request * count(denied);
        out.violations += violation_charge(costs, soft_counts(catalog, roster, i, p).total());
    }
    out
}

/// Price the recourse taken at one scenario-tree node: staff flows,
/// changed assignment cells relative to the baseline, the node's coverage
/// slack, and soft patterns within the node's stage (under the per-stage
/// weekend cap).
pub fn recourse_cost<T: Scalar>(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    horizon: &Horizon,
    tree: &ScenarioTree,
    costs: &CostParams<T>,
    sol: &MultistageSolution,
    node: usize,
) -> CostBreakdown<T> {
    let plan = sol.plan(node);
    let stage = tree.stage_of(node).expect("non-root node");
    let days = horizon.stage_days(stage);
    let mut out = CostBreakdown::zero();
    out.understaffing = costs.understaffing * count(plan.staff_added as usize);
    out.overstaffing = costs.overstaffing * count(plan.staff_released as usize);
    out.adjustments =
        costs.adjustment * count(changed_cells(&sol.baseline, &plan.roster, days.clone()));
    out.coverage = costs.coverage * count(slack_in_range(&plan.roster, days.clone()) as usize);

    for (i, p) in profiles.iter().enumerate() {
        if !plan.roster.is_scheduled(i) {
            continue;
        }
        let cap = p.limits_for_stage(horizon, stage).max_weekend_days;
        let total = soft_counts_in_range(catalog, &plan.roster, i, days.clone(), cap).total();
        out.violations += violation_charge(costs, total);
    }
    out
}

/// Expected cost of a whole multistage solution: the baseline price plus
/// every node's recourse price weighted by the probability of reaching
/// that node.
pub fn multistage_cost<T: Scalar>(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    horizon: &Horizon,
    tree: &ScenarioTree,
    costs: &CostParams<T>,
    sol: &MultistageSolution,
) -> CostBreakdown<T> {
    let mut out = roster_cost(catalog, profiles, costs, &sol.baseline);
    for node in tree.non_root_nodes() {
        let rc = recourse_cost(catalog, profiles, horizon, tree, costs, sol, node);
        out.add_weighted(T::from_f64_const(tree.path_probability(node)), &rc);
    }
    out
}

/// Cost actually incurred along the path to one leaf: the baseline price
/// plus each on-path node's recourse price, unweighted. The expected
/// value of this over leaves equals [`multistage_cost`].
pub fn path_cost<T: Scalar>(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    horizon: &Horizon,
    tree: &ScenarioTree,
    costs: &CostParams<T>,
    sol: &MultistageSolution,
    leaf: usize,
) -> CostBreakdown<T> {
    let mut out = roster_cost(catalog, profiles, costs, &sol.baseline);
    for node in tree.path_to(leaf) {
        let rc = recourse_cost(catalog, profiles, horizon, tree, costs, sol, node);
        out.add_weighted(T::one(), &rc);
    }
    out
}
