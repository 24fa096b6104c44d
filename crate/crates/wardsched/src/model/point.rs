//! Canonical constraint-system points for concrete plans.
//!
//! Given a roster (or a whole multistage plan), these functions place
//! every column at its semantic truth value: assignments and scheduling
//! flags as given, coverage slacks at the minimal residues, pattern
//! columns at their indicator truth, violation buckets at the actual
//! graded total, grants at "scheduled and assigned", staff levels along
//! the settled chain. The point is feasible exactly when the plan
//! passes the rule checkers, and the system objective at the point
//! equals the evaluator's cost — the bridge both the model tests and
//! the evaluation protocol lean on.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::domain::{soft_counts_in_range, EffectiveLimits, NurseProfile, Roster, Slot, SlotGrid};
use crate::eval::MultistageSolution;
use crate::instance::Instance;
use crate::num::Scalar;
use crate::scenario::ScenarioTree;

use super::vars::{Scope, VarKey, VarTable};
use super::Model;

/// Fill one roster block's columns with the truth values of `roster`
/// restricted to `days`. The roster's slacks must already be
/// recomputed against the block's demand.
fn fill_block<T: Scalar>(
    values: &mut [T],
    table: &VarTable,
    inst: &Instance,
    scope: Scope,
    roster: &Roster,
    days: Range<usize>,
    limits_of: impl Fn(&NurseProfile) -> EffectiveLimits,
) {
    for (i, p) in inst.nurses.iter().enumerate() {
        let limits = limits_of(p);
        if roster.is_scheduled(i) {
            values[table.get(scope, VarKey::Scheduled { nurse: i }).0] = T::one();
        }
        for d in days.clone() {
            for &s in roster.shifts_at(i, d) {
                let key = VarKey::Assign {
                    nurse: i,
                    day: d,
                    shift: s,
                };
                values[table.get(scope, key).0] = T::one();
            }
        }
        let counts =
            soft_counts_in_range(&inst.catalog, roster, i, days.clone(), limits.max_weekend_days);
        values[table.get(scope, VarKey::WeekendExcess { nurse: i }).0] =
            T::from_f64_const(f64::from(counts.weekend_excess));
        for &t in &counts.rest_then_morning {
            values[table.get(scope, VarKey::RestThenMorning { nurse: i, day: t }).0] = T::one();
        }
        for &d in &counts.weekend_double_night {
            values[table.get(scope, VarKey::DoubleNight { nurse: i, day: d }).0] = T::one();
        }
        for &t in &counts.isolated_work {
            values[table.get(scope, VarKey::IsolatedWork { nurse: i, day: t }).0] = T::one();
        }
        let total = counts.total();
        if total >= 1 && limits.violation_cap >= 1 {
            // A total beyond the cap has no honest bucket; the nearest
            // one keeps the point well-defined and the bucket row then
            // reports the breach.
            let level = total.min(limits.violation_cap);
            values[table.get(scope, VarKey::ViolationLevel { nurse: i, level }).0] = T::one();
        }
    }
    for slot in Slot::ALL {
        for d in days.clone() {
            values[table.get(scope, VarKey::Under { slot, day: d }).0] =
                T::from_f64_const(f64::from(roster.under().get(slot, d)));
            values[table.get(scope, VarKey::Over { slot, day: d }).0] =
                T::from_f64_const(f64::from(roster.over().get(slot, d)));
        }
    }
}

/// Fill the stage-0 extras: shared slot-usage flags from the given
/// per-nurse slot sets and request grants from the baseline roster.
fn fill_base_extras<T: Scalar>(
    values: &mut [T],
    table: &VarTable,
    inst: &Instance,
    baseline: &Roster,
    used: &[BTreeSet<Slot>],
) {
    for (i, p) in inst.nurses.iter().enumerate() {
        for &slot in &used[i] {
            values[table.get(Scope::Base, VarKey::SlotUsed { nurse: i, slot }).0] = T::one();
        }
        for &(day, shift) in &p.requests {
            if baseline.is_scheduled(i) && baseline.shifts_at(i, day).contains(&shift) {
                let key = VarKey::RequestGranted {
                    nurse: i,
                    day,
                    shift,
                };
                values[table.get(Scope::Base, key).0] = T::one();
            }
        }
    }
}

/// Demand grid a node's roster is balanced against: the node's realized
/// demand on its stage days, zero elsewhere.
pub(super) fn node_grid(inst: &Instance, tree: &ScenarioTree, node: usize) -> SlotGrid<u32> {
    let days = inst.horizon.stage_days(tree.stage_of(node).expect("non-root node"));
    let demand = tree.node_demand(node);
    SlotGrid::from_fn(inst.horizon.days(), |slot, d| {
        if days.contains(&d) {
            demand[slot.index()]
        } else {
            0
        }
    })
}

/// The canonical point of a deterministic system at a concrete roster.
///
/// The roster may only assign shifts within each nurse's preferred set —
/// other cells have no column. Slacks are canonicalized against the
/// instance demand, so the input's slack state is irrelevant. The point
/// is feasible iff the roster passes the hard-rule checker, and the
/// system objective at the point equals the roster's evaluated cost.
pub fn roster_point<T: Scalar>(inst: &Instance, model: &Model<T>, roster: &Roster) -> Vec<T> {
    let mut values = vec![T::zero(); model.system.num_vars()];
    let mut r = roster.clone();
    r.recompute_slacks(&inst.catalog, &inst.demand);
    let flat = inst.horizon.flatten();
    fill_block(
        &mut values,
        &model.vars,
        inst,
        Scope::Base,
        &r,
        0..inst.horizon.days(),
        |p| p.limits_for_stage(&flat, 0),
    );
    let used: Vec<BTreeSet<Slot>> = (0..inst.nurses.len())
        .map(|i| r.slots_used(&inst.catalog, i))
        .collect();
    fill_base_extras(&mut values, &model.vars, inst, &r, &used);
    values
}

/// The slots each nurse's plan touches anywhere — baseline plus every
/// node's stage work. This is the canonical value of the shared
/// slot-usage flags at a concrete plan.
pub fn plan_slot_union(
    inst: &Instance,
    tree: &ScenarioTree,
    sol: &MultistageSolution,
) -> Vec<BTreeSet<Slot>> {
    let mut used: Vec<BTreeSet<Slot>> = (0..inst.nurses.len())
        .map(|i| sol.baseline.slots_used(&inst.catalog, i))
        .collect();
    for node in tree.non_root_nodes() {
        let days = inst
            .horizon
            .stage_days(tree.stage_of(node).expect("non-root"));
        for (i, set) in used.iter_mut().enumerate() {
            set.extend(
                sol.plan(node)
                    .roster
                    .slots_used_in(&inst.catalog, i, days.clone()),
            );
        }
    }
    used
}

/// The canonical point of a staged system at a complete multistage
/// plan: stage-0 truth plus, per scenario node, the node's re-planning
/// truth, the staff level chain with its boundary flows, and the cell
/// deltas against the stage-0 plan.
///
/// Feasible iff the plan passes the structural and rule checkers;
/// the system objective at the point equals the plan's evaluated
/// expected cost.
pub fn staged_point<T: Scalar>(
    inst: &Instance,
    tree: &ScenarioTree,
    model: &Model<T>,
    sol: &MultistageSolution,
) -> Vec<T> {
    let mut values = vec![T::zero(); model.system.num_vars()];
    let mut baseline = sol.baseline.clone();
    baseline.recompute_slacks(&inst.catalog, &inst.demand);
    let flat = inst.horizon.flatten();
    fill_block(
        &mut values,
        &model.vars,
        inst,
        Scope::Base,
        &baseline,
        0..inst.horizon.days(),
        |p| p.limits_for_stage(&flat, 0),
    );
    fill_base_extras(
        &mut values,
        &model.vars,
        inst,
        &baseline,
        &plan_slot_union(inst, tree, sol),
    );

    let levels = sol.staff_levels(tree);
    for w in tree.non_root_nodes() {
        let h = tree.stage_of(w).expect("non-root");
        let days = inst.horizon.stage_days(h);
        let plan = sol.plan(w);
        let mut r = plan.roster.clone();
        r.recompute_slacks(&inst.catalog, &node_grid(inst, tree, w));
        fill_block(
            &mut values,
            &model.vars,
            inst,
            Scope::Node(w),
            &r,
            days.clone(),
            |p| p.limits_for_stage(&inst.horizon, h),
        );
        values[model.vars.get(Scope::Node(w), VarKey::StaffLevel).0] =
            T::from_f64_const(levels[w] as f64);
        values[model.vars.get(Scope::Node(w), VarKey::StaffAdded).0] =
            T::from_f64_const(f64::from(plan.staff_added));
        values[model.vars.get(Scope::Node(w), VarKey::StaffReleased).0] =
            T::from_f64_const(f64::from(plan.staff_released));
        for (i, p) in inst.nurses.iter().enumerate() {
            for d in days.clone() {
                for &s in &p.preferred {
                    let in_base = baseline.shifts_at(i, d).contains(&s);
                    let in_node = r.shifts_at(i, d).contains(&s);
                    if in_base != in_node {
                        let key = VarKey::AssignDelta {
                            nurse: i,
                            day: d,
                            shift: s,
                        };
                        values[model.vars.get(Scope::Node(w), key).0] = T::one();
                    }
                }
            }
        }
    }
    values
}
