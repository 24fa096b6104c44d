//! Multistage solution tuples and their consistency checks.
//!
//! A multistage answer is a full-horizon baseline roster plus, for every
//! non-root scenario node, a recourse plan: a roster for that node's
//! stage days and the staff-pool flows bought at that node. Staff levels
//! are node state — a node's level is its parent's level plus what was
//! added minus what was released — and every node must keep its level at
//! or above the number of nurses its stage roster schedules.

use crate::domain::{
    hard_violations_in_stage, structural_errors, HardViolation, NurseProfile, RuleCode,
    ShiftCatalog, SlotGrid,
};
use crate::domain::{Horizon, Roster};
use crate::scenario::ScenarioTree;

/// Recourse decisions at one scenario-tree node: the stage roster
/// (full-width, occupied only on the node's stage days) and the staff
/// flows settled at that node.
#[derive(Debug, Clone)]
pub struct NodePlan {
    pub roster: Roster,
    pub staff_added: u32,
    pub staff_released: u32,
}

/// A complete multistage answer, indexed by scenario-tree node.
#[derive(Debug, Clone)]
pub struct MultistageSolution {
    /// Stage-0 plan: the whole horizon scheduled against expected
    /// demand, with its slacks.
    pub baseline: Roster,
    /// One plan per tree node; the root entry is `None`.
    pub plans: Vec<Option<NodePlan>>,
}

impl MultistageSolution {
    /// The plan at a non-root node.
    pub fn plan(&self, node: usize) -> &NodePlan {
        self.plans[node]
            .as_ref()
            .expect("non-root nodes carry a plan")
    }

    /// Staff level at every node: the baseline head count at the root,
    /// then parent level plus the node's own flows.
    pub fn staff_levels(&self, tree: &ScenarioTree) -> Vec<i64> {
        let mut levels = vec![0i64; tree.node_count()];
        levels[ScenarioTree::ROOT] = self.baseline.scheduled_count() as i64;
        for node in tree.non_root_nodes() {
            let plan = self.plan(node);
            let parent = tree.parent(node).expect("non-root nodes have parents");
            levels[node] =
                levels[parent] + plan.staff_added as i64 - plan.staff_released as i64;
        }
        levels
    }
}

/// Demand grid for one node: the node's realization on its stage days,
/// zero elsewhere.
fn node_demand_grid(horizon: &Horizon, tree: &ScenarioTree, node: usize) -> SlotGrid<u32> {
    let stage = tree.stage_of(node).expect("non-root node");
    let days = horizon.stage_days(stage);
    let demand = tree.node_demand(node);
    SlotGrid::from_fn(horizon.days(), |slot, d| {
        if days.contains(&d) {
            demand[slot.index()]
        } else {
            0
        }
    })
}

/// Minimal-cost staff flows covering the required level at every node:
/// since idle staff is free and both flows are priced, the optimum never
/// releases and only adds what the running maximum demands. Returns
/// `(added, released)` per node; the root entry is `(0, 0)`.
pub fn settle_staff_flows(
    tree: &ScenarioTree,
    baseline_staff: u32,
    required: &[u32],
) -> Vec<(u32, u32)> {
    assert_eq!(required.len(), tree.node_count());
    let mut levels = vec![0u32; tree.node_count()];
    let mut flows = vec![(0u32, 0u32); tree.node_count()];
    levels[ScenarioTree::ROOT] = baseline_staff;
    for node in tree.non_root_nodes() {
        let parent = tree.parent(node).expect("non-root nodes have parents");
        let level = levels[parent].max(required[node]);
        flows[node] = (level - levels[parent], 0);
        levels[node] = level;
    }
    flows
}

/// Build a [`MultistageSolution`] from bare assignments: staffing flags
/// are set from row occupancy, slacks are recomputed minimally against
/// each node's realized demand, and staff flows are settled at minimal
/// cost. This is the completion the samplers use; an optimizer that
/// decides these quantities itself records them directly instead.
pub fn complete_canonically(
    catalog: &ShiftCatalog,
    horizon: &Horizon,
    tree: &ScenarioTree,
    expected_demand: &SlotGrid<u32>,
    mut baseline: Roster,
    node_assignments: Vec<Option<Roster>>,
) -> MultistageSolution {
    assert_eq!(node_assignments.len(), tree.node_count());
    let nurses = baseline.nurses();
    for i in 0..nurses {
        let works_somewhere = (0..baseline.days()).any(|d| baseline.works(i, d));
        baseline.set_scheduled(i, works_somewhere);
    }
    baseline.recompute_slacks(catalog, expected_demand);

    let mut rosters: Vec<Option<Roster>> = node_assignments;
    let mut required = vec![0u32; tree.node_count()];
    for node in tree.non_root_nodes() {
        let roster = rosters[node]
            .as_mut()
            .expect("every non-root node needs assignments");
        for i in 0..roster.nurses() {
            let stage = tree.stage_of(node).expect("non-root");
            let days = horizon.stage_days(stage);
            let works = days.clone().any(|d| roster.works(i, d));
            roster.set_scheduled(i, works);
        }
        roster.recompute_slacks(catalog, &node_demand_grid(horizon, tree, node));
        required[node] = roster.scheduled_count() as u32;
    }

    let flows = settle_staff_flows(tree, baseline.scheduled_count() as u32, &required);
    let plans = (0..tree.node_count())
        .map(|node| {
            if node == ScenarioTree::ROOT {
                None
            } else {
                Some(NodePlan {
                    roster: rosters[node].take().expect("checked above"),
                    staff_added: flows[node].0,
                    staff_released: flows[node].1,
                })
            }
        })
        .collect();
    MultistageSolution { baseline, plans }
}

/// Mechanical consistency checks for a multistage solution: shapes,
/// slack identities against the right demands, stage confinement of
/// every node roster, and the staff-level recursion.
pub fn multistage_structural_errors(
    catalog: &ShiftCatalog,
    horizon: &Horizon,
    tree: &ScenarioTree,
    expected_demand: &SlotGrid<u32>,
    sol: &MultistageSolution,
) -> Vec<String> {
    let mut errs = Vec::new();
    if sol.plans.len() != tree.node_count() {
        errs.push(format!(
            "{} plans for a tree of {} nodes",
            sol.plans.len(),
            tree.node_count()
        ));
        return errs;
    }
    if sol.plans[ScenarioTree::ROOT].is_some() {
        errs.push("the root node must not carry a plan".into());
    }
    for e in structural_errors(catalog, expected_demand, &sol.baseline) {
        errs.push(format!("baseline: {e}"));
    }

    for node in tree.non_root_nodes() {
        let Some(plan) = sol.plans[node].as_ref() else {
            errs.push(format!("node {node} has no plan"));
            continue;
        };
        let stage = tree.stage_of(node).expect("non-root");
        let days = horizon.stage_days(stage);
        for (i, d, _) in plan.roster.assignments() {
            if !days.contains(&d) {
                errs.push(format!(
                    "node {node}: nurse {i} assigned on day {d}, outside stage {stage}"
                ));
            }
        }
        let demand = node_demand_grid(horizon, tree, node);
        for e in structural_errors(catalog, &demand, &plan.roster) {
            errs.push(format!("node {node}: {e}"));
        }
    }

    if errs.is_empty() {
        let levels = sol.staff_levels(tree);
        for node in tree.non_root_nodes() {
            let plan = sol.plan(node);
            let parent = tree.parent(node).expect("non-root nodes have parents");
            let parent_level = levels[parent];
            if (plan.staff_released as i64) > parent_level {
                errs.push(format!(
                    "node {node}: releases {} from a pool of {parent_level}",
                    plan.staff_released
                ));
            }
            if levels[node] < plan.roster.scheduled_count() as i64 {
                errs.push(format!(
                    "node {node}: schedules {} nurses on a staff level of {}",
                    plan.roster.scheduled_count(),
                    levels[node]
                ));
            }
        }
    }
    errs
}

/// Working-rule violations across a whole multistage solution: the
/// baseline is checked over the flat horizon, each node over its own
/// stage, and slot diversity over the union of everything a nurse could
/// be asked to work anywhere in the tree.
pub fn multistage_rule_violations(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    horizon: &Horizon,
    tree: &ScenarioTree,
    sol: &MultistageSolution,
) -> Vec<HardViolation> {
    let flat = horizon.flatten();
    let mut out: Vec<HardViolation> =
        hard_violations_in_stage(catalog, profiles, &flat, &sol.baseline, 0)
            .into_iter()
            .map(|mut v| {
                v.detail = format!("baseline: {}", v.detail);
                v
            })
            .collect();

    for node in tree.non_root_nodes() {
        let stage = tree.stage_of(node).expect("non-root");
        for mut v in
            hard_violations_in_stage(catalog, profiles, horizon, &sol.plan(node).roster, stage)
        {
            v.detail = format!("node {node}: {}", v.detail);
            out.push(v);
        }
    }

    // Slot diversity binds across the whole tree: the same nurse serves
    // the baseline and every recourse roster, so the slots they span
    // together must fit the policy.
    for (i, p) in profiles.iter().enumerate() {
        let mut used = sol.baseline.slots_used(catalog, i);
        for node in tree.non_root_nodes() {
            let stage = tree.stage_of(node).expect("non-root");
            used.extend(sol.plan(node).roster.slots_used_in(
                catalog,
                i,
                horizon.stage_days(stage),
            ));
        }
        if used.len() > p.policy.slot_allowance() {
            out.push(HardViolation {
                code: RuleCode::SlotDiversity,
                nurse: i,
                day: None,
                detail: format!(
                    "tree-wide assignments span {} slots but the {} policy allows {}",
                    used.len(),
                    p.policy,
                    p.policy.slot_allowance()
                ),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Slot, WorkPolicy};
    use crate::scenario::StageRealization;

    fn profile(label: &str, policy: WorkPolicy, catalog: &ShiftCatalog) -> NurseProfile {
        NurseProfile {
            label: label.to_string(),
            policy,
            min_minutes: 0,
            max_minutes: 40 * 60 * 4,
            weekly_rest_days: 1,
            max_consecutive_days: 5,
            max_weekend_days: 8,
            violation_cap: 4,
            preferred: (0..catalog.len()).collect(),
            requests: Default::default(),
            stage_limits: None,
        }
    }

    fn two_stage_tree() -> ScenarioTree {
        ScenarioTree::build(vec![
            vec![
                StageRealization::new("busy", 0.6, [2, 1, 1]),
                StageRealization::new("quiet", 0.4, [1, 1, 0]),
            ],
            vec![
                StageRealization::new("busy", 0.5, [2, 2, 1]),
                StageRealization::new("quiet", 0.5, [1, 0, 0]),
            ],
        ])
        .expect("valid tree")
    }

    #[test]
    fn staff_flows_follow_the_running_maximum_and_never_release() {
        let tree = two_stage_tree();
        // Nodes: 0 root, 1..=2 stage 0, 3..=6 stage 1.
        let required = vec![0, 3, 1, 4, 2, 3, 1];
        let flows = settle_staff_flows(&tree, 2, &required);
        assert_eq!(flows[0], (0, 0));
        assert_eq!(flows[1], (1, 0)); // 2 -> 3
        assert_eq!(flows[2], (0, 0)); // 2 covers 1
        assert_eq!(flows[3], (1, 0)); // 3 -> 4
        assert_eq!(flows[4], (0, 0)); // 3 covers 2
        assert_eq!(flows[5], (1, 0)); // 2 -> 3
        assert_eq!(flows[6], (0, 0));
        assert!(flows.iter().all(|&(_, released)| released == 0));
    }

    #[test]
    fn canonical_completion_sets_flags_slacks_and_flows() {
        let catalog = ShiftCatalog::minimal();
        let horizon = Horizon::with_stage_lengths(4, &[2, 2]).expect("horizon");
        let tree = two_stage_tree();
        let expected = SlotGrid::replicate(4, [1, 1, 0]);

        let mut baseline = Roster::empty(2, 4);
        baseline.assign(0, 0, 0); // nurse 0 works; nurse 1 idle
        baseline.assign(0, 2, 1);
        let mut nodes: Vec<Option<Roster>> = vec![None; tree.node_count()];
        for node in tree.non_root_nodes() {
            let stage = tree.stage_of(node).unwrap();
            let mut r = Roster::empty(2, 4);
            let day = horizon.stage_days(stage).start;
            r.assign(0, day, 0);
            if node == 3 {
                r.assign(1, day, 1); // the busy-busy node calls in nurse 1
            }
            nodes[node] = Some(r);
        }

        let sol = complete_canonically(&catalog, &horizon, &tree, &expected, baseline, nodes);
        assert!(sol.baseline.is_scheduled(0));
        assert!(!sol.baseline.is_scheduled(1));
        // Expected demand is 1/1/0 per day; nurse 0 covers AM on day 0
        // only, so day 0 has one uncovered PM and day 1 both.
        assert_eq!(sol.baseline.under().get(Slot::Am, 1), 1);
        assert_eq!(sol.baseline.under().get(Slot::Pm, 0), 1);
        assert_eq!(sol.baseline.over().get(Slot::Am, 0), 0);

        // Only node 3 needs a second nurse: one hire there, no releases.
        assert_eq!(sol.plan(3).staff_added, 1);
        assert!(tree
            .non_root_nodes()
            .all(|n| sol.plan(n).staff_released == 0));
        assert_eq!(sol.plan(1).staff_added, 0);

        // And the completed solution is structurally sound.
        let errs = multistage_structural_errors(&catalog, &horizon, &tree, &expected, &sol);
        assert!(errs.is_empty(), "unexpected: {errs:?}");
    }

    #[test]
    fn structural_checks_catch_confinement_and_pool_errors() {
        let catalog = ShiftCatalog::minimal();
        let horizon = Horizon::with_stage_lengths(4, &[2, 2]).expect("horizon");
        let tree = two_stage_tree();
        let expected = SlotGrid::replicate(4, [0, 0, 0]);

        let baseline = Roster::empty(1, 4);
        let mut nodes: Vec<Option<Roster>> = vec![None; tree.node_count()];
        for node in tree.non_root_nodes() {
            nodes[node] = Some(Roster::empty(1, 4));
        }
        // Node 1 (stage 0, days 0..2) strays onto day 3.
        nodes[1].as_mut().unwrap().assign(0, 3, 0);
        let mut sol =
            complete_canonically(&catalog, &horizon, &tree, &expected, baseline, nodes);
        let errs = multistage_structural_errors(&catalog, &horizon, &tree, &expected, &sol);
        assert!(
            errs.iter().any(|e| e.contains("outside stage")),
            "got: {errs:?}"
        );

        // Releasing more than the pool holds is flagged once shapes are
        // clean again.
        sol.plans[1].as_mut().unwrap().roster = {
            let mut r = Roster::empty(1, 4);
            let demand = SlotGrid::from_fn(4, |slot, d| {
                if d < 2 {
                    tree.node_demand(1)[slot.index()]
                } else {
                    0
                }
            });
            r.recompute_slacks(&catalog, &demand);
            r
        };
        sol.plans[1].as_mut().unwrap().staff_released = 5;
        let errs = multistage_structural_errors(&catalog, &horizon, &tree, &expected, &sol);
        assert!(errs.iter().any(|e| e.contains("releases")), "got: {errs:?}");
    }

    #[test]
    fn slot_diversity_binds_across_baseline_and_recourse() {
        let catalog = ShiftCatalog::minimal();
        let horizon = Horizon::with_stage_lengths(4, &[2, 2]).expect("horizon");
        let tree = two_stage_tree();
        let expected = SlotGrid::replicate(4, [1, 0, 0]);
        let profiles = vec![profile("n0", WorkPolicy::Fixed, &catalog)];

        let mut baseline = Roster::empty(1, 4);
        baseline.assign(0, 0, 0); // AM in the baseline
        let mut nodes: Vec<Option<Roster>> = vec![None; tree.node_count()];
        for node in tree.non_root_nodes() {
            let stage = tree.stage_of(node).unwrap();
            let mut r = Roster::empty(1, 4);
            if node == 1 {
                r.assign(0, horizon.stage_days(stage).start, 1); // PM here
            }
            nodes[node] = Some(r);
        }
        let sol = complete_canonically(&catalog, &horizon, &tree, &expected, baseline, nodes);
        let violations = multistage_rule_violations(&catalog, &profiles, &horizon, &tree, &sol);
        // Each roster alone spans one slot; together they span two,
        // which a single-slot policy cannot serve.
        assert!(
            violations
                .iter()
                .any(|v| v.code == RuleCode::SlotDiversity && v.detail.contains("tree-wide")),
            "got: {violations:?}"
        );
    }
}
