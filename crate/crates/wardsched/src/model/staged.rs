//! The staged problems: a baseline roster plus per-node re-planning.
//!
//! [`build_staged`] lays the stage-0 block down once and adds one
//! re-planning block per scenario-tree node: a staff pool adjusted at
//! the stage boundary (recursing on the parent's pool), a stage roster
//! under the per-stage working limits, priced cell deltas against the
//! baseline, and a coverage balance against the node's realized demand,
//! all weighted by the probability of reaching the node. The blocks
//! only touch each other through the baseline, the shared slot-usage
//! flags, and the parent pools, which keeps the formulation equivalent
//! to solving each stage's re-planning on its own once those are fixed.
//!
//! [`build_shared_staffing`] is the restriction that commits staffing
//! per stage before any demand is revealed: one pool chain indexed by
//! stage, charged at full price, with every complete scenario
//! re-planning its whole path against it. Its optimum can never beat
//! [`build_staged`]'s, and the gap between the two is the value of
//! deciding staffing after seeing demand.

use crate::domain::Roster;
use crate::eval::{MultistageSolution, NodePlan};
use crate::instance::Instance;
use crate::linear::{ConstraintSystem, Relation, VarId, VarKind};
use crate::num::Scalar;
use crate::scenario::ScenarioTree;

use super::deterministic::extract_roster;
use super::emit::{add_roster_columns, emit_base_block, emit_coverage, emit_nurse_rules, NurseBlock};
use super::point::node_grid;
use super::vars::{Scope, VarKey, VarTable};
use super::Model;

/// Staffing flows of one planning stage: the pool level after the
/// boundary adjustment and the hires and releases that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageStaffing {
    pub level: i64,
    pub added: u32,
    pub released: u32,
}

/// Register one block's staff pool columns and emit the flow rows: the
/// pool recurses on the parent pool (the scheduled baseline head count
/// when the parent is the root or the stage chain starts), and releases
/// never exceed that parent pool.
fn emit_staff_flows<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
    scope: Scope,
    parent_level: Option<VarId>,
    flow_weight: T,
) -> VarId {
    let head = T::from_f64_const(inst.nurses.len() as f64);
    let pre = scope.prefix();
    let level = table.add(sys, scope, VarKey::StaffLevel, VarKind::Integer, T::zero(), head);
    let added = table.add(sys, scope, VarKey::StaffAdded, VarKind::Integer, T::zero(), head);
    let released = table.add(
        sys,
        scope,
        VarKey::StaffReleased,
        VarKind::Integer,
        T::zero(),
        head,
    );
    sys.add_objective(added, flow_weight * T::from_f64_const(inst.costs.understaffing));
    sys.add_objective(released, flow_weight * T::from_f64_const(inst.costs.overstaffing));

    let mut balance: Vec<(VarId, T)> =
        vec![(level, T::one()), (added, -T::one()), (released, T::one())];
    let mut guard: Vec<(VarId, T)> = vec![(released, T::one())];
    match parent_level {
        Some(parent) => {
            balance.push((parent, -T::one()));
            guard.push((parent, -T::one()));
        }
        None => {
            for i in 0..inst.nurses.len() {
                let beta = table.get(Scope::Base, VarKey::Scheduled { nurse: i });
                balance.push((beta, -T::one()));
                guard.push((beta, -T::one()));
            }
        }
    }
    sys.add_con(format!("{pre}balance"), balance, Relation::Eq, T::zero());
    sys.add_con(format!("{pre}releasecap"), guard, Relation::Le, T::zero());
    level
}

/// Emit one re-planning block: roster columns for every nurse capped by
/// the pool, the per-stage working rules, priced cell deltas against
/// the stage-0 plan, and the coverage balance against the realized
/// demand. `weight` multiplies every priced column of the block.
#[allow(clippy::too_many_arguments)]
fn emit_replanning_block<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
    scope: Scope,
    stage: usize,
    pool: VarId,
    demand: [u32; 3],
    weight: T,
) {
    let days = inst.horizon.stage_days(stage);
    let pre = scope.prefix();
    let adjust = weight * T::from_f64_const(inst.costs.adjustment);

    let mut capacity: Vec<(VarId, T)> = Vec::new();
    for i in 0..inst.nurses.len() {
        let gate = add_roster_columns(sys, table, inst, scope, i, days.clone());
        capacity.push((gate, T::one()));
    }
    capacity.push((pool, -T::one()));
    sys.add_con(format!("{pre}capacity"), capacity, Relation::Le, T::zero());

    for (i, p) in inst.nurses.iter().enumerate() {
        let blk = NurseBlock {
            scope,
            nurse: i,
            days: days.clone(),
            limits: p.limits_for_stage(&inst.horizon, stage),
            gate: table.get(scope, VarKey::Scheduled { nurse: i }),
            weight,
        };
        emit_nurse_rules(sys, table, inst, &blk);

        for d in days.clone() {
            for &s in &p.preferred {
                let key = VarKey::AssignDelta {
                    nurse: i,
                    day: d,
                    shift: s,
                };
                let delta = table.add(sys, scope, key, VarKind::Continuous, T::zero(), T::one());
                sys.add_objective(delta, adjust);
                let assign = VarKey::Assign {
                    nurse: i,
                    day: d,
                    shift: s,
                };
                let base = table.get(Scope::Base, assign);
                let here = table.get(scope, assign);
                sys.add_con(
                    format!("{pre}drop_n{i}_d{d}_s{s}"),
                    [(base, T::one()), (here, -T::one()), (delta, -T::one())],
                    Relation::Le,
                    T::zero(),
                );
                sys.add_con(
                    format!("{pre}pick_n{i}_d{d}_s{s}"),
                    [(here, T::one()), (base, -T::one()), (delta, -T::one())],
                    Relation::Le,
                    T::zero(),
                );
            }
        }
    }

    emit_coverage(
        sys,
        table,
        inst,
        scope,
        days,
        |slot, _| demand[slot.index()],
        weight,
    );
}

/// Build the staged system over a scenario tree: the stage-0 block plus
/// one probability-weighted re-planning block per tree node, with staff
/// pools recursing parent to child. Passing `initial` pins the stage-0
/// roster, turning the optimum into the best achievable expected cost
/// of that fixed baseline.
pub fn build_staged<T: Scalar>(
    inst: &Instance,
    tree: &ScenarioTree,
    initial: Option<&Roster>,
) -> Model<T> {
    assert_eq!(
        tree.stage_count(),
        inst.horizon.stages(),
        "the tree must realize every horizon stage"
    );
    let mut system = ConstraintSystem::new();
    let mut vars = VarTable::new();
    emit_base_block(&mut system, &mut vars, inst);

    for w in tree.non_root_nodes() {
        let h = tree.stage_of(w).expect("non-root");
        let p_w = T::from_f64_const(tree.path_probability(w));
        let scope = Scope::Node(w);
        let parent = tree.parent(w).expect("non-root nodes have parents");
        let parent_level = (parent != ScenarioTree::ROOT)
            .then(|| vars.get(Scope::Node(parent), VarKey::StaffLevel));
        let pool = emit_staff_flows(&mut system, &mut vars, inst, scope, parent_level, p_w);
        emit_replanning_block(
            &mut system,
            &mut vars,
            inst,
            scope,
            h,
            pool,
            tree.node_demand(w),
            p_w,
        );
    }

    let mut model = Model { system, vars };
    if let Some(roster) = initial {
        fix_baseline(&mut model, inst, roster);
    }
    model
}

/// Build the stage-committed variant: one staff pool chain indexed by
/// stage and charged at full price before any demand is revealed, with
/// every complete scenario re-planning its whole path against it. A
/// restriction of [`build_staged`], so its optimum is never smaller.
pub fn build_shared_staffing<T: Scalar>(inst: &Instance, tree: &ScenarioTree) -> Model<T> {
    assert_eq!(
        tree.stage_count(),
        inst.horizon.stages(),
        "the tree must realize every horizon stage"
    );
    let mut system = ConstraintSystem::new();
    let mut vars = VarTable::new();
    emit_base_block(&mut system, &mut vars, inst);

    let mut chain: Option<VarId> = None;
    for h in 0..tree.stage_count() {
        let pool = emit_staff_flows(&mut system, &mut vars, inst, Scope::Stage(h), chain, T::one());
        chain = Some(pool);
    }

    for leaf in tree.leaves() {
        let p_leaf = T::from_f64_const(tree.path_probability(leaf));
        for node in tree.path_to(leaf) {
            let h = tree.stage_of(node).expect("path nodes are not the root");
            let pool = vars.get(Scope::Stage(h), VarKey::StaffLevel);
            emit_replanning_block(
                &mut system,
                &mut vars,
                inst,
                Scope::Leaf { leaf, stage: h },
                h,
                pool,
                tree.node_demand(node),
                p_leaf,
            );
        }
    }
    Model { system, vars }
}

/// Read a solved staged point back into a multistage solution. The
/// baseline keeps its solved scheduling flags; each node roster takes
/// the canonical flags (on the node's roster exactly when working in
/// the stage — an idle pool slot carries no cost either way), and the
/// staff flows are read off the flow columns unchanged, so the
/// solution prices exactly at the system objective.
pub fn extract_staged<T: Scalar>(
    inst: &Instance,
    tree: &ScenarioTree,
    model: &Model<T>,
    values: &[T],
) -> MultistageSolution {
    let baseline = extract_roster(inst, model, values);
    let mut plans: Vec<Option<NodePlan>> = (0..tree.node_count()).map(|_| None).collect();
    for w in tree.non_root_nodes() {
        let h = tree.stage_of(w).expect("non-root");
        let days = inst.horizon.stage_days(h);
        let scope = Scope::Node(w);
        let mut roster = Roster::empty(inst.nurses.len(), inst.horizon.days());
        for (i, p) in inst.nurses.iter().enumerate() {
            for d in days.clone() {
                for &s in &p.preferred {
                    let key = VarKey::Assign {
                        nurse: i,
                        day: d,
                        shift: s,
                    };
                    if values[model.vars.get(scope, key).0].to_f64() > 0.5 {
                        roster.assign(i, d, s);
                    }
                }
            }
            let works = days.clone().any(|d| roster.works(i, d));
            roster.set_scheduled(i, works);
        }
        roster.recompute_slacks(&inst.catalog, &node_grid(inst, tree, w));
        let flow = |key| values[model.vars.get(scope, key).0].to_f64().round() as u32;
        plans[w] = Some(NodePlan {
            roster,
            staff_added: flow(VarKey::StaffAdded),
            staff_released: flow(VarKey::StaffReleased),
        });
    }
    MultistageSolution { baseline, plans }
}

/// Pin the stage-0 roster of a staged (or deterministic) system:
/// scheduling flags and every assignment cell exactly as in `roster`.
/// The slot-usage flags stay free — the linking rows force the slots
/// the roster works, and any spare diversity budget remains available
/// to the re-planning blocks.
pub fn fix_baseline<T: Scalar>(model: &mut Model<T>, inst: &Instance, roster: &Roster) {
    assert_eq!(roster.nurses(), inst.nurses.len(), "roster nurse count mismatch");
    assert_eq!(roster.days(), inst.horizon.days(), "roster day count mismatch");
    for (i, p) in inst.nurses.iter().enumerate() {
        let flag = if roster.is_scheduled(i) { T::one() } else { T::zero() };
        let beta = model.vars.get(Scope::Base, VarKey::Scheduled { nurse: i });
        model.system.set_bounds(beta, flag, flag);
        for d in 0..roster.days() {
            let cell = roster.shifts_at(i, d);
            for &s in cell {
                assert!(
                    p.preferred.contains(&s),
                    "nurse {i} works shift {s} on day {d}, outside the preferred set"
                );
            }
            for &s in &p.preferred {
                let v = if cell.contains(&s) { T::one() } else { T::zero() };
                let x = model.vars.get(
                    Scope::Base,
                    VarKey::Assign {
                        nurse: i,
                        day: d,
                        shift: s,
                    },
                );
                model.system.set_bounds(x, v, v);
            }
        }
    }
}

/// Per-stage staffing flows of a single-path plan (one node per stage):
/// the shape of the aggregate decisions a certain-demand solve commits
/// to, and what gets pinned when evaluating that plan under the real
/// uncertainty.
pub fn stage_staffing(tree: &ScenarioTree, sol: &MultistageSolution) -> Vec<StageStaffing> {
    let levels = sol.staff_levels(tree);
    (0..tree.stage_count())
        .map(|h| {
            let nodes = tree.nodes_for_stage(h);
            assert_eq!(nodes.len(), 1, "stage {h} realizes more than one scenario");
            let w = nodes.start;
            let plan = sol.plan(w);
            StageStaffing {
                level: levels[w],
                added: plan.staff_added,
                released: plan.staff_released,
            }
        })
        .collect()
}

/// Pin every node's staffing columns of a [`build_staged`] system to
/// the given per-stage flows: the same pool adjustments in every
/// scenario, decided before demand is seen. The flows must balance
/// against the pinned baseline head count, so pin the baseline first.
pub fn fix_staffing_flows<T: Scalar>(
    model: &mut Model<T>,
    tree: &ScenarioTree,
    flows: &[StageStaffing],
) {
    assert_eq!(flows.len(), tree.stage_count(), "one flow triple per stage");
    for w in tree.non_root_nodes() {
        let h = tree.stage_of(w).expect("non-root");
        let f = flows[h];
        assert!(f.level >= 0, "cannot pin a negative staff level");
        for (key, value) in [
            (VarKey::StaffLevel, f.level as f64),
            (VarKey::StaffAdded, f64::from(f.added)),
            (VarKey::StaffReleased, f64::from(f.released)),
        ] {
            let var = model.vars.get(Scope::Node(w), key);
            let v = T::from_f64_const(value);
            model.system.set_bounds(var, v, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::point::staged_point;
    use super::*;
    use crate::domain::{
        CostParams, Horizon, NurseProfile, ShiftCatalog, Slot, SlotGrid, WorkPolicy,
    };
    use crate::eval::{
        complete_canonically, multistage_cost, multistage_rule_violations,
        multistage_structural_errors,
    };
    use crate::exhaustive::best_multistage;
    use crate::scenario::StageRealization;
    use crate::solve::{solve_milp, MilpSolution, SolveLimits, SolveStatus};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn profile(label: &str, policy: WorkPolicy, catalog: &ShiftCatalog) -> NurseProfile {
        NurseProfile {
            label: label.to_string(),
            policy,
            min_minutes: 0,
            max_minutes: 100_000,
            weekly_rest_days: 1,
            max_consecutive_days: 5,
            max_weekend_days: 8,
            violation_cap: 4,
            preferred: (0..catalog.len()).collect(),
            requests: BTreeSet::new(),
            stage_limits: None,
        }
    }

    fn recourse_costs() -> CostParams<f64> {
        let mut costs = CostParams::baseline();
        costs.staffing = 5.0;
        costs.understaffing = 3.0;
        costs.overstaffing = 2.0;
        costs.adjustment = 1.0;
        costs
    }

    fn solve(model: &Model<f64>) -> MilpSolution<f64> {
        let sol = solve_milp(&model.system, &SolveLimits::default());
        assert_eq!(sol.status, SolveStatus::Optimal, "toy systems solve to proof");
        sol
    }

    /// One nurse, one day, demand of one morning; the demand either
    /// holds (keep the shift) or vanishes (drop it for the adjustment
    /// price). Every number in the optimum is checkable by hand.
    #[test]
    fn hand_computed_two_scenario_case() {
        let catalog = ShiftCatalog::minimal();
        let inst = Instance {
            horizon: Horizon::with_stage_lengths(1, &[1]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(1, [1, 0, 0]),
            costs: recourse_costs(),
            scenarios: None,
            catalog,
        };
        let tree = ScenarioTree::build(vec![vec![
            StageRealization::new("hold", 0.5, [1, 0, 0]),
            StageRealization::new("vanish", 0.5, [0, 0, 0]),
        ]])
        .unwrap();

        let model = build_staged::<f64>(&inst, &tree, None);
        let sol = solve(&model);
        // Baseline: staffing 5, no slack. "hold": keep the morning,
        // nothing to pay. "vanish": drop it for the adjustment price 1.
        assert_relative_eq!(sol.objective, 5.0 + 0.5 * 0.0 + 0.5 * 1.0, epsilon = 1e-9);

        let extracted = extract_staged(&inst, &tree, &model, &sol.values);
        assert_eq!(extracted.baseline.shifts_at(0, 0), &[0]);
        let hold = extracted.plan(1);
        assert_eq!(hold.roster.shifts_at(0, 0), &[0]);
        assert_eq!((hold.staff_added, hold.staff_released), (0, 0));
        let vanish = extracted.plan(2);
        assert!(vanish.roster.shifts_at(0, 0).is_empty());
        let priced =
            multistage_cost(&inst.catalog, &inst.nurses, &inst.horizon, &tree, &inst.costs, &extracted)
                .total();
        assert_relative_eq!(priced, sol.objective, epsilon = 1e-9);
    }

    /// With one certain scenario equal to the planning demand and free
    /// adjustments and flows, re-planning just replays the baseline:
    /// the optimum is twice the one-shot optimum minus the staffing
    /// charge that only the baseline pays, and pinning the one-shot
    /// roster as the baseline changes nothing.
    #[test]
    fn certain_scenario_replays_the_one_shot_plan() {
        let catalog = ShiftCatalog::minimal();
        let mut costs = recourse_costs();
        costs.understaffing = 0.0;
        costs.overstaffing = 0.0;
        costs.adjustment = 0.0;
        let inst = Instance {
            horizon: Horizon::with_stage_lengths(2, &[1, 1]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 0, 0]),
            costs,
            scenarios: None,
            catalog,
        };
        let tree = ScenarioTree::degenerate(&[[1, 0, 0], [1, 0, 0]]).unwrap();

        let det = super::super::build_deterministic::<f64>(&inst);
        let det_sol = solve(&det);
        assert_relative_eq!(det_sol.objective, 5.0, epsilon = 1e-9);
        let det_roster = extract_roster(&inst, &det, &det_sol.values);

        let staged = build_staged::<f64>(&inst, &tree, None);
        let staged_sol = solve(&staged);
        assert_relative_eq!(
            staged_sol.objective,
            2.0 * det_sol.objective - inst.costs.staffing,
            epsilon = 1e-9
        );
        let (oracle, _) = best_multistage(&Instance {
            scenarios: Some(tree.clone()),
            ..inst.clone()
        })
        .unwrap();
        assert_relative_eq!(staged_sol.objective, oracle, epsilon = 1e-6);

        let pinned = build_staged::<f64>(&inst, &tree, Some(&det_roster));
        assert_relative_eq!(solve(&pinned).objective, staged_sol.objective, epsilon = 1e-9);
    }

    fn toy_tree(rng: &mut ChaCha8Rng) -> ScenarioTree {
        let p = rng.gen_range(0.2..=0.8);
        let real = |r: &mut ChaCha8Rng| {
            [r.gen_range(0..=2u32), r.gen_range(0..=1u32), r.gen_range(0..=1u32)]
        };
        ScenarioTree::build(vec![
            vec![StageRealization::new("base", 1.0, real(rng))],
            vec![
                StageRealization::new("high", p, real(rng)),
                StageRealization::new("low", 1.0 - p, real(rng)),
            ],
        ])
        .unwrap()
    }

    fn toy_instance(rng: &mut ChaCha8Rng) -> Instance {
        let catalog = ShiftCatalog::minimal();
        let mut nurses = Vec::new();
        for i in 0..2 {
            let policy = *[WorkPolicy::Fixed, WorkPolicy::Mixed, WorkPolicy::Rotating]
                .choose(rng)
                .unwrap();
            let mut p = profile(&format!("n{i}"), policy, &catalog);
            p.preferred = (0..3).filter(|_| rng.gen_bool(0.8)).collect();
            if p.preferred.is_empty() {
                p.preferred.insert(rng.gen_range(0..3));
            }
            p.violation_cap = rng.gen_range(1..=2);
            p.max_consecutive_days = rng.gen_range(2..=3);
            nurses.push(p);
        }
        Instance {
            horizon: Horizon::with_stage_lengths(3, &[2, 1]).unwrap(),
            nurses,
            demand: SlotGrid::from_fn(3, |_, _| rng.gen_range(0..=1)),
            costs: recourse_costs(),
            scenarios: None,
            catalog,
        }
    }

    /// The staged optimum must match the brute-force backward search
    /// over complete plans on seeded toys, and the extracted solution
    /// must price exactly at the reported objective.
    #[test]
    fn staged_optimum_matches_backward_search_on_toys() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for round in 0..3 {
            let tree = toy_tree(&mut rng);
            let mut inst = toy_instance(&mut rng);
            inst.scenarios = Some(tree.clone());
            let (reference, _) = best_multistage(&inst).unwrap();

            let model = build_staged::<f64>(&inst, &tree, None);
            let sol = solve(&model);
            assert_relative_eq!(sol.objective, reference, epsilon = 1e-6);

            let extracted = extract_staged(&inst, &tree, &model, &sol.values);
            let priced = multistage_cost(
                &inst.catalog,
                &inst.nurses,
                &inst.horizon,
                &tree,
                &inst.costs,
                &extracted,
            )
            .total();
            assert_relative_eq!(priced, sol.objective, epsilon = 1e-9, max_relative = 1e-9);
            assert!(
                multistage_structural_errors(
                    &inst.catalog,
                    &inst.horizon,
                    &tree,
                    &inst.demand,
                    &extracted
                )
                .is_empty(),
                "round {round}: extracted plan fails structural checks"
            );
            assert!(
                multistage_rule_violations(
                    &inst.catalog,
                    &inst.nurses,
                    &inst.horizon,
                    &tree,
                    &extracted
                )
                .is_empty(),
                "round {round}: extracted plan breaks a rule"
            );
        }
    }

    /// Evaluating the certain-demand plan under the real tree can never
    /// beat planning against the tree directly, and collapses to
    /// equality when the tree holds no actual uncertainty.
    #[test]
    fn expectation_plan_evaluation_is_a_restriction() {
        let catalog = ShiftCatalog::minimal();
        let base = Instance {
            horizon: Horizon::with_stage_lengths(2, &[1, 1]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 0, 0]),
            costs: recourse_costs(),
            scenarios: None,
            catalog,
        };
        let trees = [
            ScenarioTree::build(vec![
                vec![StageRealization::new("base", 1.0, [1, 0, 0])],
                vec![
                    StageRealization::new("high", 0.5, [2, 0, 0]),
                    StageRealization::new("low", 0.5, [0, 0, 0]),
                ],
            ])
            .unwrap(),
            ScenarioTree::build(vec![
                vec![StageRealization::new("base", 1.0, [1, 0, 0])],
                vec![
                    StageRealization::new("same-a", 0.5, [1, 0, 0]),
                    StageRealization::new("same-b", 0.5, [1, 0, 0]),
                ],
            ])
            .unwrap(),
        ];

        for (k, tree) in trees.iter().enumerate() {
            let pp = solve(&build_staged::<f64>(&base, tree, None)).objective;

            let certain = ScenarioTree::degenerate(&tree.expected_stage_demands()).unwrap();
            let evp_model = build_staged::<f64>(&base, &certain, None);
            let evp_sol = solve(&evp_model);
            let evp = extract_staged(&base, &certain, &evp_model, &evp_sol.values);

            let mut eev_model = build_staged::<f64>(&base, tree, Some(&evp.baseline));
            fix_staffing_flows(&mut eev_model, tree, &stage_staffing(&certain, &evp));
            let eev = solve(&eev_model).objective;

            assert!(eev >= pp - 1e-6, "tree {k}: evaluation {eev} beats the optimum {pp}");
            if k == 1 {
                assert_relative_eq!(eev, pp, epsilon = 1e-6);
            }
        }
    }

    /// Committing staffing per stage can never beat deciding it per
    /// scenario node, and the two coincide when the tree has one path.
    #[test]
    fn shared_staffing_bounds_the_staged_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        for round in 0..2 {
            let tree = toy_tree(&mut rng);
            let inst = toy_instance(&mut rng);
            let pp = solve(&build_staged::<f64>(&inst, &tree, None)).objective;
            let tp = solve(&build_shared_staffing::<f64>(&inst, &tree)).objective;
            assert!(tp >= pp - 1e-6, "round {round}: restriction {tp} beats {pp}");
        }

        let catalog = ShiftCatalog::minimal();
        let inst = Instance {
            horizon: Horizon::with_stage_lengths(2, &[1, 1]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 0, 0]),
            costs: recourse_costs(),
            scenarios: None,
            catalog,
        };
        let certain = ScenarioTree::degenerate(&[[1, 0, 0], [0, 1, 0]]).unwrap();
        let pp = solve(&build_staged::<f64>(&inst, &certain, None)).objective;
        let tp = solve(&build_shared_staffing::<f64>(&inst, &certain)).objective;
        assert_relative_eq!(tp, pp, epsilon = 1e-6);
    }

    /// Staffing columns live on scenario nodes in the staged system —
    /// a node's decisions depend only on what that node has seen — and
    /// move to the stage chain in the stage-committed variant, whose
    /// re-planning is indexed by complete scenarios.
    #[test]
    fn aggregate_columns_sit_on_nodes_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tree = toy_tree(&mut rng);
        let inst = toy_instance(&mut rng);

        let staffing_scopes = |model: &Model<f64>| {
            let mut scopes = Vec::new();
            for (scope, key, _) in model.vars.iter() {
                if matches!(
                    key,
                    VarKey::StaffLevel | VarKey::StaffAdded | VarKey::StaffReleased
                ) {
                    scopes.push(scope);
                }
            }
            scopes
        };

        let staged = build_staged::<f64>(&inst, &tree, None);
        let scopes = staffing_scopes(&staged);
        assert_eq!(scopes.len(), 3 * tree.non_root_nodes().len());
        assert!(scopes.iter().all(|s| matches!(s, Scope::Node(_))));
        for (scope, key, _) in staged.vars.iter() {
            if let VarKey::Assign { .. } = key {
                assert!(
                    matches!(scope, Scope::Base | Scope::Node(_)),
                    "staged assignments are indexed by scenario node"
                );
            }
        }

        let shared = build_shared_staffing::<f64>(&inst, &tree);
        let scopes = staffing_scopes(&shared);
        assert_eq!(scopes.len(), 3 * tree.stage_count());
        assert!(scopes.iter().all(|s| matches!(s, Scope::Stage(_))));
        let leaf_blocks: BTreeSet<(usize, usize)> = shared
            .vars
            .iter()
            .filter_map(|(scope, key, _)| match (scope, key) {
                (Scope::Leaf { leaf, stage }, VarKey::Assign { .. }) => Some((leaf, stage)),
                _ => None,
            })
            .collect();
        assert_eq!(
            leaf_blocks.len(),
            tree.leaves().len() * tree.stage_count(),
            "every leaf scenario re-plans every stage"
        );
    }

    /// Scenario probabilities multiply every priced recourse column.
    #[test]
    fn probability_weights_show_in_the_objective() {
        let catalog = ShiftCatalog::minimal();
        let inst = Instance {
            horizon: Horizon::with_stage_lengths(2, &[1, 1]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 0, 0]),
            costs: recourse_costs(),
            scenarios: None,
            catalog,
        };
        let tree = ScenarioTree::build(vec![
            vec![StageRealization::new("base", 1.0, [1, 0, 0])],
            vec![
                StageRealization::new("high", 0.6, [2, 0, 0]),
                StageRealization::new("low", 0.4, [0, 0, 0]),
            ],
        ])
        .unwrap();
        let model = build_staged::<f64>(&inst, &tree, None);
        for (w, p) in [(2usize, 0.6), (3usize, 0.4)] {
            let under = model
                .vars
                .get(Scope::Node(w), VarKey::Under { slot: Slot::Am, day: 1 });
            assert_relative_eq!(
                model.system.var(under).objective,
                p * inst.costs.coverage,
                epsilon = 1e-12
            );
            let hire = model.vars.get(Scope::Node(w), VarKey::StaffAdded);
            assert_relative_eq!(
                model.system.var(hire).objective,
                p * inst.costs.understaffing,
                epsilon = 1e-12
            );
            let delta = model.vars.get(
                Scope::Node(w),
                VarKey::AssignDelta { nurse: 0, day: 1, shift: 0 },
            );
            assert_relative_eq!(
                model.system.var(delta).objective,
                p * inst.costs.adjustment,
                epsilon = 1e-12
            );
        }
    }

    fn proptest_instance() -> (Instance, ScenarioTree) {
        let catalog = ShiftCatalog::minimal();
        let mut n0 = profile("n0", WorkPolicy::Mixed, &catalog);
        n0.max_weekend_days = 0;
        n0.violation_cap = 2;
        n0.max_consecutive_days = 3;
        n0.requests = [(0usize, 0usize)].into_iter().collect();
        let mut n1 = profile("n1", WorkPolicy::Rotating, &catalog);
        n1.violation_cap = 1;
        n1.min_minutes = 480;
        let tree = ScenarioTree::build(vec![
            vec![StageRealization::new("open", 1.0, [1, 1, 0])],
            vec![
                StageRealization::new("high", 0.7, [2, 1, 1]),
                StageRealization::new("low", 0.3, [0, 0, 0]),
            ],
        ])
        .unwrap();
        let inst = Instance {
            horizon: Horizon::with_stage_lengths(7, &[2, 5]).unwrap(),
            nurses: vec![n0, n1],
            demand: SlotGrid::replicate(7, [1, 1, 0]),
            costs: recourse_costs(),
            scenarios: Some(tree.clone()),
            catalog,
        };
        (inst, tree)
    }

    /// Strategy: one seven-day assignment grid per roster (baseline and
    /// three node plans), each cell holding at most two shifts.
    fn plan_grids() -> impl Strategy<Value = Vec<Vec<Vec<Vec<usize>>>>> {
        let cell = prop::sample::subsequence(vec![0usize, 1, 2], 0..=2);
        let nurse = prop::collection::vec(cell, 7);
        let grid = prop::collection::vec(nurse, 2);
        prop::collection::vec(grid, 4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        /// The plan checkers and the staged system must agree on every
        /// canonically completed plan: rule verdicts match, and
        /// rule-abiding plans price exactly at the system objective.
        #[test]
        fn plan_verdicts_agree_with_the_system(grids in plan_grids()) {
            let (inst, tree) = proptest_instance();
            let model = build_staged::<f64>(&inst, &tree, None);

            let roster_from = |grid: &Vec<Vec<Vec<usize>>>, days: std::ops::Range<usize>| {
                let mut r = Roster::empty(2, 7);
                for (i, rows) in grid.iter().enumerate() {
                    for (d, cell) in rows.iter().enumerate() {
                        if days.contains(&d) {
                            for &s in cell {
                                r.assign(i, d, s);
                            }
                        }
                    }
                }
                r
            };
            let baseline = roster_from(&grids[0], 0..7);
            let mut nodes: Vec<Option<Roster>> = vec![None; tree.node_count()];
            for (k, w) in tree.non_root_nodes().enumerate() {
                let stage = tree.stage_of(w).unwrap();
                nodes[w] = Some(roster_from(&grids[k + 1], inst.horizon.stage_days(stage)));
            }
            let sol = complete_canonically(
                &inst.catalog,
                &inst.horizon,
                &tree,
                &inst.demand,
                baseline,
                nodes,
            );
            prop_assert!(multistage_structural_errors(
                &inst.catalog,
                &inst.horizon,
                &tree,
                &inst.demand,
                &sol
            )
            .is_empty());

            let point = staged_point(&inst, &tree, &model, &sol);
            let broken =
                multistage_rule_violations(&inst.catalog, &inst.nurses, &inst.horizon, &tree, &sol);
            let infeasible = model.system.violations(&point, 1e-6);
            prop_assert_eq!(
                broken.is_empty(),
                infeasible.is_empty(),
                "checker: {:?} vs system: {:?}",
                broken,
                infeasible
            );
            if broken.is_empty() {
                let priced = multistage_cost(
                    &inst.catalog,
                    &inst.nurses,
                    &inst.horizon,
                    &tree,
                    &inst.costs,
                    &sol,
                )
                .total();
                let algebraic = model.system.objective_value(&point);
                prop_assert!(
                    (priced - algebraic).abs() <= 1e-9 * priced.abs().max(1.0),
                    "priced {} vs algebraic {}",
                    priced,
                    algebraic
                );
            }
        }
    }
}
