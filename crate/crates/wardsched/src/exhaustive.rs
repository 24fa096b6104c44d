//! Brute-force reference optimizers for toy instances.
//!
//! Each search enumerates the complete decision space of an instance and
//! prices candidates through [`crate::eval`] alone — no constraint-system
//! code is involved — so an integer-programming model whose optimum
//! matches these values has been certified against an independent path.
//! The searches refuse instances whose spaces are too large to sweep:
//! they exist for certification, not for production solving.

use crate::domain::{
    hard_violations, hard_violations_in_stage, soft_counts_in_range, NurseProfile, Roster,
    ShiftCatalog, SlotGrid,
};
use crate::eval::{
    changed_cells, complete_canonically, multistage_cost, multistage_rule_violations,
    multistage_structural_errors, roster_cost, slack_in_range, violation_charge,
    MultistageSolution,
};
use crate::instance::Instance;
use crate::scenario::ScenarioTree;
use std::ops::Range;
use thiserror::Error;

/// Cap on one nurse's raw pattern space.
const NURSE_PATTERN_CAP: u128 = 1 << 20;
/// Cap on the estimated number of elementary steps for a whole search.
const WORK_CAP: u128 = 50_000_000;

/// Why an exhaustive search refused to run.
#[derive(Debug, Error)]
pub enum ExhaustiveError {
    #[error("about {estimate} enumeration steps exceed the exhaustive-search cap of {cap}")]
    TooLarge { estimate: u128, cap: u128 },
    #[error("the instance carries no scenario tree")]
    NoScenarios,
}

/// One nurse's work pattern over the whole horizon: at most one shift per
/// day, `None` meaning off.
type Pattern = Vec<Option<usize>>;

fn pattern_roster(days: usize, pattern: &Pattern) -> Roster {
    Roster::from_assignments(
        1,
        days,
        pattern
            .iter()
            .enumerate()
            .filter_map(|(d, &s)| s.map(|s| (0usize, d, s))),
    )
}

/// Every pattern for one nurse with assignments confined to the `active`
/// days and shifts drawn from the preferred set restricted to the slot
/// bitmask (bit `k` = slot index `k`).
fn nurse_patterns(
    catalog: &ShiftCatalog,
    profile: &NurseProfile,
    total_days: usize,
    active: Range<usize>,
    slot_mask: u8,
) -> Result<Vec<Pattern>, ExhaustiveError> {
    let allowed: Vec<usize> = profile
        .preferred
        .iter()
        .copied()
        .filter(|&s| slot_mask & (1 << catalog.slot_of(s).index()) != 0)
        .collect();
    let base = (allowed.len() + 1) as u128;
    let raw = base.checked_pow(active.len() as u32).unwrap_or(u128::MAX);
    if raw > NURSE_PATTERN_CAP {
        return Err(ExhaustiveError::TooLarge {
            estimate: raw,
            cap: NURSE_PATTERN_CAP,
        });
    }
    let mut out = Vec::with_capacity(raw as usize);
    let mut digits = vec![0usize; active.len()];
    loop {
        let mut pattern = vec![None; total_days];
        for (k, &digit) in digits.iter().enumerate() {
            if digit > 0 {
                pattern[active.start + k] = Some(allowed[digit - 1]);
            }
        }
        out.push(pattern);
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(out);
            }
            digits[k] += 1;
            if digits[k] < base as usize {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Call `f` with every index combination `idx[i] in 0..counts[i]`.
fn for_each_combo(counts: &[usize], mut f: impl FnMut(&[usize])) {
    if counts.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; counts.len()];
    loop {
        f(&idx);
        let mut k = 0;
        loop {
            if k == counts.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Merge one pattern per nurse into a roster (scheduling exactly the
/// nurses that work somewhere).
fn combine(patterns: &[&Pattern], days: usize) -> Roster {
    Roster::from_assignments(
        patterns.len(),
        days,
        patterns.iter().enumerate().flat_map(|(i, pat)| {
            pat.iter()
                .enumerate()
                .filter_map(move |(d, &s)| s.map(|s| (i, d, s)))
        }),
    )
}

/// Optimal one-shot roster by exhaustive enumeration.
///
/// Every hard rule is per-nurse, so the search enumerates rule-abiding
/// per-nurse patterns first and sweeps their product. Scheduling flags
/// follow work — an idle scheduled nurse only adds cost and constraints —
/// and the slacks are the minimal reconciliation with the demand grid,
/// which is cost-minimal because slack is priced but otherwise
/// unconstrained. Returns the optimal cost and one optimal roster.
pub fn best_deterministic(instance: &Instance) -> Result<(f64, Roster), ExhaustiveError> {
    let days = instance.horizon.days();
    let flat = instance.horizon.flatten();
    let mut per_nurse: Vec<Vec<Pattern>> = Vec::with_capacity(instance.nurses.len());
    for profile in &instance.nurses {
        let pats: Vec<Pattern> = nurse_patterns(&instance.catalog, profile, days, 0..days, 0b111)?
            .into_iter()
            .filter(|pat| {
                let mini = pattern_roster(days, pat);
                hard_violations(&instance.catalog, std::slice::from_ref(profile), &flat, &mini)
                    .is_empty()
            })
            .collect();
        per_nurse.push(pats);
    }
    let combos: u128 = per_nurse.iter().map(|v| v.len() as u128).product();
    let work = combos.saturating_mul(days.max(1) as u128);
    if work > WORK_CAP {
        return Err(ExhaustiveError::TooLarge {
            estimate: work,
            cap: WORK_CAP,
        });
    }
    let counts: Vec<usize> = per_nurse.iter().map(Vec::len).collect();
    let mut best: Option<(f64, Roster)> = None;
    for_each_combo(&counts, |idx| {
        let chosen: Vec<&Pattern> = idx
            .iter()
            .enumerate()
            .map(|(i, &k)| &per_nurse[i][k])
            .collect();
        let mut roster = combine(&chosen, days);
        roster.recompute_slacks(&instance.catalog, &instance.demand);
        let cost =
            roster_cost(&instance.catalog, &instance.nurses, &instance.costs, &roster).total();
        if best.as_ref().map_or(true, |(b, _)| cost < *b) {
            best = Some((cost, roster));
        }
    });
    Ok(best.expect("the all-off pattern keeps every rule, so each nurse has a candidate"))
}

/// One recourse candidate at a scenario node: the stage roster, its head
/// count, and the cost parts that depend on neither the baseline nor the
/// staff level (coverage slack and graded violations).
struct NodeCand {
    roster: Roster,
    staff: u32,
    level_free_cost: f64,
}

/// Bottom-up search over one scenario tree for fixed candidate lists and
/// a fixed baseline. `memo[node][level]` holds the cheapest
/// probability-weighted cost of the subtree rooted at `node` when
/// `level` staff walk in, and the candidate index achieving it.
struct TreeSearch<'a> {
    tree: &'a ScenarioTree,
    understaffing: f64,
    cands: &'a [Vec<NodeCand>],
    adjust: &'a [Vec<f64>],
    memo: Vec<Vec<Option<(f64, usize)>>>,
}

impl TreeSearch<'_> {
    fn subtree(&mut self, node: usize, level: usize) -> f64 {
        if let Some((v, _)) = self.memo[node][level] {
            return v;
        }
        let prob = self.tree.path_probability(node);
        let mut best = (f64::INFINITY, usize::MAX);
        for (ci, cand) in self.cands[node].iter().enumerate() {
            let staff = cand.staff as usize;
            let new_level = level.max(staff);
            let added = (new_level - level) as f64;
            let mut value = prob
                * (cand.level_free_cost + self.adjust[node][ci] + self.understaffing * added);
            for child in self.tree.children(node) {
                value += self.subtree(child, new_level);
            }
            if value < best.0 {
                best = (value, ci);
            }
        }
        self.memo[node][level] = Some(best);
        best.0
    }

    /// Read the optimal candidate per node off a filled memo.
    fn collect(&self, node: usize, level: usize, out: &mut Vec<Option<usize>>) {
        let (_, ci) = self.memo[node][level].expect("memo filled by subtree()");
        out[node] = Some(ci);
        let new_level = level.max(self.cands[node][ci].staff as usize);
        for child in self.tree.children(node) {
            self.collect(child, new_level, out);
        }
    }
}

/// Demand grid for one node: its realization on its stage days, zero
/// elsewhere.
fn node_grid(
    horizon: &crate::domain::Horizon,
    tree: &ScenarioTree,
    node: usize,
) -> SlotGrid<u32> {
    let days = horizon.stage_days(tree.stage_of(node).expect("non-root"));
    let demand = tree.node_demand(node);
    SlotGrid::from_fn(horizon.days(), |slot, d| {
        if days.contains(&d) {
            demand[slot.index()]
        } else {
            0
        }
    })
}

/// Optimal staged plan by exhaustive enumeration over baselines and
/// per-node recourse rosters.
///
/// Two structural facts keep the sweep tractable. Per-nurse slot masks
/// make the tree-wide slot-diversity rule separable: every candidate is
/// confined to a fixed slot set of exactly the policy's size, and the
/// outer loop minimizes over all such sets. And staff flows need no
/// enumeration at all — idle staff is free while both flow directions
/// are priced, so an optimal settlement never releases anyone and hires
/// exactly up to the running maximum of required head counts down each
/// path; the carried level is therefore the only coupling between
/// stages, and serves as the dynamic-programming state.
pub fn best_multistage(
    instance: &Instance,
) -> Result<(f64, MultistageSolution), ExhaustiveError> {
    let tree = instance
        .scenarios
        .as_ref()
        .ok_or(ExhaustiveError::NoScenarios)?;
    let catalog = &instance.catalog;
    let horizon = &instance.horizon;
    let flat = horizon.flatten();
    let days = horizon.days();
    let nurse_count = instance.nurses.len();

    // Pattern lists per (nurse, slot mask): baselines keep the whole-
    // horizon rules, stage patterns the stage-scoped ones.
    let mask_choices: Vec<Vec<u8>> = instance
        .nurses
        .iter()
        .map(|p| {
            (0u8..8)
                .filter(|m| m.count_ones() as usize == p.policy.slot_allowance().min(3))
                .collect()
        })
        .collect();
    let mut base_pats: std::collections::BTreeMap<(usize, u8), Vec<Pattern>> = Default::default();
    let mut stage_pats: std::collections::BTreeMap<(usize, u8, usize), Vec<Pattern>> =
        Default::default();
    for (i, profile) in instance.nurses.iter().enumerate() {
        for &mask in &mask_choices[i] {
            let pats: Vec<Pattern> = nurse_patterns(catalog, profile, days, 0..days, mask)?
                .into_iter()
                .filter(|pat| {
                    let mini = pattern_roster(days, pat);
                    hard_violations(catalog, std::slice::from_ref(profile), &flat, &mini)
                        .is_empty()
                })
                .collect();
            base_pats.insert((i, mask), pats);
            for h in 0..horizon.stages() {
                let pats: Vec<Pattern> =
                    nurse_patterns(catalog, profile, days, horizon.stage_days(h), mask)?
                        .into_iter()
                        .filter(|pat| {
                            let mini = pattern_roster(days, pat);
                            hard_violations_in_stage(
                                catalog,
                                std::slice::from_ref(profile),
                                horizon,
                                &mini,
                                h,
                            )
                            .is_empty()
                        })
                        .collect();
                stage_pats.insert((i, mask, h), pats);
            }
        }
    }

    let mask_counts: Vec<usize> = mask_choices.iter().map(Vec::len).collect();
    let mut mask_combos: Vec<Vec<u8>> = Vec::new();
    for_each_combo(&mask_counts, |idx| {
        mask_combos.push(
            idx.iter()
                .enumerate()
                .map(|(i, &k)| mask_choices[i][k])
                .collect(),
        );
    });

    // Bound the whole sweep before running any of it.
    let mut estimate: u128 = 0;
    for combo in &mask_combos {
        let baselines: u128 = (0..nurse_count)
            .map(|i| base_pats[&(i, combo[i])].len() as u128)
            .product();
        let mut node_steps: u128 = 0;
        for node in tree.non_root_nodes() {
            let h = tree.stage_of(node).expect("non-root");
            let cands: u128 = (0..nurse_count)
                .map(|i| stage_pats[&(i, combo[i], h)].len() as u128)
                .product();
            let step = (horizon.stage_len(h) * nurse_count + nurse_count + 2) as u128;
            node_steps = node_steps.saturating_add(cands.saturating_mul(step));
        }
        estimate = estimate.saturating_add(
            baselines
                .saturating_mul(node_steps.max(1))
                .saturating_add(node_steps),
        );
    }
    if estimate > WORK_CAP {
        return Err(ExhaustiveError::TooLarge {
            estimate,
            cap: WORK_CAP,
        });
    }

    let mut best: Option<(f64, Roster, Vec<Option<Roster>>)> = None;
    for combo in &mask_combos {
        // Materialize this mask choice's candidate lists per node.
        let mut cands: Vec<Vec<NodeCand>> =
            (0..tree.node_count()).map(|_| Vec::new()).collect();
        for node in tree.non_root_nodes() {
            let h = tree.stage_of(node).expect("non-root");
            let stage_days = horizon.stage_days(h);
            let demand = node_grid(horizon, tree, node);
            let lists: Vec<&Vec<Pattern>> = (0..nurse_count)
                .map(|i| &stage_pats[&(i, combo[i], h)])
                .collect();
            let counts: Vec<usize> = lists.iter().map(|v| v.len()).collect();
            for_each_combo(&counts, |idx| {
                let chosen: Vec<&Pattern> =
                    idx.iter().enumerate().map(|(i, &k)| &lists[i][k]).collect();
                let mut roster = combine(&chosen, days);
                roster.recompute_slacks(catalog, &demand);
                let mut level_free_cost =
                    instance.costs.coverage * slack_in_range(&roster, stage_days.clone()) as f64;
                for (i, p) in instance.nurses.iter().enumerate() {
                    if !roster.is_scheduled(i) {
                        continue;
                    }
                    let cap = p.limits_for_stage(horizon, h).max_weekend_days;
                    let total =
                        soft_counts_in_range(catalog, &roster, i, stage_days.clone(), cap).total();
                    level_free_cost += violation_charge(&instance.costs, total);
                }
                cands[node].push(NodeCand {
                    staff: roster.scheduled_count() as u32,
                    roster,
                    level_free_cost,
                });
            });
        }

        let lists: Vec<&Vec<Pattern>> = (0..nurse_count)
            .map(|i| &base_pats[&(i, combo[i])])
            .collect();
        let counts: Vec<usize> = lists.iter().map(|v| v.len()).collect();
        for_each_combo(&counts, |idx| {
            let chosen: Vec<&Pattern> =
                idx.iter().enumerate().map(|(i, &k)| &lists[i][k]).collect();
            let mut baseline = combine(&chosen, days);
            baseline.recompute_slacks(catalog, &instance.demand);
            let base_cost =
                roster_cost(catalog, &instance.nurses, &instance.costs, &baseline).total();

            let adjust: Vec<Vec<f64>> = (0..tree.node_count())
                .map(|node| {
                    let Some(h) = tree.stage_of(node) else {
                        return Vec::new();
                    };
                    let stage_days = horizon.stage_days(h);
                    cands[node]
                        .iter()
                        .map(|c| {
                            instance.costs.adjustment
                                * changed_cells(&baseline, &c.roster, stage_days.clone()) as f64
                        })
                        .collect()
                })
                .collect();

            let mut search = TreeSearch {
                tree,
                understaffing: instance.costs.understaffing,
                cands: &cands,
                adjust: &adjust,
                memo: vec![vec![None; nurse_count + 1]; tree.node_count()],
            };
            let base_staff = baseline.scheduled_count();
            let mut value = base_cost;
            for child in tree.children(ScenarioTree::ROOT) {
                value += search.subtree(child, base_staff);
            }
            if best.as_ref().map_or(true, |(b, _, _)| value < *b) {
                let mut picks: Vec<Option<usize>> = vec![None; tree.node_count()];
                for child in tree.children(ScenarioTree::ROOT) {
                    search.collect(child, base_staff, &mut picks);
                }
                let rosters = picks
                    .iter()
                    .enumerate()
                    .map(|(node, pick)| pick.map(|ci| cands[node][ci].roster.clone()))
                    .collect();
                best = Some((value, baseline, rosters));
            }
        });
    }

    let (value, baseline, rosters) =
        best.expect("the all-off pattern keeps every rule, so each list has a candidate");
    let sol = complete_canonically(catalog, horizon, tree, &instance.demand, baseline, rosters);
    debug_assert!(
        multistage_structural_errors(catalog, horizon, tree, &instance.demand, &sol).is_empty(),
        "exhaustive winner must be structurally sound"
    );
    debug_assert!(
        multistage_rule_violations(catalog, &instance.nurses, horizon, tree, &sol).is_empty(),
        "exhaustive winner must keep every working rule"
    );
    debug_assert!(
        {
            let repriced =
                multistage_cost(catalog, &instance.nurses, horizon, tree, &instance.costs, &sol)
                    .total();
            (repriced - value).abs() <= 1e-9 * value.abs().max(1.0)
        },
        "search value must match the evaluator's price of the winner"
    );
    Ok((value, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{CostParams, Horizon, WorkPolicy};
    use crate::scenario::StageRealization;
    use approx::assert_relative_eq;
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

    fn cheap_staffing() -> CostParams<f64> {
        let mut costs: CostParams<f64> = CostParams::baseline();
        costs.staffing = 5.0;
        costs
    }

    /// One nurse, two weekdays, one morning needed per day. With cheap
    /// staffing the optimum works both mornings (cost 5); with the dear
    /// baseline staffing the optimum leaves both uncovered (cost 20).
    #[test]
    fn two_day_optima_match_hand_computation() {
        let catalog = ShiftCatalog::minimal();
        let mut instance = Instance {
            horizon: Horizon::with_stage_lengths(2, &[2]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 0, 0]),
            costs: cheap_staffing(),
            scenarios: None,
            catalog,
        };
        let (cost, roster) = best_deterministic(&instance).unwrap();
        assert_relative_eq!(cost, 5.0);
        assert_eq!(
            roster.assignments().collect::<Vec<_>>(),
            vec![(0, 0, 0), (0, 1, 0)]
        );

        instance.costs = CostParams::baseline();
        let (cost, roster) = best_deterministic(&instance).unwrap();
        assert_relative_eq!(cost, 20.0);
        assert_eq!(roster.assignments().count(), 0);
    }

    /// The pattern-product search must agree with the rawest possible
    /// loop: sweep every cell choice of a 2-nurse, 2-day roster directly,
    /// filter by the rule checker, and price the survivors.
    #[test]
    fn matches_naive_full_enumeration_on_micro_instance() {
        let catalog = ShiftCatalog::minimal();
        let mut nurse0 = profile("n0", WorkPolicy::Fixed, &catalog);
        nurse0.requests = [(1usize, 0usize)].into_iter().collect();
        let instance = Instance {
            horizon: Horizon::with_stage_lengths(2, &[2]).unwrap(),
            nurses: vec![nurse0, profile("n1", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 1, 0]),
            costs: cheap_staffing(),
            scenarios: None,
            catalog,
        };

        let flat = instance.horizon.flatten();
        let mut naive = f64::INFINITY;
        // Cells in nurse-major order; digit 0 = off, k = shift k - 1.
        for code in 0..4u32.pow(4) {
            let mut triples = Vec::new();
            for cell in 0..4 {
                let digit = (code / 4u32.pow(cell)) % 4;
                if digit > 0 {
                    let (i, d) = ((cell / 2) as usize, (cell % 2) as usize);
                    triples.push((i, d, (digit - 1) as usize));
                }
            }
            let mut roster = Roster::from_assignments(2, 2, triples);
            if !hard_violations(&instance.catalog, &instance.nurses, &flat, &roster).is_empty() {
                continue;
            }
            roster.recompute_slacks(&instance.catalog, &instance.demand);
            let cost = roster_cost(&instance.catalog, &instance.nurses, &instance.costs, &roster)
                .total();
            naive = naive.min(cost);
        }

        let (cost, _) = best_deterministic(&instance).unwrap();
        assert_relative_eq!(cost, naive);
    }

    /// One nurse, one 2-day stage, demand one morning per day that with
    /// probability one half evaporates. Hand optimum: staff the mornings
    /// in the baseline (5), keep them in the busy branch (0), and cancel
    /// both in the quiet branch (2 changed cells at 5 each, halved by the
    /// branch probability): 5 + 0.5 * 10 = 10.
    #[test]
    fn staged_search_matches_hand_computed_two_scenario_case() {
        let catalog = ShiftCatalog::minimal();
        let tree = ScenarioTree::build(vec![vec![
            StageRealization::new("busy", 0.5, [1, 0, 0]),
            StageRealization::new("quiet", 0.5, [0, 0, 0]),
        ]])
        .unwrap();
        let instance = Instance {
            horizon: Horizon::with_stage_lengths(2, &[2]).unwrap(),
            nurses: vec![profile("n0", WorkPolicy::Rotating, &catalog)],
            demand: SlotGrid::replicate(2, [1, 0, 0]),
            costs: cheap_staffing(),
            scenarios: Some(tree),
            catalog,
        };

        let (value, sol) = best_multistage(&instance).unwrap();
        assert_relative_eq!(value, 10.0);
        assert_eq!(sol.baseline.assignments().count(), 2);
        let tree = instance.scenarios.as_ref().unwrap();
        for node in tree.non_root_nodes() {
            let plan = sol.plan(node);
            assert_eq!(plan.staff_added, 0);
            assert_eq!(plan.staff_released, 0);
            let expect = match tree.realization_of(node).label.as_str() {
                "busy" => 2,
                _ => 0,
            };
            assert_eq!(plan.roster.assignments().count(), expect);
        }
    }

    /// The running-maximum settlement must beat every explicit flow
    /// schedule. Sweep all (added, released) pairs per node on a small
    /// two-stage tree and compare against the closed form.
    #[test]
    fn flow_settlement_beats_every_flow_combination() {
        use crate::eval::settle_staff_flows;
        let tree = ScenarioTree::build(vec![
            vec![
                StageRealization::new("hi", 0.5, [0, 0, 0]),
                StageRealization::new("lo", 0.5, [0, 0, 0]),
            ],
            vec![StageRealization::new("next", 1.0, [0, 0, 0])],
        ])
        .unwrap();
        let baseline = 1u32;
        let required = [0u32, 3, 0, 2, 2]; // root, stage-0 pair, their children
        let (cu, co) = (60.0, 30.0);

        let flows = settle_staff_flows(&tree, baseline, &required);
        let closed: f64 = tree
            .non_root_nodes()
            .map(|n| {
                tree.path_probability(n) * (cu * flows[n].0 as f64 + co * flows[n].1 as f64)
            })
            .sum();

        let span = 5u32; // flows 0..=4 cover every sensible schedule here
        let mut sweep_best = f64::INFINITY;
        for code in 0..(span * span).pow(4) {
            let mut digits = code;
            let mut level = vec![0i64; tree.node_count()];
            level[ScenarioTree::ROOT] = baseline as i64;
            let mut cost = 0.0;
            let mut ok = true;
            for node in tree.non_root_nodes() {
                let added = (digits % span) as i64;
                digits /= span;
                let released = (digits % span) as i64;
                digits /= span;
                let parent = tree.parent(node).unwrap();
                if released > level[parent] {
                    ok = false;
                    break;
                }
                level[node] = level[parent] + added - released;
                if level[node] < required[node] as i64 {
                    ok = false;
                    break;
                }
                cost +=
                    tree.path_probability(node) * (cu * added as f64 + co * released as f64);
            }
            if ok {
                sweep_best = sweep_best.min(cost);
            }
        }
        assert_relative_eq!(closed, sweep_best);
        assert_relative_eq!(closed, 0.5 * 2.0 * cu + 0.5 * cu);
    }

    #[test]
    fn refuses_oversized_instances() {
        let instance = crate::generate::generate_case(&crate::generate::CaseSpec::default())
            .expect("generated case");
        assert!(matches!(
            best_deterministic(&instance),
            Err(ExhaustiveError::TooLarge { .. })
        ));
        assert!(matches!(
            best_multistage(&instance),
            Err(ExhaustiveError::TooLarge { .. })
        ));
        let mut no_tree = instance;
        no_tree.scenarios = None;
        assert!(matches!(
            best_multistage(&no_tree),
            Err(ExhaustiveError::NoScenarios)
        ));
    }
}
