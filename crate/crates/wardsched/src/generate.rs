//! Seeded generation of study cases.
//!
//! A [`CaseSpec`] describes a ward at a high level — head count, horizon
//! length, demand pressure, how much uncertainty — and [`generate_case`]
//! expands it into a full, validated [`Instance`]. Everything is
//! deterministic in the seed: random draws come from counter-mode
//! streams keyed by what is being drawn (stage and realization for
//! demand, nurse index for requests), so adding nurses does not shift
//! the demand draws and vice versa.
//!
//! ## Demand model
//!
//! The baseline per-slot demand is `[5, 6, 4]` nurses (morning, evening,
//! night). A pressure level `eta` in `[0, 1]` scales it, and two
//! branches bracket the uncertainty: a busy ward at `eta * base + 4`
//! (probability 0.6) and a quiet one at `max(0, eta * base - 2)`
//! (probability 0.4). The certain planning demand `DE` is the ceiling of
//! their mixture. Stage realizations then draw from a normal around
//! `DE + 4` (busy) or `DE - 2` (quiet) with standard deviation 2 nurses,
//! rounded half up and clamped at zero, and hold that value on every day
//! of the stage. With two realizations per stage those two means are
//! used as-is; other counts interpolate between them with uniform
//! probabilities, and a single realization sits at `DE` itself.

use crate::domain::{CostParams, Horizon, NurseProfile, ShiftCatalog, Slot, SlotGrid, WorkPolicy};
use crate::instance::{Instance, InstanceError};
use crate::scenario::{ScenarioTree, StageRealization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Baseline per-slot demand `[morning, evening, night]`.
pub const BASE_DEMAND: [u32; 3] = [5, 6, 4];

/// High-level description of a study case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    /// Available nurses.
    pub nurses: usize,
    /// Planning horizon in whole weeks; each week is one stage.
    pub weeks: usize,
    /// Demand realizations per stage (1 = no uncertainty).
    pub realizations: usize,
    /// Demand pressure `eta` in `[0, 1]`.
    pub demand_level: f64,
    /// Master seed; every draw derives from it.
    pub seed: u64,
    /// Shift requests granted to each nurse.
    pub requests_per_nurse: usize,
    /// Fraction of nurses on slot-restricted (fixed or mixed) policies.
    /// `None` cycles fixed, mixed, rotating evenly.
    pub regularity: Option<f64>,
    /// Let every nurse take every shift, keeping policies only as the
    /// slot-diversity rule. Requests then spread over all slots, which
    /// restricted policies cannot always honor.
    pub broad_preferences: bool,
}

impl Default for CaseSpec {
    fn default() -> Self {
        CaseSpec {
            nurses: 10,
            weeks: 4,
            realizations: 2,
            demand_level: 1.0,
            seed: 0,
            requests_per_nurse: 2,
            regularity: None,
            broad_preferences: false,
        }
    }
}

/// The two demand anchors for pressure `eta`: `(quiet, busy)` per slot.
fn demand_anchors(eta: f64) -> ([f64; 3], [f64; 3]) {
    let mut quiet = [0.0; 3];
    let mut busy = [0.0; 3];
    for j in 0..3 {
        let scaled = eta * f64::from(BASE_DEMAND[j]);
        busy[j] = scaled + 4.0;
        quiet[j] = (scaled - 2.0).max(0.0);
    }
    (quiet, busy)
}

/// Certain planning demand for pressure `eta`: the ceiling of the
/// 0.6 busy / 0.4 quiet mixture, per slot.
pub fn expected_demand(eta: f64) -> [u32; 3] {
    let (quiet, busy) = demand_anchors(eta);
    let mut out = [0u32; 3];
    for j in 0..3 {
        out[j] = (0.6 * busy[j] + 0.4 * quiet[j]).ceil() as u32;
    }
    out
}

/// One standard normal draw (Box-Muller, deterministic in the stream).
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Stream key layout for the master seed: the top bits say what kind of
/// draw it is, the rest identify the draw site.
fn demand_stream(stage: usize, realization: usize) -> u64 {
    1 << 48 | (stage as u64) << 16 | realization as u64
}

fn request_stream(nurse: usize) -> u64 {
    2 << 48 | nurse as u64
}

fn scenario_stages(spec: &CaseSpec) -> Vec<Vec<StageRealization>> {
    let expected = expected_demand(spec.demand_level);
    let mut busy = [0.0; 3];
    let mut quiet = [0.0; 3];
    let mut center = [0.0; 3];
    for j in 0..3 {
        center[j] = f64::from(expected[j]);
        busy[j] = center[j] + 4.0;
        quiet[j] = center[j] - 2.0;
    }
    (0..spec.weeks)
        .map(|stage| {
            (0..spec.realizations)
                .map(|k| {
                    let (label, probability, mean) = match spec.realizations {
                        1 => ("expected".to_owned(), 1.0, center),
                        2 if k == 0 => ("busy".to_owned(), 0.6, busy),
                        2 => ("quiet".to_owned(), 0.4, quiet),
                        n => {
                            let t = 1.0 - k as f64 / (n - 1) as f64;
                            let mut m = [0.0; 3];
                            for j in 0..3 {
                                m[j] = quiet[j] + t * (busy[j] - quiet[j]);
                            }
                            (format!("r{k}"), 1.0 / n as f64, m)
                        }
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                    rng.set_stream(demand_stream(stage, k));
                    let mut demand = [0u32; 3];
                    for j in 0..3 {
                        let draw = mean[j] + 2.0 * standard_normal(&mut rng);
                        demand[j] = crate::num::round_half_up(draw).max(0.0) as u32;
                    }
                    StageRealization {
                        label,
                        probability,
                        demand,
                    }
                })
                .collect()
        })
        .collect()
}

/// Preferred shifts for a nurse's policy. Restricted policies rotate
/// through the slots (or slot pairs) by their ordinal among same-policy
/// nurses so the ward stays covered.
fn preferred_for(
    catalog: &ShiftCatalog,
    policy: WorkPolicy,
    ordinal: usize,
    broad: bool,
) -> BTreeSet<usize> {
    if broad || policy == WorkPolicy::Rotating {
        return (0..catalog.len()).collect();
    }
    let slots: Vec<Slot> = match policy {
        WorkPolicy::Fixed => {
            vec![Slot::ALL[ordinal % 3]]
        }
        WorkPolicy::Mixed => {
            let pairs = [
                [Slot::Am, Slot::Pm],
                [Slot::Pm, Slot::Night],
                [Slot::Am, Slot::Night],
            ];
            pairs[ordinal % 3].to_vec()
        }
        WorkPolicy::Rotating => unreachable!(),
    };
    slots
        .into_iter()
        .flat_map(|slot| catalog.in_slot(slot))
        .collect()
}

fn policies_for(spec: &CaseSpec) -> Vec<WorkPolicy> {
    match spec.regularity {
        None => (0..spec.nurses)
            .map(|i| [WorkPolicy::Fixed, WorkPolicy::Mixed, WorkPolicy::Rotating][i % 3])
            .collect(),
        Some(r) => {
            let restricted = (r.clamp(0.0, 1.0) * spec.nurses as f64).round() as usize;
            (0..spec.nurses)
                .map(|i| {
                    if i < restricted {
                        // Alternate fixed and mixed within the restricted block.
                        if i % 2 == 0 {
                            WorkPolicy::Fixed
                        } else {
                            WorkPolicy::Mixed
                        }
                    } else {
                        WorkPolicy::Rotating
                    }
                })
                .collect()
        }
    }
}

/// Expand a case description into a validated instance.
pub fn generate_case(spec: &CaseSpec) -> Result<Instance, InstanceError> {
    let catalog = ShiftCatalog::standard();
    let horizon = Horizon::weekly_stages(&vec![1; spec.weeks])?;
    let expected = expected_demand(spec.demand_level);
    let demand = SlotGrid::replicate(horizon.days(), expected);

    let policies = policies_for(spec);
    let mut ordinals = [0usize; 3];
    let mut nurses = Vec::with_capacity(spec.nurses);
    for (i, &policy) in policies.iter().enumerate() {
        let ordinal = match policy {
            WorkPolicy::Fixed => &mut ordinals[0],
            WorkPolicy::Mixed => &mut ordinals[1],
            WorkPolicy::Rotating => &mut ordinals[2],
        };
        let preferred = preferred_for(&catalog, policy, *ordinal, spec.broad_preferences);
        *ordinal += 1;

        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(request_stream(i));
        let pool: Vec<usize> = preferred.iter().copied().collect();
        let mut requests = BTreeSet::new();
        let want = spec
            .requests_per_nurse
            .min(pool.len() * horizon.days());
        while requests.len() < want {
            let day = rng.gen_range(0..horizon.days());
            let shift = pool[rng.gen_range(0..pool.len())];
            requests.insert((day, shift));
        }

        nurses.push(NurseProfile {
            label: format!("n{i:02}"),
            policy,
            min_minutes: 0,
            max_minutes: 40 * 60 * spec.weeks as u32,
            weekly_rest_days: 1,
            max_consecutive_days: 5,
            max_weekend_days: 2 * spec.weeks as u32,
            violation_cap: 4,
            preferred,
            requests,
            stage_limits: None,
        });
    }

    let scenarios = Some(ScenarioTree::build(scenario_stages(spec))?);
    let instance = Instance {
        catalog,
        horizon,
        nurses,
        demand,
        costs: CostParams::baseline(),
        scenarios,
    };
    instance.validate()?;
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_demand_reference_values() {
        assert_eq!(expected_demand(1.0), [7, 8, 6]);
        assert_eq!(expected_demand(0.0), [3, 3, 3]);
        assert_eq!(expected_demand(0.5), [5, 5, 4]);
    }

    #[test]
    fn default_case_shape() {
        let inst = generate_case(&CaseSpec::default()).unwrap();
        assert_eq!(inst.nurses.len(), 10);
        assert_eq!(inst.horizon.days(), 28);
        assert_eq!(inst.horizon.stages(), 4);
        assert_eq!(inst.demand.get(Slot::Am, 0), 7);
        assert_eq!(inst.demand.get(Slot::Night, 27), 6);
        let tree = inst.scenarios.as_ref().unwrap();
        assert_eq!(tree.stage_count(), 4);
        for h in 0..4 {
            let reals = tree.stage_realizations(h);
            assert_eq!(reals.len(), 2);
            assert_eq!(reals[0].probability, 0.6);
            assert_eq!(reals[1].probability, 0.4);
        }
        for n in &inst.nurses {
            assert_eq!(n.requests.len(), 2);
        }
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let spec = CaseSpec::default();
        let a = generate_case(&spec).unwrap();
        let b = generate_case(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate_case(&CaseSpec {
            seed: 1,
            ..spec
        })
        .unwrap();
        assert_ne!(a, c, "a different seed must change some draw");
    }

    #[test]
    fn draw_streams_are_isolated() {
        // Adding nurses must not disturb the demand draws.
        let small = generate_case(&CaseSpec {
            nurses: 4,
            ..CaseSpec::default()
        })
        .unwrap();
        let large = generate_case(&CaseSpec {
            nurses: 12,
            ..CaseSpec::default()
        })
        .unwrap();
        assert_eq!(small.scenarios, large.scenarios);
        // And the shared prefix of nurses is identical.
        assert_eq!(small.nurses[..4], large.nurses[..4]);
    }

    #[test]
    fn regularity_controls_policy_mix() {
        let all_restricted = generate_case(&CaseSpec {
            regularity: Some(1.0),
            ..CaseSpec::default()
        })
        .unwrap();
        assert!(all_restricted
            .nurses
            .iter()
            .all(|n| n.policy != WorkPolicy::Rotating));
        let none_restricted = generate_case(&CaseSpec {
            regularity: Some(0.0),
            ..CaseSpec::default()
        })
        .unwrap();
        assert!(none_restricted
            .nurses
            .iter()
            .all(|n| n.policy == WorkPolicy::Rotating));
    }

    #[test]
    fn broad_preferences_open_the_whole_catalog() {
        let inst = generate_case(&CaseSpec {
            broad_preferences: true,
            ..CaseSpec::default()
        })
        .unwrap();
        assert!(inst
            .nurses
            .iter()
            .all(|n| n.preferred.len() == inst.catalog.len()));
        // Policies still restrict slot diversity, so some requests can
        // end up outside what a fixed-policy nurse can legally work.
        assert!(inst.nurses.iter().any(|n| n.policy == WorkPolicy::Fixed));
    }

    /// Frozen draws for the default seed: a change here means the stream
    /// discipline or the normal sampler changed, which silently breaks
    /// reproducibility of every recorded study run.
    #[test]
    fn frozen_demand_draws_for_seed_zero() {
        let inst = generate_case(&CaseSpec::default()).unwrap();
        let tree = inst.scenarios.as_ref().unwrap();
        let got: Vec<[u32; 3]> = (0..tree.stage_count())
            .flat_map(|h| tree.stage_realizations(h).iter().map(|r| r.demand))
            .collect();
        let want: Vec<[u32; 3]> = vec![
            [15, 11, 13],
            [8, 4, 2],
            [11, 11, 9],
            [6, 5, 2],
            [9, 17, 10],
            [9, 8, 4],
            [12, 9, 8],
            [2, 6, 3],
        ];
        assert_eq!(got, want);
    }
}
