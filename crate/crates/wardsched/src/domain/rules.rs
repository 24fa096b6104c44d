//! Semantic rule checking, independent of any optimization model.
//!
//! [`hard_violations`] inspects a concrete [`Roster`] directly and
//! reports every broken hard rule; [`soft_counts_in_range`] counts the
//! graded soft patterns (weekend excess, morning after a rest day,
//! weekend of double nights, isolated work days). Sequence rules and
//! workload bounds are enforced *within* each stage of the horizon and
//! never across a stage boundary, which for a single-stage horizon is
//! simply the whole planning period.

use super::grid::SlotGrid;
use super::horizon::Horizon;
use super::profile::NurseProfile;
use super::roster::Roster;
use super::shift::{ShiftCatalog, Slot};
use std::fmt;
use std::ops::Range;

/// Identifies which hard rule a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleCode {
    /// Assignment on a day while the nurse is not on the roster.
    UnscheduledWork,
    /// More than one shift on a single day.
    MultipleAssignments,
    /// Assignment to a shift outside the nurse's preferred set.
    UnpreferredShift,
    /// Worked minutes below the stage minimum while scheduled.
    MinutesBelowMinimum,
    /// Worked minutes above the stage maximum.
    MinutesAboveMaximum,
    /// Assignments span more time-of-day slots than the policy allows.
    SlotDiversity,
    /// Morning or evening work on the day right after a night shift.
    PostNightWork,
    /// Night shift, one rest day, then a morning shift.
    NightRestMorning,
    /// Too few rest days in a seven-day block.
    WeeklyRest,
    /// Run of consecutive work days longer than allowed.
    ConsecutiveRun,
    /// Total soft-pattern count exceeds the nurse's graded cap.
    ExcessViolations,
}

impl RuleCode {
    pub const fn as_str(self) -> &'static str {
        match self {
            RuleCode::UnscheduledWork => "unscheduled-work",
            RuleCode::MultipleAssignments => "multiple-assignments",
            RuleCode::UnpreferredShift => "unpreferred-shift",
            RuleCode::MinutesBelowMinimum => "minutes-below-minimum",
            RuleCode::MinutesAboveMaximum => "minutes-above-maximum",
            RuleCode::SlotDiversity => "slot-diversity",
            RuleCode::PostNightWork => "post-night-work",
            RuleCode::NightRestMorning => "night-rest-morning",
            RuleCode::WeeklyRest => "weekly-rest",
            RuleCode::ConsecutiveRun => "consecutive-run",
            RuleCode::ExcessViolations => "excess-violations",
        }
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One broken hard rule, located as precisely as the rule allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardViolation {
    pub code: RuleCode,
    pub nurse: usize,
    /// The day the violation anchors to, when it has one.
    pub day: Option<usize>,
    pub detail: String,
}

impl fmt::Display for HardViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nurse {} [{}]", self.nurse, self.code)?;
        if let Some(d) = self.day {
            write!(f, " day {d}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Counts of the graded soft patterns for one nurse over one day range.
///
/// Counts are computed from the assignments alone; whether they are
/// priced (only scheduled nurses pay for them) is the caller's concern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SoftCounts {
    /// Weekend work days beyond the cap (an integer excess, not a list).
    pub weekend_excess: u32,
    /// Work-free days directly followed by a morning shift (the morning
    /// day is recorded).
    pub rest_then_morning: Vec<usize>,
    /// Saturdays where both weekend days carry a night shift.
    pub weekend_double_night: Vec<usize>,
    /// Work days with work-free days on both sides.
    pub isolated_work: Vec<usize>,
}

impl SoftCounts {
    /// Total number of soft violations.
    pub fn total(&self) -> u32 {
        self.weekend_excess
            + self.rest_then_morning.len() as u32
            + self.weekend_double_night.len() as u32
            + self.isolated_work.len() as u32
    }
}

fn works_slot(catalog: &ShiftCatalog, roster: &Roster, nurse: usize, day: usize, slot: Slot) -> bool {
    roster
        .shifts_at(nurse, day)
        .iter()
        .any(|&s| catalog.slot_of(s) == slot)
}

/// Count the soft patterns for one nurse over `days`, with a weekend cap
/// in force for that range. Patterns that would need a day outside the
/// range do not count.
pub fn soft_counts_in_range(
    catalog: &ShiftCatalog,
    roster: &Roster,
    nurse: usize,
    days: Range<usize>,
    weekend_cap: u32,
) -> SoftCounts {
    let mut out = SoftCounts::default();
    let weekend_worked = Horizon::weekend_days_in(days.clone())
        .filter(|&d| roster.works(nurse, d))
        .count() as u32;
    out.weekend_excess = weekend_worked.saturating_sub(weekend_cap);
    for d in days.clone() {
        if d + 1 < days.end
            && !roster.works(nurse, d)
            && works_slot(catalog, roster, nurse, d + 1, Slot::Am)
        {
            out.rest_then_morning.push(d + 1);
        }
        if Horizon::is_saturday(d)
            && d + 1 < days.end
            && works_slot(catalog, roster, nurse, d, Slot::Night)
            && works_slot(catalog, roster, nurse, d + 1, Slot::Night)
        {
            out.weekend_double_night.push(d);
        }
        if d + 2 < days.end
            && !roster.works(nurse, d)
            && roster.works(nurse, d + 1)
            && !roster.works(nurse, d + 2)
        {
            out.isolated_work.push(d + 1);
        }
    }
    out
}

/// Soft-pattern counts over the whole horizon under the nurse's own
/// weekend cap.
pub fn soft_counts(
    catalog: &ShiftCatalog,
    roster: &Roster,
    nurse: usize,
    profile: &NurseProfile,
) -> SoftCounts {
    soft_counts_in_range(
        catalog,
        roster,
        nurse,
        0..roster.days(),
        profile.max_weekend_days,
    )
}

/// Report mechanical inconsistencies that make a roster unevaluable:
/// mismatched dimensions, shift indexes outside the catalog, or slack
/// grids that do not reconcile supply with demand.
pub fn structural_errors(
    catalog: &ShiftCatalog,
    demand: &SlotGrid<u32>,
    roster: &Roster,
) -> Vec<String> {
    let mut errs = Vec::new();
    if demand.days() != roster.days() {
        errs.push(format!(
            "demand covers {} days but roster covers {}",
            demand.days(),
            roster.days()
        ));
        return errs;
    }
    for (i, d, s) in roster.assignments() {
        if s >= catalog.len() {
            errs.push(format!(
                "nurse {i} day {d}: shift index {s} outside catalog of {}",
                catalog.len()
            ));
        }
    }
    if !errs.is_empty() {
        return errs;
    }
    let supply = roster.supply(catalog);
    for (slot, d, have) in supply.iter() {
        let balance = i64::from(have) + i64::from(roster.under().get(slot, d))
            - i64::from(roster.over().get(slot, d));
        if balance != i64::from(demand.get(slot, d)) {
            errs.push(format!(
                "slot {slot} day {d}: supply {have} with slack does not meet demand {}",
                demand.get(slot, d)
            ));
        }
    }
    errs
}

/// Check every stage-scoped hard rule for all nurses within stage `h`:
/// per-day soundness, the night-sequence rules, weekly rest, run length,
/// minute bounds, and the cap on total soft violations.
pub fn hard_violations_in_stage(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    horizon: &Horizon,
    roster: &Roster,
    stage: usize,
) -> Vec<HardViolation> {
    assert_eq!(profiles.len(), roster.nurses());
    assert_eq!(horizon.days(), roster.days());
    let days = horizon.stage_days(stage);
    let mut out = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        let limits = p.limits_for_stage(horizon, stage);
        for d in days.clone() {
            let cell = roster.shifts_at(i, d);
            if cell.is_empty() {
                continue;
            }
            if !roster.is_scheduled(i) {
                out.push(HardViolation {
                    code: RuleCode::UnscheduledWork,
                    nurse: i,
                    day: Some(d),
                    detail: "assigned while not on the roster".into(),
                });
            }
            if cell.len() > 1 {
                out.push(HardViolation {
                    code: RuleCode::MultipleAssignments,
                    nurse: i,
                    day: Some(d),
                    detail: format!("{} shifts in one day", cell.len()),
                });
            }
            for &s in cell {
                if !p.preferred.contains(&s) {
                    out.push(HardViolation {
                        code: RuleCode::UnpreferredShift,
                        nurse: i,
                        day: Some(d),
                        detail: format!("shift `{}` is not preferred", catalog.get(s).label),
                    });
                }
            }
        }
        // Night shift followed by day work, and night / rest / morning.
        for d in days.clone() {
            if d + 1 < days.end
                && works_slot(catalog, roster, i, d, Slot::Night)
                && (works_slot(catalog, roster, i, d + 1, Slot::Am)
                    || works_slot(catalog, roster, i, d + 1, Slot::Pm))
            {
                out.push(HardViolation {
                    code: RuleCode::PostNightWork,
                    nurse: i,
                    day: Some(d + 1),
                    detail: "day work directly after a night shift".into(),
                });
            }
            if d + 2 < days.end
                && works_slot(catalog, roster, i, d, Slot::Night)
                && !roster.works(i, d + 1)
                && works_slot(catalog, roster, i, d + 2, Slot::Am)
            {
                out.push(HardViolation {
                    code: RuleCode::NightRestMorning,
                    nurse: i,
                    day: Some(d + 2),
                    detail: "morning shift after a single rest day following a night".into(),
                });
            }
        }
        // Weekly rest, over seven-day blocks counted from the stage start.
        for block in Horizon::week_blocks(days.clone()) {
            let worked = block.clone().filter(|&d| roster.works(i, d)).count() as u32;
            if 7 - worked.min(7) < limits.weekly_rest_days {
                out.push(HardViolation {
                    code: RuleCode::WeeklyRest,
                    nurse: i,
                    day: Some(block.start),
                    detail: format!(
                        "{worked} work days leave fewer than {} rest days",
                        limits.weekly_rest_days
                    ),
                });
            }
        }
        // Longest run of consecutive work days.
        let mut run = 0u32;
        for d in days.clone() {
            if roster.works(i, d) {
                run += 1;
                if run == limits.max_consecutive_days + 1 {
                    out.push(HardViolation {
                        code: RuleCode::ConsecutiveRun,
                        nurse: i,
                        day: Some(d),
                        detail: format!("more than {} consecutive work days", run - 1),
                    });
                }
            } else {
                run = 0;
            }
        }
        // Minute bounds apply while the nurse is on the roster.
        if roster.is_scheduled(i) {
            let minutes = roster.minutes_in_range(catalog, i, days.clone()) as f64;
            if minutes < limits.min_minutes - 1e-6 {
                out.push(HardViolation {
                    code: RuleCode::MinutesBelowMinimum,
                    nurse: i,
                    day: None,
                    detail: format!("{minutes} min worked, minimum {}", limits.min_minutes),
                });
            }
            if minutes > limits.max_minutes + 1e-6 {
                out.push(HardViolation {
                    code: RuleCode::MinutesAboveMaximum,
                    nurse: i,
                    day: None,
                    detail: format!("{minutes} min worked, maximum {}", limits.max_minutes),
                });
            }
            let soft = soft_counts_in_range(catalog, roster, i, days.clone(), limits.max_weekend_days);
            if soft.total() > limits.violation_cap {
                out.push(HardViolation {
                    code: RuleCode::ExcessViolations,
                    nurse: i,
                    day: None,
                    detail: format!(
                        "{} soft violations exceed the cap of {}",
                        soft.total(),
                        limits.violation_cap
                    ),
                });
            }
        }
    }
    out
}

/// Check all hard rules over the whole horizon: every stage's scoped
/// rules plus the horizon-wide slot-diversity policy.
pub fn hard_violations(
    catalog: &ShiftCatalog,
    profiles: &[NurseProfile],
    horizon: &Horizon,
    roster: &Roster,
) -> Vec<HardViolation> {
    let mut out: Vec<HardViolation> = (0..horizon.stages())
        .flat_map(|h| hard_violations_in_stage(catalog, profiles, horizon, roster, h))
        .collect();
    for (i, p) in profiles.iter().enumerate() {
        let used = roster.slots_used(catalog, i);
        if used.len() > p.policy.slot_allowance() {
            out.push(HardViolation {
                code: RuleCode::SlotDiversity,
                nurse: i,
                day: None,
                detail: format!(
                    "assignments span {} slots but the {} policy allows {}",
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
    use crate::domain::profile::WorkPolicy;
    use std::collections::BTreeSet;

    fn profile(label: &str, catalog: &ShiftCatalog) -> NurseProfile {
        NurseProfile {
            label: label.into(),
            policy: WorkPolicy::Rotating,
            min_minutes: 0,
            max_minutes: 100_000,
            weekly_rest_days: 1,
            max_consecutive_days: 5,
            max_weekend_days: 2,
            violation_cap: 4,
            preferred: (0..catalog.len()).collect(),
            requests: BTreeSet::new(),
            stage_limits: None,
        }
    }

    /// Two-week fixture worked out by hand: nights on the first weekend
    /// (days 5 and 6), evening work on days 11 and 12, cap of 2 weekend
    /// days. Weekend work days are {5, 6, 12} -> excess 1; both weekend
    /// nights on Saturday 5 -> one double-night; no morning patterns (no
    /// morning shifts at all) and no isolated day (runs of length two).
    #[test]
    fn soft_counts_hand_enumerated_two_week_fixture() {
        let cat = ShiftCatalog::minimal(); // 0=A, 1=P, 2=N
        let roster =
            Roster::from_assignments(1, 14, [(0, 5, 2), (0, 6, 2), (0, 11, 1), (0, 12, 1)]);
        let counts = soft_counts_in_range(&cat, &roster, 0, 0..14, 2);
        assert_eq!(counts.weekend_excess, 1);
        assert_eq!(counts.weekend_double_night, vec![5]);
        assert_eq!(counts.rest_then_morning, Vec::<usize>::new());
        assert_eq!(counts.isolated_work, Vec::<usize>::new());
        assert_eq!(counts.total(), 2);
    }

    #[test]
    fn soft_counts_morning_and_isolated_patterns() {
        let cat = ShiftCatalog::minimal();
        // Off day 0, morning day 1 -> one morning-after-rest; the day-1
        // assignment is also isolated (off on both sides).
        let roster = Roster::from_assignments(1, 7, [(0, 1, 0)]);
        let counts = soft_counts_in_range(&cat, &roster, 0, 0..7, 2);
        assert_eq!(counts.rest_then_morning, vec![1]);
        assert_eq!(counts.isolated_work, vec![1]);
        assert_eq!(counts.total(), 2);
        // Range restriction: a pattern needing day 0 is not counted when
        // the range starts at day 1.
        let scoped = soft_counts_in_range(&cat, &roster, 0, 1..7, 2);
        assert_eq!(scoped.rest_then_morning, Vec::<usize>::new());
        assert_eq!(scoped.isolated_work, Vec::<usize>::new());
    }

    #[test]
    fn hard_rules_night_sequences() {
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::single_stage(7).unwrap();
        let profiles = vec![profile("n0", &cat)];
        // Night day 0 then morning day 1.
        let r = Roster::from_assignments(1, 7, [(0, 0, 2), (0, 1, 0)]);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::PostNightWork));
        // Night day 0, rest day 1, morning day 2.
        let r = Roster::from_assignments(1, 7, [(0, 0, 2), (0, 2, 0)]);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::NightRestMorning));
        // Night day 0 then night day 1 is allowed.
        let r = Roster::from_assignments(1, 7, [(0, 0, 2), (0, 1, 2)]);
        let vs = hard_violations(&cat, &profiles, &hz, &r);
        assert!(vs.iter().all(|v| v.code != RuleCode::PostNightWork), "{vs:?}");
    }

    #[test]
    fn hard_rules_rest_runs_minutes_and_diversity() {
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::single_stage(14).unwrap();
        let mut profiles = vec![profile("n0", &cat)];
        // Six consecutive evenings exceed a run cap of five and leave
        // exactly one rest day in the first week (allowed with E = 1).
        let r = Roster::from_assignments(1, 14, (0..6).map(|d| (0, d, 1)).collect::<Vec<_>>());
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::ConsecutiveRun));
        assert!(!codes.contains(&RuleCode::WeeklyRest));
        // Tighten the weekly rest requirement to two days: now broken.
        profiles[0].weekly_rest_days = 2;
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::WeeklyRest));
        profiles[0].weekly_rest_days = 1;
        // A fixed-policy nurse must stay in one slot.
        profiles[0].policy = WorkPolicy::Fixed;
        let r = Roster::from_assignments(1, 14, [(0, 0, 0), (0, 2, 1)]);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::SlotDiversity));
        // Minute ceiling.
        profiles[0].policy = WorkPolicy::Rotating;
        profiles[0].max_minutes = 10 * 60;
        let r = Roster::from_assignments(1, 14, [(0, 0, 0), (0, 2, 1)]);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::MinutesAboveMaximum));
    }

    #[test]
    fn sequence_rules_stop_at_stage_boundaries() {
        let cat = ShiftCatalog::minimal();
        let profiles = vec![profile("n0", &cat)];
        // Night on the last day of week one, morning on the first day of
        // week two: illegal in a single stage, legal across a boundary.
        let r = Roster::from_assignments(1, 14, [(0, 6, 2), (0, 7, 0)]);
        let hz1 = Horizon::single_stage(14).unwrap();
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz1, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::PostNightWork));
        let hz2 = Horizon::weekly_stages(&[1, 1]).unwrap();
        let vs = hard_violations(&cat, &profiles, &hz2, &r);
        assert!(vs.is_empty(), "{vs:?}");
    }

    #[test]
    fn per_day_checks_and_structure() {
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::single_stage(7).unwrap();
        let mut profiles = vec![profile("n0", &cat)];
        profiles[0].preferred = [0usize, 2].into_iter().collect();
        let mut r = Roster::from_assignments(1, 7, [(0, 0, 0), (0, 0, 2), (0, 3, 1)]);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::MultipleAssignments));
        assert!(codes.contains(&RuleCode::UnpreferredShift));
        r.set_scheduled(0, false);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::UnscheduledWork));
        // Slack identity: zero slacks cannot reconcile a positive demand.
        let demand = SlotGrid::replicate(7, [1, 0, 0]);
        assert!(!structural_errors(&cat, &demand, &r).is_empty());
        r.recompute_slacks(&cat, &demand);
        assert!(structural_errors(&cat, &demand, &r).is_empty());
    }

    #[test]
    fn excess_soft_violations_break_the_cap() {
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::single_stage(7).unwrap();
        let mut profiles = vec![profile("n0", &cat)];
        profiles[0].violation_cap = 1;
        // Two isolated morning-after-rest days: days 1 and 3 are each
        // isolated and each follow a rest day -> four soft violations.
        let r = Roster::from_assignments(1, 7, [(0, 1, 0), (0, 3, 0)]);
        let counts = soft_counts_in_range(&cat, &r, 0, 0..7, 2);
        assert_eq!(counts.total(), 4);
        let codes: Vec<_> = hard_violations(&cat, &profiles, &hz, &r)
            .into_iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&RuleCode::ExcessViolations));
    }
}
