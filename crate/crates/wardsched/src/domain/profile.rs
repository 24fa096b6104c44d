//! Nurse work policies and per-nurse scheduling profiles.

use super::horizon::Horizon;
use super::shift::ShiftCatalog;
use super::DomainError;
use std::collections::BTreeSet;

/// How many distinct time-of-day slots a nurse's assignments may span
/// over the planning horizon.
///
/// - `Fixed`: all assignments in one slot,
/// - `Mixed`: at most two distinct slots,
/// - `Rotating`: any slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WorkPolicy {
    Fixed,
    Mixed,
    Rotating,
}

impl WorkPolicy {
    pub const ALL: [WorkPolicy; 3] = [WorkPolicy::Fixed, WorkPolicy::Mixed, WorkPolicy::Rotating];

    /// Maximum number of distinct slots the policy allows.
    #[inline]
    pub const fn slot_allowance(self) -> usize {
        match self {
            WorkPolicy::Fixed => 1,
            WorkPolicy::Mixed => 2,
            WorkPolicy::Rotating => 3,
        }
    }

    /// Stable lowercase name used in files.
    pub const fn name(self) -> &'static str {
        match self {
            WorkPolicy::Fixed => "fixed",
            WorkPolicy::Mixed => "mixed",
            WorkPolicy::Rotating => "rotating",
        }
    }

    pub fn from_name(name: &str) -> Option<WorkPolicy> {
        match name {
            "fixed" => Some(WorkPolicy::Fixed),
            "mixed" => Some(WorkPolicy::Mixed),
            "rotating" => Some(WorkPolicy::Rotating),
            _ => None,
        }
    }
}

impl std::fmt::Display for WorkPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Scheduling limits in force over some day range (the whole horizon, or
/// one stage of it).
///
/// Minute bounds are carried as `f64` because per-stage defaults are
/// pro-rata shares of the horizon bounds and need not be whole minutes;
/// every consumer (model builders, evaluators, sampler masks) compares
/// integer worked minutes against these thresholds, so agreement is by
/// construction as long as all of them derive limits through
/// [`NurseProfile::limits_for_stage`].
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLimits {
    /// Lower bound on worked minutes while scheduled.
    pub min_minutes: f64,
    /// Upper bound on worked minutes while scheduled.
    pub max_minutes: f64,
    /// Required rest days per 7-day block.
    pub weekly_rest_days: u32,
    /// Longest allowed run of consecutive work days.
    pub max_consecutive_days: u32,
    /// Soft cap on weekend work days (excess is a graded violation).
    pub max_weekend_days: u32,
    /// Hard cap on the total number of graded soft violations.
    pub violation_cap: u32,
}

/// One nurse's contract and preferences.
#[derive(Debug, Clone, PartialEq)]
pub struct NurseProfile {
    /// Display name, unique within an instance.
    pub label: String,
    /// Slot-diversity policy.
    pub policy: WorkPolicy,
    /// Horizon-total lower bound on worked minutes (while scheduled).
    pub min_minutes: u32,
    /// Horizon-total upper bound on worked minutes.
    pub max_minutes: u32,
    /// Required rest days per week.
    pub weekly_rest_days: u32,
    /// Longest allowed run of consecutive work days.
    pub max_consecutive_days: u32,
    /// Soft cap on weekend work days over the horizon.
    pub max_weekend_days: u32,
    /// Hard cap on total graded soft violations.
    pub violation_cap: u32,
    /// Shifts the nurse may be assigned at all (catalog indexes).
    pub preferred: BTreeSet<usize>,
    /// Requested `(day, shift)` assignments; denying one to a scheduled
    /// nurse is penalized. Requests must lie within `preferred`.
    pub requests: BTreeSet<(usize, usize)>,
    /// Optional explicit per-stage limits; when absent, stage limits are
    /// derived pro rata from the horizon-level fields.
    pub stage_limits: Option<Vec<EffectiveLimits>>,
}

impl NurseProfile {
    /// Validate the profile against a catalog and horizon.
    pub fn validate(&self, catalog: &ShiftCatalog, horizon: &Horizon) -> Result<(), DomainError> {
        if self.weekly_rest_days > 7 {
            return Err(DomainError::RestBoundTooLarge {
                nurse: self.label.clone(),
                value: self.weekly_rest_days,
            });
        }
        if self.max_consecutive_days == 0 {
            return Err(DomainError::RunBoundZero {
                nurse: self.label.clone(),
            });
        }
        if self.min_minutes > self.max_minutes {
            return Err(DomainError::MinutesBoundsInverted {
                nurse: self.label.clone(),
                min: self.min_minutes,
                max: self.max_minutes,
            });
        }
        for &s in &self.preferred {
            if s >= catalog.len() {
                return Err(DomainError::UnknownPreferredShift {
                    nurse: self.label.clone(),
                    shift: s,
                });
            }
        }
        for &(day, shift) in &self.requests {
            if day >= horizon.days() {
                return Err(DomainError::RequestOutsideHorizon {
                    nurse: self.label.clone(),
                    day,
                });
            }
            if !self.preferred.contains(&shift) {
                return Err(DomainError::RequestOutsidePreferences {
                    nurse: self.label.clone(),
                    day,
                    shift,
                });
            }
        }
        if let Some(st) = &self.stage_limits {
            if st.len() != horizon.stages() {
                return Err(DomainError::StageLimitsLength {
                    nurse: self.label.clone(),
                    stages: horizon.stages(),
                    got: st.len(),
                });
            }
        }
        Ok(())
    }

    /// Limits in force over the whole horizon.
    pub fn horizon_limits(&self) -> EffectiveLimits {
        EffectiveLimits {
            min_minutes: f64::from(self.min_minutes),
            max_minutes: f64::from(self.max_minutes),
            weekly_rest_days: self.weekly_rest_days,
            max_consecutive_days: self.max_consecutive_days,
            max_weekend_days: self.max_weekend_days,
            violation_cap: self.violation_cap,
        }
    }

    /// Limits in force within stage `h`.
    ///
    /// Explicit `stage_limits` win when they match the horizon's stage
    /// count; checks that run on a flattened view of a staged horizon
    /// therefore fall through to the derived totals instead of wrongly
    /// applying one stage's share. The derived default splits the minute
    /// bounds pro rata by stage length, keeps the weekly, run and
    /// violation bounds unchanged (they are already stated per week or
    /// per occurrence), and pro-rates the weekend cap by the stage's
    /// share of weekend days (rounded up).
    pub fn limits_for_stage(&self, horizon: &Horizon, h: usize) -> EffectiveLimits {
        if let Some(st) = &self.stage_limits {
            if st.len() == horizon.stages() {
                return st[h].clone();
            }
        }
        let total_days = horizon.days() as f64;
        let stage_days = horizon.stage_len(h) as f64;
        let frac = stage_days / total_days;
        let horizon_weekends = Horizon::weekend_days_in(0..horizon.days()).count();
        let stage_weekends = Horizon::weekend_days_in(horizon.stage_days(h)).count();
        let weekend_cap = if horizon_weekends == 0 {
            self.max_weekend_days
        } else {
            let scaled = f64::from(self.max_weekend_days) * stage_weekends as f64
                / horizon_weekends as f64;
            scaled.ceil() as u32
        };
        EffectiveLimits {
            min_minutes: f64::from(self.min_minutes) * frac,
            max_minutes: f64::from(self.max_minutes) * frac,
            weekly_rest_days: self.weekly_rest_days,
            max_consecutive_days: self.max_consecutive_days,
            max_weekend_days: weekend_cap,
            violation_cap: self.violation_cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_profile(catalog: &ShiftCatalog) -> NurseProfile {
        NurseProfile {
            label: "n0".into(),
            policy: WorkPolicy::Rotating,
            min_minutes: 0,
            max_minutes: 40 * 60 * 4,
            weekly_rest_days: 1,
            max_consecutive_days: 5,
            max_weekend_days: 8,
            violation_cap: 4,
            preferred: (0..catalog.len()).collect(),
            requests: BTreeSet::new(),
            stage_limits: None,
        }
    }

    #[test]
    fn validates_requests_within_preferences() {
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::weekly_stages(&[1]).unwrap();
        let mut p = base_profile(&cat);
        p.preferred = [0usize].into_iter().collect();
        p.requests = [(2usize, 1usize)].into_iter().collect();
        assert!(matches!(
            p.validate(&cat, &hz),
            Err(DomainError::RequestOutsidePreferences { .. })
        ));
        p.requests = [(2usize, 0usize)].into_iter().collect();
        assert!(p.validate(&cat, &hz).is_ok());
    }

    #[test]
    fn stage_limits_split_pro_rata() {
        // 4 weeks, equal stages: each stage gets a quarter of the minute
        // budget and 2 of the 8 weekend days.
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::weekly_stages(&[1, 1, 1, 1]).unwrap();
        let p = base_profile(&cat);
        p.validate(&cat, &hz).unwrap();
        let l = p.limits_for_stage(&hz, 2);
        assert_eq!(l.max_minutes, f64::from(p.max_minutes) / 4.0);
        assert_eq!(l.min_minutes, 0.0);
        assert_eq!(l.max_weekend_days, 2);
        assert_eq!(l.weekly_rest_days, 1);
        assert_eq!(l.violation_cap, 4);
    }

    #[test]
    fn explicit_stage_limits_win() {
        let cat = ShiftCatalog::minimal();
        let hz = Horizon::weekly_stages(&[1, 1]).unwrap();
        let mut p = base_profile(&cat);
        let tight = EffectiveLimits {
            min_minutes: 0.0,
            max_minutes: 600.0,
            weekly_rest_days: 2,
            max_consecutive_days: 3,
            max_weekend_days: 1,
            violation_cap: 2,
        };
        p.stage_limits = Some(vec![tight.clone(), tight.clone()]);
        assert_eq!(p.limits_for_stage(&hz, 1), tight);
        // On a flattened view the explicit per-stage entries no longer
        // apply; the whole-horizon totals do.
        let flat = hz.flatten();
        assert_eq!(p.limits_for_stage(&flat, 0), p.horizon_limits());
        p.stage_limits = Some(vec![tight]);
        assert!(matches!(
            p.validate(&cat, &hz),
            Err(DomainError::StageLimitsLength { .. })
        ));
    }
}
