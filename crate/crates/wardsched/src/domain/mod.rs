//! Ward-domain model: shifts, nurses, horizons, demand, rosters, rules.
//!
//! The module is deliberately free of solver and serialization concerns:
//! it defines the vocabulary (what a shift, a roster, a rule violation
//! *is*) and the pure checks over it. Aggregation into a loadable problem
//! instance lives in [`crate::instance`]; optimization models are built
//! from these types in [`crate::model`].
//!
//! ## Calendar conventions
//!
//! Day `0` of every planning horizon is a **Monday**; Saturdays and
//! Sundays are the days with index `5` and `6` modulo `7`. Weeks are
//! consecutive 7-day blocks from day `0` (the last block may be shorter
//! on study-scale horizons). All durations are carried in whole minutes.

mod costs;
mod grid;
mod horizon;
mod profile;
mod roster;
mod rules;
mod shift;

pub use costs::CostParams;
pub use grid::SlotGrid;
pub use horizon::Horizon;
pub use profile::{EffectiveLimits, NurseProfile, WorkPolicy};
pub use roster::Roster;
pub use rules::{
    hard_violations, hard_violations_in_stage, soft_counts, soft_counts_in_range,
    structural_errors, HardViolation, RuleCode, SoftCounts,
};
pub use shift::{Shift, ShiftCatalog, Slot};

use thiserror::Error;

/// Errors raised while constructing or combining domain values.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("shift `{label}`: effective duration must be positive")]
    EmptyShift { label: String },
    #[error("shift `{label}`: start/end minutes must lie on a 24h grid (< 1440)")]
    OffGridShift { label: String },
    #[error("duplicate shift label `{label}` in catalog")]
    DuplicateShiftLabel { label: String },
    #[error("catalog is empty")]
    EmptyCatalog,
    #[error("horizon must contain at least one day")]
    EmptyHorizon,
    #[error("stage lengths {lens:?} do not partition a horizon of {days} days")]
    BadStagePartition { days: usize, lens: Vec<usize> },
    #[error("stage lengths {lens:?} are not unions of whole calendar weeks")]
    StageNotWholeWeeks { lens: Vec<usize> },
    #[error("nurse `{nurse}`: weekly rest bound {value} exceeds 7 days")]
    RestBoundTooLarge { nurse: String, value: u32 },
    #[error("nurse `{nurse}`: longest-run bound must be at least 1")]
    RunBoundZero { nurse: String },
    #[error("nurse `{nurse}`: minimum minutes {min} exceed maximum minutes {max}")]
    MinutesBoundsInverted { nurse: String, min: u32, max: u32 },
    #[error("nurse `{nurse}`: preferred shift index {shift} is outside the catalog")]
    UnknownPreferredShift { nurse: String, shift: usize },
    #[error(
        "nurse `{nurse}`: requested shift {shift} on day {day} is not among the preferred shifts"
    )]
    RequestOutsidePreferences {
        nurse: String,
        day: usize,
        shift: usize,
    },
    #[error("nurse `{nurse}`: request on day {day} is outside the horizon")]
    RequestOutsideHorizon { nurse: String, day: usize },
    #[error("nurse `{nurse}`: expected one stage-limit entry per stage ({stages}), got {got}")]
    StageLimitsLength {
        nurse: String,
        stages: usize,
        got: usize,
    },
    #[error("cost parameter `{name}` must be nonnegative and finite")]
    BadCost { name: &'static str },
    #[error("graded violation prices must be nondecreasing")]
    ViolationPricesDecreasing,
    #[error("violation price schedule has {have} levels but a nurse allows up to {need}")]
    ViolationPricesTooShort { have: usize, need: usize },
}
