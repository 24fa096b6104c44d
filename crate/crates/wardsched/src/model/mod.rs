//! Mixed-integer formulations of the rostering problems.
//!
//! Three builders share one column registry ([`vars::VarTable`]) and
//! one emission core. [`build_deterministic`] prices a single roster
//! against the expected demand. [`build_staged`] adds a re-planning
//! block per scenario-tree node around that same baseline — the
//! extensive form of the staged problem, whose per-stage blocks are
//! independent given the baseline and the staffing flows.
//! [`build_shared_staffing`] is the restriction that commits staffing
//! once per stage before any demand is revealed, with every complete
//! scenario re-planning its path independently.
//!
//! Extraction routines read solved points back into domain values;
//! the `*_point` bridges embed domain values as solver points. The
//! tests lean on travelling both directions: a point built from a
//! domain solution must be feasible exactly when the domain checkers
//! accept the solution, and must price identically.

mod deterministic;
mod emit;
mod point;
mod staged;
pub mod vars;

pub use deterministic::{build_deterministic, extract_roster};
pub use point::{plan_slot_union, roster_point, staged_point};
pub use staged::{
    build_shared_staffing, build_staged, extract_staged, fix_baseline, fix_staffing_flows,
    stage_staffing, StageStaffing,
};

use crate::linear::ConstraintSystem;
use crate::num::Scalar;
use vars::VarTable;

/// A constraint system together with the registry that maps structured
/// column keys to its variables.
#[derive(Debug, Clone)]
pub struct Model<T: Scalar> {
    pub system: ConstraintSystem<T>,
    pub vars: VarTable,
}
