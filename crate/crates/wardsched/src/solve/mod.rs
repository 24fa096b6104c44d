//! Solving constraint systems.
//!
//! The built-in path is [`branch::solve_milp`]: best-first branch and
//! bound over a bounded-variable two-phase simplex ([`simplex`]), fully
//! deterministic, adequate for study-scale systems. For larger runs an
//! external engine can be bridged through LP files ([`lp_format`]),
//! solution files ([`sol_file`]) and a subprocess adapter
//! ([`external`]); answers coming back over that bridge are re-checked
//! against the system before they are accepted.

pub mod branch;
pub mod external;
pub mod lp_format;
pub mod simplex;
pub mod sol_file;

pub use branch::{solve_milp, MilpSolution, SolveLimits, SolveStatus};
pub use external::{solve_with_command, ExternalError};

use crate::num::Scalar;

/// Outcome of a pure LP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of relaxing and solving a system as a pure LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpResult<T> {
    pub status: LpStatus,
    /// Meaningful only when `status` is [`LpStatus::Optimal`].
    pub objective: T,
    /// One value per system variable; empty unless optimal.
    pub values: Vec<T>,
}

impl<T: Scalar> LpResult<T> {
    pub(crate) fn infeasible() -> Self {
        LpResult {
            status: LpStatus::Infeasible,
            objective: T::zero(),
            values: Vec::new(),
        }
    }

    pub(crate) fn unbounded() -> Self {
        LpResult {
            status: LpStatus::Unbounded,
            objective: T::zero(),
            values: Vec::new(),
        }
    }
}
