//! # wardsched
//!
//! Ward staffing and scheduling under demand uncertainty.
//!
//! The crate provides, end to end:
//!
//! - a **domain model** for ward rosters: shift catalogs, nurse work
//!   policies, hard scheduling rules and graded soft rules
//!   ([`domain`]),
//! - **demand scenario trees** for staged planning horizons
//!   ([`scenario`]) and a seeded **instance generator** ([`generate`]),
//! - exact **integer-programming formulations** of the single-roster
//!   problem and of its staged recourse extension ([`model`]), built on a
//!   small constraint-algebra layer ([`linear`]),
//! - a deterministic **reference solver** (best-first branch and bound over
//!   a bounded-variable simplex) plus an LP-file bridge to external engines
//!   ([`solve`]),
//! - **cost evaluation and study reports**: recourse replay, planning-value
//!   comparisons, coverage gaps, request flexibility, reward distributions
//!   ([`eval`]),
//! - a trainable **generative scheduler** that samples whole rosters
//!   action by action and is fitted by matching terminal log-flows over
//!   sampled trajectories ([`gns`]),
//! - **exhaustive reference computations** used to certify the optimizing
//!   paths at toy scale ([`exhaustive`]).
//!
//! ## Numeric types
//!
//! Core arithmetic (constraint algebra, the simplex, cost evaluation,
//! policy math) is generic over the [`num::Scalar`] trait so it can be
//! instantiated at `f32` or `f64`. The crate-level aliases fix the
//! precision used by the shipped tools:
//!
//! - [`Cost`] — objective and cost arithmetic (`f64`),
//! - [`System`] — the concrete constraint-system type solved by the
//!   reference solver.
//!
//! Exactly integral quantities (shift minutes, demand counts, violation
//! counts) are kept in integer fields throughout and only widened to
//! [`Cost`] where they enter an objective.

pub mod domain;
pub mod eval;
pub mod exhaustive;
pub mod generate;
pub mod instance;
pub mod linear;
pub mod model;
pub mod num;
pub mod scenario;
pub mod solve;

/// Scalar used for all shipped cost and objective arithmetic.
pub type Cost = f64;

/// Concrete constraint system solved by the shipped tools.
pub type System = linear::ConstraintSystem<Cost>;

pub use instance::Instance;
