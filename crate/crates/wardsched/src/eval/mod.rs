//! Pricing and checking of scheduling decisions.
//!
//! The optimization layers produce decision tuples — a roster, or a
//! baseline roster plus per-node recourse plans over a scenario tree.
//! This module prices those tuples with plain arithmetic and checks them
//! against the working rules, independently of how they were produced.
//! Model builders are tested by comparing their reported objectives
//! against these evaluators on the extracted solutions, so the two
//! codepaths keep each other honest.

mod cost;
mod solution;

pub use cost::{multistage_cost, path_cost, recourse_cost, roster_cost, CostBreakdown};
pub(crate) use cost::{changed_cells, slack_in_range, violation_charge};
pub use solution::{
    complete_canonically, multistage_rule_violations, multistage_structural_errors,
    settle_staff_flows, MultistageSolution, NodePlan,
};
