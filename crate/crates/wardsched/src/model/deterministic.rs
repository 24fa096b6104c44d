//! The one-shot roster problem as a constraint system.
//!
//! [`build_deterministic`] prices a single roster against the
//! instance's expected demand: staffing per scheduled nurse, coverage
//! slack both ways, denied requests of scheduled nurses, and the graded
//! soft-violation schedule, subject to every hard working rule over the
//! flattened horizon. The optimum is exactly the cheapest rule-abiding
//! roster — the brute-force searches certify that on toy instances.

use crate::domain::Roster;
use crate::instance::Instance;
use crate::linear::ConstraintSystem;
use crate::num::Scalar;

use super::emit::emit_base_block;
use super::vars::{Scope, VarKey, VarTable};
use super::Model;

/// Build the one-shot roster system for the instance's expected demand.
pub fn build_deterministic<T: Scalar>(inst: &Instance) -> Model<T> {
    let mut system = ConstraintSystem::new();
    let mut vars = VarTable::new();
    emit_base_block(&mut system, &mut vars, inst);
    Model { system, vars }
}

/// Read a solved point back into a roster: scheduling flags and
/// assignments from the binary columns, slacks recomputed minimally
/// against the expected demand.
pub fn extract_roster<T: Scalar>(inst: &Instance, model: &Model<T>, values: &[T]) -> Roster {
    let days = inst.horizon.days();
    let mut roster = Roster::empty(inst.nurses.len(), days);
    for (i, p) in inst.nurses.iter().enumerate() {
        let sched = values[model.vars.get(Scope::Base, VarKey::Scheduled { nurse: i }).0];
        roster.set_scheduled(i, sched.to_f64() > 0.5);
        for d in 0..days {
            for &s in &p.preferred {
                let key = VarKey::Assign {
                    nurse: i,
                    day: d,
                    shift: s,
                };
                if values[model.vars.get(Scope::Base, key).0].to_f64() > 0.5 {
                    roster.assign(i, d, s);
                }
            }
        }
    }
    roster.recompute_slacks(&inst.catalog, &inst.demand);
    roster
}
