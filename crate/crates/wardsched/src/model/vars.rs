//! Structured variable registry for the roster models.
//!
//! The builders create hundreds of columns; tests, extraction and
//! pinning code need to find them again by *meaning*, not by raw column
//! index. Every column is therefore registered under a `(Scope, VarKey)`
//! pair: the scope places it in the shared stage-0 block, one scenario
//! node's block, one per-stage aggregate block, or one leaf scenario's
//! re-planning block; the key says what the column means there. The
//! registry also derives the unique LP-friendly column name from the
//! key, so a model's text export stays readable.

use crate::domain::Slot;
use crate::linear::{ConstraintSystem, VarId, VarKind};
use crate::num::Scalar;
use std::collections::BTreeMap;

/// Which block of a model a column (or row) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    /// The stage-0 block: the roster planned up front, shared by every
    /// scenario.
    Base,
    /// The aggregate staffing block of one horizon stage, used when
    /// staffing is committed per stage regardless of which scenario
    /// unfolds.
    Stage(usize),
    /// The block of one scenario-tree node: the re-planning done once
    /// that node's demand is revealed.
    Node(usize),
    /// The re-planning block one leaf scenario carries for one stage,
    /// used when every complete scenario re-plans its whole path
    /// independently.
    Leaf { leaf: usize, stage: usize },
}

impl Scope {
    /// Name prefix that keeps identically-keyed columns from different
    /// blocks distinct.
    pub(crate) fn prefix(self) -> String {
        match self {
            Scope::Base => String::new(),
            Scope::Stage(h) => format!("h{h}_"),
            Scope::Node(w) => format!("w{w}_"),
            Scope::Leaf { leaf, stage } => format!("l{leaf}s{stage}_"),
        }
    }
}

/// What a column means within its scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    /// The nurse is placed on this block's roster.
    Scheduled { nurse: usize },
    /// The nurse works this shift on this day.
    Assign { nurse: usize, day: usize, shift: usize },
    /// The nurse's assignments may touch this time-of-day slot. Always
    /// lives in the base block: the work policy binds across the whole
    /// model, recourse copies included.
    SlotUsed { nurse: usize, slot: Slot },
    /// Uncovered demand in one slot on one day.
    Under { slot: Slot, day: usize },
    /// Surplus supply in one slot on one day.
    Over { slot: Slot, day: usize },
    /// Weekend days worked beyond the nurse's soft cap.
    WeekendExcess { nurse: usize },
    /// Morning work right after a day off.
    RestThenMorning { nurse: usize, day: usize },
    /// Night shifts on both days of a weekend; keyed by the Saturday.
    DoubleNight { nurse: usize, day: usize },
    /// A work day with rest on both sides.
    IsolatedWork { nurse: usize, day: usize },
    /// One-hot grade of the nurse's total soft-pattern count.
    ViolationLevel { nurse: usize, level: u32 },
    /// The nurse is scheduled *and* works the requested cell, so no
    /// denial charge applies.
    RequestGranted { nurse: usize, day: usize, shift: usize },
    /// Staff head count after this block's boundary flows settle.
    StaffLevel,
    /// Staff called in at this block's stage boundary.
    StaffAdded,
    /// Staff released at this block's stage boundary.
    StaffReleased,
    /// This assignment cell differs from the stage-0 plan.
    AssignDelta { nurse: usize, day: usize, shift: usize },
}

/// Short lowercase tag for slot-indexed column names.
pub(crate) fn slot_tag(slot: Slot) -> &'static str {
    match slot {
        Slot::Am => "am",
        Slot::Pm => "pm",
        Slot::Night => "n",
    }
}

/// The unique column name a key gets within a scope.
pub fn column_name(scope: Scope, key: VarKey) -> String {
    let stem = match key {
        VarKey::Scheduled { nurse } => format!("sched_n{nurse}"),
        VarKey::Assign { nurse, day, shift } => format!("x_n{nurse}_d{day}_s{shift}"),
        VarKey::SlotUsed { nurse, slot } => format!("y_n{nurse}_{}", slot_tag(slot)),
        VarKey::Under { slot, day } => format!("under_{}_d{day}", slot_tag(slot)),
        VarKey::Over { slot, day } => format!("over_{}_d{day}", slot_tag(slot)),
        VarKey::WeekendExcess { nurse } => format!("wkx_n{nurse}"),
        VarKey::RestThenMorning { nurse, day } => format!("rtm_n{nurse}_d{day}"),
        VarKey::DoubleNight { nurse, day } => format!("dbln_n{nurse}_d{day}"),
        VarKey::IsolatedWork { nurse, day } => format!("iso_n{nurse}_d{day}"),
        VarKey::ViolationLevel { nurse, level } => format!("viol_n{nurse}_m{level}"),
        VarKey::RequestGranted { nurse, day, shift } => {
            format!("grant_n{nurse}_d{day}_s{shift}")
        }
        VarKey::StaffLevel => "staff".into(),
        VarKey::StaffAdded => "hire".into(),
        VarKey::StaffReleased => "release".into(),
        VarKey::AssignDelta { nurse, day, shift } => format!("adj_n{nurse}_d{day}_s{shift}"),
    };
    format!("{}{stem}", scope.prefix())
}

/// Registry mapping `(Scope, VarKey)` pairs to system columns.
#[derive(Debug, Clone, Default)]
pub struct VarTable {
    map: BTreeMap<(Scope, VarKey), VarId>,
}

impl VarTable {
    pub fn new() -> Self {
        VarTable::default()
    }

    /// Register a fresh column under `scope`/`key` with explicit kind
    /// and bounds.
    ///
    /// # Panics
    /// When the key is already taken — every meaning maps to exactly one
    /// column.
    pub fn add<T: Scalar>(
        &mut self,
        sys: &mut ConstraintSystem<T>,
        scope: Scope,
        key: VarKey,
        kind: VarKind,
        lower: T,
        upper: T,
    ) -> VarId {
        assert!(
            !self.map.contains_key(&(scope, key)),
            "column `{}` registered twice",
            column_name(scope, key)
        );
        let id = sys.add_var(column_name(scope, key), kind, lower, upper);
        self.map.insert((scope, key), id);
        id
    }

    /// Register a fresh `{0, 1}` column.
    pub fn add_binary<T: Scalar>(
        &mut self,
        sys: &mut ConstraintSystem<T>,
        scope: Scope,
        key: VarKey,
    ) -> VarId {
        self.add(sys, scope, key, VarKind::Binary, T::zero(), T::one())
    }

    /// The column registered under `scope`/`key`.
    ///
    /// # Panics
    /// When no such column exists; looking up a column the builder never
    /// created is a caller bug.
    pub fn get(&self, scope: Scope, key: VarKey) -> VarId {
        self.try_get(scope, key)
            .unwrap_or_else(|| panic!("no column `{}`", column_name(scope, key)))
    }

    /// The column registered under `scope`/`key`, if any.
    pub fn try_get(&self, scope: Scope, key: VarKey) -> Option<VarId> {
        self.map.get(&(scope, key)).copied()
    }

    /// All registered columns in deterministic key order.
    pub fn iter(&self) -> impl Iterator<Item = (Scope, VarKey, VarId)> + '_ {
        self.map.iter().map(|(&(scope, key), &id)| (scope, key, id))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registration_round_trips_and_names_stay_unique() {
        let mut sys: ConstraintSystem<f64> = ConstraintSystem::new();
        let mut table = VarTable::new();
        let keys = [
            (Scope::Base, VarKey::Scheduled { nurse: 0 }),
            (
                Scope::Base,
                VarKey::Assign {
                    nurse: 0,
                    day: 1,
                    shift: 2,
                },
            ),
            (
                Scope::Node(3),
                VarKey::Assign {
                    nurse: 0,
                    day: 1,
                    shift: 2,
                },
            ),
            (Scope::Node(3), VarKey::StaffAdded),
            (Scope::Stage(1), VarKey::StaffAdded),
            (
                Scope::Leaf { leaf: 2, stage: 1 },
                VarKey::Under {
                    slot: Slot::Pm,
                    day: 4,
                },
            ),
        ];
        for &(scope, key) in &keys {
            let id = table.add_binary(&mut sys, scope, key);
            assert_eq!(table.get(scope, key), id);
            assert_eq!(sys.var(id).name, column_name(scope, key));
        }
        assert_eq!(table.len(), keys.len());
        assert_eq!(sys.num_vars(), keys.len());
        // Same key under different scopes must come back as different
        // columns with different names.
        assert_ne!(
            table.get(Scope::Node(3), VarKey::StaffAdded),
            table.get(Scope::Stage(1), VarKey::StaffAdded),
        );
        assert_eq!(
            column_name(Scope::Leaf { leaf: 2, stage: 1 }, VarKey::StaffLevel),
            "l2s1_staff"
        );
    }

    #[test]
    fn lookups_for_unregistered_keys_fail_loudly() {
        let mut sys: ConstraintSystem<f64> = ConstraintSystem::new();
        let mut table = VarTable::new();
        table.add_binary(&mut sys, Scope::Base, VarKey::Scheduled { nurse: 0 });
        assert!(table
            .try_get(Scope::Base, VarKey::Scheduled { nurse: 1 })
            .is_none());
        let result = std::panic::catch_unwind(move || {
            table.get(Scope::Node(0), VarKey::StaffLevel);
        });
        assert!(result.is_err());
    }

    #[test]
    #[should_panic(expected = "registered twice")]
    fn double_registration_panics() {
        let mut sys: ConstraintSystem<f64> = ConstraintSystem::new();
        let mut table = VarTable::new();
        table.add_binary(&mut sys, Scope::Base, VarKey::StaffLevel);
        table.add_binary(&mut sys, Scope::Base, VarKey::StaffLevel);
    }
}
