//! Concrete rosters: who is scheduled, which shifts they work, and the
//! coverage slack that reconciles supply with demand.

use super::grid::SlotGrid;
use super::shift::{ShiftCatalog, Slot};
use std::collections::BTreeSet;
use std::ops::Range;

/// A (possibly partial) roster over `nurses x days`.
///
/// The structure deliberately allows states that break scheduling rules —
/// several shifts in one day, an assignment for an unscheduled nurse —
/// so that rule checkers can report on arbitrary candidate solutions.
/// Within a day the shift list is kept sorted and duplicate-free.
///
/// `under` / `over` are the per-slot-per-day coverage slacks. They are
/// data, not derived values: optimization models carry them as decision
/// variables and the checker verifies `supply + under - over = demand`.
/// [`Roster::recompute_slacks`] fills in the canonical minimal pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster {
    scheduled: Vec<bool>,
    cells: Vec<Vec<Vec<usize>>>,
    under: SlotGrid<u32>,
    over: SlotGrid<u32>,
}

impl Roster {
    /// Empty roster: nobody scheduled, nothing assigned, zero slacks.
    pub fn empty(nurses: usize, days: usize) -> Roster {
        Roster {
            scheduled: vec![false; nurses],
            cells: vec![vec![Vec::new(); days]; nurses],
            under: SlotGrid::zeros(days),
            over: SlotGrid::zeros(days),
        }
    }

    /// Build a roster from `(nurse, day, shift)` triples, scheduling
    /// exactly the nurses that received at least one assignment.
    /// Slacks are left at zero; call [`Roster::recompute_slacks`] after.
    pub fn from_assignments(
        nurses: usize,
        days: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Roster {
        let mut r = Roster::empty(nurses, days);
        for (i, d, s) in triples {
            r.assign(i, d, s);
        }
        for i in 0..nurses {
            let works = r.cells[i].iter().any(|day| !day.is_empty());
            r.scheduled[i] = works;
        }
        r
    }

    #[inline]
    pub fn nurses(&self) -> usize {
        self.scheduled.len()
    }

    #[inline]
    pub fn days(&self) -> usize {
        self.under.days()
    }

    #[inline]
    pub fn is_scheduled(&self, nurse: usize) -> bool {
        self.scheduled[nurse]
    }

    pub fn set_scheduled(&mut self, nurse: usize, on: bool) {
        self.scheduled[nurse] = on;
    }

    /// Number of scheduled nurses.
    pub fn scheduled_count(&self) -> usize {
        self.scheduled.iter().filter(|&&b| b).count()
    }

    /// Add one assignment (idempotent).
    pub fn assign(&mut self, nurse: usize, day: usize, shift: usize) {
        let cell = &mut self.cells[nurse][day];
        if let Err(pos) = cell.binary_search(&shift) {
            cell.insert(pos, shift);
        }
    }

    /// Remove one assignment if present.
    pub fn clear(&mut self, nurse: usize, day: usize, shift: usize) {
        let cell = &mut self.cells[nurse][day];
        if let Ok(pos) = cell.binary_search(&shift) {
            cell.remove(pos);
        }
    }

    /// Shifts assigned to a nurse on a day, sorted ascending.
    #[inline]
    pub fn shifts_at(&self, nurse: usize, day: usize) -> &[usize] {
        &self.cells[nurse][day]
    }

    /// Whether the nurse works at all on the day.
    #[inline]
    pub fn works(&self, nurse: usize, day: usize) -> bool {
        !self.cells[nurse][day].is_empty()
    }

    /// All assignments as `(nurse, day, shift)`, nurse-major then
    /// day-major then shift-ascending.
    pub fn assignments(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.cells.iter().enumerate().flat_map(|(i, days)| {
            days.iter()
                .enumerate()
                .flat_map(move |(d, cell)| cell.iter().map(move |&s| (i, d, s)))
        })
    }

    /// Count of assignments landing in each `(slot, day)` cell.
    pub fn supply(&self, catalog: &ShiftCatalog) -> SlotGrid<u32> {
        let mut grid = SlotGrid::zeros(self.days());
        for (_, d, s) in self.assignments() {
            let slot = catalog.slot_of(s);
            grid.set(slot, d, grid.get(slot, d) + 1);
        }
        grid
    }

    /// Worked minutes of one nurse over a day range.
    pub fn minutes_in_range(&self, catalog: &ShiftCatalog, nurse: usize, days: Range<usize>) -> u64 {
        days.flat_map(|d| self.cells[nurse][d].iter())
            .map(|&s| u64::from(catalog.minutes_of(s)))
            .sum()
    }

    /// Distinct time-of-day slots a nurse's assignments span in a range.
    pub fn slots_used_in(
        &self,
        catalog: &ShiftCatalog,
        nurse: usize,
        days: Range<usize>,
    ) -> BTreeSet<Slot> {
        days.flat_map(|d| self.cells[nurse][d].iter())
            .map(|&s| catalog.slot_of(s))
            .collect()
    }

    /// Distinct slots over the whole horizon.
    pub fn slots_used(&self, catalog: &ShiftCatalog, nurse: usize) -> BTreeSet<Slot> {
        self.slots_used_in(catalog, nurse, 0..self.days())
    }

    #[inline]
    pub fn under(&self) -> &SlotGrid<u32> {
        &self.under
    }

    #[inline]
    pub fn over(&self) -> &SlotGrid<u32> {
        &self.over
    }

    /// Install explicit slack grids (e.g. extracted from a solver run).
    ///
    /// # Panics
    /// If either grid's day count differs from the roster's.
    pub fn set_slacks(&mut self, under: SlotGrid<u32>, over: SlotGrid<u32>) {
        assert_eq!(under.days(), self.days());
        assert_eq!(over.days(), self.days());
        self.under = under;
        self.over = over;
    }

    /// Set the canonical minimal slacks for the given demand:
    /// `under = max(0, demand - supply)`, `over = max(0, supply - demand)`.
    pub fn recompute_slacks(&mut self, catalog: &ShiftCatalog, demand: &SlotGrid<u32>) {
        assert_eq!(demand.days(), self.days());
        let supply = self.supply(catalog);
        for slot in Slot::ALL {
            for d in 0..self.days() {
                let have = supply.get(slot, d);
                let need = demand.get(slot, d);
                self.under.set(slot, d, need.saturating_sub(have));
                self.over.set(slot, d, have.saturating_sub(need));
            }
        }
    }
}
