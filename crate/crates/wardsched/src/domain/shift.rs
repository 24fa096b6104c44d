//! Shift slots and the ward's shift catalog.

use super::DomainError;

/// Coarse time-of-day bucket a shift belongs to.
///
/// Demand is stated per slot and day; work-policy rules count how many
/// distinct slots a nurse's shifts span. "Night" additionally drives the
/// rest rules around night work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Am,
    Pm,
    Night,
}

impl Slot {
    /// All slots, in display order.
    pub const ALL: [Slot; 3] = [Slot::Am, Slot::Pm, Slot::Night];

    /// Dense index in `0..3`, matching [`Slot::ALL`].
    #[inline]
    pub const fn index(self) -> usize {
        match self {
            Slot::Am => 0,
            Slot::Pm => 1,
            Slot::Night => 2,
        }
    }

    /// Inverse of [`Slot::index`].
    #[inline]
    pub const fn from_index(i: usize) -> Option<Slot> {
        match i {
            0 => Some(Slot::Am),
            1 => Some(Slot::Pm),
            2 => Some(Slot::Night),
            _ => None,
        }
    }

    /// Short display code: `AM`, `PM` or `N`.
    pub const fn code(self) -> &'static str {
        match self {
            Slot::Am => "AM",
            Slot::Pm => "PM",
            Slot::Night => "N",
        }
    }

    /// Parse a display code produced by [`Slot::code`].
    pub fn from_code(code: &str) -> Option<Slot> {
        match code {
            "AM" | "am" => Some(Slot::Am),
            "PM" | "pm" => Some(Slot::Pm),
            "N" | "n" => Some(Slot::Night),
            _ => None,
        }
    }
}

impl std::fmt::Display for Slot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// One concrete shift type offered by the ward.
///
/// `start_minute`/`end_minute` are minutes from midnight on a 24h grid;
/// a shift whose end is at or before its start wraps past midnight
/// (typical for night shifts). `minutes` is the *effective* worked
/// duration used by the hour rules and may differ from the wall-clock
/// span when unpaid breaks are excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shift {
    pub label: String,
    pub slot: Slot,
    pub start_minute: u32,
    pub end_minute: u32,
    pub minutes: u32,
}

impl Shift {
    /// Effective duration in hours.
    #[inline]
    pub fn hours(&self) -> f64 {
        f64::from(self.minutes) / 60.0
    }
}

/// The set of shift types assignments draw from.
///
/// Shift indexes (positions in the catalog) are the identifiers used
/// throughout the crate; labels are for people and files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftCatalog {
    shifts: Vec<Shift>,
}

impl ShiftCatalog {
    /// Validate and build a catalog: nonempty, unique labels, positive
    /// effective durations, on-grid start/end minutes.
    pub fn new(shifts: Vec<Shift>) -> Result<Self, DomainError> {
        if shifts.is_empty() {
            return Err(DomainError::EmptyCatalog);
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &shifts {
            if s.minutes == 0 {
                return Err(DomainError::EmptyShift {
                    label: s.label.clone(),
                });
            }
            if s.start_minute >= 24 * 60 || s.end_minute >= 24 * 60 {
                return Err(DomainError::OffGridShift {
                    label: s.label.clone(),
                });
            }
            if !seen.insert(s.label.clone()) {
                return Err(DomainError::DuplicateShiftLabel {
                    label: s.label.clone(),
                });
            }
        }
        Ok(Self { shifts })
    }

    /// The standard ward template: five morning shift types, six evening
    /// shift types and one night shift, durations between 6 and 12 hours.
    ///
    /// | label | slot | starts | effective |
    /// |-------|------|--------|-----------|
    /// | A1    | AM   | 06:00  | 8h        |
    /// | A2    | AM   | 07:00  | 8h        |
    /// | A3    | AM   | 07:00  | 12h       |
    /// | A4    | AM   | 08:00  | 6h        |
    /// | A5    | AM   | 06:00  | 10h       |
    /// | P1    | PM   | 12:00  | 8h        |
    /// | P2    | PM   | 14:00  | 8h        |
    /// | P3    | PM   | 14:00  | 6h        |
    /// | P4    | PM   | 15:00  | 8h        |
    /// | P5    | PM   | 12:00  | 10h       |
    /// | P6    | PM   | 16:00  | 6h        |
    /// | N1    | N    | 21:00  | 10h       |
    pub fn standard() -> Self {
        fn shift(label: &str, slot: Slot, start_h: u32, dur_h: u32) -> Shift {
            let start = start_h * 60;
            let minutes = dur_h * 60;
            Shift {
                label: label.to_owned(),
                slot,
                start_minute: start,
                end_minute: (start + minutes) % (24 * 60),
                minutes,
            }
        }
        Self::new(vec![
            shift("A1", Slot::Am, 6, 8),
            shift("A2", Slot::Am, 7, 8),
            shift("A3", Slot::Am, 7, 12),
            shift("A4", Slot::Am, 8, 6),
            shift("A5", Slot::Am, 6, 10),
            shift("P1", Slot::Pm, 12, 8),
            shift("P2", Slot::Pm, 14, 8),
            shift("P3", Slot::Pm, 14, 6),
            shift("P4", Slot::Pm, 15, 8),
            shift("P5", Slot::Pm, 12, 10),
            shift("P6", Slot::Pm, 16, 6),
            shift("N1", Slot::Night, 21, 10),
        ])
        .expect("standard catalog is valid")
    }

    /// A minimal catalog with exactly one 8-hour shift per slot
    /// (`A`, `P`, `N`), convenient for small studies and tests.
    pub fn minimal() -> Self {
        Self::new(vec![
            Shift {
                label: "A".into(),
                slot: Slot::Am,
                start_minute: 7 * 60,
                end_minute: 15 * 60,
                minutes: 8 * 60,
            },
            Shift {
                label: "P".into(),
                slot: Slot::Pm,
                start_minute: 14 * 60,
                end_minute: 22 * 60,
                minutes: 8 * 60,
            },
            Shift {
                label: "N".into(),
                slot: Slot::Night,
                start_minute: 21 * 60,
                end_minute: 5 * 60,
                minutes: 8 * 60,
            },
        ])
        .expect("minimal catalog is valid")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    #[inline]
    pub fn get(&self, idx: usize) -> &Shift {
        &self.shifts[idx]
    }

    #[inline]
    pub fn slot_of(&self, idx: usize) -> Slot {
        self.shifts[idx].slot
    }

    #[inline]
    pub fn minutes_of(&self, idx: usize) -> u32 {
        self.shifts[idx].minutes
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Shift)> {
        self.shifts.iter().enumerate()
    }

    /// Indexes of all shifts in the given slot, in catalog order.
    pub fn in_slot(&self, slot: Slot) -> impl Iterator<Item = usize> + '_ {
        self.shifts
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.slot == slot)
            .map(|(i, _)| i)
    }

    /// Look a shift up by its label.
    pub fn by_label(&self, label: &str) -> Option<usize> {
        self.shifts.iter().position(|s| s.label == label)
    }
}
