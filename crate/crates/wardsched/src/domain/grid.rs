//! Dense per-slot, per-day grids (demand, supply, slacks, gaps).

use super::shift::Slot;

/// A dense `slot x day` grid of copyable cells.
///
/// Used with `u32` for demand and coverage slacks and with `i64` for
/// signed supply-demand gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotGrid<T> {
    days: usize,
    data: [Vec<T>; 3],
}

impl<T: Copy + Default> SlotGrid<T> {
    /// A grid of `T::default()` cells.
    pub fn zeros(days: usize) -> Self {
        Self {
            days,
            data: std::array::from_fn(|_| vec![T::default(); days]),
        }
    }
}

impl<T: Copy> SlotGrid<T> {
    /// A grid whose every day repeats the same per-slot vector
    /// (`per_slot` ordered as [`Slot::ALL`]).
    pub fn replicate(days: usize, per_slot: [T; 3]) -> Self {
        Self {
            days,
            data: std::array::from_fn(|s| vec![per_slot[s]; days]),
        }
    }

    /// Build a grid from a function over `(slot, day)`.
    pub fn from_fn(days: usize, mut f: impl FnMut(Slot, usize) -> T) -> Self {
        Self {
            days,
            data: std::array::from_fn(|s| {
                let slot = Slot::from_index(s).unwrap();
                (0..days).map(|d| f(slot, d)).collect()
            }),
        }
    }

    #[inline]
    pub fn days(&self) -> usize {
        self.days
    }

    #[inline]
    pub fn get(&self, slot: Slot, day: usize) -> T {
        self.data[slot.index()][day]
    }

    #[inline]
    pub fn set(&mut self, slot: Slot, day: usize, v: T) {
        self.data[slot.index()][day] = v;
    }

    /// Iterate all cells as `(slot, day, value)` in slot-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Slot, usize, T)> + '_ {
        Slot::ALL.into_iter().flat_map(move |slot| {
            (0..self.days).map(move |d| (slot, d, self.get(slot, d)))
        })
    }
}

impl SlotGrid<u32> {
    /// Sum of all cells.
    pub fn total(&self) -> u64 {
        self.iter().map(|(_, _, v)| u64::from(v)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replicate_and_access() {
        let g = SlotGrid::replicate(3, [5u32, 6, 4]);
        assert_eq!(g.get(Slot::Am, 0), 5);
        assert_eq!(g.get(Slot::Pm, 2), 6);
        assert_eq!(g.get(Slot::Night, 1), 4);
        assert_eq!(g.total(), (5 + 6 + 4) * 3);
    }

    #[test]
    fn from_fn_matches_layout() {
        let g = SlotGrid::from_fn(2, |slot, day| (slot.index() * 10 + day) as i64);
        assert_eq!(g.get(Slot::Night, 1), 21);
        assert_eq!(g.iter().count(), 6);
    }
}
