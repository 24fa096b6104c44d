//! Planning horizons: days, weeks, and the stage partition.

use super::DomainError;
use std::ops::Range;

/// A planning horizon of consecutive days, partitioned into stages.
///
/// Day `0` is a Monday; weekend days are those with `day % 7` in `{5, 6}`.
/// Weeks are the consecutive 7-day blocks from day `0` (the final block
/// may be shorter than 7 days on study-scale horizons).
///
/// Stages are the contiguous blocks after which adjusted demand becomes
/// known and the schedule may be revised. Production horizons use
/// [`Horizon::weekly_stages`], which requires every stage to consist of
/// whole weeks; [`Horizon::with_stage_lengths`] admits arbitrary
/// contiguous partitions so that exhaustive reference computations stay
/// tractable on tiny horizons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Horizon {
    days: usize,
    stage_len: Vec<usize>,
}

impl Horizon {
    /// A horizon with a single stage spanning all days.
    pub fn single_stage(days: usize) -> Result<Self, DomainError> {
        Self::with_stage_lengths(days, &[days])
    }

    /// The same days as one single stage. One-shot planning applies the
    /// sequence rules across the whole horizon even when the staged
    /// models cut the same days into recourse stages.
    pub fn flatten(&self) -> Horizon {
        Horizon {
            days: self.days,
            stage_len: vec![self.days],
        }
    }

    /// A horizon whose `h`-th stage spans `weeks_per_stage[h]` whole weeks.
    pub fn weekly_stages(weeks_per_stage: &[usize]) -> Result<Self, DomainError> {
        if weeks_per_stage.is_empty() || weeks_per_stage.contains(&0) {
            return Err(DomainError::StageNotWholeWeeks {
                lens: weeks_per_stage.iter().map(|w| w * 7).collect(),
            });
        }
        let lens: Vec<usize> = weeks_per_stage.iter().map(|w| w * 7).collect();
        let days = lens.iter().sum();
        Self::with_stage_lengths(days, &lens)
    }

    /// A horizon with an explicit stage partition.
    ///
    /// The lengths must be positive and sum to `days`. Stage boundaries
    /// need not align with week boundaries; rules stated per week are
    /// then applied to the 7-day blocks counted from each block's start.
    pub fn with_stage_lengths(days: usize, lens: &[usize]) -> Result<Self, DomainError> {
        if days == 0 {
            return Err(DomainError::EmptyHorizon);
        }
        if lens.is_empty() || lens.contains(&0) || lens.iter().sum::<usize>() != days
        {
            return Err(DomainError::BadStagePartition {
                days,
                lens: lens.to_vec(),
            });
        }
        Ok(Self {
            days,
            stage_len: lens.to_vec(),
        })
    }

    /// Number of days in the horizon.
    #[inline]
    pub fn days(&self) -> usize {
        self.days
    }

    /// Number of stages.
    #[inline]
    pub fn stages(&self) -> usize {
        self.stage_len.len()
    }

    /// Length of stage `h` in days.
    #[inline]
    pub fn stage_len(&self, h: usize) -> usize {
        self.stage_len[h]
    }

    /// All stage lengths in order.
    #[inline]
    pub fn stage_lens(&self) -> &[usize] {
        &self.stage_len
    }

    /// Day range `[start, end)` covered by stage `h`.
    pub fn stage_days(&self, h: usize) -> Range<usize> {
        let start: usize = self.stage_len[..h].iter().sum();
        start..start + self.stage_len[h]
    }

    /// The stage containing `day`.
    pub fn stage_of(&self, day: usize) -> usize {
        debug_assert!(day < self.days);
        let mut acc = 0;
        for (h, &len) in self.stage_len.iter().enumerate() {
            acc += len;
            if day < acc {
                return h;
            }
        }
        self.stage_len.len() - 1
    }

    /// Whether the stage partition aligns with week boundaries.
    pub fn stages_are_whole_weeks(&self) -> bool {
        let mut acc = 0usize;
        for &len in &self.stage_len[..self.stage_len.len() - 1] {
            acc += len;
            if acc % 7 != 0 {
                return false;
            }
        }
        true
    }

    /// The calendar weeks of the horizon: 7-day blocks from day 0, the
    /// last possibly shorter.
    pub fn weeks(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        Self::week_blocks(0..self.days)
    }

    /// 7-day blocks counted from the start of an arbitrary day range.
    ///
    /// For ranges starting on a week boundary these coincide with
    /// calendar weeks, which is the production case (whole-week stages).
    pub fn week_blocks(range: Range<usize>) -> impl Iterator<Item = Range<usize>> {
        let Range { start, end } = range;
        (start..end).step_by(7).map(move |s| s..(s + 7).min(end))
    }

    /// Whether `day` falls on a Saturday or Sunday.
    #[inline]
    pub fn is_weekend(day: usize) -> bool {
        matches!(day % 7, 5 | 6)
    }

    /// Whether `day` is a Saturday.
    #[inline]
    pub fn is_saturday(day: usize) -> bool {
        day % 7 == 5
    }

    /// Saturdays within the horizon.
    pub fn saturdays(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.days).filter(|&d| Self::is_saturday(d))
    }

    /// Weekend days (Saturdays and Sundays) within `range`.
    pub fn weekend_days_in(range: Range<usize>) -> impl Iterator<Item = usize> {
        range.filter(|&d| Self::is_weekend(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_week_horizon_layout() {
        let h = Horizon::weekly_stages(&[1, 1, 1, 1]).unwrap();
        assert_eq!(h.days(), 28);
        assert_eq!(h.stages(), 4);
        assert_eq!(h.stage_days(0), 0..7);
        assert_eq!(h.stage_days(3), 21..28);
        assert_eq!(h.stage_of(0), 0);
        assert_eq!(h.stage_of(6), 0);
        assert_eq!(h.stage_of(7), 1);
        assert_eq!(h.stage_of(27), 3);
        assert!(h.stages_are_whole_weeks());
        // Monday start: weekends are days 5,6 / 12,13 / 19,20 / 26,27.
        let weekends: Vec<usize> = Horizon::weekend_days_in(0..28).collect();
        assert_eq!(weekends, vec![5, 6, 12, 13, 19, 20, 26, 27]);
        assert_eq!(h.saturdays().collect::<Vec<_>>(), vec![5, 12, 19, 26]);
    }

    #[test]
    fn study_scale_partition() {
        let h = Horizon::with_stage_lengths(4, &[2, 2]).unwrap();
        assert_eq!(h.stage_days(1), 2..4);
        assert!(!h.stages_are_whole_weeks());
        let weeks: Vec<_> = h.weeks().collect();
        assert_eq!(weeks, vec![0..4]);
        let blocks: Vec<_> = Horizon::week_blocks(2..4).collect();
        assert_eq!(blocks, vec![2..4]);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Horizon::with_stage_lengths(5, &[2, 2]).is_err());
        assert!(Horizon::with_stage_lengths(0, &[]).is_err());
        assert!(Horizon::with_stage_lengths(4, &[4, 0]).is_err());
        assert!(Horizon::weekly_stages(&[]).is_err());
    }

    #[test]
    fn partial_last_week() {
        let h = Horizon::single_stage(10).unwrap();
        let weeks: Vec<_> = h.weeks().collect();
        assert_eq!(weeks, vec![0..7, 7..10]);
    }
}
