//! Cost coefficients shared by the optimization models and evaluators.

use super::DomainError;
use crate::num::Scalar;

/// Unit costs for every term that appears in a roster's objective.
///
/// The graded `violation` schedule prices a nurse's *total* number of
/// soft violations: a nurse with `m` violations costs `violation[m - 1]`,
/// and the schedule must be nondecreasing so that an extra violation
/// never gets cheaper. A nurse's violation count is capped by her
/// profile's `violation_cap`, so the schedule must be at least that long
/// for every nurse in the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CostParams<T> {
    /// Per nurse placed on the roster.
    pub staffing: T,
    /// Per unit of coverage slack (under- or over-coverage alike).
    pub coverage: T,
    /// Per denied request of a scheduled nurse.
    pub request: T,
    /// Graded price of a nurse's total soft violations; `violation[m-1]`
    /// is charged when the total is `m`.
    pub violation: Vec<T>,
    /// Per nurse of extra staff called in at a stage boundary.
    pub understaffing: T,
    /// Per nurse released from staff at a stage boundary.
    pub overstaffing: T,
    /// Per changed assignment cell when a stage is rescheduled.
    pub adjustment: T,
}

impl<T: Scalar> CostParams<T> {
    /// Baseline coefficients used by the generated study cases.
    pub fn baseline() -> Self {
        CostParams {
            staffing: T::from_f64_const(50.0),
            coverage: T::from_f64_const(10.0),
            request: T::from_f64_const(20.0),
            violation: [10.0, 25.0, 45.0, 70.0]
                .iter()
                .map(|&v| T::from_f64_const(v))
                .collect(),
            understaffing: T::from_f64_const(60.0),
            overstaffing: T::from_f64_const(30.0),
            adjustment: T::from_f64_const(5.0),
        }
    }

    /// Price of a total of `m` violations (`m >= 1`).
    ///
    /// # Panics
    /// If `m` is zero or exceeds the schedule length; instance validation
    /// guarantees the schedule covers every nurse's cap.
    #[inline]
    pub fn violation_price(&self, m: usize) -> T {
        assert!(m >= 1, "violation totals are counted from 1");
        self.violation[m - 1]
    }

    /// Check coefficient signs and the violation schedule shape.
    ///
    /// `max_violation_cap` is the largest `violation_cap` over the
    /// instance's nurses; the schedule must cover it.
    pub fn validate(&self, max_violation_cap: u32) -> Result<(), DomainError> {
        let named: [(&'static str, T); 6] = [
            ("staffing", self.staffing),
            ("coverage", self.coverage),
            ("request", self.request),
            ("understaffing", self.understaffing),
            ("overstaffing", self.overstaffing),
            ("adjustment", self.adjustment),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < T::zero() {
                return Err(DomainError::BadCost { name });
            }
        }
        for v in &self.violation {
            if !v.is_finite() || *v < T::zero() {
                return Err(DomainError::BadCost { name: "violation" });
            }
        }
        if self.violation.windows(2).any(|w| w[1] < w[0]) {
            return Err(DomainError::ViolationPricesDecreasing);
        }
        if (self.violation.len() as u32) < max_violation_cap {
            return Err(DomainError::ViolationPricesTooShort {
                have: self.violation.len(),
                need: max_violation_cap as usize,
            });
        }
        Ok(())
    }
}
