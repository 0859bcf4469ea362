//! Violation cost functions and per-constraint budget accounting.
//!
//! A cost function maps the positive part of a constraint output to a
//! nonnegative cost: zero at zero, non-decreasing, left continuous. The
//! shipped kinds satisfy this by construction. Costs are charged from the
//! observed constraint values, never from model estimates.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ViolationError {
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Bisection tolerance (absolute, on the violation magnitude) used by the
/// table-kind inverse.
const INVERSE_TOLERANCE: f64 = 1e-10;

/// A non-decreasing cost on violation magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationCostFn {
    /// c(s) = coefficient * s^2
    Quadratic { coefficient: f64 },
    /// c(s) = slope * s
    Linear { slope: f64 },
    /// Piecewise-linear through (0, 0) and the given breakpoints, constant
    /// beyond the last one. Plateaus are allowed.
    Table { points: Vec<(f64, f64)> },
}

impl ViolationCostFn {
    pub fn quadratic(coefficient: f64) -> Result<Self, ViolationError> {
        if !(coefficient > 0.0) || !coefficient.is_finite() {
            return Err(ViolationError::InvalidParameter(format!(
                "quadratic coefficient must be positive and finite, got {coefficient}"
            )));
        }
        Ok(ViolationCostFn::Quadratic { coefficient })
    }

    pub fn linear(slope: f64) -> Result<Self, ViolationError> {
        if !(slope > 0.0) || !slope.is_finite() {
            return Err(ViolationError::InvalidParameter(format!(
                "linear slope must be positive and finite, got {slope}"
            )));
        }
        Ok(ViolationCostFn::Linear { slope })
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self, ViolationError> {
        if points.is_empty() {
            return Err(ViolationError::InvalidParameter(
                "table needs at least one breakpoint".into(),
            ));
        }
        let mut prev = (0.0, 0.0);
        for &(r, c) in &points {
            if !r.is_finite() || !c.is_finite() {
                return Err(ViolationError::InvalidParameter(
                    "table breakpoints must be finite".into(),
                ));
            }
            if r <= prev.0 && prev != (0.0, 0.0) || r <= 0.0 {
                return Err(ViolationError::InvalidParameter(
                    "table magnitudes must be strictly increasing and positive".into(),
                ));
            }
            if c < prev.1 {
                return Err(ViolationError::InvalidParameter(
                    "table costs must be non-decreasing".into(),
                ));
            }
            prev = (r, c);
        }
        Ok(ViolationCostFn::Table { points })
    }

    /// Cost of a violation magnitude s >= 0.
    fn cost_of_magnitude(&self, s: f64) -> f64 {
        match self {
            ViolationCostFn::Quadratic { coefficient } => coefficient * s * s,
            ViolationCostFn::Linear { slope } => slope * s,
            ViolationCostFn::Table { points } => {
                let mut prev = (0.0, 0.0);
                for &(r, c) in points {
                    if s <= r {
                        let w = if r > prev.0 { (s - prev.0) / (r - prev.0) } else { 1.0 };
                        return prev.1 + w * (c - prev.1);
                    }
                    prev = (r, c);
                }
                prev.1 // saturates past the last breakpoint
            }
        }
    }

    /// Realized cost of a constraint output: c(max(g, 0)). Zero whenever
    /// g <= 0.
    pub fn cost(&self, g_value: f64) -> f64 {
        let s = g_value.max(0.0);
        if s == 0.0 {
            return 0.0;
        }
        self.cost_of_magnitude(s)
    }

    /// Largest magnitude whose cost stays within `s`:
    /// sup { r in [0, r_max] : c(r) <= s }. An infinite `s` places no
    /// restriction and returns infinity. Analytic for the quadratic and
    /// linear kinds, bisection for tables.
    pub fn inverse(&self, s: f64, r_max: f64) -> f64 {
        assert!(s >= 0.0, "inverse cost requires a nonnegative budget, got {s}");
        if s == f64::INFINITY {
            return f64::INFINITY;
        }
        match self {
            ViolationCostFn::Quadratic { coefficient } => ((s / coefficient).sqrt()).min(r_max),
            ViolationCostFn::Linear { slope } => (s / slope).min(r_max),
            ViolationCostFn::Table { .. } => {
                if self.cost_of_magnitude(r_max) <= s {
                    return r_max;
                }
                // c(lo) <= s < c(hi) is maintained; c(0) = 0 <= s always.
                let (mut lo, mut hi) = (0.0, r_max);
                while hi - lo > INVERSE_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    if self.cost_of_magnitude(mid) <= s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }
}

/// Tracks per-constraint budgets and the cost spent so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationAccount {
    budgets: Vec<f64>,
    spent: Vec<f64>,
    cost_fns: Vec<ViolationCostFn>,
}

impl ViolationAccount {
    pub fn new(budgets: Vec<f64>, cost_fns: Vec<ViolationCostFn>) -> Result<Self, ViolationError> {
        if budgets.len() != cost_fns.len() {
            return Err(ViolationError::LengthMismatch {
                expected: cost_fns.len(),
                got: budgets.len(),
            });
        }
        if let Some(b) = budgets.iter().find(|b| **b < 0.0 || b.is_nan()) {
            return Err(ViolationError::InvalidParameter(format!(
                "budgets must be nonnegative, got {b}"
            )));
        }
        let spent = vec![0.0; budgets.len()];
        Ok(ViolationAccount { budgets, spent, cost_fns })
    }

    pub fn n_constraints(&self) -> usize {
        self.budgets.len()
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn spent(&self) -> &[f64] {
        &self.spent
    }

    pub fn cost_fns(&self) -> &[ViolationCostFn] {
        &self.cost_fns
    }

    pub fn remaining(&self, i: usize) -> f64 {
        self.budgets[i] - self.spent[i]
    }

    pub fn remaining_all(&self) -> Vec<f64> {
        (0..self.budgets.len()).map(|i| self.remaining(i)).collect()
    }

    /// Charges the realized cost of one evaluation and reports every
    /// constraint whose remaining budget went negative.
    pub fn charge(&mut self, g_values: &[f64]) -> Result<Vec<usize>, ViolationError> {
        if g_values.len() != self.budgets.len() {
            return Err(ViolationError::LengthMismatch {
                expected: self.budgets.len(),
                got: g_values.len(),
            });
        }
        let mut exhausted = Vec::new();
        for (i, &g) in g_values.iter().enumerate() {
            self.spent[i] += self.cost_fns[i].cost(g);
            if self.remaining(i) < 0.0 {
                exhausted.push(i);
            }
        }
        Ok(exhausted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_cost_examples() {
        let c = ViolationCostFn::quadratic(1.0).unwrap();
        assert_eq!(c.cost(-3.0), 0.0);
        assert_eq!(c.cost(2.0), 4.0);
        assert_eq!(c.cost(0.0), 0.0);
    }

    #[test]
    fn quadratic_inverse_is_sqrt() {
        let c = ViolationCostFn::quadratic(1.0).unwrap();
        let r = c.inverse(4.0, 1e6);
        assert!((r - 2.0).abs() < 1e-12);
        assert!(c.cost(r) <= 4.0 + 1e-12);
        assert!(c.cost(r + 1e-6) > 4.0);
        assert_eq!(c.inverse(0.0, 1e6), 0.0);
    }

    #[test]
    fn inverse_caps_at_r_max_and_handles_infinity() {
        let c = ViolationCostFn::quadratic(1.0).unwrap();
        assert_eq!(c.inverse(1e9, 3.0), 3.0);
        assert_eq!(c.inverse(f64::INFINITY, 3.0), f64::INFINITY);
        let l = ViolationCostFn::linear(2.0).unwrap();
        assert!((l.inverse(4.0, 1e6) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn table_plateau_inverse_takes_supremum() {
        // c is 0 -> 1 on [0,1], flat at 1 on [1,2], then rises to 5 at 3.
        let c = ViolationCostFn::table(vec![(1.0, 1.0), (2.0, 1.0), (3.0, 5.0)]).unwrap();
        let r = c.inverse(1.0, 10.0);
        assert!((r - 2.0).abs() < 1e-8, "sup over the plateau should be 2, got {r}");

        // Brute-force oracle: densest r with c(r) <= s.
        let mut best = 0.0;
        let mut x = 0.0;
        while x <= 10.0 {
            if c.cost(x) <= 1.0 {
                best = x;
            }
            x += 1e-5;
        }
        assert!((r - best).abs() < 1e-4);
    }

    #[test]
    fn table_saturates_past_last_breakpoint() {
        let c = ViolationCostFn::table(vec![(1.0, 2.0)]).unwrap();
        assert_eq!(c.cost(50.0), 2.0);
        assert_eq!(c.inverse(2.0, 7.0), 7.0);
    }

    #[test]
    fn table_rejects_bad_shapes() {
        assert!(ViolationCostFn::table(vec![]).is_err());
        assert!(ViolationCostFn::table(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ViolationCostFn::table(vec![(1.0, 2.0), (2.0, 1.0)]).is_err());
        assert!(ViolationCostFn::table(vec![(-1.0, 0.0)]).is_err());
    }

    #[test]
    fn charge_accumulates_and_flags_exhaustion() {
        let c = ViolationCostFn::quadratic(1.0).unwrap();
        let mut acct = ViolationAccount::new(vec![10.0], vec![c.clone()]).unwrap();
        let exhausted = acct.charge(&[2.0]).unwrap();
        assert_eq!(acct.spent(), &[4.0]);
        assert!(exhausted.is_empty());

        let mut acct = ViolationAccount::new(vec![10.0], vec![c.clone()]).unwrap();
        acct.charge(&[2.0]).unwrap();
        acct.charge(&[2.0]).unwrap();
        let exhausted = acct.charge(&[2.0]).unwrap();
        assert_eq!(acct.spent(), &[12.0]);
        assert_eq!(exhausted, vec![0]);
        assert!(acct.remaining(0) < 0.0);
    }

    #[test]
    fn feasible_values_charge_nothing() {
        let c = ViolationCostFn::quadratic(1.0).unwrap();
        let mut acct = ViolationAccount::new(vec![5.0], vec![c]).unwrap();
        let exhausted = acct.charge(&[-1.0]).unwrap();
        assert_eq!(acct.spent(), &[0.0]);
        assert!(exhausted.is_empty());
    }

    #[test]
    fn exact_exhaustion_is_not_flagged() {
        // remaining hits exactly zero: strict inequality means not exhausted.
        let c = ViolationCostFn::quadratic(1.0).unwrap();
        let mut acct = ViolationAccount::new(vec![4.0], vec![c]).unwrap();
        let exhausted = acct.charge(&[2.0]).unwrap();
        assert!(exhausted.is_empty());
        assert_eq!(acct.remaining(0), 0.0);
    }

    #[test]
    fn table_is_left_continuous_at_breakpoints() {
        let c = ViolationCostFn::table(vec![(0.5, 1.0), (1.5, 1.0), (2.0, 3.0)]).unwrap();
        for r in [0.5, 1.5, 2.0] {
            let gap = (c.cost(r - 1e-12) - c.cost(r)).abs();
            assert!(gap < 1e-9, "jump of {gap} approaching {r} from the left");
        }
    }

    proptest! {
        #[test]
        fn costs_are_nondecreasing(s1 in 0.0f64..10.0, s2 in 0.0f64..10.0) {
            let kinds = [
                ViolationCostFn::quadratic(2.0).unwrap(),
                ViolationCostFn::linear(0.5).unwrap(),
                ViolationCostFn::table(vec![(1.0, 1.0), (2.0, 1.0), (4.0, 6.0)]).unwrap(),
            ];
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            for c in &kinds {
                prop_assert!(c.cost(lo) <= c.cost(hi) + 1e-12);
            }
        }

        #[test]
        fn inverse_round_trip_quadratic(s in 0.0f64..1e6, coeff in 0.1f64..10.0) {
            let c = ViolationCostFn::quadratic(coeff).unwrap();
            let r = c.inverse(s, f64::MAX);
            prop_assert!((c.cost_of_magnitude(r) - s).abs() <= 1e-8 * s.max(1.0));
        }

        #[test]
        fn inverse_is_monotone(s1 in 0.0f64..100.0, s2 in 0.0f64..100.0) {
            let c = ViolationCostFn::table(vec![(1.0, 1.0), (2.0, 1.0), (4.0, 6.0)]).unwrap();
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            prop_assert!(c.inverse(lo, 50.0) <= c.inverse(hi, 50.0) + 1e-9);
        }

        #[test]
        fn spent_never_decreases(gs in proptest::collection::vec(-5.0f64..5.0, 1..30)) {
            let c = ViolationCostFn::quadratic(1.0).unwrap();
            let mut acct = ViolationAccount::new(vec![f64::INFINITY], vec![c.clone()]).unwrap();
            let mut prev = 0.0;
            let mut total = 0.0;
            for g in &gs {
                acct.charge(&[*g]).unwrap();
                prop_assert!(acct.spent()[0] >= prev);
                prev = acct.spent()[0];
                total += c.cost(*g);
            }
            // charging step by step agrees with one summed charge
            prop_assert!((acct.spent()[0] - total).abs() <= 1e-9 * total.max(1.0));
        }
    }
}
