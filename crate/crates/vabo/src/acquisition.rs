//! Constrained expected improvement and the probabilistic budget constraint.
//!
//! These are the two ingredients of the per-iteration auxiliary problem:
//! maximize CEI over the set of points whose next-step violation cost stays
//! within the allowed slice of the remaining budget with high probability.

use crate::domain::ParameterPoint;
use crate::gp::GaussianProcess;
use crate::normal::{normal_cdf, normal_pdf};
use crate::violation::ViolationCostFn;
use thiserror::Error;

/// Below this standard deviation a posterior is treated as a point mass.
pub const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AcquisitionError {
    #[error("invalid acquisition context: {0}")]
    Invalid(String),
}

/// Closed-form expected improvement of a Gaussian belief over an incumbent,
/// for minimization. Degenerate beliefs fall back to the deterministic
/// improvement max(0, incumbent - mean).
pub fn expected_improvement(mean: f64, sd: f64, incumbent: f64) -> f64 {
    debug_assert!(sd >= 0.0);
    if sd <= SIGMA_FLOOR {
        return (incumbent - mean).max(0.0);
    }
    let z = (incumbent - mean) / sd;
    ((incumbent - mean) * normal_cdf(z) + sd * normal_pdf(z)).max(0.0)
}

/// Probability that a Gaussian belief lands at or below `threshold`.
pub fn threshold_probability(mean: f64, sd: f64, threshold: f64) -> f64 {
    debug_assert!(sd >= 0.0);
    if sd <= SIGMA_FLOOR {
        return if mean <= threshold { 1.0 } else { 0.0 };
    }
    normal_cdf((threshold - mean) / sd)
}

/// Probability that a constraint with the given Gaussian belief is satisfied
/// (value at or below zero).
pub fn feasibility_probability(mean: f64, sd: f64) -> f64 {
    threshold_probability(mean, sd, 0.0)
}

/// Everything the auxiliary problem needs at one iteration: fitted posteriors,
/// the incumbent, and the budget-derived chance-constraint thresholds.
#[derive(Debug, Clone)]
pub struct AcquisitionContext<'a> {
    objective_gp: &'a GaussianProcess,
    constraint_gps: &'a [GaussianProcess],
    incumbent_value: f64,
    remaining_budgets: Vec<f64>,
    betas: Vec<f64>,
    epsilon: f64,
    /// c_i^{-1}(beta_i * max(0, B_i)), precomputed once per iteration.
    thresholds: Vec<f64>,
}

/// Acquisition quantities at one candidate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionValues {
    pub cei: f64,
    pub chance_probability: f64,
    pub chance_feasible: bool,
}

impl<'a> AcquisitionContext<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        objective_gp: &'a GaussianProcess,
        constraint_gps: &'a [GaussianProcess],
        incumbent_value: f64,
        remaining_budgets: &[f64],
        betas: &[f64],
        epsilon: f64,
        cost_fns: &[ViolationCostFn],
        inverse_caps: &[f64],
    ) -> Result<Self, AcquisitionError> {
        let n = constraint_gps.len();
        if remaining_budgets.len() != n
            || betas.len() != n
            || cost_fns.len() != n
            || inverse_caps.len() != n
        {
            return Err(AcquisitionError::Invalid(format!(
                "constraint-wise inputs disagree on the number of constraints ({n})"
            )));
        }
        if !objective_gp.is_fitted() || constraint_gps.iter().any(|g| !g.is_fitted()) {
            return Err(AcquisitionError::Invalid("all processes must be fitted".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(AcquisitionError::Invalid(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(AcquisitionError::Invalid(format!(
                "beta must lie in [0, 1], got {b}"
            )));
        }
        if !incumbent_value.is_finite() {
            return Err(AcquisitionError::Invalid(format!(
                "incumbent value must be finite, got {incumbent_value}"
            )));
        }
        let thresholds = (0..n)
            .map(|i| {
                let budget = remaining_budgets[i].max(0.0);
                // guard 0 * inf
                let cap = if betas[i] == 0.0 || budget == 0.0 { 0.0 } else { betas[i] * budget };
                cost_fns[i].inverse(cap, inverse_caps[i])
            })
            .collect();
        Ok(AcquisitionContext {
            objective_gp,
            constraint_gps,
            incumbent_value,
            remaining_budgets: remaining_budgets.to_vec(),
            betas: betas.to_vec(),
            epsilon,
            thresholds,
        })
    }

    pub fn incumbent_value(&self) -> f64 {
        self.incumbent_value
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn remaining_budgets(&self) -> &[f64] {
        &self.remaining_budgets
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn input_dim(&self) -> usize {
        self.objective_gp.kernel().input_dim()
    }

    fn posterior(gp: &GaussianProcess, point: &ParameterPoint) -> (f64, f64) {
        gp.posterior(point).expect("context validated the process as fitted")
    }

    /// Constrained expected improvement: the product of per-constraint
    /// feasibility probabilities times the unconstrained expected
    /// improvement. With no constraints this is exactly the unconstrained
    /// expected improvement.
    pub fn cei(&self, point: &ParameterPoint) -> f64 {
        self.evaluate(point).cei
    }

    /// Probability that the next evaluation's violation cost stays within the
    /// allowed slice of every remaining budget.
    pub fn budget_constraint_probability(&self, point: &ParameterPoint) -> f64 {
        self.evaluate(point).chance_probability
    }

    /// Whether the probabilistic budget constraint holds at this point
    /// (inclusive at the boundary).
    pub fn is_chance_feasible(&self, point: &ParameterPoint) -> bool {
        self.evaluate(point).chance_feasible
    }

    /// Computes CEI and the chance constraint together, sharing the
    /// constraint posteriors between them.
    pub fn evaluate(&self, point: &ParameterPoint) -> AcquisitionValues {
        assert_eq!(point.dim(), self.input_dim(), "candidate dimension mismatch");
        let (obj_mean, obj_sd) = Self::posterior(self.objective_gp, point);
        let ei = expected_improvement(obj_mean, obj_sd, self.incumbent_value);
        let mut feasibility = 1.0;
        let mut chance = 1.0;
        for (gp, &threshold) in self.constraint_gps.iter().zip(&self.thresholds) {
            let (mean, sd) = Self::posterior(gp, point);
            feasibility *= feasibility_probability(mean, sd);
            chance *= threshold_probability(mean, sd, threshold);
        }
        AcquisitionValues {
            cei: feasibility * ei,
            chance_probability: chance,
            chance_feasible: chance >= 1.0 - self.epsilon,
        }
    }
}
