//! Comparison optimizers sharing the same Gaussian-process and acquisition
//! core: generic constrained Bayesian optimization and a simplified safe
//! Bayesian optimization.

use crate::optimizer::{run_with_strategy, Strategy, VaboConfig, VaboError};
use crate::problems::BlackBoxProblem;
use crate::trace::RunTrace;

/// Which baseline to run.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineKind {
    /// Maximizes constrained expected improvement over the whole domain with
    /// no limit on realized violations.
    Cbo,
    /// Restricts sampling to the confidence-bound safe set
    /// { theta : mean_i + m * sd_i <= 0 for all i }. This is a deliberately
    /// simplified confidence-bound method, not a faithful SafeOpt
    /// reimplementation: there are no Lipschitz expanders, and when the safe
    /// set is empty beyond the evaluated points it re-samples the least
    /// uncertain known-safe point.
    SafeBo { confidence_multiplier: f64 },
}

impl BaselineKind {
    pub fn safe_bo(confidence_multiplier: f64) -> Result<Self, VaboError> {
        if !(confidence_multiplier > 0.0) {
            return Err(VaboError::InvalidConfig(format!(
                "confidence multiplier must be positive, got {confidence_multiplier}"
            )));
        }
        Ok(BaselineKind::SafeBo { confidence_multiplier })
    }
}

/// Generic constrained Bayesian optimization: the probabilistic budget
/// constraint is removed, which is the infinite-budget regime. Budgets in
/// the config are replaced by infinity; violation costs are still tracked in
/// the trace for reporting, but never terminate the run.
pub fn run_cbo(problem: &dyn BlackBoxProblem, config: &VaboConfig) -> Result<RunTrace, VaboError> {
    let mut config = config.clone();
    config.budgets = vec![f64::INFINITY; config.budgets.len()];
    run_with_strategy(problem, &config, Strategy::Cbo)
}

/// Simplified safe Bayesian optimization with confidence multiplier `m`:
/// maximizes constrained expected improvement within the safe set
/// { theta : mean_i(theta) + m * sd_i(theta) <= 0 }. Budgets never terminate
/// the run; spent costs are tracked for reporting.
pub fn run_safe_bo(
    problem: &dyn BlackBoxProblem,
    config: &VaboConfig,
    kind: &BaselineKind,
) -> Result<RunTrace, VaboError> {
    if let BaselineKind::SafeBo { confidence_multiplier } = kind {
        if !(*confidence_multiplier > 0.0) {
            return Err(VaboError::InvalidConfig(format!(
                "confidence multiplier must be positive, got {confidence_multiplier}"
            )));
        }
    }
    let mut config = config.clone();
    config.budgets = vec![f64::INFINITY; config.budgets.len()];
    run_with_strategy(problem, &config, Strategy::from_kind(kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{run, AuxiliarySolver};
    use crate::problems::{ProblemError, Quadratic1d, Synthetic2d};
    use crate::domain::{BoxDomain, ParameterPoint};

    #[test]
    fn cbo_equals_vabo_under_infinite_budgets() {
        let problem = Synthetic2d::new();
        for seed in [1u64, 2, 3] {
            let mut config = VaboConfig::for_problem(&problem);
            config.max_iterations = 8;
            config.seed = seed;
            config.solver = AuxiliarySolver::Multistart { n_starts: 6, local_search_budget: 30 };

            let mut infinite = config.clone();
            infinite.budgets = vec![f64::INFINITY];
            let vabo_trace = run(&problem, &infinite).unwrap();
            let cbo_trace = run_cbo(&problem, &config).unwrap();

            assert_eq!(vabo_trace.records, cbo_trace.records, "seed {seed}");
            assert_eq!(vabo_trace.termination, cbo_trace.termination);
        }
    }

    #[test]
    fn cbo_and_vabo_coincide_when_nothing_is_infeasible() {
        // a problem whose constraint never binds
        struct Freely {
            domain: BoxDomain,
        }
        impl BlackBoxProblem for Freely {
            fn name(&self) -> &str {
                "freely"
            }
            fn dimension(&self) -> usize {
                1
            }
            fn num_constraints(&self) -> usize {
                1
            }
            fn domain(&self) -> &BoxDomain {
                &self.domain
            }
            fn evaluate(&self, p: &ParameterPoint) -> Result<(f64, Vec<f64>), ProblemError> {
                Ok(((p[0] - 0.3).powi(2), vec![-1.0]))
            }
            fn initial_safe_points(&self) -> Vec<ParameterPoint> {
                vec![vec![0.8].into()]
            }
        }
        let problem = Freely { domain: BoxDomain::from_bounds(&[(0.0, 1.0)]).unwrap() };
        let mut config = VaboConfig::for_problem(&problem);
        config.max_iterations = 6;
        config.budgets = vec![10.0];
        let vabo_trace = run(&problem, &config).unwrap();
        let cbo_trace = run_cbo(&problem, &config).unwrap();
        // spending stays zero and the selected points coincide step by step
        assert_eq!(vabo_trace.total_spent(), vec![0.0]);
        let vabo_points: Vec<_> = vabo_trace.records.iter().map(|r| r.point.clone()).collect();
        let cbo_points: Vec<_> = cbo_trace.records.iter().map(|r| r.point.clone()).collect();
        assert_eq!(vabo_points, cbo_points);
    }

    #[test]
    fn huge_confidence_multiplier_never_leaves_the_start_set() {
        let problem = Quadratic1d::new();
        let mut config = VaboConfig::for_problem(&problem);
        config.max_iterations = 5;
        let kind = BaselineKind::safe_bo(1e9).unwrap();
        let trace = run_safe_bo(&problem, &config, &kind).unwrap();
        let starts: Vec<Vec<f64>> =
            problem.initial_safe_points().iter().map(|p| p.coords().to_vec()).collect();
        for r in trace.records.iter().filter(|r| r.iteration > 0) {
            assert!(
                starts.contains(&r.point.coords().to_vec()),
                "safe baseline left the start set at {:?}",
                r.point.coords()
            );
            assert!(r.chance_set_empty, "re-sampling iterations are flagged");
        }
    }

    #[test]
    fn safe_bo_incurs_no_violation_on_the_benchmarks() {
        let problem = Synthetic2d::new();
        let mut config = VaboConfig::for_problem(&problem);
        config.max_iterations = 10;
        let kind = BaselineKind::safe_bo(2.0).unwrap();
        let trace = run_safe_bo(&problem, &config, &kind).unwrap();
        // conservatism: with a 2-sigma bound on this smooth problem the safe
        // baseline should not spend violation cost
        assert!(trace.total_spent()[0] <= 1e-9, "spent {:?}", trace.total_spent());
    }

    #[test]
    fn safe_bo_rejects_nonpositive_multiplier() {
        assert!(BaselineKind::safe_bo(0.0).is_err());
        assert!(BaselineKind::safe_bo(-1.0).is_err());
        let problem = Quadratic1d::new();
        let config = VaboConfig::for_problem(&problem);
        let kind = BaselineKind::SafeBo { confidence_multiplier: 0.0 };
        assert!(run_safe_bo(&problem, &config, &kind).is_err());
    }
}
