//! Violation-aware Bayesian optimization.
//!
//! Minimizes an expensive black-box objective under black-box constraints
//! while spending at most a prescribed budget of constraint-violation cost,
//! with a probabilistic guarantee of staying within budget. Each iteration
//! maximizes constrained expected improvement over the subset of the domain
//! where the next evaluation's violation cost is affordable with high
//! probability; the risk level is scheduled so the whole run stays within
//! budget with probability at least `1 - delta`.
//!
//! Two baselines share the same Gaussian-process core: generic constrained
//! Bayesian optimization (the infinite-budget regime) and a simplified safe
//! Bayesian optimization (the zero-tolerance regime).
//!
//! ```
//! use vabo::{run, VaboConfig};
//! use vabo::problems::Quadratic1d;
//!
//! let problem = Quadratic1d::new();
//! let mut config = VaboConfig::for_problem(&problem);
//! config.max_iterations = 10;
//! let trace = run(&problem, &config).unwrap();
//! let (point, value) = trace.final_incumbent().unwrap();
//! assert!(value <= 2.25 && point[0] >= 1.0 - 1e-9);
//! ```
//!
//! The `examples/` directory has one runnable example per capability:
//! Gaussian-process regression, acquisition surfaces, single runs, baseline
//! comparisons, campaigns and custom problems. The `vabo` binary runs
//! campaigns described by TOML config files.

// Validation uses `!(x > 0.0)`-style comparisons on purpose: they reject
// NaN along with out-of-range values in one predicate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod baselines;
pub mod campaign;
pub mod chart;
pub mod domain;
pub mod gp;
mod linalg;
pub mod normal;
pub mod optimizer;
pub mod problems;
pub mod trace;
pub mod violation;

pub use acquisition::{
    expected_improvement, feasibility_probability, threshold_probability, AcquisitionContext,
    AcquisitionValues, SIGMA_FLOOR,
};
pub use baselines::{run_cbo, run_safe_bo, BaselineKind};
pub use domain::{BoxDomain, Observation, ParameterPoint};
pub use gp::{GaussianProcess, GpError, RbfKernel};
pub use optimizer::{
    beta_schedule, epsilon_schedule, fit_gps, incumbent, run, solve_auxiliary,
    AuxiliarySolution, AuxiliarySolver, GpSettings, VaboConfig, VaboError,
};
pub use problems::{brute_force_optimum, BlackBoxProblem, ProblemError};
pub use trace::{IterationRecord, RunTrace, Termination};
pub use violation::{ViolationAccount, ViolationCostFn};
