//! Plugging in your own black box: implement `BlackBoxProblem` and hand it
//! to the optimizer. The problem here is a constrained Branin variant with
//! the disk constraint treated as a temperature-style output.
//!
//! ```bash
//! cargo run -p vabo --example custom_problem
//! ```

use vabo::domain::{BoxDomain, ParameterPoint};
use vabo::optimizer::{run, VaboConfig};
use vabo::problems::{brute_force_optimum, BlackBoxProblem, ProblemError};

struct ConstrainedBranin {
    domain: BoxDomain,
}

impl ConstrainedBranin {
    fn new() -> Self {
        ConstrainedBranin {
            domain: BoxDomain::from_bounds(&[(-5.0, 10.0), (0.0, 15.0)]).unwrap(),
        }
    }
}

impl BlackBoxProblem for ConstrainedBranin {
    fn name(&self) -> &str {
        "constrained-branin"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn num_constraints(&self) -> usize {
        1
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, p: &ParameterPoint) -> Result<(f64, Vec<f64>), ProblemError> {
        let (x, y) = (p[0], p[1]);
        let a = 1.0;
        let b = 5.1 / (4.0 * std::f64::consts::PI.powi(2));
        let c = 5.0 / std::f64::consts::PI;
        let r = 6.0;
        let s = 10.0;
        let t = 1.0 / (8.0 * std::f64::consts::PI);
        let objective = a * (y - b * x * x + c * x - r).powi(2)
            + s * (1.0 - t) * x.cos()
            + s;
        // keep the search away from the right half: feasible iff x <= 2.5
        let g = x - 2.5;
        Ok((objective, vec![g]))
    }

    fn initial_safe_points(&self) -> Vec<ParameterPoint> {
        vec![vec![-2.0, 7.0].into()]
    }
}

fn main() {
    let problem = ConstrainedBranin::new();

    let (optimum_point, optimum_value) = brute_force_optimum(&problem, 401).unwrap();
    println!(
        "brute-force constrained optimum: ({:.3}, {:.3}) -> {:.4}",
        optimum_point[0], optimum_point[1], optimum_value
    );

    let mut config = VaboConfig::for_problem(&problem);
    config.max_iterations = 30;
    config.budgets = vec![5.0];
    config.seed = 1;
    let trace = run(&problem, &config).unwrap();
    let (best, value) = trace.final_incumbent().unwrap();
    println!(
        "optimizer best after {} iterations: ({:.3}, {:.3}) -> {:.4}",
        trace.iterations_used(),
        best[0],
        best[1],
        value
    );
    println!(
        "violation cost spent {:.3} of budget 5, terminated: {:?}",
        trace.total_spent()[0],
        trace.termination
    );
    println!(
        "gap to the certified optimum: {:.4} ({:.2}% of the start value)",
        value - optimum_value,
        100.0 * (value - optimum_value)
            / problem.evaluate(&problem.initial_safe_points()[0]).unwrap().0
    );
}
