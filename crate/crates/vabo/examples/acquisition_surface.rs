//! What the per-iteration auxiliary problem sees: constrained expected
//! improvement and the budget chance constraint over the domain, after a
//! few observations of a constrained 2-D problem.
//!
//! ```bash
//! cargo run -p vabo --example acquisition_surface
//! ```

use vabo::domain::Observation;
use vabo::optimizer::{epsilon_schedule, fit_gps, GpSettings};
use vabo::problems::{BlackBoxProblem, Synthetic2d};
use vabo::violation::ViolationCostFn;
use vabo::AcquisitionContext;

fn main() {
    let problem = Synthetic2d::new();
    let samples = [[0.05, 0.10], [0.30, 0.10], [0.10, 0.35], [0.45, 0.45]];
    let observations: Vec<Observation> = samples
        .iter()
        .map(|coords| {
            let point: vabo::ParameterPoint = coords.to_vec().into();
            let (objective, constraints) = problem.evaluate(&point).unwrap();
            Observation::new(point, objective, constraints)
        })
        .collect();

    let (objective_gp, constraint_gps) =
        fit_gps(&observations, &GpSettings::default(), problem.domain(), 1).unwrap();
    let incumbent = observations
        .iter()
        .filter(|o| o.is_feasible())
        .map(|o| o.objective)
        .fold(f64::INFINITY, f64::min);

    let cost_fns = vec![ViolationCostFn::quadratic(1.0).unwrap()];
    let caps: Vec<f64> = constraint_gps
        .iter()
        .map(|gp| gp.prior_mean() + 10.0 * gp.kernel().signal_variance().sqrt())
        .collect();
    let epsilon = epsilon_schedule(0.05, 20).unwrap()[0];
    let ctx = AcquisitionContext::new(
        &objective_gp,
        &constraint_gps,
        incumbent,
        &[10.0],
        &[1.0],
        epsilon,
        &cost_fns,
        &caps,
    )
    .unwrap();

    println!("constrained expected improvement (x1000), '.' = chance-infeasible");
    println!("budget 10, epsilon {epsilon:.4}, incumbent {incumbent:.4}\n");
    let n = 15;
    for row in (0..n).rev() {
        let y = row as f64 / (n - 1) as f64;
        let mut line = format!("y={y:4.2} ");
        for col in 0..n {
            let x = col as f64 / (n - 1) as f64;
            let values = ctx.evaluate(&vec![x, y].into());
            if values.chance_feasible {
                line.push_str(&format!("{:5.1}", 1000.0 * values.cei));
            } else {
                line.push_str("    .");
            }
        }
        println!("{line}");
    }
    println!("\n(the feasible band hugs the known-safe corner; the chance");
    println!("constraint rules the rest out until the model tightens)");
}
