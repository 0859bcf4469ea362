//! Gaussian-process regression on its own: fit, query, refit
//! hyperparameters.
//!
//! ```bash
//! cargo run -p vabo --example gp_regression
//! ```

use vabo::{GaussianProcess, RbfKernel};

fn main() {
    // noisy-ish samples of a smooth function
    let target = |x: f64| (3.0 * x).sin() + 0.5 * x;
    let data: Vec<(vabo::ParameterPoint, f64)> = [0.0, 0.4, 0.9, 1.3, 1.8, 2.2, 2.9]
        .iter()
        .map(|&x| (vec![x].into(), target(x)))
        .collect();

    let kernel = RbfKernel::new(1.0, vec![0.5]).unwrap();
    let gp = GaussianProcess::new(kernel, 0.0, 1e-6).unwrap();
    let gp = gp.fit(&data).unwrap();

    println!("posterior over [0, 3] (7 training points):");
    println!("{:>6} {:>10} {:>10} {:>10}", "x", "truth", "mean", "sd");
    for i in 0..=12 {
        let x = 0.25 * i as f64;
        let (mean, sd) = gp.posterior(&vec![x].into()).unwrap();
        println!("{x:>6.2} {:>10.4} {mean:>10.4} {sd:>10.4}", target(x));
    }

    let before = gp.log_marginal_likelihood().unwrap();
    let tuned = gp.fit_hyperparameters().unwrap();
    let after = tuned.log_marginal_likelihood().unwrap();
    println!("\nhyperparameter refit:");
    println!(
        "  lengthscale {:.3} -> {:.3}, signal variance {:.3} -> {:.3}",
        gp.kernel().lengthscales()[0],
        tuned.kernel().lengthscales()[0],
        gp.kernel().signal_variance(),
        tuned.kernel().signal_variance()
    );
    println!("  log marginal likelihood {before:.3} -> {after:.3}");
}
