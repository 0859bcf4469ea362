//! One full violation-aware optimization run on the vapor-compression
//! surrogate, iteration by iteration.
//!
//! ```bash
//! cargo run -p vabo --example run_vabo
//! ```

use vabo::optimizer::{run, AuxiliarySolver, VaboConfig};
use vabo::problems::problem_by_name;

fn main() {
    let problem = problem_by_name("vcs-surrogate").unwrap();
    let mut config = VaboConfig::for_problem(&problem);
    config.max_iterations = 20;
    config.budgets = vec![10.0];
    config.delta = 0.05;
    config.seed = 3;
    config.solver = AuxiliarySolver::Multistart { n_starts: 20, local_search_budget: 150 };

    let trace = run(&problem, &config).unwrap();

    println!("problem {}, budget 10, T = 20, seed {}\n", trace.problem, trace.seed);
    println!(
        "{:>3} {:>8} {:>8} {:>8} {:>9} {:>8} {:>9} {:>9} {:>5}",
        "t", "valve", "fan_in", "fan_out", "power", "g", "best", "spent", "flag"
    );
    for r in &trace.records {
        println!(
            "{:>3} {:>8.1} {:>8.1} {:>8.1} {:>9.2} {:>8.3} {:>9.2} {:>9.4} {:>5}",
            r.iteration,
            r.point[0],
            r.point[1],
            r.point[2],
            r.objective,
            r.constraints[0],
            r.incumbent_value,
            r.spent[0],
            if r.chance_set_empty { "*" } else { "" }
        );
    }
    let (best_point, best_value) = trace.final_incumbent().unwrap();
    println!("\nterminated: {:?}", trace.termination);
    println!(
        "best feasible set-points: valve {:.1} counts, indoor {:.1} rpm, outdoor {:.1} rpm",
        best_point[0], best_point[1], best_point[2]
    );
    println!("power {best_value:.2} W, violation cost spent {:.4}", trace.total_spent()[0]);
}
