//! A full campaign from a config string: cross product of algorithms,
//! budgets and seeds, CSV traces, summary statistics and SVG charts.
//! The same config format drives the `vabo` binary.
//!
//! ```bash
//! cargo run --release -p vabo --example campaign
//! ```

use vabo::campaign::{run_campaign, validate_config};

const CONFIG: &str = r#"
problem = "vcs-surrogate"
algorithms = ["vabo", "cbo", "safe_bo"]
budgets = [0, 10, 20]
iterations = 20
delta = 0.05
beta0 = 1.0
seeds = 5

[cost]
kind = "quadratic"
coefficient = 1.0

[solver]
mode = "multistart"
starts = 20
search_budget = 150

[safe_bo]
confidence_multiplier = 2.0
"#;

fn main() {
    let config = validate_config(CONFIG).expect("config is valid");
    let out_dir = std::env::temp_dir().join("vabo-campaign-example");
    let report = run_campaign(&config, &out_dir, 4).expect("campaign runs");

    println!(
        "ran {} cells ({} algorithms x {} budgets x {} seeds), {} failures",
        report.cells,
        config.algorithms.len(),
        config.budgets.len(),
        config.seeds.len(),
        report.failures
    );
    println!("outputs in {}:", out_dir.display());
    for path in report.trace_files.iter().take(4) {
        println!("  {}", path.file_name().unwrap().to_string_lossy());
    }
    println!("  ... {} trace files total", report.trace_files.len());
    println!("  {}", report.summary_file.file_name().unwrap().to_string_lossy());
    for path in &report.chart_files {
        println!("  {}", path.file_name().unwrap().to_string_lossy());
    }

    println!("\nsummary.csv:");
    print!("{}", std::fs::read_to_string(&report.summary_file).unwrap());
}
