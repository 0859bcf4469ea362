//! Thin command-line front end over the campaign runner.
//!
//! Exit codes: 0 on success, 1 on a runtime failure (partial outputs are
//! kept), 2 on a configuration error.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vabo::campaign::{run_campaign, validate_config, ConfigError};
use vabo::problems::{problem_by_name, problem_names};

/// Environment variable holding the default output directory.
const OUT_DIR_ENV: &str = "VABO_OUT";

#[derive(Parser)]
#[command(
    name = "vabo",
    about = "Violation-aware Bayesian optimization benchmark runner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the campaign described by a TOML config file.
    Run {
        /// Path to the campaign config.
        config: PathBuf,
        /// Output directory (overrides the config and VABO_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of campaign cells to run in parallel.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the built-in problems.
    ListProblems,
    /// Parse and validate a config file without running anything.
    Validate {
        /// Path to the campaign config.
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, jobs } => cmd_run(&config, out, jobs),
        Command::ListProblems => cmd_list_problems(),
        Command::Validate { config } => cmd_validate(&config),
    }
}

fn load_config(path: &PathBuf) -> Result<vabo::campaign::ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    validate_config(&text).map_err(|e| match e {
        ConfigError::Syntax(msg) => format!("{}: {msg}", path.display()),
        other => format!("{}: {other}", path.display()),
    })
}

fn cmd_run(config_path: &PathBuf, out: Option<PathBuf>, jobs: Option<usize>) -> ExitCode {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let out_dir = out
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("vabo-out"));
    let jobs = jobs.unwrap_or(config.jobs);
    match run_campaign(&config, &out_dir, jobs) {
        Ok(report) => {
            println!(
                "{} cells -> {} ({} traces, summary.csv, {} charts)",
                report.cells,
                out_dir.display(),
                report.trace_files.len(),
                report.chart_files.len()
            );
            if report.failures > 0 {
                eprintln!("{} cell(s) failed; partial outputs were kept", report.failures);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("campaign failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_list_problems() -> ExitCode {
    for name in problem_names() {
        let p = problem_by_name(name).expect("registry is consistent");
        let domain = p.domain();
        let bounds: Vec<String> = (0..p.dimension())
            .map(|d| format!("[{}, {}]", domain.lower()[d], domain.upper()[d]))
            .collect();
        println!(
            "{name}: {} dims, {} constraint(s), domain {}",
            p.dimension(),
            p.num_constraints(),
            bounds.join(" x ")
        );
    }
    ExitCode::SUCCESS
}

fn cmd_validate(config_path: &PathBuf) -> ExitCode {
    match load_config(config_path) {
        Ok(config) => {
            println!(
                "ok: problem {}, {} algorithm(s), {} budget(s), {} seed(s), T = {}",
                config.problem,
                config.algorithms.len(),
                config.budgets.len(),
                config.seeds.len(),
                config.iterations
            );
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
