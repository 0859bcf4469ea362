//! Experiment campaigns: a declarative TOML config is expanded into the
//! cross product of algorithms, budgets and seeds; every cell runs the
//! optimizer and writes a CSV trace, followed by aggregate statistics and
//! SVG convergence charts.

use crate::baselines::{run_cbo, run_safe_bo, BaselineKind};
use crate::chart::{render_line_chart, LineSeries};
use crate::optimizer::{run, AuxiliarySolver, GpSettings, VaboConfig};
use crate::problems::{problem_by_name, problem_names, BlackBoxProblem, NoisyProblem};
use crate::trace::{format_float, RunTrace, Termination};
use crate::violation::ViolationCostFn;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    /// The file is not valid TOML; the message carries line/column context.
    #[error("config syntax error: {0}")]
    Syntax(String),
    /// The file parsed but failed validation; every problem found is listed.
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Which optimizer a campaign cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Vabo,
    Cbo,
    SafeBo,
}

impl AlgorithmChoice {
    pub fn label(&self) -> &'static str {
        match self {
            AlgorithmChoice::Vabo => "vabo",
            AlgorithmChoice::Cbo => "cbo",
            AlgorithmChoice::SafeBo => "safe_bo",
        }
    }
}

/// How the per-iteration auxiliary problem is solved, as configured.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    /// Grid for up to three dimensions, multistart above.
    Auto,
    Grid { resolution: usize },
    Multistart { n_starts: usize, local_search_budget: usize },
}

impl SolverChoice {
    fn resolve(&self, dimension: usize) -> AuxiliarySolver {
        match *self {
            SolverChoice::Auto => AuxiliarySolver::default_for_dimension(dimension),
            SolverChoice::Grid { resolution } => AuxiliarySolver::Grid { resolution },
            SolverChoice::Multistart { n_starts, local_search_budget } => {
                AuxiliarySolver::Multistart { n_starts, local_search_budget }
            }
        }
    }
}

/// A parsed, defaulted and validated campaign definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub algorithms: Vec<AlgorithmChoice>,
    pub budgets: Vec<f64>,
    pub iterations: usize,
    pub delta: f64,
    pub beta0: f64,
    pub seeds: Vec<u64>,
    pub cost: ViolationCostFn,
    pub solver: SolverChoice,
    pub safe_bo_multiplier: f64,
    pub gp: GpSettings,
    pub noise_sd: f64,
    pub output_dir: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: "vcs-surrogate".into(),
            algorithms: vec![AlgorithmChoice::Vabo],
            budgets: vec![0.0, 10.0, 20.0],
            iterations: 20,
            delta: 0.05,
            beta0: 1.0,
            seeds: (0..10).collect(),
            cost: ViolationCostFn::quadratic(1.0).expect("unit coefficient is valid"),
            solver: SolverChoice::Auto,
            safe_bo_multiplier: 2.0,
            gp: GpSettings::default(),
            noise_sd: 0.0,
            output_dir: None,
            jobs: 1,
        }
    }
}

/// Parses and validates a campaign config. Returns either a fully defaulted
/// config or the complete list of validation problems, not just the first.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table =
        text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    let mut errors: Vec<String> = Vec::new();
    let mut config = ExperimentConfig::default();

    const ROOT_KEYS: [&str; 14] = [
        "problem",
        "algorithms",
        "budgets",
        "iterations",
        "delta",
        "beta0",
        "seeds",
        "noise_sd",
        "output_dir",
        "jobs",
        "cost",
        "solver",
        "safe_bo",
        "gp",
    ];
    for key in table.keys() {
        if !ROOT_KEYS.contains(&key.as_str()) {
            errors.push(format!("unknown key `{key}`"));
        }
    }

    if let Some(v) = table.get("problem") {
        match v.as_str() {
            Some(name) if problem_names().contains(&name) => config.problem = name.to_string(),
            Some(name) => errors.push(format!(
                "unknown problem `{name}`; available: {}",
                problem_names().join(", ")
            )),
            None => errors.push("`problem` must be a string".into()),
        }
    }

    if let Some(v) = table.get("algorithms") {
        match v.as_array() {
            Some(items) if !items.is_empty() => {
                let mut algorithms = Vec::new();
                for item in items {
                    match item.as_str() {
                        Some("vabo") => algorithms.push(AlgorithmChoice::Vabo),
                        Some("cbo") => algorithms.push(AlgorithmChoice::Cbo),
                        Some("safe_bo") => algorithms.push(AlgorithmChoice::SafeBo),
                        Some(other) => errors.push(format!(
                            "unknown algorithm `{other}`; expected vabo, cbo or safe_bo"
                        )),
                        None => errors.push("`algorithms` entries must be strings".into()),
                    }
                }
                if !algorithms.is_empty() {
                    config.algorithms = algorithms;
                }
            }
            _ => errors.push("`algorithms` must be a non-empty array of strings".into()),
        }
    }

    if let Some(v) = table.get("budgets") {
        match number_array(v) {
            Some(budgets) if !budgets.is_empty() => {
                if budgets.iter().any(|b| *b < 0.0 || b.is_nan()) {
                    errors.push("`budgets` must be nonnegative (infinity is allowed)".into());
                } else {
                    config.budgets = budgets;
                }
            }
            _ => errors.push("`budgets` must be a non-empty array of numbers".into()),
        }
    }

    if let Some(v) = table.get("iterations") {
        match v.as_integer() {
            Some(t) if t >= 1 => config.iterations = t as usize,
            _ => errors.push("`iterations` must be an integer of at least 1".into()),
        }
    }

    if let Some(v) = table.get("delta") {
        match number(v) {
            Some(d) if d > 0.0 && d < 1.0 => config.delta = d,
            _ => errors.push("`delta` must lie strictly between 0 and 1".into()),
        }
    }

    if let Some(v) = table.get("beta0") {
        match number(v) {
            Some(b) if b > 0.0 && b <= 1.0 => config.beta0 = b,
            _ => errors.push("`beta0` must lie in (0, 1]".into()),
        }
    }

    if let Some(v) = table.get("seeds") {
        match v {
            toml::Value::Integer(count) if *count >= 1 => {
                config.seeds = (0..*count as u64).collect();
            }
            toml::Value::Array(items) if !items.is_empty() => {
                let mut seeds = Vec::new();
                for item in items {
                    match item.as_integer() {
                        Some(s) if s >= 0 => seeds.push(s as u64),
                        _ => errors.push("`seeds` entries must be nonnegative integers".into()),
                    }
                }
                if !seeds.is_empty() {
                    config.seeds = seeds;
                }
            }
            _ => errors.push("`seeds` must be a positive count or an array of seeds".into()),
        }
    }

    if let Some(v) = table.get("noise_sd") {
        match number(v) {
            Some(sd) if sd >= 0.0 => config.noise_sd = sd,
            _ => errors.push("`noise_sd` must be nonnegative".into()),
        }
    }

    if let Some(v) = table.get("output_dir") {
        match v.as_str() {
            Some(dir) => config.output_dir = Some(PathBuf::from(dir)),
            None => errors.push("`output_dir` must be a string".into()),
        }
    }

    if let Some(v) = table.get("jobs") {
        match v.as_integer() {
            Some(j) if j >= 1 => config.jobs = j as usize,
            _ => errors.push("`jobs` must be an integer of at least 1".into()),
        }
    }

    if let Some(v) = table.get("cost") {
        match v.as_table() {
            Some(t) => parse_cost(t, &mut config, &mut errors),
            None => errors.push("`cost` must be a table".into()),
        }
    }

    if let Some(v) = table.get("solver") {
        match v.as_table() {
            Some(t) => parse_solver(t, &mut config, &mut errors),
            None => errors.push("`solver` must be a table".into()),
        }
    }

    if let Some(v) = table.get("safe_bo") {
        match v.as_table() {
            Some(t) => {
                for key in t.keys() {
                    if key != "confidence_multiplier" {
                        errors.push(format!("unknown key `safe_bo.{key}`"));
                    }
                }
                if let Some(m) = t.get("confidence_multiplier") {
                    match number(m) {
                        Some(m) if m > 0.0 => config.safe_bo_multiplier = m,
                        _ => errors
                            .push("`safe_bo.confidence_multiplier` must be positive".into()),
                    }
                }
            }
            None => errors.push("`safe_bo` must be a table".into()),
        }
    }

    if let Some(v) = table.get("gp") {
        match v.as_table() {
            Some(t) => parse_gp(t, &mut config, &mut errors),
            None => errors.push("`gp` must be a table".into()),
        }
    }

    // cross-field check: fixed lengthscales must match the problem dimension
    if let Some(ls) = &config.gp.lengthscales {
        if let Some(problem) = problem_by_name(&config.problem) {
            if ls.len() != problem.dimension() {
                errors.push(format!(
                    "`gp.lengthscales` has {} entries but `{}` is {}-dimensional",
                    ls.len(),
                    config.problem,
                    problem.dimension()
                ));
            }
        }
    }

    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(errors))
    }
}

fn number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    }
}

fn number_array(v: &toml::Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(number).collect()
}

fn parse_cost(t: &toml::Table, config: &mut ExperimentConfig, errors: &mut Vec<String>) {
    const KEYS: [&str; 4] = ["kind", "coefficient", "slope", "points"];
    for key in t.keys() {
        if !KEYS.contains(&key.as_str()) {
            errors.push(format!("unknown key `cost.{key}`"));
        }
    }
    let kind = t.get("kind").and_then(|v| v.as_str()).unwrap_or("quadratic");
    match kind {
        "quadratic" => {
            let coefficient = match t.get("coefficient") {
                Some(v) => number(v),
                None => Some(1.0),
            };
            match coefficient.map(ViolationCostFn::quadratic) {
                Some(Ok(c)) => config.cost = c,
                _ => errors.push("`cost.coefficient` must be a positive number".into()),
            }
        }
        "linear" => {
            let slope = match t.get("slope") {
                Some(v) => number(v),
                None => Some(1.0),
            };
            match slope.map(ViolationCostFn::linear) {
                Some(Ok(c)) => config.cost = c,
                _ => errors.push("`cost.slope` must be a positive number".into()),
            }
        }
        "table" => {
            let points: Option<Vec<(f64, f64)>> = t.get("points").and_then(|v| {
                v.as_array()?
                    .iter()
                    .map(|pair| {
                        let pair = number_array(pair)?;
                        (pair.len() == 2).then(|| (pair[0], pair[1]))
                    })
                    .collect()
            });
            match points.map(ViolationCostFn::table) {
                Some(Ok(c)) => config.cost = c,
                Some(Err(e)) => errors.push(format!("`cost.points`: {e}")),
                None => errors.push("`cost.points` must be an array of [magnitude, cost] pairs".into()),
            }
        }
        other => errors.push(format!(
            "unknown cost kind `{other}`; expected quadratic, linear or table"
        )),
    }
}

fn parse_solver(t: &toml::Table, config: &mut ExperimentConfig, errors: &mut Vec<String>) {
    const KEYS: [&str; 4] = ["mode", "resolution", "starts", "search_budget"];
    for key in t.keys() {
        if !KEYS.contains(&key.as_str()) {
            errors.push(format!("unknown key `solver.{key}`"));
        }
    }
    let mode = t.get("mode").and_then(|v| v.as_str()).unwrap_or("auto");
    let resolution = t.get("resolution").and_then(|v| v.as_integer());
    let starts = t.get("starts").and_then(|v| v.as_integer());
    let search_budget = t.get("search_budget").and_then(|v| v.as_integer());
    match mode {
        "auto" => config.solver = SolverChoice::Auto,
        "grid" => match resolution.unwrap_or(25) {
            r if r >= 2 => config.solver = SolverChoice::Grid { resolution: r as usize },
            _ => errors.push("`solver.resolution` must be at least 2".into()),
        },
        "multistart" => {
            let n_starts = starts.unwrap_or(20);
            let budget = search_budget.unwrap_or(120);
            if n_starts >= 1 && budget >= 1 {
                config.solver = SolverChoice::Multistart {
                    n_starts: n_starts as usize,
                    local_search_budget: budget as usize,
                };
            } else {
                errors.push("`solver.starts` and `solver.search_budget` must be at least 1".into());
            }
        }
        other => {
            errors.push(format!("unknown solver mode `{other}`; expected auto, grid or multistart"))
        }
    }
}

fn parse_gp(t: &toml::Table, config: &mut ExperimentConfig, errors: &mut Vec<String>) {
    const KEYS: [&str; 5] =
        ["noise_variance", "signal_variance", "lengthscales", "lengthscale_fraction", "refit"];
    for key in t.keys() {
        if !KEYS.contains(&key.as_str()) {
            errors.push(format!("unknown key `gp.{key}`"));
        }
    }
    if let Some(v) = t.get("noise_variance") {
        match number(v) {
            Some(n) if n >= 0.0 => config.gp.noise_variance = n,
            _ => errors.push("`gp.noise_variance` must be nonnegative".into()),
        }
    }
    if let Some(v) = t.get("signal_variance") {
        match number(v) {
            Some(s) if s > 0.0 => config.gp.signal_variance = Some(s),
            _ => errors.push("`gp.signal_variance` must be positive".into()),
        }
    }
    if let Some(v) = t.get("lengthscales") {
        match number_array(v) {
            Some(ls) if !ls.is_empty() && ls.iter().all(|l| *l > 0.0) => {
                config.gp.lengthscales = Some(ls)
            }
            _ => errors.push("`gp.lengthscales` must be an array of positive numbers".into()),
        }
    }
    if let Some(v) = t.get("lengthscale_fraction") {
        match number(v) {
            Some(f) if f > 0.0 => config.gp.lengthscale_fraction = f,
            _ => errors.push("`gp.lengthscale_fraction` must be positive".into()),
        }
    }
    if let Some(v) = t.get("refit") {
        match v.as_bool() {
            Some(r) => config.gp.refit_hyperparameters = r,
            None => errors.push("`gp.refit` must be a boolean".into()),
        }
    }
}

/// One (algorithm, budget, seed) cell of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub algorithm: AlgorithmChoice,
    pub budget: f64,
    pub seed: u64,
}

#[derive(Debug)]
struct CellOutcome {
    cell: Cell,
    trace: Option<RunTrace>,
    error: Option<String>,
}

/// What a finished campaign produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub cells: usize,
    pub failures: usize,
    pub trace_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
    pub chart_files: Vec<PathBuf>,
}

/// Expands the config into its cells, runs each one (in parallel when `jobs`
/// exceeds one), writes per-cell traces, a summary table and the two charts.
/// Reruns with the same config and seeds produce byte-identical CSVs.
pub fn run_campaign(
    config: &ExperimentConfig,
    out_dir: &Path,
    jobs: usize,
) -> Result<CampaignReport, CampaignError> {
    std::fs::create_dir_all(out_dir)?;
    let cells: Vec<Cell> = config
        .algorithms
        .iter()
        .flat_map(|&algorithm| {
            config.budgets.iter().flat_map(move |&budget| {
                config.seeds.iter().map(move |&seed| Cell { algorithm, budget, seed })
            })
        })
        .collect();

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<CellOutcome>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = jobs.max(1).min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= cells.len() {
                    break;
                }
                let outcome = run_cell(config, &cells[i], out_dir);
                outcomes.lock().expect("worker poisoned the outcome list")[i] = Some(outcome);
            });
        }
    });
    let outcomes: Vec<CellOutcome> = outcomes
        .into_inner()
        .expect("worker poisoned the outcome list")
        .into_iter()
        .map(|o| o.expect("every cell ran"))
        .collect();

    let mut failures = 0usize;
    let mut trace_files = Vec::new();
    for outcome in &outcomes {
        match (&outcome.trace, &outcome.error) {
            (Some(trace), None) => {
                trace_files.push(out_dir.join(trace_file_name(&outcome.cell)));
                if matches!(trace.termination, Termination::EvaluationFailure { .. }) {
                    failures += 1;
                }
            }
            _ => failures += 1,
        }
    }

    let summary_file = out_dir.join("summary.csv");
    write_summary(&summary_file, config, &outcomes)?;
    let chart_files = write_charts(out_dir, config, &outcomes)?;

    Ok(CampaignReport {
        cells: cells.len(),
        failures,
        trace_files,
        summary_file,
        chart_files,
    })
}

/// `trace_<algorithm>_<budget>_<seed>.csv`
pub fn trace_file_name(cell: &Cell) -> String {
    format!("trace_{}_{}_{}.csv", cell.algorithm.label(), cell.budget, cell.seed)
}

fn run_cell(config: &ExperimentConfig, cell: &Cell, out_dir: &Path) -> CellOutcome {
    let base = problem_by_name(&config.problem).expect("validated problem name");
    let problem: Box<dyn BlackBoxProblem> = if config.noise_sd > 0.0 {
        Box::new(NoisyProblem::new(base, config.noise_sd, cell.seed))
    } else {
        base
    };
    let n = problem.num_constraints();
    let vabo_config = VaboConfig {
        max_iterations: config.iterations,
        delta: config.delta,
        beta0: config.beta0,
        beta0_per_constraint: None,
        budgets: vec![cell.budget; n],
        cost_fns: vec![config.cost.clone(); n],
        domain: problem.domain().clone(),
        initial_safe_points: problem.initial_safe_points(),
        solver: config.solver.resolve(problem.dimension()),
        seed: cell.seed,
        gp: config.gp.clone(),
        inverse_cap_sigmas: 10.0,
    };
    let result = match cell.algorithm {
        AlgorithmChoice::Vabo => run(&problem, &vabo_config),
        AlgorithmChoice::Cbo => run_cbo(&problem, &vabo_config),
        AlgorithmChoice::SafeBo => {
            match BaselineKind::safe_bo(config.safe_bo_multiplier) {
                Ok(kind) => run_safe_bo(&problem, &vabo_config, &kind),
                Err(e) => Err(e),
            }
        }
    };
    match result {
        Ok(trace) => {
            let path = out_dir.join(trace_file_name(cell));
            let write = std::fs::File::create(&path)
                .and_then(|mut f| trace.write_csv(&mut f));
            match write {
                Ok(()) => CellOutcome { cell: cell.clone(), trace: Some(trace), error: None },
                Err(e) => CellOutcome {
                    cell: cell.clone(),
                    trace: Some(trace),
                    error: Some(format!("failed to write trace: {e}")),
                },
            }
        }
        Err(e) => CellOutcome { cell: cell.clone(), trace: None, error: Some(e.to_string()) },
    }
}

fn write_summary(
    path: &Path,
    config: &ExperimentConfig,
    outcomes: &[CellOutcome],
) -> Result<(), CampaignError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "algorithm,budget,seeds,final_incumbent_mean,final_incumbent_sd,total_spent_mean,total_spent_sd"
    )?;
    for &algorithm in &config.algorithms {
        for &budget in &config.budgets {
            let group: Vec<&RunTrace> = outcomes
                .iter()
                .filter(|o| o.cell.algorithm == algorithm && o.cell.budget == budget)
                .filter_map(|o| o.trace.as_ref())
                .collect();
            let incumbents: Vec<f64> = group
                .iter()
                .map(|t| t.final_incumbent().map_or(f64::NAN, |(_, v)| v))
                .collect();
            let spent: Vec<f64> =
                group.iter().map(|t| t.total_spent().iter().sum::<f64>()).collect();
            let (im, isd) = mean_sd(&incumbents);
            let (sm, ssd) = mean_sd(&spent);
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                algorithm.label(),
                budget,
                group.len(),
                format_float(im),
                format_float(isd),
                format_float(sm),
                format_float(ssd)
            )?;
        }
    }
    Ok(())
}

/// Mean and population standard deviation; (NaN, NaN) for an empty slice.
fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn write_charts(
    out_dir: &Path,
    config: &ExperimentConfig,
    outcomes: &[CellOutcome],
) -> Result<Vec<PathBuf>, CampaignError> {
    let mut convergence = Vec::new();
    let mut violation = Vec::new();
    for &algorithm in &config.algorithms {
        for &budget in &config.budgets {
            let group: Vec<&RunTrace> = outcomes
                .iter()
                .filter(|o| o.cell.algorithm == algorithm && o.cell.budget == budget)
                .filter_map(|o| o.trace.as_ref())
                .collect();
            if group.is_empty() {
                continue;
            }
            let label = format!("{} B={}", algorithm.label(), budget);
            let incumbents = mean_series(&group, config.iterations, |r| r.incumbent_value);
            let spent = mean_series(&group, config.iterations, |r| r.spent.iter().sum());
            convergence.push(LineSeries { label: label.clone(), points: incumbents });
            violation.push(LineSeries { label, points: spent });
        }
    }
    let convergence_path = out_dir.join("convergence.svg");
    std::fs::write(
        &convergence_path,
        render_line_chart(
            "Best feasible objective vs. iteration (mean over seeds)",
            "iteration",
            "best feasible objective",
            &convergence,
        ),
    )?;
    let violation_path = out_dir.join("violation.svg");
    std::fs::write(
        &violation_path,
        render_line_chart(
            "Cumulative violation cost vs. iteration (mean over seeds)",
            "iteration",
            "cumulative violation cost",
            &violation,
        ),
    )?;
    Ok(vec![convergence_path, violation_path])
}

/// Per-iteration mean of a record statistic across traces, carrying the last
/// value forward for runs that stopped early.
fn mean_series(
    group: &[&RunTrace],
    iterations: usize,
    stat: impl Fn(&crate::trace::IterationRecord) -> f64,
) -> Vec<(f64, f64)> {
    (0..=iterations)
        .map(|t| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for trace in group {
                // the state at iteration t is the last record with iteration <= t
                if let Some(r) = trace.records.iter().rev().find(|r| r.iteration <= t) {
                    let v = stat(r);
                    if v.is_finite() {
                        sum += v;
                        count += 1;
                    }
                }
            }
            (t as f64, if count > 0 { sum / count as f64 } else { f64::NAN })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_case_study_defaults() {
        let config = validate_config("").unwrap();
        assert_eq!(config.problem, "vcs-surrogate");
        assert_eq!(config.algorithms, vec![AlgorithmChoice::Vabo]);
        assert_eq!(config.budgets, vec![0.0, 10.0, 20.0]);
        assert_eq!(config.iterations, 20);
        assert_eq!(config.beta0, 1.0);
        assert_eq!(config.delta, 0.05);
        assert_eq!(config.seeds.len(), 10);
        assert_eq!(config.cost, ViolationCostFn::quadratic(1.0).unwrap());
    }

    #[test]
    fn out_of_range_delta_is_named() {
        let err = validate_config("delta = 1.5").unwrap_err();
        match err {
            ConfigError::Invalid(errors) => {
                assert_eq!(errors.len(), 1);
                assert!(errors[0].contains("delta"));
            }
            other => panic!("expected invalid-config error, got {other}"),
        }
    }

    #[test]
    fn negative_budget_is_named() {
        let err = validate_config("budgets = [-1]").unwrap_err();
        match err {
            ConfigError::Invalid(errors) => {
                assert!(errors[0].contains("budgets"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = validate_config("bogus = 1\n[solver]\nmoed = \"grid\"").unwrap_err();
        match err {
            ConfigError::Invalid(errors) => {
                assert!(errors.iter().any(|e| e.contains("`bogus`")), "{errors:?}");
                assert!(errors.iter().any(|e| e.contains("`solver.moed`")), "{errors:?}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn all_errors_are_collected_not_just_the_first() {
        let err = validate_config("delta = 7\nbeta0 = 0\niterations = 0").unwrap_err();
        match err {
            ConfigError::Invalid(errors) => assert_eq!(errors.len(), 3, "{errors:?}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position_information() {
        let err = validate_config("delta = = 1").unwrap_err();
        match err {
            ConfigError::Syntax(msg) => {
                assert!(msg.contains("line"), "syntax message should name a line: {msg}")
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn infinite_budgets_parse() {
        let config = validate_config("budgets = [inf]").unwrap();
        assert_eq!(config.budgets, vec![f64::INFINITY]);
    }

    #[test]
    fn lengthscale_dimension_mismatch_is_caught_up_front() {
        let err = validate_config(
            "problem = \"synthetic-2d\"\n[gp]\nlengthscales = [0.1, 0.2, 0.3]",
        )
        .unwrap_err();
        match err {
            ConfigError::Invalid(errors) => {
                assert!(errors[0].contains("lengthscales"), "{errors:?}");
                assert!(errors[0].contains("2-dimensional"), "{errors:?}");
            }
            other => panic!("unexpected {other}"),
        }
        assert!(validate_config("problem = \"synthetic-2d\"\n[gp]\nlengthscales = [0.1, 0.2]")
            .is_ok());
    }

    #[test]
    fn rich_config_round_trips() {
        let text = r#"
            problem = "synthetic-2d"
            algorithms = ["vabo", "cbo", "safe_bo"]
            budgets = [0, 10]
            iterations = 5
            delta = 0.1
            beta0 = 0.5
            seeds = [3, 14]
            noise_sd = 0.01
            jobs = 2

            [cost]
            kind = "linear"
            slope = 2.0

            [solver]
            mode = "multistart"
            starts = 7
            search_budget = 31

            [safe_bo]
            confidence_multiplier = 3.0

            [gp]
            noise_variance = 1e-5
            lengthscale_fraction = 0.3
            refit = true
        "#;
        let config = validate_config(text).unwrap();
        assert_eq!(config.problem, "synthetic-2d");
        assert_eq!(config.algorithms.len(), 3);
        assert_eq!(config.budgets, vec![0.0, 10.0]);
        assert_eq!(config.seeds, vec![3, 14]);
        assert_eq!(config.cost, ViolationCostFn::linear(2.0).unwrap());
        assert_eq!(
            config.solver,
            SolverChoice::Multistart { n_starts: 7, local_search_budget: 31 }
        );
        assert_eq!(config.safe_bo_multiplier, 3.0);
        assert_eq!(config.gp.lengthscale_fraction, 0.3);
        assert!(config.gp.refit_hyperparameters);
        assert_eq!(config.jobs, 2);
    }

    #[test]
    fn campaign_writes_the_contracted_files() {
        let dir = tempfile::tempdir().unwrap();
        let config = validate_config(
            "problem = \"quadratic-1d\"\nalgorithms = [\"vabo\"]\nbudgets = [10]\n\
             iterations = 3\nseeds = 2\n[solver]\nmode = \"grid\"\nresolution = 9",
        )
        .unwrap();
        let report = run_campaign(&config, dir.path(), 1).unwrap();
        assert_eq!(report.cells, 2);
        assert_eq!(report.failures, 0);
        assert_eq!(report.trace_files.len(), 2);
        for f in &report.trace_files {
            assert!(f.exists(), "{f:?}");
        }
        assert!(report.summary_file.exists());
        assert_eq!(report.chart_files.len(), 2);
        for f in &report.chart_files {
            assert!(f.exists());
        }
        let summary = std::fs::read_to_string(&report.summary_file).unwrap();
        let mut lines = summary.lines();
        assert_eq!(
            lines.next().unwrap(),
            "algorithm,budget,seeds,final_incumbent_mean,final_incumbent_sd,total_spent_mean,total_spent_sd"
        );
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn reruns_are_byte_identical_even_with_parallel_jobs() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let config = validate_config(
            "problem = \"quadratic-1d\"\nalgorithms = [\"vabo\", \"cbo\"]\nbudgets = [5]\n\
             iterations = 4\nseeds = 2\n[solver]\nmode = \"grid\"\nresolution = 11",
        )
        .unwrap();
        let a = run_campaign(&config, dir_a.path(), 1).unwrap();
        let b = run_campaign(&config, dir_b.path(), 4).unwrap();
        assert_eq!(a.trace_files.len(), b.trace_files.len());
        for (fa, fb) in a.trace_files.iter().zip(&b.trace_files) {
            assert_eq!(fa.file_name(), fb.file_name());
            let ba = std::fs::read(fa).unwrap();
            let bb = std::fs::read(fb).unwrap();
            assert_eq!(ba, bb, "trace {fa:?} differs across reruns");
        }
        let sa = std::fs::read(&a.summary_file).unwrap();
        let sb = std::fs::read(&b.summary_file).unwrap();
        assert_eq!(sa, sb);
    }
}
