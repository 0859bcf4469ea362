//! The violation-aware optimization loop.
//!
//! Each iteration fits one Gaussian process per output on everything
//! observed so far, solves the auxiliary problem — maximize constrained
//! expected improvement over the chance-feasible set — evaluates the black
//! box there, charges the realized violation cost against the budgets, and
//! stops early once any remaining budget goes negative.

use crate::acquisition::{AcquisitionContext, AcquisitionValues};
use crate::baselines::BaselineKind;
use crate::domain::{BoxDomain, Observation, ParameterPoint};
use crate::gp::{GaussianProcess, GpError, RbfKernel};
use crate::problems::BlackBoxProblem;
use crate::trace::{IterationRecord, RunTrace, Termination};
use crate::violation::{ViolationAccount, ViolationCostFn, ViolationError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VaboError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "no feasible evaluated point exists; the optimizer assumes the initial safe set \
         contains at least one point with every constraint satisfied"
    )]
    NoFeasiblePoint,
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Acquisition(#[from] crate::acquisition::AcquisitionError),
    #[error(transparent)]
    Violation(#[from] ViolationError),
    #[error(transparent)]
    Problem(#[from] crate::problems::ProblemError),
}

/// How the auxiliary problem is optimized each iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum AuxiliarySolver {
    /// Evaluate every node of a full-factorial grid with this many points
    /// per dimension. Exact up to the grid, deterministic tie-breaks.
    Grid { resolution: usize },
    /// Coordinate-wise pattern search from seeded uniform starting points,
    /// probing at most `local_search_budget` candidates per start.
    Multistart { n_starts: usize, local_search_budget: usize },
}

impl AuxiliarySolver {
    /// Grid for small spaces, pattern search above three dimensions.
    pub fn default_for_dimension(dim: usize) -> Self {
        if dim <= 3 {
            AuxiliarySolver::Grid { resolution: 25 }
        } else {
            AuxiliarySolver::Multistart { n_starts: 20, local_search_budget: 120 }
        }
    }
}

/// Gaussian-process hyperparameter policy for the optimizer loop.
///
/// Unset fields fall back to deterministic data-driven heuristics: the
/// signal variance tracks the mean square of the centered targets and the
/// lengthscales are a fixed fraction of each domain span. `refit` switches
/// on marginal-likelihood refitting every iteration instead.
#[derive(Debug, Clone, PartialEq)]
pub struct GpSettings {
    pub signal_variance: Option<f64>,
    pub lengthscales: Option<Vec<f64>>,
    pub lengthscale_fraction: f64,
    pub noise_variance: f64,
    pub refit_hyperparameters: bool,
}

impl Default for GpSettings {
    fn default() -> Self {
        GpSettings {
            signal_variance: None,
            lengthscales: None,
            lengthscale_fraction: 0.2,
            noise_variance: 1e-6,
            refit_hyperparameters: false,
        }
    }
}

/// Full configuration of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct VaboConfig {
    /// Iteration horizon T.
    pub max_iterations: usize,
    /// Overall probability level of the budget guarantee.
    pub delta: f64,
    /// Base fraction of the remaining budget each step may consume.
    pub beta0: f64,
    /// Optional per-constraint overrides of `beta0`.
    pub beta0_per_constraint: Option<Vec<f64>>,
    /// Violation budgets, one per constraint; infinity disables the limit.
    pub budgets: Vec<f64>,
    pub cost_fns: Vec<ViolationCostFn>,
    pub domain: BoxDomain,
    pub initial_safe_points: Vec<ParameterPoint>,
    pub solver: AuxiliarySolver,
    pub seed: u64,
    pub gp: GpSettings,
    /// The inverse violation function is searched on [0, prior + this many
    /// signal standard deviations]; only saturating cost functions notice.
    pub inverse_cap_sigmas: f64,
}

impl VaboConfig {
    /// Defaults for a given problem: T = 20, delta = 0.05, beta0 = 1,
    /// quadratic costs with budget 10 per constraint, the problem's own
    /// domain and safe starting points, and a dimension-appropriate solver.
    pub fn for_problem(problem: &dyn BlackBoxProblem) -> Self {
        let n = problem.num_constraints();
        VaboConfig {
            max_iterations: 20,
            delta: 0.05,
            beta0: 1.0,
            beta0_per_constraint: None,
            budgets: vec![10.0; n],
            cost_fns: vec![
                ViolationCostFn::quadratic(1.0).expect("unit coefficient is valid");
                n
            ],
            domain: problem.domain().clone(),
            initial_safe_points: problem.initial_safe_points(),
            solver: AuxiliarySolver::default_for_dimension(problem.dimension()),
            seed: 0,
            gp: GpSettings::default(),
            inverse_cap_sigmas: 10.0,
        }
    }

    pub fn validate(&self, problem: &dyn BlackBoxProblem) -> Result<(), VaboError> {
        let bad = |msg: String| Err(VaboError::InvalidConfig(msg));
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.beta0 > 0.0 && self.beta0 <= 1.0) {
            return bad(format!("beta0 must lie in (0, 1], got {}", self.beta0));
        }
        let n = problem.num_constraints();
        if self.budgets.len() != n {
            return bad(format!("expected {n} budgets, got {}", self.budgets.len()));
        }
        if self.cost_fns.len() != n {
            return bad(format!("expected {n} cost functions, got {}", self.cost_fns.len()));
        }
        if let Some(b) = self.budgets.iter().find(|b| **b < 0.0 || b.is_nan()) {
            return bad(format!("budgets must be nonnegative, got {b}"));
        }
        if let Some(betas) = &self.beta0_per_constraint {
            if betas.len() != n {
                return bad(format!("expected {n} per-constraint beta values"));
            }
            if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
                return bad(format!("per-constraint beta must lie in (0, 1], got {b}"));
            }
        }
        if self.domain.dim() != problem.dimension() {
            return bad(format!(
                "domain dimension {} does not match problem dimension {}",
                self.domain.dim(),
                problem.dimension()
            ));
        }
        let pd = problem.domain();
        for d in 0..self.domain.dim() {
            if self.domain.lower()[d] < pd.lower()[d] || self.domain.upper()[d] > pd.upper()[d] {
                return bad(format!("search domain exceeds the problem domain in dimension {d}"));
            }
        }
        if self.initial_safe_points.is_empty() {
            return bad("at least one initial safe point is required".into());
        }
        for p in &self.initial_safe_points {
            if !self.domain.contains(p) {
                return bad(format!("initial safe point {:?} lies outside the domain", p.coords()));
            }
        }
        match self.solver {
            AuxiliarySolver::Grid { resolution } if resolution < 2 => {
                return bad(format!("grid resolution must be at least 2, got {resolution}"));
            }
            AuxiliarySolver::Multistart { n_starts, local_search_budget }
                if (n_starts < 1 || local_search_budget < 1) => {
                    return bad("multistart needs at least one start and one probe".into());
                }
            _ => {}
        }
        if !(self.gp.noise_variance >= 0.0) {
            return bad(format!("noise variance must be nonnegative, got {}", self.gp.noise_variance));
        }
        if !(self.gp.lengthscale_fraction > 0.0) {
            return bad("lengthscale fraction must be positive".into());
        }
        if let Some(sv) = self.gp.signal_variance {
            if !(sv > 0.0) {
                return bad(format!("signal variance must be positive, got {sv}"));
            }
        }
        if let Some(ls) = &self.gp.lengthscales {
            if ls.len() != self.domain.dim() {
                return bad(format!("expected {} lengthscales, got {}", self.domain.dim(), ls.len()));
            }
            if let Some(l) = ls.iter().find(|l| !(**l > 0.0)) {
                return bad(format!("lengthscales must be positive, got {l}"));
            }
        }
        if !(self.inverse_cap_sigmas > 0.0) {
            return bad("inverse_cap_sigmas must be positive".into());
        }
        Ok(())
    }

    fn beta0_for(&self, constraint: usize) -> f64 {
        self.beta0_per_constraint.as_ref().map_or(self.beta0, |b| b[constraint])
    }
}

/// Per-iteration risk levels: a uniform schedule with
/// epsilon_t = 1 - (1 - delta)^(1/T), whose product over all iterations
/// recovers 1 - delta.
pub fn epsilon_schedule(delta: f64, t_max: usize) -> Result<Vec<f64>, VaboError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(VaboError::InvalidConfig(format!("delta must lie in (0, 1), got {delta}")));
    }
    if t_max < 1 {
        return Err(VaboError::InvalidConfig("the horizon must be at least 1".into()));
    }
    let epsilon = 1.0 - (1.0 - delta).powf(1.0 / t_max as f64);
    Ok(vec![epsilon; t_max])
}

/// Budget fraction available at iteration `t` of `t_max`:
/// max(beta0, 1 / (T - t + 1)). Reaches 1 at the final iteration.
pub fn beta_schedule(beta0: f64, t_max: usize, t: usize) -> f64 {
    assert!(t >= 1 && t <= t_max, "iteration {t} outside 1..={t_max}");
    beta0.max(1.0 / (t_max - t + 1) as f64)
}

/// Best feasible evaluated point: minimum observed objective over every
/// observation with all constraints at or below zero, ties broken by
/// earliest evaluation. Pass the initial safe-set evaluations first,
/// followed by the history in evaluation order.
pub fn incumbent(evaluations: &[Observation]) -> Result<(ParameterPoint, f64), VaboError> {
    let mut best: Option<(&Observation, f64)> = None;
    for obs in evaluations {
        if obs.is_feasible() && best.is_none_or(|(_, b)| obs.objective < b) {
            best = Some((obs, obs.objective));
        }
    }
    best.map(|(obs, value)| (obs.point.clone(), value)).ok_or(VaboError::NoFeasiblePoint)
}

/// Result of one auxiliary-problem solve.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliarySolution {
    pub point: ParameterPoint,
    /// True when no probed point satisfied the chance constraint and the
    /// fallback (most-probably-affordable point) was returned.
    pub chance_feasible_set_empty: bool,
}

/// Maximizes CEI over the chance-feasible set. Grid mode scans every node in
/// lexicographic index order (first node wins ties); multistart mode runs a
/// coordinate-wise pattern search from seeded uniform starts, restricted to
/// the chance-feasible set. When nothing probed is chance-feasible, the
/// probed point with the highest budget-constraint probability is returned
/// and flagged.
pub fn solve_auxiliary(
    ctx: &AcquisitionContext,
    domain: &BoxDomain,
    solver: &AuxiliarySolver,
    rng: &mut ChaCha8Rng,
) -> AuxiliarySolution {
    let (point, flagged) = search(ctx, domain, solver, rng, &Filter::ChanceConstraint);
    AuxiliarySolution { point, chance_feasible_set_empty: flagged }
}

/// Candidate admissibility rule used by the selection search.
pub(crate) enum Filter<'a> {
    /// The probabilistic budget constraint (violation-aware mode).
    ChanceConstraint,
    /// No restriction (generic constrained BO).
    None,
    /// Confidence-bound safe set: mean + multiplier * sd <= 0 for every
    /// constraint process.
    SafeSet { multiplier: f64, constraint_gps: &'a [GaussianProcess] },
}

impl Filter<'_> {
    fn admits(&self, point: &ParameterPoint, values: &AcquisitionValues) -> bool {
        match self {
            Filter::ChanceConstraint => values.chance_feasible,
            Filter::None => true,
            Filter::SafeSet { multiplier, constraint_gps } => constraint_gps.iter().all(|gp| {
                let (mean, sd) = gp.posterior(point).expect("fitted constraint process");
                mean + multiplier * sd <= 0.0
            }),
        }
    }
}

struct SearchState {
    best_admitted: Option<(f64, ParameterPoint)>,
    best_probability: Option<(f64, ParameterPoint)>,
}

impl SearchState {
    fn new() -> Self {
        SearchState { best_admitted: None, best_probability: None }
    }

    /// Records one probed candidate. Strict improvement is required to
    /// replace the running best, so the earliest probe wins ties.
    fn observe(&mut self, point: &ParameterPoint, values: &AcquisitionValues, admitted: bool) {
        if admitted && self.best_admitted.as_ref().is_none_or(|(c, _)| values.cei > *c) {
            self.best_admitted = Some((values.cei, point.clone()));
        }
        if self
            .best_probability
            .as_ref()
            .is_none_or(|(p, _)| values.chance_probability > *p)
        {
            self.best_probability = Some((values.chance_probability, point.clone()));
        }
    }
}

pub(crate) fn search(
    ctx: &AcquisitionContext,
    domain: &BoxDomain,
    solver: &AuxiliarySolver,
    rng: &mut ChaCha8Rng,
    filter: &Filter,
) -> (ParameterPoint, bool) {
    let mut state = SearchState::new();
    match *solver {
        AuxiliarySolver::Grid { resolution } => {
            grid_search(ctx, domain, resolution, filter, &mut state);
        }
        AuxiliarySolver::Multistart { n_starts, local_search_budget } => {
            multistart_search(ctx, domain, n_starts, local_search_budget, rng, filter, &mut state);
        }
    }
    match state.best_admitted {
        Some((_, point)) => (point, false),
        None => {
            let (_, point) =
                state.best_probability.expect("search probes at least one candidate");
            (point, true)
        }
    }
}

fn grid_search(
    ctx: &AcquisitionContext,
    domain: &BoxDomain,
    resolution: usize,
    filter: &Filter,
    state: &mut SearchState,
) {
    let dim = domain.dim();
    let axes: Vec<Vec<f64>> = (0..dim).map(|d| domain.linspace(d, resolution)).collect();
    let mut indices = vec![0usize; dim];
    loop {
        let coords: Vec<f64> = indices.iter().enumerate().map(|(d, &i)| axes[d][i]).collect();
        let point: ParameterPoint = coords.into();
        let values = ctx.evaluate(&point);
        let admitted = filter.admits(&point, &values);
        state.observe(&point, &values, admitted);
        // odometer, last dimension fastest: lexicographic index order
        let mut d = dim;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            indices[d] += 1;
            if indices[d] < resolution {
                break;
            }
            indices[d] = 0;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn multistart_search(
    ctx: &AcquisitionContext,
    domain: &BoxDomain,
    n_starts: usize,
    local_search_budget: usize,
    rng: &mut ChaCha8Rng,
    filter: &Filter,
    state: &mut SearchState,
) {
    let dim = domain.dim();
    let max_span = (0..dim).map(|d| domain.span(d)).fold(0.0, f64::max);
    let starts: Vec<ParameterPoint> = (0..n_starts).map(|_| domain.sample(rng)).collect();
    for start in starts {
        let values = ctx.evaluate(&start);
        let mut current_admitted = filter.admits(&start, &values);
        state.observe(&start, &values, current_admitted);
        let mut current = start;
        let mut current_cei = values.cei;
        let mut probes_left = local_search_budget;
        let mut steps: Vec<f64> = (0..dim).map(|d| 0.25 * domain.span(d)).collect();

        while probes_left > 0 && steps.iter().cloned().fold(0.0, f64::max) > 1e-3 * max_span {
            // one sweep over +/- moves along each coordinate
            let mut best_move: Option<(f64, ParameterPoint)> = None;
            'sweep: for d in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut coords = current.coords().to_vec();
                    coords[d] = (coords[d] + sign * steps[d])
                        .clamp(domain.lower()[d], domain.upper()[d]);
                    if coords[d] == current[d] {
                        continue;
                    }
                    let candidate: ParameterPoint = coords.into();
                    let values = ctx.evaluate(&candidate);
                    let admitted = filter.admits(&candidate, &values);
                    state.observe(&candidate, &values, admitted);
                    probes_left -= 1;
                    // ascent restricted to admitted points; an admitted move
                    // always beats staying on an inadmissible current point
                    if admitted
                        && (!current_admitted || values.cei > current_cei)
                        && best_move.as_ref().is_none_or(|(c, _)| values.cei > *c)
                    {
                        best_move = Some((values.cei, candidate));
                    }
                    if probes_left == 0 {
                        break 'sweep;
                    }
                }
            }
            match best_move {
                Some((cei, point)) => {
                    current = point;
                    current_cei = cei;
                    current_admitted = true;
                }
                None => {
                    for s in &mut steps {
                        *s *= 0.5;
                    }
                }
            }
        }
    }
}

/// Selection behavior shared by the optimizer and the baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Strategy {
    Vabo,
    Cbo,
    SafeBo { multiplier: f64 },
}

impl Strategy {
    pub(crate) fn label(&self) -> &'static str {
        match self {
            Strategy::Vabo => "vabo",
            Strategy::Cbo => "cbo",
            Strategy::SafeBo { .. } => "safe_bo",
        }
    }

    pub(crate) fn from_kind(kind: &BaselineKind) -> Strategy {
        match kind {
            BaselineKind::Cbo => Strategy::Cbo,
            BaselineKind::SafeBo { confidence_multiplier } => {
                Strategy::SafeBo { multiplier: *confidence_multiplier }
            }
        }
    }
}

/// Runs violation-aware Bayesian optimization. Fully deterministic for a
/// fixed (problem, config) pair: reruns produce bit-identical traces.
pub fn run(problem: &dyn BlackBoxProblem, config: &VaboConfig) -> Result<RunTrace, VaboError> {
    run_with_strategy(problem, config, Strategy::Vabo)
}

pub(crate) fn run_with_strategy(
    problem: &dyn BlackBoxProblem,
    config: &VaboConfig,
    strategy: Strategy,
) -> Result<RunTrace, VaboError> {
    config.validate(problem)?;
    let t_max = config.max_iterations;
    let n_constraints = problem.num_constraints();
    let epsilons = epsilon_schedule(config.delta, t_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut account = ViolationAccount::new(config.budgets.clone(), config.cost_fns.clone())?;
    let mut evaluations: Vec<Observation> = Vec::new();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    let finish = |records, termination, warnings| RunTrace {
        problem: problem.name().to_string(),
        algorithm: strategy.label().to_string(),
        budgets: config.budgets.clone(),
        seed: config.seed,
        records,
        termination,
        warnings,
    };

    // Evaluate the initial safe set first.
    for (idx, point) in config.initial_safe_points.iter().enumerate() {
        match problem.evaluate(point) {
            Ok((objective, constraints)) => {
                let obs = Observation::new(point.clone(), objective, constraints);
                if !obs.is_feasible() {
                    warnings.push(format!(
                        "initial safe point #{idx} at {:?} violates constraints (g = {:?}); \
                         the feasible-start assumption does not hold",
                        obs.point.coords(),
                        obs.constraints
                    ));
                }
                evaluations.push(obs);
                let inc = incumbent(&evaluations).ok();
                records.push(make_record(0, &evaluations, &inc, &account, false));
            }
            Err(e) => {
                return Ok(finish(
                    records,
                    Termination::EvaluationFailure { message: e.to_string() },
                    warnings,
                ));
            }
        }
    }

    let mut best = incumbent(&evaluations)?;

    let mut termination = Termination::IterationsExhausted;
    for t in 1..=t_max {
        let (objective_gp, constraint_gps) =
            fit_gps(&evaluations, &config.gp, &config.domain, n_constraints)?;
        let betas: Vec<f64> =
            (0..n_constraints).map(|i| beta_schedule(config.beta0_for(i), t_max, t)).collect();
        let inverse_caps: Vec<f64> = constraint_gps
            .iter()
            .map(|gp| {
                gp.prior_mean() + config.inverse_cap_sigmas * gp.kernel().signal_variance().sqrt()
            })
            .collect();
        let ctx = AcquisitionContext::new(
            &objective_gp,
            &constraint_gps,
            best.1,
            &account.remaining_all(),
            &betas,
            epsilons[t - 1],
            &config.cost_fns,
            &inverse_caps,
        )?;
        let filter = match strategy {
            Strategy::Vabo => Filter::ChanceConstraint,
            Strategy::Cbo => Filter::None,
            Strategy::SafeBo { multiplier } => {
                Filter::SafeSet { multiplier, constraint_gps: &constraint_gps }
            }
        };
        let (candidate, flagged) =
            search(&ctx, &config.domain, &config.solver, &mut rng, &filter);
        let candidate = match (&strategy, flagged) {
            // The safe baseline re-samples the least uncertain known-safe
            // point instead of gambling on the fallback.
            (Strategy::SafeBo { .. }, true) => {
                least_uncertain_known_safe(&evaluations, &constraint_gps)
            }
            _ => candidate,
        };

        match problem.evaluate(&candidate) {
            Ok((objective, constraints)) => {
                let exhausted = account.charge(&constraints)?;
                evaluations.push(Observation::new(candidate, objective, constraints));
                if let Ok(inc) = incumbent(&evaluations) {
                    best = inc;
                }
                records.push(make_record(t, &evaluations, &Some(best.clone()), &account, flagged));
                if let Some(&constraint) = exhausted.first() {
                    termination = Termination::BudgetExhausted { constraint };
                    break;
                }
            }
            Err(e) => {
                termination = Termination::EvaluationFailure { message: e.to_string() };
                break;
            }
        }
    }

    Ok(finish(records, termination, warnings))
}

fn make_record(
    iteration: usize,
    evaluations: &[Observation],
    incumbent: &Option<(ParameterPoint, f64)>,
    account: &ViolationAccount,
    chance_set_empty: bool,
) -> IterationRecord {
    let last = evaluations.last().expect("record follows an evaluation");
    IterationRecord {
        iteration,
        point: last.point.clone(),
        objective: last.objective,
        constraints: last.constraints.clone(),
        incumbent_point: incumbent.as_ref().map(|(p, _)| p.clone()),
        incumbent_value: incumbent.as_ref().map_or(f64::NAN, |(_, v)| *v),
        spent: account.spent().to_vec(),
        remaining: account.remaining_all(),
        chance_set_empty,
    }
}

fn heuristic_lengthscales(settings: &GpSettings, domain: &BoxDomain) -> Vec<f64> {
    settings.lengthscales.clone().unwrap_or_else(|| {
        (0..domain.dim())
            .map(|d| {
                let span = domain.span(d);
                if span > 0.0 {
                    settings.lengthscale_fraction * span
                } else {
                    1.0
                }
            })
            .collect()
    })
}

fn fit_scalar_gp(
    data: &[(ParameterPoint, f64)],
    prior_mean: f64,
    settings: &GpSettings,
    domain: &BoxDomain,
) -> Result<GaussianProcess, GpError> {
    let signal_variance = settings.signal_variance.unwrap_or_else(|| {
        let msq =
            data.iter().map(|(_, y)| (y - prior_mean).powi(2)).sum::<f64>() / data.len() as f64;
        msq.max(1e-6)
    });
    let kernel = RbfKernel::new(signal_variance, heuristic_lengthscales(settings, domain))?;
    let gp = GaussianProcess::new(kernel, prior_mean, settings.noise_variance)?;
    let fitted = gp.fit(data)?;
    if settings.refit_hyperparameters && data.len() >= 3 {
        fitted.fit_hyperparameters()
    } else {
        Ok(fitted)
    }
}

/// Fits the models the optimizer uses at one iteration: one process on the
/// objective (prior mean = empirical mean of the observed objective) and one
/// per constraint (zero prior mean, since constraints are threshold
/// centered). Deterministic in the data order.
pub fn fit_gps(
    evaluations: &[Observation],
    settings: &GpSettings,
    domain: &BoxDomain,
    n_constraints: usize,
) -> Result<(GaussianProcess, Vec<GaussianProcess>), GpError> {
    let data: Vec<(ParameterPoint, f64)> =
        evaluations.iter().map(|o| (o.point.clone(), o.objective)).collect();
    let prior_mean = data.iter().map(|(_, y)| y).sum::<f64>() / data.len() as f64;
    let objective = fit_scalar_gp(&data, prior_mean, settings, domain)?;
    let constraints = (0..n_constraints)
        .map(|i| {
            let data: Vec<(ParameterPoint, f64)> =
                evaluations.iter().map(|o| (o.point.clone(), o.constraints[i])).collect();
            fit_scalar_gp(&data, 0.0, settings, domain)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((objective, constraints))
}

fn least_uncertain_known_safe(
    evaluations: &[Observation],
    constraint_gps: &[GaussianProcess],
) -> ParameterPoint {
    let mut best: Option<(f64, &ParameterPoint)> = None;
    for obs in evaluations {
        if !obs.is_feasible() {
            continue;
        }
        let worst_sd = constraint_gps
            .iter()
            .map(|gp| gp.posterior(&obs.point).expect("fitted constraint process").1)
            .fold(0.0, f64::max);
        if best.is_none_or(|(b, _)| worst_sd < b) {
            best = Some((worst_sd, &obs.point));
        }
    }
    best.map(|(_, p)| p.clone())
        .unwrap_or_else(|| evaluations.first().expect("non-empty history").point.clone())
}
