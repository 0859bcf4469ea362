//! Per-run trace records and their CSV serialization.

use crate::domain::ParameterPoint;
use std::io::{self, Write};

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// All iterations were used.
    IterationsExhausted,
    /// The remaining budget of this constraint went negative.
    BudgetExhausted { constraint: usize },
    /// The black box failed; the trace carries the iterations completed
    /// before the failure.
    EvaluationFailure { message: String },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::IterationsExhausted => "iterations_exhausted",
            Termination::BudgetExhausted { .. } => "budget_exhausted",
            Termination::EvaluationFailure { .. } => "evaluation_failure",
        }
    }
}

/// One evaluated point and the optimizer state right after it. Records with
/// `iteration == 0` are the initial safe-set evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub point: ParameterPoint,
    pub objective: f64,
    pub constraints: Vec<f64>,
    pub incumbent_point: Option<ParameterPoint>,
    /// NaN until a feasible point has been seen.
    pub incumbent_value: f64,
    pub spent: Vec<f64>,
    pub remaining: Vec<f64>,
    /// True when the chance-feasible set was empty at selection time and the
    /// fallback rule picked this point (for the safe baseline: the safe set
    /// was empty and a known-safe point was re-sampled).
    pub chance_set_empty: bool,
}

/// Full log of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub problem: String,
    pub algorithm: String,
    pub budgets: Vec<f64>,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub warnings: Vec<String>,
}

impl RunTrace {
    /// Best feasible point seen over the whole run.
    pub fn final_incumbent(&self) -> Option<(&ParameterPoint, f64)> {
        self.records
            .iter()
            .rev()
            .find_map(|r| r.incumbent_point.as_ref().map(|p| (p, r.incumbent_value)))
    }

    /// Cumulative violation cost per constraint at the end of the run.
    pub fn total_spent(&self) -> Vec<f64> {
        self.records.last().map(|r| r.spent.clone()).unwrap_or_default()
    }

    /// Number of optimizer iterations (excluding initial safe-set rows).
    pub fn iterations_used(&self) -> usize {
        self.records.iter().map(|r| r.iteration).max().unwrap_or(0)
    }

    /// The stable CSV header for a problem with the given shape.
    pub fn csv_header(dimension: usize, n_constraints: usize) -> String {
        let mut cols = vec!["iteration".to_string()];
        cols.extend((1..=dimension).map(|d| format!("theta_{d}")));
        cols.push("objective".into());
        cols.extend((1..=n_constraints).map(|i| format!("g_{i}")));
        cols.push("incumbent_value".into());
        cols.extend((1..=n_constraints).map(|i| format!("spent_{i}")));
        cols.extend((1..=n_constraints).map(|i| format!("remaining_{i}")));
        cols.push("chance_set_empty".into());
        cols.join(",")
    }

    /// Writes the trace as CSV. Floats carry 17 significant digits so a
    /// rerun of the same campaign is byte-identical and values round-trip
    /// exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let dim = self.records.first().map_or(0, |r| r.point.dim());
        let n = self.budgets.len();
        writeln!(w, "{}", Self::csv_header(dim, n))?;
        for r in &self.records {
            let mut fields = vec![r.iteration.to_string()];
            fields.extend(r.point.iter().map(|&x| format_float(x)));
            fields.push(format_float(r.objective));
            fields.extend(r.constraints.iter().map(|&g| format_float(g)));
            fields.push(format_float(r.incumbent_value));
            fields.extend(r.spent.iter().map(|&s| format_float(s)));
            fields.extend(r.remaining.iter().map(|&s| format_float(s)));
            fields.push(if r.chance_set_empty { "1".into() } else { "0".into() });
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// 17 significant digits: enough to reproduce any f64 bit pattern exactly.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}
