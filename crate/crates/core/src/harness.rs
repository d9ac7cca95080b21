//! Experiment runner: builds the system, runs a set of solvers on it with
//! identical starting data, writes convergence histories as CSV and measures
//! where two histories part ways.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use crate::error::{check_len, Error, Result};
use crate::linalg::{read_matrix_market, toeplitz_banded, SparseMatrix, Vector};
use crate::solvers::{ConvergenceRecord, Method, SolverConfig, SolverOutcome};

/// Relative residuals of exactly zero are clamped to this before `log10`.
pub const RELRES_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Toeplitz { n: usize, gamma: f64 },
    MatrixMarket(PathBuf),
}

impl MatrixSource {
    pub fn load(&self) -> Result<SparseMatrix> {
        match self {
            MatrixSource::Toeplitz { n, gamma } => toeplitz_banded(*n, *gamma),
            MatrixSource::MatrixMarket(path) => {
                let file = File::open(path)?;
                read_matrix_market(BufReader::new(file))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum RhsPolicy {
    /// `b = A [1, 1, ..., 1]^T`.
    #[default]
    AOnes,
    /// Whitespace-separated values; lines starting with `%` or `#` are skipped.
    FromFile(PathBuf),
}

impl RhsPolicy {
    pub fn build(&self, a: &SparseMatrix) -> Result<Vector> {
        match self {
            RhsPolicy::AOnes => a.matvec(&vec![1.0; a.n_cols()]),
            RhsPolicy::FromFile(path) => {
                let b = read_vector(BufReader::new(File::open(path)?))?;
                check_len(a.n_rows(), b.len())?;
                Ok(b)
            }
        }
    }
}

/// Parses a plain list of reals (whitespace or newline separated).
pub fn read_vector<R: BufRead>(reader: R) -> Result<Vector> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        for tok in t.split_whitespace() {
            let v = tok.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("line {}: cannot parse `{tok}` as a real", i + 1))
            })?;
            values.push(v);
        }
    }
    Ok(values.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub matrix_source: MatrixSource,
    pub solvers: Vec<Method>,
    pub rhs_policy: RhsPolicy,
    pub tolerance: f64,
    /// `None` means `10 n`.
    pub max_iterations: Option<usize>,
    /// Reserved; the built-in fixtures are deterministic.
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Toeplitz fixture with `b = A 1`, `x0 = 0`, `r~0 = r0` and tolerance 1e-12.
    pub fn toeplitz(n: usize, gamma: f64, solvers: Vec<Method>) -> Self {
        ExperimentConfig {
            matrix_source: MatrixSource::Toeplitz { n, gamma },
            solvers,
            rhs_policy: RhsPolicy::AOnes,
            tolerance: 1e-12,
            max_iterations: None,
            seed: 0,
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::InvalidConfig("no solvers selected".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            ..SolverConfig::default()
        }
    }
}

/// Runs every selected solver on the same `A`, `b`, `x0 = 0` and `r~0 = r0`.
///
/// Breakdowns end up in each outcome's status; only input problems (missing
/// file, shape mismatch, bad config) are errors. Repeated solver ids are run
/// once.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<IndexMap<Method, SolverOutcome>> {
    cfg.validate()?;
    let a = cfg.matrix_source.load()?;
    let b = cfg.rhs_policy.build(&a)?;
    run_on(&a, &b, &cfg.solvers, &cfg.solver_config())
}

/// Runs `methods` on an already assembled system, one thread per solver.
pub fn run_on(
    a: &SparseMatrix,
    b: &[f64],
    methods: &[Method],
    solver_cfg: &SolverConfig,
) -> Result<IndexMap<Method, SolverOutcome>> {
    let mut unique: Vec<Method> = Vec::with_capacity(methods.len());
    for m in methods {
        if !unique.contains(m) {
            unique.push(*m);
        }
    }
    let results: Vec<Result<SolverOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = unique
            .iter()
            .map(|m| scope.spawn(move || m.solve(a, b, solver_cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    unique.into_iter().zip(results).map(|(m, r)| Ok((m, r?))).collect()
}

/// Writes `iter,<id>_relres,...` with one row per iteration index.
///
/// Shorter histories leave their cells empty. Values use 17 significant
/// digits so parsing them back is exact.
pub fn emit_csv<W: Write>(outcomes: &IndexMap<Method, SolverOutcome>, writer: W) -> Result<()> {
    if outcomes.is_empty() {
        return Err(Error::InvalidConfig("nothing to write".into()));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["iter".to_string()];
    header.extend(outcomes.keys().map(|m| format!("{}_relres", m.id())));
    w.write_record(&header)?;

    let rows = outcomes.values().map(|o| o.record.relres.len()).max().unwrap_or(0);
    for i in 0..rows {
        let mut row = vec![i.to_string()];
        row.extend(outcomes.values().map(|o| match o.record.relres.get(i) {
            Some(v) => format!("{v:.16e}"),
            None => String::new(),
        }));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(outcomes: &IndexMap<Method, SolverOutcome>, path: &Path) -> Result<()> {
    emit_csv(outcomes, File::create(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    /// First index whose log10 gap exceeds the threshold.
    pub first_divergent_iteration: Option<usize>,
    /// Largest gap strictly before the divergence point (over the whole
    /// common prefix when there is none).
    pub max_relative_gap_before: f64,
    /// `|log10 a_k - log10 b_k|` over the common prefix.
    pub per_iteration_gaps: Vec<f64>,
}

/// Compares two relative-residual histories in decades.
pub fn compare_histories(a: &ConvergenceRecord, b: &ConvergenceRecord, gap_threshold: f64) -> DivergenceReport {
    compare_relres(&a.relres, &b.relres, gap_threshold)
        .expect("convergence records always hold the starting residual")
}

/// Slice form of [`compare_histories`]; fails on an empty history.
pub fn compare_relres(a: &[f64], b: &[f64], gap_threshold: f64) -> Result<DivergenceReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let log = |v: f64| v.max(RELRES_FLOOR).log10();
    let gaps: Vec<f64> = a.iter().zip(b).map(|(&u, &v)| (log(u) - log(v)).abs()).collect();
    let first = gaps.iter().position(|&g| g > gap_threshold);
    let before = &gaps[..first.unwrap_or(gaps.len())];
    let max_before = before.iter().copied().fold(0.0, f64::max);
    Ok(DivergenceReport {
        first_divergent_iteration: first,
        max_relative_gap_before: max_before,
        per_iteration_gaps: gaps,
    })
}
