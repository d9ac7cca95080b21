//! Krylov solvers for `A x = b`.
//!
//! Every solver starts from `x0` (zero unless configured), stops when the
//! recursively updated residual satisfies `||r_k||_2 / ||b||_2 < tolerance`,
//! and reports breakdowns in its [`ConvergenceRecord`] instead of failing.
//! The `Err` path is reserved for invalid inputs (shape mismatch, bad
//! configuration).

mod bicg;
mod bicr;
mod cg;
mod cr;
mod extended;
mod smoothed;

use std::fmt;
use std::str::FromStr;

pub use bicg::{solve_bicg, solve_bicg_shadow_at};
pub use bicr::solve_bicr;
pub use cg::solve_cg;
pub use cr::solve_cr;
pub use extended::solve_extended_cg_mrs;
pub use smoothed::solve_bicg_smoothed;

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, sub_into, SparseMatrix, Vector};
use crate::products::ExtendedSystem;

/// Denominators below this magnitude are treated as breakdown.
pub const BREAKDOWN_THRESHOLD: f64 = 1e-300;

/// How the initial shadow residual `r~0` is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ShadowPolicy {
    #[default]
    CopyOfR0,
    UserSupplied(Vector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Threshold on the relative residual 2-norm.
    pub tolerance: f64,
    /// Iteration cap; `None` means `10 n`.
    pub max_iterations: Option<usize>,
    pub shadow_policy: ShadowPolicy,
    /// Starting guess; `None` means the zero vector.
    pub initial_guess: Option<Vector>,
    /// Record the true residual `||b - A x_k|| / ||b||` every iteration
    /// (one extra product per step).
    pub record_extras: bool,
    /// Keep per-iteration copies of the iterates in [`ConvergenceRecord::snapshots`].
    pub capture_vectors: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-12,
            max_iterations: None,
            shadow_policy: ShadowPolicy::CopyOfR0,
            initial_guess: None,
            record_extras: false,
            capture_vectors: false,
        }
    }
}

impl SolverConfig {
    pub fn new(tolerance: f64) -> Self {
        SolverConfig {
            tolerance,
            ..Default::default()
        }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = Some(max_iterations);
        self
    }

    pub fn with_shadow(mut self, shadow: Vector) -> Self {
        self.shadow_policy = ShadowPolicy::UserSupplied(shadow);
        self
    }

    pub fn with_initial_guess(mut self, x0: Vector) -> Self {
        self.initial_guess = Some(x0);
        self
    }

    pub fn with_extras(mut self) -> Self {
        self.record_extras = true;
        self
    }

    pub fn with_capture(mut self) -> Self {
        self.capture_vectors = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(10 * n.max(1))
    }
}

/// Which inner product vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakdownKind {
    /// `(r~_k, r_k)` (or its Bi-CR / quasi-inner analogue) is numerically zero.
    Lanczos,
    /// The step-length denominator, e.g. `(p~_k, A p_k)`, is numerically zero.
    Pivot,
    /// The smoothing denominator `(u~_k, u_k)` is numerically zero.
    Eta,
}

impl fmt::Display for BreakdownKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BreakdownKind::Lanczos => "lanczos",
            BreakdownKind::Pivot => "pivot",
            BreakdownKind::Eta => "eta",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterationsReached,
    /// `iteration` is the number of completed steps when the breakdown was hit.
    Breakdown { kind: BreakdownKind, iteration: usize },
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Converged => f.write_str("converged"),
            Status::MaxIterationsReached => f.write_str("max-iterations"),
            Status::Breakdown { kind, iteration } => {
                write!(f, "breakdown({kind}) at iteration {iteration}")
            }
        }
    }
}

/// Smoothed iterates of the in-loop smoothing solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSnapshot {
    pub y: Vector,
    pub s: Vector,
    pub shadow_s: Vector,
}

/// Copy of the iterates after one step.
///
/// For the smoothed solvers `x`/`r`/`shadow_r` are the underlying Bi-CG (or
/// extended CG) iterates and `smoothed` holds `y`, `s`, `s~`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub x: Vector,
    pub r: Vector,
    pub shadow_r: Option<Vector>,
    pub smoothed: Option<SmoothedSnapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    /// Relative residual norm per iterate; index 0 is the starting point.
    pub relres: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Smoothing parameters `eta_1, eta_2, ...`; empty for unsmoothed solvers.
    pub eta: Vec<f64>,
    /// `||b - A x_k|| / ||b||` per iterate, only with `record_extras`.
    pub true_relres: Vec<f64>,
    /// Per-iterate vectors, only with `capture_vectors`.
    pub snapshots: Vec<Snapshot>,
    pub status: Status,
    pub iterations: usize,
}

impl ConvergenceRecord {
    fn new() -> Self {
        ConvergenceRecord {
            relres: Vec::new(),
            alpha: Vec::new(),
            beta: Vec::new(),
            eta: Vec::new(),
            true_relres: Vec::new(),
            snapshots: Vec::new(),
            status: Status::MaxIterationsReached,
            iterations: 0,
        }
    }

    pub fn final_relres(&self) -> f64 {
        *self.relres.last().expect("record always holds the starting residual")
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    /// `x_k`, or the smoothed `y_k` for the smoothing solvers.
    pub solution: Vector,
    /// Final recursively updated residual (`s_k` for the smoothing solvers).
    pub residual: Vector,
    pub record: ConvergenceRecord,
}

/// Solver selector used by the experiment harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Cg,
    Cr,
    BiCg,
    BiCr,
    BiCgShadowAt,
    BiCgSmoothed,
    ExtendedCgMrs,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Cg,
        Method::Cr,
        Method::BiCg,
        Method::BiCr,
        Method::BiCgShadowAt,
        Method::BiCgSmoothed,
        Method::ExtendedCgMrs,
    ];

    /// Identifier used in CLI arguments and CSV headers.
    pub fn id(&self) -> &'static str {
        match self {
            Method::Cg => "cg",
            Method::Cr => "cr",
            Method::BiCg => "bicg",
            Method::BiCr => "bicr",
            Method::BiCgShadowAt => "bicg-at",
            Method::BiCgSmoothed => "bicg-smooth",
            Method::ExtendedCgMrs => "ext-cg-mrs",
        }
    }

    pub fn solve(&self, a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
        match self {
            Method::Cg => solve_cg(a, b, cfg),
            Method::Cr => solve_cr(a, b, cfg),
            Method::BiCg => solve_bicg(a, b, cfg),
            Method::BiCr => solve_bicr(a, b, cfg),
            Method::BiCgShadowAt => solve_bicg_shadow_at(a, b, cfg),
            Method::BiCgSmoothed => solve_bicg_smoothed(a, b, cfg),
            Method::ExtendedCgMrs => {
                let setup = Setup::new(a, b, cfg)?;
                let ext = ExtendedSystem::with_shadow_residual(
                    a,
                    b.into(),
                    setup.x0,
                    setup.shadow0,
                )?;
                solve_extended_cg_mrs(&ext, cfg)
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim().to_ascii_lowercase().as_str() {
            "cg" => Method::Cg,
            "cr" => Method::Cr,
            "bicg" => Method::BiCg,
            "bicr" => Method::BiCr,
            "bicg-at" | "bicg_at" | "bicg_shadow_at" => Method::BiCgShadowAt,
            "bicg-smooth" | "bicg_smooth" | "bicg_smoothed" => Method::BiCgSmoothed,
            "ext-cg-mrs" | "extended_cg_mrs" => Method::ExtendedCgMrs,
            other => return Err(Error::InvalidConfig(format!("unknown solver `{other}`"))),
        };
        Ok(m)
    }
}

/// Validated starting data shared by all solvers.
pub(crate) struct Setup {
    pub n: usize,
    pub x0: Vector,
    pub r0: Vector,
    pub shadow0: Vector,
    pub max_iter: usize,
}

impl Setup {
    pub fn new(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.n_rows(),
                cols: a.n_cols(),
            });
        }
        let n = a.n_rows();
        check_len(n, b.len())?;
        let x0 = match &cfg.initial_guess {
            Some(x0) => {
                check_len(n, x0.len())?;
                x0.clone()
            }
            None => Vector::zeros(n),
        };
        let mut r0 = a.matvec(&x0)?;
        let ax0 = r0.clone();
        sub_into(b, &ax0, &mut r0);
        let shadow0 = match &cfg.shadow_policy {
            ShadowPolicy::CopyOfR0 => r0.clone(),
            ShadowPolicy::UserSupplied(v) => {
                check_len(n, v.len())?;
                v.clone()
            }
        };
        Ok(Setup {
            n,
            x0,
            r0,
            shadow0,
            max_iter: cfg.iteration_cap(n),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Breakdown(pub Status);

/// Fails with a breakdown when `value` is numerically zero or non-finite.
pub(crate) fn guard(value: f64, kind: BreakdownKind, iteration: usize) -> std::result::Result<f64, Breakdown> {
    if value.abs() < BREAKDOWN_THRESHOLD || !value.is_finite() {
        Err(Breakdown(Status::Breakdown { kind, iteration }))
    } else {
        Ok(value)
    }
}

/// `num / den` with breakdown on a vanishing denominator or non-finite result.
pub(crate) fn ratio(
    num: f64,
    den: f64,
    kind: BreakdownKind,
    iteration: usize,
) -> std::result::Result<f64, Breakdown> {
    let den = guard(den, kind, iteration)?;
    let q = num / den;
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Breakdown(Status::Breakdown { kind, iteration }))
    }
}

/// Records residual norms and optional diagnostics, and decides convergence.
pub(crate) struct Tracker<'a> {
    a: &'a SparseMatrix,
    b: &'a [f64],
    scale: f64,
    tolerance: f64,
    extras: bool,
    capture: bool,
    work: Vec<f64>,
    pub record: ConvergenceRecord,
}

impl<'a> Tracker<'a> {
    pub fn new(a: &'a SparseMatrix, b: &'a [f64], cfg: &SolverConfig) -> Self {
        let bnorm = norm2(b);
        Tracker {
            a,
            b,
            // zero right-hand side: fall back to absolute residuals
            scale: if bnorm > 0.0 { bnorm } else { 1.0 },
            tolerance: cfg.tolerance,
            extras: cfg.record_extras,
            capture: cfg.capture_vectors,
            work: vec![0.0; b.len()],
            record: ConvergenceRecord::new(),
        }
    }

    /// Records one iterate; returns `true` once the stopping test is met.
    ///
    /// `residual` is the vector the stopping test is applied to and
    /// `solution` the matching approximation.
    pub fn observe(
        &mut self,
        residual: &[f64],
        solution: &[f64],
        snapshot: impl FnOnce() -> Snapshot,
    ) -> bool {
        let relres = norm2(residual) / self.scale;
        self.record.relres.push(relres);
        self.record.iterations = self.record.relres.len() - 1;
        if self.extras {
            self.a.matvec_into(solution, &mut self.work);
            for (w, bi) in self.work.iter_mut().zip(self.b) {
                *w = bi - *w;
            }
            self.record.true_relres.push(norm2(&self.work) / self.scale);
        }
        if self.capture {
            self.record.snapshots.push(snapshot());
        }
        relres < self.tolerance
    }

    pub fn finish(mut self, status: Status, solution: Vector, residual: Vector) -> SolverOutcome {
        self.record.status = status;
        SolverOutcome {
            solution,
            residual,
            record: self.record,
        }
    }
}
