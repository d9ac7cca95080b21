//! Bi-CG / Bi-CR family of Krylov solvers for nonsymmetric sparse systems,
//! with residual smoothing.
//!
//! The centerpiece is [`solvers::solve_bicg_smoothed`]: Bi-CG plus a
//! smoothing step whose smoothed residuals coincide (in exact arithmetic)
//! with the Bi-CR residuals of [`solvers::solve_bicr`]. The same residuals
//! also come out of Bi-CG started from the shadow residual `A^T r~0`
//! ([`solvers::solve_bicg_shadow_at`]) and out of the unreduced paired-system
//! form [`solvers::solve_extended_cg_mrs`].
//!
//! ```
//! use bicr_core::linalg::toeplitz_banded;
//! use bicr_core::solvers::{solve_bicg_smoothed, solve_bicr, SolverConfig};
//!
//! let a = toeplitz_banded(50, 1.2).unwrap();
//! let b = a.matvec(&vec![1.0; 50]).unwrap();
//! let cfg = SolverConfig::new(1e-12);
//! let bicr = solve_bicr(&a, &b, &cfg).unwrap();
//! let smoothed = solve_bicg_smoothed(&a, &b, &cfg).unwrap();
//! assert!(bicr.record.converged() && smoothed.record.converged());
//! ```

pub mod error;
pub mod harness;
pub mod linalg;
pub mod products;
pub mod smoothing;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::{SparseMatrix, Vector};
pub use solvers::{Method, SolverConfig, SolverOutcome};
