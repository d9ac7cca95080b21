use super::{guard, ratio, Breakdown, BreakdownKind, Setup, Snapshot, SolverConfig, SolverOutcome, Status, Tracker};
use crate::error::Result;
use crate::linalg::{axpy_in_place, dot_unchecked, xpby_in_place, SparseMatrix, Vector};

/// Conjugate residuals. `A` is assumed symmetric (not checked).
///
/// Keeps `q_k = A p_k` by recursion, so each step costs one product with `A`.
pub fn solve_cr(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
    let Setup {
        n, x0, r0, max_iter, ..
    } = Setup::new(a, b, cfg)?;
    let mut tracker = Tracker::new(a, b, cfg);
    let mut x = x0;
    let mut r = r0;
    let mut p = r.clone();
    let mut ar = Vector::zeros(n);
    a.matvec_into(&r, &mut ar);
    let mut q = ar.clone();

    let mut iterate = || -> std::result::Result<Status, Breakdown> {
        let snap = |x: &Vector, r: &Vector| Snapshot {
            x: x.clone(),
            r: r.clone(),
            shadow_r: None,
            smoothed: None,
        };
        if tracker.observe(&r, &x, || snap(&x, &r)) {
            return Ok(Status::Converged);
        }
        let mut rar = guard(dot_unchecked(&r, &ar), BreakdownKind::Lanczos, 0)?;
        for k in 0..max_iter {
            let alpha = ratio(rar, dot_unchecked(&q, &q), BreakdownKind::Pivot, k)?;
            axpy_in_place(alpha, &p, &mut x);
            axpy_in_place(-alpha, &q, &mut r);
            tracker.record.alpha.push(alpha);
            if tracker.observe(&r, &x, || snap(&x, &r)) {
                return Ok(Status::Converged);
            }
            a.matvec_into(&r, &mut ar);
            let rar_next = guard(dot_unchecked(&r, &ar), BreakdownKind::Lanczos, k + 1)?;
            let beta = ratio(rar_next, rar, BreakdownKind::Lanczos, k + 1)?;
            tracker.record.beta.push(beta);
            xpby_in_place(&r, beta, &mut p);
            xpby_in_place(&ar, beta, &mut q);
            rar = rar_next;
        }
        Ok(Status::MaxIterationsReached)
    };
    let status = iterate().unwrap_or_else(|Breakdown(s)| s);
    Ok(tracker.finish(status, x, r))
}
