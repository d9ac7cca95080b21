use super::{guard, ratio, Breakdown, BreakdownKind, Setup, Snapshot, SolverConfig, SolverOutcome, Status, Tracker};
use crate::error::Result;
use crate::linalg::{axpy_in_place, dot_unchecked, xpby_in_place, SparseMatrix, Vector};

/// Conjugate gradients. `A` is assumed symmetric (not checked).
pub fn solve_cg(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
    let Setup {
        n, x0, r0, max_iter, ..
    } = Setup::new(a, b, cfg)?;
    let mut tracker = Tracker::new(a, b, cfg);
    let mut x = x0;
    let mut r = r0;
    let mut p = r.clone();
    let mut ap = Vector::zeros(n);

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
        let mut rr = guard(dot_unchecked(&r, &r), BreakdownKind::Lanczos, 0)?;
        for k in 0..max_iter {
            a.matvec_into(&p, &mut ap);
            let alpha = ratio(rr, dot_unchecked(&p, &ap), BreakdownKind::Pivot, k)?;
            axpy_in_place(alpha, &p, &mut x);
            axpy_in_place(-alpha, &ap, &mut r);
            tracker.record.alpha.push(alpha);
            if tracker.observe(&r, &x, || snap(&x, &r)) {
                return Ok(Status::Converged);
            }
            let rr_next = guard(dot_unchecked(&r, &r), BreakdownKind::Lanczos, k + 1)?;
            let beta = ratio(rr_next, rr, BreakdownKind::Lanczos, k + 1)?;
            tracker.record.beta.push(beta);
            xpby_in_place(&r, beta, &mut p);
            rr = rr_next;
        }
        Ok(Status::MaxIterationsReached)
    };
    let status = iterate().unwrap_or_else(|Breakdown(s)| s);
    Ok(tracker.finish(status, x, r))
}
