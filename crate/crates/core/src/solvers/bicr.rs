use super::{guard, ratio, Breakdown, BreakdownKind, Setup, Snapshot, SolverConfig, SolverOutcome, Status, Tracker};
use crate::error::Result;
use crate::linalg::{axpy_in_place, dot_unchecked, xpby_in_place, SparseMatrix, Vector};

/// Biconjugate residuals.
///
/// Per step:
///
/// ```text
/// alpha_k = (r~_k, A r_k) / (A^T p~_k, q_k)
/// x_{k+1} = x_k + alpha_k p_k
/// r_{k+1} = r_k - alpha_k q_k
/// r~_{k+1} = r~_k - alpha_k A^T p~_k
/// beta_k  = (r~_{k+1}, A r_{k+1}) / (r~_k, A r_k)
/// p_{k+1} = r_{k+1} + beta_k p_k,   p~_{k+1} = r~_{k+1} + beta_k p~_k
/// q_{k+1} = A r_{k+1} + beta_k q_k
/// ```
///
/// with `p_0 = r_0`, `p~_0 = r~_0`, `q_0 = A p_0`. Two products per step
/// (`A r` and `A^T p~`).
pub fn solve_bicr(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
    let Setup {
        n,
        x0,
        r0,
        shadow0,
        max_iter,
    } = Setup::new(a, b, cfg)?;
    let mut tracker = Tracker::new(a, b, cfg);
    let mut x = x0;
    let mut r = r0;
    let mut rt = shadow0;
    let mut p = r.clone();
    let mut pt = rt.clone();
    let mut ar = Vector::zeros(n);
    a.matvec_into(&r, &mut ar);
    let mut q = ar.clone();
    let mut atpt = Vector::zeros(n);

    let mut iterate = || -> std::result::Result<Status, Breakdown> {
        let snap = |x: &Vector, r: &Vector, rt: &Vector| Snapshot {
            x: x.clone(),
            r: r.clone(),
            shadow_r: Some(rt.clone()),
            smoothed: None,
        };
        if tracker.observe(&r, &x, || snap(&x, &r, &rt)) {
            return Ok(Status::Converged);
        }
        let mut rho = guard(dot_unchecked(&rt, &ar), BreakdownKind::Lanczos, 0)?;
        for k in 0..max_iter {
            a.matvec_transpose_into(&pt, &mut atpt);
            let alpha = ratio(rho, dot_unchecked(&atpt, &q), BreakdownKind::Pivot, k)?;
            axpy_in_place(alpha, &p, &mut x);
            axpy_in_place(-alpha, &q, &mut r);
            axpy_in_place(-alpha, &atpt, &mut rt);
            tracker.record.alpha.push(alpha);
            if tracker.observe(&r, &x, || snap(&x, &r, &rt)) {
                return Ok(Status::Converged);
            }
            a.matvec_into(&r, &mut ar);
            let rho_next = guard(dot_unchecked(&rt, &ar), BreakdownKind::Lanczos, k + 1)?;
            let beta = ratio(rho_next, rho, BreakdownKind::Lanczos, k + 1)?;
            tracker.record.beta.push(beta);
            xpby_in_place(&r, beta, &mut p);
            xpby_in_place(&rt, beta, &mut pt);
            xpby_in_place(&ar, beta, &mut q);
            rho = rho_next;
        }
        Ok(Status::MaxIterationsReached)
    };
    let status = iterate().unwrap_or_else(|Breakdown(s)| s);
    Ok(tracker.finish(status, x, r))
}
