use super::{
    guard, ratio, Breakdown, BreakdownKind, Setup, SmoothedSnapshot, Snapshot, SolverConfig, SolverOutcome, Status,
    Tracker,
};
use crate::error::Result;
use crate::linalg::{axpy_in_place, dot_unchecked, sub_into, xpby_in_place, SparseMatrix, Vector};

/// Bi-CG with an in-loop smoothing step that turns its residuals into Bi-CR
/// residuals.
///
/// Alongside the Bi-CG recurrences for `x`, `r`, `r~`, `p`, `p~` it carries
/// smoothed sequences `s`, `s~`, `y` (`s_0 = r_0`, `s~_0 = r~_0`, `y_0 = x_0`):
///
/// ```text
/// u_{k+1}  = r_{k+1} - s_k,      u~_{k+1} = r~_{k+1} - s~_k
/// eta_{k+1} = -[(s~_k, u_{k+1}) + (s_k, u~_{k+1})] / [2 (u~_{k+1}, u_{k+1})]
/// y_{k+1}  = y_k + eta_{k+1} (x_{k+1} - y_k)
/// s_{k+1}  = s_k + eta_{k+1} u_{k+1},   s~_{k+1} = s~_k + eta_{k+1} u~_{k+1}
/// ```
///
/// `eta` makes the paired residual `(s, s~)` orthogonal to `(u, u~)` in the
/// swap quasi-inner product. Stopping uses `||s_k|| / ||b||` and the returned
/// solution is `y_k`.
pub fn solve_bicg_smoothed(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
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
    let mut y = x.clone();
    let mut s = r.clone();
    let mut st = rt.clone();
    let mut u = Vector::zeros(n);
    let mut ut = Vector::zeros(n);
    let mut ap = Vector::zeros(n);
    let mut atpt = Vector::zeros(n);
    let mut step = Vector::zeros(n);

    let mut iterate = || -> std::result::Result<Status, Breakdown> {
        let snap = |x: &Vector, r: &Vector, rt: &Vector, y: &Vector, s: &Vector, st: &Vector| Snapshot {
            x: x.clone(),
            r: r.clone(),
            shadow_r: Some(rt.clone()),
            smoothed: Some(SmoothedSnapshot {
                y: y.clone(),
                s: s.clone(),
                shadow_s: st.clone(),
            }),
        };
        if tracker.observe(&s, &y, || snap(&x, &r, &rt, &y, &s, &st)) {
            return Ok(Status::Converged);
        }
        let mut rho = guard(dot_unchecked(&rt, &r), BreakdownKind::Lanczos, 0)?;
        for k in 0..max_iter {
            a.matvec_into(&p, &mut ap);
            let alpha = ratio(rho, dot_unchecked(&pt, &ap), BreakdownKind::Pivot, k)?;
            a.matvec_transpose_into(&pt, &mut atpt);
            axpy_in_place(alpha, &p, &mut x);
            axpy_in_place(-alpha, &ap, &mut r);
            axpy_in_place(-alpha, &atpt, &mut rt);

            sub_into(&r, &s, &mut u);
            sub_into(&rt, &st, &mut ut);
            let num = dot_unchecked(&st, &u) + dot_unchecked(&s, &ut);
            let den = 2.0 * dot_unchecked(&ut, &u);
            let eta = -ratio(num, den, BreakdownKind::Eta, k)?;

            sub_into(&x, &y, &mut step);
            axpy_in_place(eta, &step, &mut y);
            axpy_in_place(eta, &u, &mut s);
            axpy_in_place(eta, &ut, &mut st);
            tracker.record.alpha.push(alpha);
            tracker.record.eta.push(eta);
            if tracker.observe(&s, &y, || snap(&x, &r, &rt, &y, &s, &st)) {
                return Ok(Status::Converged);
            }

            let rho_next = guard(dot_unchecked(&rt, &r), BreakdownKind::Lanczos, k + 1)?;
            let beta = ratio(rho_next, rho, BreakdownKind::Lanczos, k + 1)?;
            tracker.record.beta.push(beta);
            xpby_in_place(&r, beta, &mut p);
            xpby_in_place(&rt, beta, &mut pt);
            rho = rho_next;
        }
        Ok(Status::MaxIterationsReached)
    };
    let status = iterate().unwrap_or_else(|Breakdown(s)| s);
    Ok(tracker.finish(status, y, s))
}
