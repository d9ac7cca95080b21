use super::{guard, ratio, Breakdown, BreakdownKind, Setup, Snapshot, SolverConfig, SolverOutcome, Status, Tracker};
use crate::error::Result;
use crate::linalg::{axpy_in_place, dot_unchecked, xpby_in_place, SparseMatrix, Vector};

/// Biconjugate gradients with the configured shadow residual `r~0`.
pub fn solve_bicg(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
    let setup = Setup::new(a, b, cfg)?;
    Ok(bicg(a, b, cfg, setup))
}

/// Biconjugate gradients started from the shadow residual `A^T r~0`.
///
/// Mathematically this reproduces Bi-CR with shadow residual `r~0`, while
/// keeping the cheaper Bi-CG recurrences.
pub fn solve_bicg_shadow_at(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolverOutcome> {
    let mut setup = Setup::new(a, b, cfg)?;
    setup.shadow0 = a.matvec_transpose(&setup.shadow0)?;
    Ok(bicg(a, b, cfg, setup))
}

fn bicg(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig, setup: Setup) -> SolverOutcome {
    let Setup {
        n,
        x0,
        r0,
        shadow0,
        max_iter,
    } = setup;
    let mut tracker = Tracker::new(a, b, cfg);
    let mut x = x0;
    let mut r = r0;
    let mut rt = shadow0;
    let mut p = r.clone();
    let mut pt = rt.clone();
    let mut ap = Vector::zeros(n);
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
        let mut rho = guard(dot_unchecked(&rt, &r), BreakdownKind::Lanczos, 0)?;
        for k in 0..max_iter {
            a.matvec_into(&p, &mut ap);
            let alpha = ratio(rho, dot_unchecked(&pt, &ap), BreakdownKind::Pivot, k)?;
            a.matvec_transpose_into(&pt, &mut atpt);
            axpy_in_place(alpha, &p, &mut x);
            axpy_in_place(-alpha, &ap, &mut r);
            axpy_in_place(-alpha, &atpt, &mut rt);
            tracker.record.alpha.push(alpha);
            if tracker.observe(&r, &x, || snap(&x, &r, &rt)) {
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
    tracker.finish(status, x, r)
}
