use super::{guard, ratio, Breakdown, BreakdownKind, SmoothedSnapshot, Snapshot, SolverConfig, SolverOutcome, Status, Tracker};
use crate::error::Result;
use crate::products::{quasi_inner_unchecked as quasi, ExtendedSystem, PairedVector};

/// CG with minimal-residual-style smoothing, run on the paired system
/// `diag(A, A^T) x^ = b^` with the swap quasi-inner product in place of the
/// Euclidean one.
///
/// This is the unreduced form of [`solve_bicg_smoothed`](super::solve_bicg_smoothed):
/// every vector is a [`PairedVector`] and every inner product is
/// [`quasi_inner`](crate::products::quasi_inner). The smoothing parameter
/// enforces `<s^_{k+1}, r^_{k+1} - s^_k> = 0`.
///
/// The starting point and shadow data come from `ext`; `shadow_policy` and
/// `initial_guess` in `cfg` are ignored. Relative residuals, the returned
/// solution and the stopping test all use the primal blocks of `s^` and `y^`.
pub fn solve_extended_cg_mrs(ext: &ExtendedSystem<'_>, cfg: &SolverConfig) -> Result<SolverOutcome> {
    cfg.validate()?;
    let a = ext.operator();
    let n = ext.dim();
    let max_iter = cfg.iteration_cap(n);
    let b = ext.rhs().primal().as_slice();
    let mut tracker = Tracker::new(a, b, cfg);

    let mut x = ext.start().clone();
    let mut r = ext.initial_residual();
    let mut p = r.clone();
    let mut y = x.clone();
    let mut s = r.clone();
    let mut ap = PairedVector::zeros(n);
    let mut u = PairedVector::zeros(n);
    let mut step = PairedVector::zeros(n);

    let mut iterate = || -> std::result::Result<Status, Breakdown> {
        let snap = |x: &PairedVector, r: &PairedVector, y: &PairedVector, s: &PairedVector| Snapshot {
            x: x.primal().clone(),
            r: r.primal().clone(),
            shadow_r: Some(r.shadow().clone()),
            smoothed: Some(SmoothedSnapshot {
                y: y.primal().clone(),
                s: s.primal().clone(),
                shadow_s: s.shadow().clone(),
            }),
        };
        if tracker.observe(s.primal(), y.primal(), || snap(&x, &r, &y, &s)) {
            return Ok(Status::Converged);
        }
        let mut rr = guard(quasi(&r, &r), BreakdownKind::Lanczos, 0)?;
        for k in 0..max_iter {
            ext.apply_into(&p, &mut ap);
            let alpha = ratio(rr, quasi(&p, &ap), BreakdownKind::Pivot, k)?;
            x.axpy_unchecked(alpha, &p);
            r.axpy_unchecked(-alpha, &ap);

            r.sub_into(&s, &mut u);
            let eta = -ratio(quasi(&s, &u), quasi(&u, &u), BreakdownKind::Eta, k)?;
            x.sub_into(&y, &mut step);
            y.axpy_unchecked(eta, &step);
            s.axpy_unchecked(eta, &u);
            tracker.record.alpha.push(alpha);
            tracker.record.eta.push(eta);
            if tracker.observe(s.primal(), y.primal(), || snap(&x, &r, &y, &s)) {
                return Ok(Status::Converged);
            }

            let rr_next = guard(quasi(&r, &r), BreakdownKind::Lanczos, k + 1)?;
            let beta = ratio(rr_next, rr, BreakdownKind::Lanczos, k + 1)?;
            tracker.record.beta.push(beta);
            p.xpby_unchecked(&r, beta);
            rr = rr_next;
        }
        Ok(Status::MaxIterationsReached)
    };
    let status = iterate().unwrap_or_else(|Breakdown(s)| s);
    let (solution, _) = y.into_parts();
    let (residual, _) = s.into_parts();
    Ok(tracker.finish(status, solution, residual))
}
