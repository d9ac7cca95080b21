//! Residual smoothing applied after the fact to a recorded residual sequence.
//!
//! Given primary residuals `r_k` and approximations `x_k`, smoothing builds
//!
//! ```text
//! s_k = s_{k-1} + eta_k (r_k - s_{k-1}),   y_k = y_{k-1} + eta_k (x_k - y_{k-1})
//! ```
//!
//! from `s_0 = r_0`, `y_0 = x_0`. [`mrs_smooth`] and [`qmr_smooth`] evaluate
//! it as `(1 - eta_k) s_{k-1} + eta_k r_k` with `1 - eta_k` formed directly,
//! so smoothed residuals near roundoff level keep their accuracy. Two choices of `eta_k` are provided:
//!
//! * minimal residual smoothing (MRS), which minimizes `||s_k||_H` locally;
//!   applied to CG residuals with `H = I` it reproduces the CR residuals.
//! * QMR smoothing, `eta_k = tau_k^2 / rho_k^2` with
//!   `1/tau_k^2 = 1/tau_{k-1}^2 + 1/rho_k^2`, `rho_k = ||r_k||`,
//!   `tau_0 = rho_0`. Only for Bi-CG input does the output coincide with QMR
//!   residuals; for other sequences it is just a smoother.
//!
//! Both need full vectors: run the solver with
//! [`SolverConfig::capture_vectors`](crate::solvers::SolverConfig) and feed
//! [`history_from_snapshots`].

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot_unchecked, sub_into, Vector};
use crate::products::{h_inner, Weight};
use crate::solvers::Snapshot;

#[derive(Debug, Clone, Copy)]
pub enum SmoothingMode<'a> {
    Mrs(Weight<'a>),
    Qmr,
}

/// Current smoothed residual and approximation.
#[derive(Debug, Clone)]
pub struct SmoothingState<'a> {
    s: Vector,
    y: Vector,
    /// `tau_k^2`; tracked in QMR mode only.
    tau_sq: f64,
    mode: SmoothingMode<'a>,
}

impl<'a> SmoothingState<'a> {
    /// Starts from `s_0 = r_0`, `y_0 = x_0`.
    pub fn new(r0: &[f64], x0: &[f64], mode: SmoothingMode<'a>) -> Result<Self> {
        check_len(r0.len(), x0.len())?;
        let tau_sq = match mode {
            SmoothingMode::Qmr => dot_unchecked(r0, r0),
            SmoothingMode::Mrs(_) => 0.0,
        };
        Ok(SmoothingState {
            s: r0.into(),
            y: x0.into(),
            tau_sq,
            mode,
        })
    }

    pub fn s(&self) -> &Vector {
        &self.s
    }

    pub fn y(&self) -> &Vector {
        &self.y
    }

    pub fn tau_sq(&self) -> f64 {
        self.tau_sq
    }

    pub fn mode(&self) -> SmoothingMode<'a> {
        self.mode
    }

    /// `s <- s + eta (r - s)`, `y <- y + eta (x - y)`.
    pub fn smooth_step(&mut self, r: &[f64], x: &[f64], eta: f64) -> Result<()> {
        check_len(self.s.len(), r.len())?;
        check_len(self.y.len(), x.len())?;
        for (si, ri) in self.s.iter_mut().zip(r) {
            *si += eta * (ri - *si);
        }
        for (yi, xi) in self.y.iter_mut().zip(x) {
            *yi += eta * (xi - *yi);
        }
        Ok(())
    }

    /// `s <- keep s + eta r`, `y <- keep y + eta x`, where `keep` is `1 - eta`
    /// evaluated separately. Unlike [`smooth_step`](Self::smooth_step) this
    /// stays accurate once `r` is tiny next to `s`.
    fn blend_step(&mut self, r: &[f64], x: &[f64], keep: f64, eta: f64) {
        for (si, ri) in self.s.iter_mut().zip(r) {
            *si = keep * *si + eta * ri;
        }
        for (yi, xi) in self.y.iter_mut().zip(x) {
            *yi = keep * *yi + eta * xi;
        }
    }
}

/// `(eta, 1 - eta)` with both parts formed from inner products.
fn mrs_weights_at(s_prev: &[f64], r: &[f64], weight: Weight<'_>, index: usize) -> Result<(f64, f64)> {
    check_len(s_prev.len(), r.len())?;
    let mut d = vec![0.0; r.len()];
    sub_into(r, s_prev, &mut d);
    let den = h_inner(&d, &d, weight)?;
    let eta = -h_inner(s_prev, &d, weight)? / den;
    let keep = h_inner(r, &d, weight)? / den;
    if den.abs() < crate::solvers::BREAKDOWN_THRESHOLD || !eta.is_finite() || !keep.is_finite() {
        return Err(Error::EtaBreakdown { index });
    }
    Ok((eta, keep))
}

/// MRS parameter `-(s, r - s)_H / (r - s, r - s)_H`.
///
/// The resulting `s + eta (r - s)` is `H`-orthogonal to `r - s`. Fails with
/// [`Error::EtaBreakdown`] (index 0) when `r` and `s_prev` coincide.
pub fn mrs_eta(s_prev: &[f64], r: &[f64], weight: Weight<'_>) -> Result<f64> {
    mrs_weights_at(s_prev, r, weight, 0).map(|(eta, _)| eta)
}

/// One step of the QMR parameter recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmrStep {
    pub tau_sq: f64,
    pub inv_tau_sq: f64,
    pub eta: f64,
    /// `rho_k = 0`: the primary sequence converged exactly.
    pub terminal: bool,
}

/// `tau`/`rho` recursion of QMR smoothing, driven by `rho_k^2 = (r_k, r_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmrRecursion {
    inv_tau_sq: f64,
}

impl QmrRecursion {
    /// `tau_0^2 = rho_0^2`, which must be positive.
    pub fn new(rho0_sq: f64) -> Result<Self> {
        if !(rho0_sq > 0.0 && rho0_sq.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "initial residual norm squared must be positive, got {rho0_sq}"
            )));
        }
        Ok(QmrRecursion {
            inv_tau_sq: 1.0 / rho0_sq,
        })
    }

    pub fn inv_tau_sq(&self) -> f64 {
        self.inv_tau_sq
    }

    pub fn step(&mut self, rho_sq: f64) -> QmrStep {
        if rho_sq == 0.0 {
            // limit rho -> 0: tau -> 0, eta -> 1
            self.inv_tau_sq = f64::INFINITY;
            return QmrStep {
                tau_sq: 0.0,
                inv_tau_sq: f64::INFINITY,
                eta: 1.0,
                terminal: true,
            };
        }
        self.inv_tau_sq += 1.0 / rho_sq;
        let tau_sq = 1.0 / self.inv_tau_sq;
        QmrStep {
            tau_sq,
            inv_tau_sq: self.inv_tau_sq,
            eta: tau_sq / rho_sq,
            terminal: false,
        }
    }
}

/// Output of [`mrs_smooth`] / [`qmr_smooth`]. `residuals[0]` and
/// `approximations[0]` are the starting pair; `etas[k - 1]` produced entry `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedHistory {
    pub residuals: Vec<Vector>,
    pub approximations: Vec<Vector>,
    pub etas: Vec<f64>,
    /// `tau_k^2` per entry (QMR only; empty for MRS).
    pub tau_sq: Vec<f64>,
}

impl SmoothedHistory {
    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// Builds `(r_k, x_k)` pairs from captured solver snapshots.
pub fn history_from_snapshots(snapshots: &[Snapshot]) -> Vec<(Vector, Vector)> {
    snapshots.iter().map(|s| (s.r.clone(), s.x.clone())).collect()
}

fn start<R, X, I>(entries: &mut I) -> Result<(Vec<f64>, Vec<f64>)>
where
    R: AsRef<[f64]>,
    X: AsRef<[f64]>,
    I: Iterator<Item = (R, X)>,
{
    let (r0, x0) = entries.next().ok_or(Error::EmptyHistory)?;
    check_len(r0.as_ref().len(), x0.as_ref().len())?;
    Ok((r0.as_ref().to_vec(), x0.as_ref().to_vec()))
}

/// Applies MRS to a residual history.
///
/// Errors with [`Error::EtaBreakdown`] carrying the history index whose
/// parameter could not be formed.
pub fn mrs_smooth<R, X>(
    history: impl IntoIterator<Item = (R, X)>,
    weight: Weight<'_>,
) -> Result<SmoothedHistory>
where
    R: AsRef<[f64]>,
    X: AsRef<[f64]>,
{
    let mut entries = history.into_iter();
    let (r0, x0) = start(&mut entries)?;
    let mut state = SmoothingState::new(&r0, &x0, SmoothingMode::Mrs(weight))?;
    let mut out = SmoothedHistory {
        residuals: vec![state.s.clone()],
        approximations: vec![state.y.clone()],
        etas: Vec::new(),
        tau_sq: Vec::new(),
    };
    for (k, (r, x)) in entries.enumerate() {
        let (r, x) = (r.as_ref(), x.as_ref());
        check_len(state.s.len(), r.len())?;
        check_len(state.y.len(), x.len())?;
        let (eta, keep) = mrs_weights_at(&state.s, r, weight, k + 1)?;
        state.blend_step(r, x, keep, eta);
        out.etas.push(eta);
        out.residuals.push(state.s.clone());
        out.approximations.push(state.y.clone());
    }
    Ok(out)
}

/// Applies QMR smoothing to a residual history.
///
/// A zero residual ends the output at that entry (with `eta = 1`, so the
/// smoothed residual is zero too). A zero starting residual returns just the
/// starting pair.
pub fn qmr_smooth<R, X>(history: impl IntoIterator<Item = (R, X)>) -> Result<SmoothedHistory>
where
    R: AsRef<[f64]>,
    X: AsRef<[f64]>,
{
    let mut entries = history.into_iter();
    let (r0, x0) = start(&mut entries)?;
    let mut state = SmoothingState::new(&r0, &x0, SmoothingMode::Qmr)?;
    let mut out = SmoothedHistory {
        residuals: vec![state.s.clone()],
        approximations: vec![state.y.clone()],
        etas: Vec::new(),
        tau_sq: vec![state.tau_sq],
    };
    if state.tau_sq == 0.0 {
        return Ok(out);
    }
    let mut recursion = QmrRecursion::new(state.tau_sq)?;
    for (r, x) in entries {
        let (r, x) = (r.as_ref(), x.as_ref());
        check_len(state.s.len(), r.len())?;
        check_len(state.y.len(), x.len())?;
        let prev_inv_tau_sq = recursion.inv_tau_sq();
        let step = recursion.step(dot_unchecked(r, r));
        // 1 - eta_k = tau_k^2 / tau_{k-1}^2
        state.blend_step(r, x, step.tau_sq * prev_inv_tau_sq, step.eta);
        state.tau_sq = step.tau_sq;
        out.etas.push(step.eta);
        out.tau_sq.push(step.tau_sq);
        out.residuals.push(state.s.clone());
        out.approximations.push(state.y.clone());
        if step.terminal {
            break;
        }
    }
    Ok(out)
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        self
    }
}
