//! Weighted inner products, the block-swap quasi-inner product and the
//! paired `2n` system built from `A x = b` and `A^T x~ = b~`.
//!
//! The swap matrix `[[0, I], [I, 0]]` and the block operator
//! `diag(A, A^T)` are never materialized; everything is evaluated blockwise
//! on [`PairedVector`]s.

use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy_in_place, dot_unchecked, SparseMatrix, Vector};

/// Weight matrix of an `H`-inner product `(x, y)_H = x^T H y`.
#[derive(Debug, Clone, Copy, Default)]
pub enum Weight<'a> {
    #[default]
    Identity,
    /// Caller-asserted symmetric positive definite matrix.
    Matrix(&'a SparseMatrix),
}

/// `(x, y)_H`. With [`Weight::Identity`] this is the plain dot product.
pub fn h_inner(x: &[f64], y: &[f64], weight: Weight<'_>) -> Result<f64> {
    check_len(x.len(), y.len())?;
    match weight {
        Weight::Identity => Ok(dot_unchecked(x, y)),
        Weight::Matrix(h) => {
            check_len(h.n_rows(), x.len())?;
            check_len(h.n_cols(), y.len())?;
            let hy = h.matvec(y)?;
            Ok(dot_unchecked(x, &hy))
        }
    }
}

/// `||x||_H`.
pub fn h_norm(x: &[f64], weight: Weight<'_>) -> Result<f64> {
    Ok(h_inner(x, x, weight)?.sqrt())
}

/// A `2n` vector stored as its primal and shadow halves.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedVector {
    primal: Vector,
    shadow: Vector,
}

impl PairedVector {
    pub fn new(primal: Vector, shadow: Vector) -> Result<Self> {
        check_len(primal.len(), shadow.len())?;
        Ok(PairedVector { primal, shadow })
    }

    pub fn zeros(n: usize) -> Self {
        PairedVector {
            primal: Vector::zeros(n),
            shadow: Vector::zeros(n),
        }
    }

    /// Block length `n` (the paired vector has `2n` entries).
    pub fn block_len(&self) -> usize {
        self.primal.len()
    }

    pub fn primal(&self) -> &Vector {
        &self.primal
    }

    pub fn shadow(&self) -> &Vector {
        &self.shadow
    }

    pub fn primal_mut(&mut self) -> &mut [f64] {
        &mut self.primal
    }

    pub fn shadow_mut(&mut self) -> &mut [f64] {
        &mut self.shadow
    }

    pub fn into_parts(self) -> (Vector, Vector) {
        (self.primal, self.shadow)
    }

    /// `self <- self + a * other`.
    pub fn axpy(&mut self, a: f64, other: &PairedVector) -> Result<()> {
        check_len(self.block_len(), other.block_len())?;
        self.axpy_unchecked(a, other);
        Ok(())
    }

    pub(crate) fn axpy_unchecked(&mut self, a: f64, other: &PairedVector) {
        axpy_in_place(a, &other.primal, &mut self.primal);
        axpy_in_place(a, &other.shadow, &mut self.shadow);
    }

    /// `out <- self - other`
    pub(crate) fn sub_into(&self, other: &PairedVector, out: &mut PairedVector) {
        crate::linalg::sub_into(&self.primal, &other.primal, &mut out.primal);
        crate::linalg::sub_into(&self.shadow, &other.shadow, &mut out.shadow);
    }

    /// Returns `self - other`.
    pub fn sub(&self, other: &PairedVector) -> Result<PairedVector> {
        check_len(self.block_len(), other.block_len())?;
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(PairedVector {
            primal: diff(&self.primal, &other.primal),
            shadow: diff(&self.shadow, &other.shadow),
        })
    }

    /// `self <- r + b * self`.
    pub fn xpby(&mut self, r: &PairedVector, b: f64) -> Result<()> {
        check_len(self.block_len(), r.block_len())?;
        self.xpby_unchecked(r, b);
        Ok(())
    }

    pub(crate) fn xpby_unchecked(&mut self, r: &PairedVector, b: f64) {
        crate::linalg::xpby_in_place(&r.primal, b, &mut self.primal);
        crate::linalg::xpby_in_place(&r.shadow, b, &mut self.shadow);
    }
}

/// `<x^, y^> = x^T [[0, I], [I, 0]] y^ = (x~, y) + (x, y~)`.
///
/// Symmetric and bilinear but indefinite: `<x^, x^>` may be zero or negative
/// for nonzero `x^`.
pub fn quasi_inner(x: &PairedVector, y: &PairedVector) -> Result<f64> {
    check_len(x.block_len(), y.block_len())?;
    Ok(quasi_inner_unchecked(x, y))
}

#[inline]
pub(crate) fn quasi_inner_unchecked(x: &PairedVector, y: &PairedVector) -> f64 {
    dot_unchecked(&x.shadow, &y.primal) + dot_unchecked(&x.primal, &y.shadow)
}

/// The block system `diag(A, A^T) [x; x~] = [b; b~]` with its starting point.
#[derive(Debug, Clone)]
pub struct ExtendedSystem<'a> {
    operator: &'a SparseMatrix,
    rhs: PairedVector,
    start: PairedVector,
}

/// Packages `A`, `(b, b~)` and `(x0, x~0)` as an [`ExtendedSystem`].
pub fn extend_system<'a>(
    a: &'a SparseMatrix,
    b: Vector,
    b_shadow: Vector,
    x0: Vector,
    x0_shadow: Vector,
) -> Result<ExtendedSystem<'a>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    for v in [&b, &b_shadow, &x0, &x0_shadow] {
        check_len(n, v.len())?;
    }
    Ok(ExtendedSystem {
        operator: a,
        rhs: PairedVector::new(b, b_shadow)?,
        start: PairedVector::new(x0, x0_shadow)?,
    })
}

impl<'a> ExtendedSystem<'a> {
    /// Builds the system whose initial shadow residual is exactly
    /// `shadow_residual`: `x~0 = 0` and `b~ = shadow_residual`.
    pub fn with_shadow_residual(
        a: &'a SparseMatrix,
        b: Vector,
        x0: Vector,
        shadow_residual: Vector,
    ) -> Result<Self> {
        let n = shadow_residual.len();
        extend_system(a, b, shadow_residual, x0, Vector::zeros(n))
    }

    pub fn operator(&self) -> &'a SparseMatrix {
        self.operator
    }

    pub fn rhs(&self) -> &PairedVector {
        &self.rhs
    }

    pub fn start(&self) -> &PairedVector {
        &self.start
    }

    pub fn dim(&self) -> usize {
        self.operator.n_rows()
    }

    /// `A^ v^ = (A v, A^T v~)`.
    pub fn apply(&self, v: &PairedVector) -> Result<PairedVector> {
        check_len(self.dim(), v.block_len())?;
        Ok(PairedVector {
            primal: self.operator.matvec(&v.primal)?,
            shadow: self.operator.matvec_transpose(&v.shadow)?,
        })
    }

    pub(crate) fn apply_into(&self, v: &PairedVector, out: &mut PairedVector) {
        self.operator.matvec_into(&v.primal, &mut out.primal);
        self.operator.matvec_transpose_into(&v.shadow, &mut out.shadow);
    }

    /// `b^ - A^ x^`.
    pub fn residual(&self, x: &PairedVector) -> Result<PairedVector> {
        self.rhs.sub(&self.apply(x)?)
    }

    pub fn initial_residual(&self) -> PairedVector {
        self.residual(&self.start)
            .expect("extended system components share one dimension")
    }
}
