//! Test-problem generators.

use crate::error::{Error, Result};
use crate::linalg::csr::SparseMatrix;

/// Nonsymmetric banded Toeplitz matrix with `2` on the diagonal, `1` on the
/// first superdiagonal and `gamma` on the second subdiagonal.
///
/// The first subdiagonal is structurally zero and is not stored.
pub fn toeplitz_banded(n: usize, gamma: f64) -> Result<SparseMatrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut triplets = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i >= 2 {
            triplets.push((i, i - 2, gamma));
        }
        triplets.push((i, i, 2.0));
        if i + 1 < n {
            triplets.push((i, i + 1, 1.0));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

/// Five-point Laplacian on an `m x m` grid with Dirichlet boundary
/// (SPD, order `m * m`).
pub fn laplacian_2d(m: usize) -> Result<SparseMatrix> {
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = m * m;
    let idx = |i: usize, j: usize| i * m + j;
    let mut triplets = Vec::with_capacity(5 * n);
    for i in 0..m {
        for j in 0..m {
            let k = idx(i, j);
            triplets.push((k, k, 4.0));
            if i > 0 {
                triplets.push((k, idx(i - 1, j), -1.0));
            }
            if i + 1 < m {
                triplets.push((k, idx(i + 1, j), -1.0));
            }
            if j > 0 {
                triplets.push((k, idx(i, j - 1), -1.0));
            }
            if j + 1 < m {
                triplets.push((k, idx(i, j + 1), -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}
