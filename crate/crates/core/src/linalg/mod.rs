//! Dense vectors, CSR matrices, products and test matrices.

mod csr;
mod generators;
mod matrix_market;
mod vector;

pub use csr::SparseMatrix;
pub use generators::{laplacian_2d, toeplitz_banded};
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use vector::{axpy, dot, norm2, sub, Vector};

pub(crate) use vector::{axpy_in_place, dot_unchecked, sub_into, xpby_in_place};
