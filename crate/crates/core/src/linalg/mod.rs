//! Dense complex linear algebra: Kronecker products, partial traces, and
//! Jacobi-based decompositions.

mod decomp;
mod matrix;

pub use decomp::{
    complex_gaussian, expm_i_hermitian, haar_isometry, haar_unitary, hermitian_eig, qr_thin, sqrt_psd, svd,
    EigenDecomposition, Svd,
};
pub use matrix::{sigma_x, sigma_y, sigma_z, ComplexMatrix, Subsystem};

use crate::error::Result;
use crate::scalar::Scalar;

/// `a ⊗ b`.
pub fn kron<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// Reduces a square operator on `C^dim_a ⊗ C^dim_b` by tracing out `traced`.
pub fn partial_trace<T: Scalar>(
    m: &ComplexMatrix<T>,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix<T>> {
    m.partial_trace(dim_a, dim_b, traced)
}
