//! Dense Hermitian eigendecomposition helpers.
//!
//! The semidefinite solver projects its iterates onto the positive
//! semidefinite cone once per iteration, and the Gaussian randomization
//! step needs a PSD square root. Both reduce to the eigendecomposition of
//! a dense Hermitian matrix, wrapped here so the callers stay small.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetrize floating-point noise away: returns `(m + m^H) / 2`.
pub fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns real eigenvalues (ascending) and the matching unit-norm
/// eigenvector columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid("eigendecomposition needs a square matrix"));
    }
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Projection onto the positive semidefinite cone (negative eigenvalues
/// clipped to zero).
pub fn psd_project(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    spectral_map(m, |lambda| lambda.max(0.0))
}

/// PSD square root with an eigenvalue floor at zero.
pub fn psd_sqrt(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    spectral_map(m, |lambda| lambda.max(0.0).sqrt())
}

fn spectral_map(m: &DMatrix<Complex64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<Complex64>> {
    let (values, vectors) = hermitian_eigen(m)?;
    let n = m.nrows();
    let mut scaled = vectors.clone();
    for j in 0..n {
        let s = Complex64::new(f(values[j]), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    Ok(&scaled * vectors.adjoint())
}
