//! Small dense-matrix helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn is_symmetric(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.transpose())) <= tol
}

pub fn is_diagonal(m: &Mat) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

pub fn scalar(d: usize, value: f64) -> Mat {
    Mat::identity(d, d) * value
}

pub fn diag(values: &[f64]) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

pub fn inverse(m: &Mat, what: &str) -> Result<Mat> {
    let det = m.determinant();
    if !det.is_finite() || det.abs() < 1e-300 {
        return Err(Error::Singular(format!("{what} has determinant {det:e}")));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{what} is not invertible")))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &Mat) -> Vec<f64> {
    let mut eigs: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.total_cmp(b));
    eigs
}

/// Determinant of `re + i·im`.
pub fn complex_det(re: &Mat, im: &Mat) -> Complex64 {
    let m = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    });
    m.determinant()
}

/// Quadratic form `x·M y`.
pub fn bilinear(m: &Mat, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        let mut row = 0.0;
        for j in 0..m.ncols() {
            row += m[(i, j)] * y[j];
        }
        acc += x[i] * row;
    }
    acc
}

pub fn mat_vec(m: &Mat, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}
