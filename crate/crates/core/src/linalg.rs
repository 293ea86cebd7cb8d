//! Small dense-matrix aliases and covariance hygiene helpers.

use nalgebra::{DMatrix, SMatrix, SVector};

pub type Vec2 = SVector<f64, 2>;
pub type Mat2 = SMatrix<f64, 2, 2>;
pub type Mat3 = SMatrix<f64, 3, 3>;
pub type Vec13 = SVector<f64, 13>;
pub type Mat13 = SMatrix<f64, 13, 13>;
pub type Mat4 = SMatrix<f64, 4, 4>;
pub type Mat9 = SMatrix<f64, 9, 9>;
pub type Mat2x13 = SMatrix<f64, 2, 13>;
pub type Mat13x2 = SMatrix<f64, 13, 2>;
pub type Mat2x9 = SMatrix<f64, 2, 9>;

/// Symmetrize and clamp negative eigenvalues to zero.
pub fn psd_repair<const D: usize>(m: &SMatrix<f64, D, D>) -> SMatrix<f64, D, D> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = DMatrix::from_column_slice(D, D, sym.as_slice()).symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return sym;
    }
    let clamped = eig.eigenvalues.map(|l| l.max(0.0));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose();
    let rebuilt = SMatrix::<f64, D, D>::from_column_slice(rebuilt.as_slice());
    (rebuilt + rebuilt.transpose()) * 0.5
}

pub fn symmetrize<const D: usize>(m: &SMatrix<f64, D, D>) -> SMatrix<f64, D, D> {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_eigenvalue<const D: usize>(m: &SMatrix<f64, D, D>) -> f64 {
    let sym = symmetrize(m);
    DMatrix::from_column_slice(D, D, sym.as_slice()).symmetric_eigen().eigenvalues.min()
}

/// Inverse and determinant of a 2x2 matrix, `None` when the determinant is
/// not a usable positive number.
pub fn inv2(s: &Mat2) -> Option<(Mat2, f64)> {
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    if !det.is_finite() || det <= 1e-12 {
        return None;
    }
    let inv = Mat2::new(s[(1, 1)], -s[(0, 1)], -s[(1, 0)], s[(0, 0)]) / det;
    Some((inv, det))
}
