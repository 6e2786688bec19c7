//! Dense complex linear algebra shared by the kernel, dilation and
//! property (P) modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

/// Real matrix promoted to complex entries.
pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

pub fn scalar(x: f64) -> CMatrix {
    from_real(1, 1, &[x])
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

/// Eigenvalues (ascending) and matching eigenvector columns of the
/// Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Residual `‖M − M*‖` relative to `max(1, ‖M‖)`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    let skew = op_norm(&(m - m.adjoint()));
    skew / op_norm(m).max(1.0)
}

/// Square root of a positive semidefinite matrix. Eigenvalues in
/// `[-tol·max(1,‖M‖), 0)` are clamped to zero; anything more negative is an
/// error.
pub fn psd_sqrt(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if let Some(&min) = values.first() {
        if min < -tol * scale {
            return Err(Error::NotPsd(min));
        }
    }
    let roots = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v.max(0.0).sqrt(), 0.0)),
    ));
    Ok(&vectors * roots * vectors.adjoint())
}

/// Block-diagonal matrix from equally sized square blocks.
pub fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = from_real(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -1.0]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, vals.iter().map(|&v| c(v, 0.0))));
        assert!(frobenius(&(&vecs * d * vecs.adjoint() - m)) < 1e-12);
    }

    #[test]
    fn sqrt_of_defect() {
        let t = from_real(2, 2, &[0.3, 0.1, 0.0, 0.5]);
        let z = identity(2) - &t * t.adjoint();
        let r = psd_sqrt(&z, 1e-12).unwrap();
        assert!(frobenius(&(&r * &r - &z)) < 1e-12);
        assert!(matches!(psd_sqrt(&scalar(-0.5), 1e-9), Err(Error::NotPsd(_))));
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let (vals, _) = hermitian_eigen(&m);
        assert!(vals[0].abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12);
        assert!(hermitian_residual(&m) < 1e-15);
    }
}
