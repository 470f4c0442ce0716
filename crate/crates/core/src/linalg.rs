//! Small dense Hermitian helpers on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::orbit::C64;

/// Relative eigenvalue floor below which a PSD matrix is treated as singular.
pub const PSEUDO_INVERSE_TOL: f64 = 1e-12;

/// `(X + X†)/2`.
pub fn hermitian_part(x: &DMatrix<C64>) -> DMatrix<C64> {
    (x + x.adjoint()).scale(0.5)
}

/// Clips negative eigenvalues of a Hermitian matrix that should be PSD.
/// Returns whether `X` changed.
pub fn psd_repair(x: &mut DMatrix<C64>) -> bool {
    let n = x.nrows();
    if n == 0 {
        return false;
    }
    let (values, vectors) = hermitian_eigen(x);
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if values[0] >= -PSD_SLACK * scale {
        return false;
    }
    let mut y = DMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        if v > 0.0 {
            let col = vectors.column(i);
            y += (&col * col.adjoint()).scale(v);
        }
    }
    *x = y;
    true
}

/// Relative negativity tolerated by [`psd_repair`].
const PSD_SLACK: f64 = 1e-14;

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(x: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(hermitian_part(x));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(x.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(x: &DMatrix<C64>) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    hermitian_eigen(x).0[0]
}

/// Pseudo-inverse square root of a PSD matrix and the projector onto the
/// discarded kernel. Eigenvalues below `tol · λ_max` count as zero.
pub fn psd_inv_sqrt(x: &DMatrix<C64>, tol: f64) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = x.nrows();
    let (values, vectors) = hermitian_eigen(x);
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut inv = DMatrix::zeros(n, n);
    let mut kernel = DMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        let col = vectors.column(i);
        let outer = &col * col.adjoint();
        if max > 0.0 && v > tol * max {
            inv += outer.scale(1.0 / v.sqrt());
        } else {
            kernel += outer;
        }
    }
    (inv, kernel)
}

/// `A ⊗ B`.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Entrywise max-norm.
pub fn max_abs(x: &DMatrix<C64>) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Real symmetric eigendecomposition, ascending.
pub fn symmetric_eigen_real(x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(x.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
