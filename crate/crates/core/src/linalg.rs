//! Small dense-matrix helpers shared across the crate.
//!
//! Fibers are low dimensional (d up to a few dozen), so everything works on
//! `nalgebra::DMatrix<f64>` with symmetric eigendecompositions.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vect = DVector<f64>;

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix,
/// sorted ascending by eigenvalue.
pub fn sym_eigen(mat: &Mat) -> (Vec<f64>, Mat) {
    let n = mat.nrows();
    let sym = 0.5 * (mat + mat.transpose());
    let se = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&j| se.eigenvalues[j]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (pos, &j) in order.iter().enumerate() {
        vecs.set_column(pos, &se.eigenvectors.column(j));
    }
    (vals, vecs)
}

/// Eigenvalues only, sorted ascending.
pub fn sym_eigenvalues(mat: &Mat) -> Vec<f64> {
    let sym = 0.5 * (mat + mat.transpose());
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().cloned().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// exp(-t M) for symmetric M via eigendecomposition.
pub fn sym_exp_neg(mat: &Mat, t: f64) -> Mat {
    let (vals, vecs) = sym_eigen(mat);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| (-t * l).exp()),
    ));
    &vecs * d * vecs.transpose()
}

/// trace of exp(-t M) for symmetric M.
pub fn sym_exp_neg_trace(mat: &Mat, t: f64) -> f64 {
    sym_eigenvalues(mat).iter().map(|&l| (-t * l).exp()).sum()
}

/// Largest absolute entry.
pub fn max_abs(mat: &Mat) -> f64 {
    mat.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

/// Largest absolute entry of the difference.
pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.max((x - y).abs());
    }
    acc
}

/// Symmetry defect `max |M - M^T|`.
pub fn asymmetry(mat: &Mat) -> f64 {
    max_abs_diff(mat, &mat.transpose().clone_owned())
}

/// Normalized copy of a nonzero vector.
pub fn unit(v: &Vect) -> Vect {
    let n = v.norm();
    assert!(n > 0.0, "cannot normalize zero vector");
    v / n
}
