//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::qstate::{StateVector, C64};

pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

pub fn outer(a: &StateVector) -> CMatrix {
    let v = a.amps();
    CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// Ascending eigenvalues and matching eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn real_symmetric_eigen(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Top eigenpair of a Hermitian matrix.
pub fn top_eigen(m: &CMatrix) -> (f64, Vec<C64>) {
    let (vals, vecs) = hermitian_eigen(m);
    let k = vals.len() - 1;
    (vals[k], vecs.column(k).iter().copied().collect())
}

pub fn quad_form(m: &CMatrix, x: &[C64]) -> f64 {
    let mut acc = czero();
    for i in 0..x.len() {
        let mut row = czero();
        for j in 0..x.len() {
            row += m[(i, j)] * x[j];
        }
        acc += x[i].conj() * row;
    }
    acc.re
}

pub fn real_quad_form(m: &RMatrix, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..x.len() {
            acc += x[i] * m[(i, j)] * x[j];
        }
    }
    acc
}

/// Swap operator on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = cone();
        }
    }
    s
}

/// Projector onto the symmetric subspace of `C^d ⊗ C^d`.
pub fn sym_projector(d: usize) -> CMatrix {
    (CMatrix::identity(d * d, d * d) + swap_operator(d)) * C64::new(0.5, 0.0)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}
