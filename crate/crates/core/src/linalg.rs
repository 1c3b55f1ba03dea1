//! Small dense linear-algebra helpers over `Complex64`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CMat, CVec};

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    DMatrix::from_element(rows, cols, ZERO)
}

pub fn identity(n: usize) -> CMat {
    DMatrix::identity(n, n)
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    DMatrix::from_fn(rows, cols, |i, j| r(data[i * cols + j]))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn min_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Number of singular values above `tol·max(1, ‖m‖)`.
pub fn numerical_rank(m: &CMat, tol: f64) -> usize {
    let sv = singular_values(m);
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    sv.iter().filter(|&&s| s > tol * scale).count()
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part of `m` and a unit eigenvector.
///
/// The eigenvector's phase is fixed so that its largest-modulus component
/// is real and positive, which makes serialized witnesses reproducible.
pub fn hermitian_min_eig(m: &CMat) -> (f64, CVec) {
    let (values, vectors) = hermitian_eigen(m);
    let v = normalize_phase(vectors.column(0).into_owned());
    (values[0], v)
}

pub fn normalize_phase(mut v: CVec) -> CVec {
    let norm = v.norm();
    if norm == 0.0 {
        return v;
    }
    let (mut best, mut idx) = (0.0, 0);
    for (i, z) in v.iter().enumerate() {
        // strict inequality with a small slack keeps the choice stable under roundoff
        if z.norm() > best * (1.0 + 1e-9) {
            best = z.norm();
            idx = i;
        }
    }
    let phase = v[idx].conj() / v[idx].norm();
    v.apply(|z| *z = *z * phase / norm);
    v
}

/// Rayleigh quotient `⟨m v, v⟩ / ⟨v, v⟩` (real part).
pub fn quadratic_form(m: &CMat, v: &CVec) -> f64 {
    let mv = m * v;
    v.dotc(&mv).re / v.norm_squared()
}

/// Kronecker block layout: block `(j,k)` of the result is `small·big[(j,k)]`.
pub fn kron(big: &CMat, small: &CMat) -> CMat {
    let (p, q) = big.shape();
    let (n, m) = small.shape();
    DMatrix::from_fn(p * n, q * m, |i, j| big[(i / n, j / m)] * small[(i % n, j % m)])
}

/// Least-squares solution of `x·a = b` via the pseudo-inverse of `a`.
pub fn solve_right_lstsq(a: &CMat, b: &CMat, rcond: f64) -> CMat {
    // x a = b  <=>  a^* x^* = b^*
    let at = a.adjoint();
    let bt = b.adjoint();
    let svd = at.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = rcond * smax.max(f64::MIN_POSITIVE);
    let xt = svd.solve(&bt, eps).expect("svd computed with both factors");
    xt.adjoint()
}

pub fn is_lower_triangular(m: &CMat, tol: f64) -> bool {
    (0..m.nrows()).all(|i| ((i + 1)..m.ncols()).all(|j| m[(i, j)].norm() <= tol))
}

/// JSON form of a complex matrix: rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> crate::Result<CMat> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != nc) {
        return Err(crate::Error::Json("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_to_json(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Serializable wrapper for a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonMatrix(pub MatrixJson);

impl From<&CMat> for JsonMatrix {
    fn from(m: &CMat) -> Self {
        JsonMatrix(matrix_to_json(m))
    }
}

pub fn unit_vector(len: usize, idx: usize) -> CVec {
    let mut v = DVector::from_element(len, ZERO);
    v[idx] = ONE;
    v
}
