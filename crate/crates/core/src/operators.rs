//! Finite sections of block Toeplitz and Hankel operators, exact
//! self-commutators and windowed positivity tests.

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_min_eig, max_abs, numerical_rank, spectral_norm, vector_to_json, zeros};
use crate::symalg::MatrixLaurentSymbol;
use crate::{CMat, CVec, Error, Result, Tolerances};

/// Largest window dimension (`n·W` after inflation) accepted by the window tests.
pub const MAX_WINDOW_DIM: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    TruncatedWithTail { bound: f64 },
}

impl Exactness {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::Exact)
    }
}

/// `W×W` block section of an operator on `H²_{ℂⁿ}`; index `block·n + component`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedOperator {
    pub window: usize,
    pub n: usize,
    pub block: CMat,
    pub exactness: Exactness,
}

/// Section of `T_Φ`: block `(i,j)` is `A_{i-j}`.
pub fn toeplitz_block(phi: &MatrixLaurentSymbol, w: usize) -> CMat {
    let n = phi.n();
    let mut out = zeros(n * w, n * w);
    for (d, a) in phi.iter() {
        for j in 0..w {
            let i = j as i64 + d as i64;
            if i >= 0 && (i as usize) < w {
                out.view_mut((i as usize * n, j * n), (n, n)).copy_from(a);
            }
        }
    }
    out
}

/// Section of `H_Φ`: block `(i,j)` is `A_{-i-j-1}`.
pub fn hankel_block(phi: &MatrixLaurentSymbol, w: usize) -> CMat {
    let n = phi.n();
    let mut out = zeros(n * w, n * w);
    for (d, a) in phi.iter() {
        if d >= 0 {
            continue;
        }
        let s = (-d - 1) as usize;
        for i in 0..=s.min(w.saturating_sub(1)) {
            let j = s - i;
            if j < w {
                out.view_mut((i * n, j * n), (n, n)).copy_from(a);
            }
        }
    }
    out
}

/// Certifies a window family by the doubling test: the section at `2W` must
/// vanish outside the leading `W` blocks of every `k×k` block-cell.
fn certify<F>(w: usize, n: usize, cells: usize, build: F) -> (CMat, Exactness)
where
    F: Fn(usize) -> CMat,
{
    let big = build(2 * w);
    let inner = w * n;
    let outer = 2 * w * n;
    let mut tail: f64 = 0.0;
    for bi in 0..cells {
        for bj in 0..cells {
            for r in 0..outer {
                for c in 0..outer {
                    if r >= inner || c >= inner {
                        tail = tail.max(big[(bi * outer + r, bj * outer + c)].norm());
                    }
                }
            }
        }
    }
    let small = compress_cells(&big, cells, outer, inner);
    let exactness = if tail <= 1e-11 { Exactness::Exact } else { Exactness::TruncatedWithTail { bound: tail } };
    (small, exactness)
}

/// Keeps the leading `inner` rows/columns of every cell of a `cells×cells` block matrix.
fn compress_cells(m: &CMat, cells: usize, outer: usize, inner: usize) -> CMat {
    CMat::from_fn(cells * inner, cells * inner, |r, c| {
        m[((r / inner) * outer + r % inner, (c / inner) * outer + c % inner)]
    })
}

pub fn toeplitz_window(phi: &MatrixLaurentSymbol, w: usize) -> Result<WindowedOperator> {
    check_window(w)?;
    let (block, exactness) = certify(w, phi.n(), 1, |x| toeplitz_block(phi, x));
    Ok(WindowedOperator { window: w, n: phi.n(), block, exactness })
}

pub fn hankel_window(phi: &MatrixLaurentSymbol, w: usize) -> Result<WindowedOperator> {
    check_window(w)?;
    let (block, exactness) = certify(w, phi.n(), 1, |x| hankel_block(phi, x));
    Ok(WindowedOperator { window: w, n: phi.n(), block, exactness })
}

fn check_window(w: usize) -> Result<()> {
    if w == 0 {
        return Err(Error::Window("window must be at least 1".into()));
    }
    Ok(())
}

fn pseudo_block(phi: &MatrixLaurentSymbol, w: usize) -> CMat {
    let hs = hankel_block(&phi.adjoint(), w);
    let h = hankel_block(phi, w);
    hs.adjoint() * &hs - h.adjoint() * &h
}

fn selfcomm_block(phi: &MatrixLaurentSymbol, w: usize) -> CMat {
    let a = phi.adjoint();
    let defect = a.multiply(phi).and_then(|x| x.sub(&phi.multiply(&a)?)).expect("same size");
    pseudo_block(phi, w) + toeplitz_block(&defect, w)
}

/// Window large enough to hold every Hankel product exactly.
pub fn natural_window(phi: &MatrixLaurentSymbol) -> usize {
    phi.coanalytic_degree() + phi.analytic_degree() + 1
}

/// `[T_Φ*, T_Φ] = H_{Φ*}*H_{Φ*} - H_Φ*H_Φ + T_{Φ*Φ-ΦΦ*}` on the natural window.
pub fn selfcommutator_exact(phi: &MatrixLaurentSymbol) -> WindowedOperator {
    selfcommutator_window(phi, natural_window(phi))
}

pub fn selfcommutator_window(phi: &MatrixLaurentSymbol, w: usize) -> WindowedOperator {
    let w = w.max(1);
    let (block, exactness) = certify(w, phi.n(), 1, |x| selfcomm_block(phi, x));
    WindowedOperator { window: w, n: phi.n(), block, exactness }
}

/// `H_{Φ*}*H_{Φ*} - H_Φ*H_Φ` on the natural window.
pub fn pseudo_selfcommutator(phi: &MatrixLaurentSymbol) -> WindowedOperator {
    let w = natural_window(phi);
    let (block, exactness) = certify(w, phi.n(), 1, |x| pseudo_block(phi, x));
    WindowedOperator { window: w, n: phi.n(), block, exactness }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdVerdict {
    #[serde(rename = "PSD")]
    Psd,
    #[serde(rename = "NotPSD")]
    NotPsd,
    Marginal,
}

/// Minimum-eigenvalue test of a Hermitian window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub verdict: PsdVerdict,
    pub min_eigenvalue: f64,
    #[serde(serialize_with = "ser_witness")]
    pub witness: Option<CVec>,
    pub window: usize,
    pub exactness: Exactness,
}

fn ser_witness<S: serde::Serializer>(v: &Option<CVec>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&vector_to_json(v)),
        None => s.serialize_none(),
    }
}

impl PositivityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

/// PSD iff `λ_min ≥ -psd_rel·(1+‖X‖)`; NotPSD iff `λ_min < -psd_neg`; otherwise Marginal.
pub fn classify_psd(x: &CMat, tol: &Tolerances) -> (PsdVerdict, f64, CVec) {
    let (lmin, v) = hermitian_min_eig(x);
    let verdict = if lmin >= -tol.psd_rel * (1.0 + spectral_norm(x)) {
        PsdVerdict::Psd
    } else if lmin < -tol.psd_neg {
        PsdVerdict::NotPsd
    } else {
        PsdVerdict::Marginal
    };
    (verdict, lmin, v)
}

pub fn positivity(op: &WindowedOperator, tol: &Tolerances) -> PositivityReport {
    let (verdict, min_eigenvalue, v) = classify_psd(&op.block, tol);
    PositivityReport {
        verdict,
        min_eigenvalue,
        witness: (verdict != PsdVerdict::Psd).then_some(v),
        window: op.window,
        exactness: op.exactness,
    }
}

/// `k×k` block matrix `([T^{*j}, T^i])_{i,j=1..k}` compressed to the window, computed
/// from sections inflated by `k·bandwidth` so every retained entry is exact.
fn k_hypo_block(phi: &MatrixLaurentSymbol, k: usize, w: usize) -> CMat {
    let n = phi.n();
    let bw = phi.bandwidth();
    let big = w + k * bw;
    let t = toeplitz_block(phi, big);
    let mut pows = vec![crate::linalg::identity(n * big)];
    for i in 1..=k {
        pows.push(&pows[i - 1] * &t);
    }
    let spows: Vec<CMat> = pows.iter().map(|p| p.adjoint()).collect();
    let inner = n * w;
    let mut out = zeros(k * inner, k * inner);
    for (i, pi) in pows.iter().enumerate().skip(1) {
        for (j, sj) in spows.iter().enumerate().skip(1) {
            let c = sj * pi - pi * sj;
            out.view_mut(((i - 1) * inner, (j - 1) * inner), (inner, inner))
                .copy_from(&c.view((0, 0), (inner, inner)));
        }
    }
    out
}

fn window_budget(phi: &MatrixLaurentSymbol, k: usize, w: usize) -> Result<()> {
    check_window(w)?;
    if k == 0 {
        return Err(Error::Window("k must be at least 1".into()));
    }
    let dim = phi.n() * (2 * w + k * phi.bandwidth());
    if dim > MAX_WINDOW_DIM {
        return Err(Error::Window(format!(
            "inflated section of dimension {dim} exceeds {MAX_WINDOW_DIM} for k={k}, W={w}"
        )));
    }
    Ok(())
}

/// Windowed k-hyponormality test. NotPSD certifies failure; PSD is conclusive only
/// when the doubling test reports the block matrix as exact.
pub fn k_hypo_window(phi: &MatrixLaurentSymbol, k: usize, w: usize, tol: &Tolerances) -> Result<PositivityReport> {
    window_budget(phi, k, w)?;
    let (block, exactness) = certify(w, phi.n(), k, |x| k_hypo_block(phi, k, x));
    Ok(positivity(&WindowedOperator { window: w, n: phi.n(), block, exactness }, tol))
}

/// `[(T_Φ²)*, T_Φ²]` from `T_Φ² = T_{Φ²} - H_{Φ*}*H_Φ`.
fn square_block(phi: &MatrixLaurentSymbol, w: usize) -> CMat {
    let n = phi.n();
    let big = w + 4 * phi.bandwidth();
    let sq = phi.multiply(phi).expect("same size");
    let h = hankel_block(phi, big);
    let hs = hankel_block(&phi.adjoint(), big);
    let s = toeplitz_block(&sq, big) - hs.adjoint() * h;
    let c = s.adjoint() * &s - &s * s.adjoint();
    c.view((0, 0), (n * w, n * w)).into_owned()
}

pub fn square_hypo_window(phi: &MatrixLaurentSymbol, w: usize, tol: &Tolerances) -> Result<PositivityReport> {
    window_budget(phi, 4, w)?;
    let (block, exactness) = certify(w, phi.n(), 1, |x| square_block(phi, x));
    Ok(positivity(&WindowedOperator { window: w, n: phi.n(), block, exactness }, tol))
}

/// One row of an eigenvalue sweep over windows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub window: usize,
    pub k: usize,
    pub min_eigenvalue: f64,
    pub verdict: PsdVerdict,
    pub exact: bool,
}

pub fn eigen_sweep(phi: &MatrixLaurentSymbol, k: usize, windows: &[usize], tol: &Tolerances) -> Result<Vec<SweepRow>> {
    windows
        .iter()
        .map(|&w| {
            let r = k_hypo_window(phi, k, w, tol)?;
            Ok(SweepRow { window: w, k, min_eigenvalue: r.min_eigenvalue, verdict: r.verdict, exact: r.exactness.is_exact() })
        })
        .collect()
}

/// Result of the kernel-ordering test `ker H_{Φ*} ⊆ ker H_Φ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelInclusion {
    pub holds: bool,
    pub rank_adjoint: usize,
    pub rank_stacked: usize,
}

/// Compares `rank [H_{Φ*}; H_Φ]` with `rank H_{Φ*}` on an exact window.
pub fn kernel_inclusion(phi: &MatrixLaurentSymbol, tol: f64) -> KernelInclusion {
    let w = phi.bandwidth() + 1;
    let n = phi.n();
    let hs = hankel_block(&phi.adjoint(), w);
    let h = hankel_block(phi, w);
    let mut stacked = zeros(2 * n * w, n * w);
    stacked.view_mut((0, 0), (n * w, n * w)).copy_from(&hs);
    stacked.view_mut((n * w, 0), (n * w, n * w)).copy_from(&h);
    let rank_adjoint = numerical_rank(&hs, tol);
    let rank_stacked = numerical_rank(&stacked, tol);
    KernelInclusion { holds: rank_adjoint == rank_stacked, rank_adjoint, rank_stacked }
}

/// The normal non-Toeplitz completion `[[T_z̄, T_z+B],[T_z+B, T_z̄]]` on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct NonToeplitzCompletion {
    /// `2W×2W` section of the completion.
    pub t: WindowedOperator,
    /// Largest entry of `[T_z,B] - [T_z̄,B]` on the interior sub-window.
    pub residual: f64,
    /// Size of the interior sub-window.
    pub interior: usize,
    /// Spectral norm of the window of `C`.
    pub c_norm: f64,
    /// Largest spread of entries along a diagonal of `T_z + B` (zero for Toeplitz).
    pub toeplitz_defect: f64,
}

/// `c_0 = 1`, `c_1 = 1/2`, `c_{r+1} = (c_r + c_{r-1})/2`.
fn c_sequence(len: usize) -> Vec<f64> {
    let mut c = vec![1.0, 0.5];
    while c.len() < len {
        let k = c.len();
        c.push((c[k - 1] + c[k - 2]) / 2.0);
    }
    c.truncate(len);
    c
}

pub fn non_toeplitz_completion(w: usize) -> Result<NonToeplitzCompletion> {
    if w < 8 {
        return Err(Error::Window("the completion needs W ≥ 8".into()));
    }
    let c = c_sequence(w);
    let mut cm = zeros(w, w);
    for r in 0..w {
        let mut col = r + 2;
        let mut v = c[r];
        while col < w {
            cm[(r, col)] = crate::linalg::r(v);
            v /= 2.0;
            col += 2;
        }
    }
    let mut b = &cm + cm.transpose();
    for r in 1..w {
        b[(r, r)] = crate::linalg::r(-c[r - 1]);
    }
    let s = toeplitz_block(&MatrixLaurentSymbol::scalar([(1, crate::linalg::ONE)]), w);
    let st = s.transpose();
    let lhs = &s * &b - &b * &s;
    let rhs = &st * &b - &b * &st;
    let interior = w - 2 * (w as f64).log2().ceil() as usize;
    let diff = (lhs - rhs).view((0, 0), (interior, interior)).into_owned();
    let residual = max_abs(&diff);
    let off = &s + &b;
    let mut block = zeros(2 * w, 2 * w);
    block.view_mut((0, 0), (w, w)).copy_from(&st);
    block.view_mut((w, w), (w, w)).copy_from(&st);
    block.view_mut((0, w), (w, w)).copy_from(&off);
    block.view_mut((w, 0), (w, w)).copy_from(&off);
    let mut toeplitz_defect: f64 = 0.0;
    for d in -(w as i64 - 1)..(w as i64) {
        let entries: Vec<_> = (0..w as i64)
            .filter_map(|i| {
                let j = i - d;
                (j >= 0 && j < w as i64).then(|| off[(i as usize, j as usize)])
            })
            .collect();
        for e in &entries {
            toeplitz_defect = toeplitz_defect.max((e - entries[0]).norm());
        }
    }
    Ok(NonToeplitzCompletion {
        t: WindowedOperator { window: 2 * w, n: 1, block, exactness: Exactness::TruncatedWithTail { bound: c[w - 1] } },
        residual,
        interior,
        c_norm: spectral_norm(&cm),
        toeplitz_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity, max_abs_diff, r, real_matrix, ONE};

    fn scalar(terms: &[(i32, f64)]) -> MatrixLaurentSymbol {
        MatrixLaurentSymbol::scalar(terms.iter().map(|&(d, v)| (d, r(v))))
    }

    fn e00(size: usize, v: f64) -> CMat {
        let mut m = zeros(size, size);
        m[(0, 0)] = r(v);
        m
    }

    #[test]
    fn toeplitz_examples() {
        let t = toeplitz_window(&scalar(&[(1, 1.0)]), 2).unwrap();
        assert_eq!(t.block, real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0]));
        let t = toeplitz_window(&scalar(&[(-1, 1.0), (1, 2.0)]), 3).unwrap();
        assert_eq!(t.block, real_matrix(3, 3, &[0.0, 1.0, 0.0, 2.0, 0.0, 1.0, 0.0, 2.0, 0.0]));
        let up = MatrixLaurentSymbol::monomial(-1, identity(2));
        let t = toeplitz_window(&up, 2).unwrap();
        let mut want = zeros(4, 4);
        want[(0, 2)] = ONE;
        want[(1, 3)] = ONE;
        assert_eq!(t.block, want);
    }

    #[test]
    fn hankel_examples() {
        let h = hankel_window(&scalar(&[(-1, 1.0)]), 3).unwrap();
        assert_eq!(h.block, e00(3, 1.0));
        assert!(h.exactness.is_exact());
        let h2 = hankel_window(&scalar(&[(-1, 1.0), (1, 2.0)]), 3).unwrap();
        assert_eq!(h2.block, h.block);
        assert_eq!(max_abs(&hankel_window(&scalar(&[(0, 1.0), (2, 3.0)]), 4).unwrap().block), 0.0);
    }

    #[test]
    fn selfcommutator_examples() {
        let s = selfcommutator_exact(&scalar(&[(-1, 1.0), (1, 2.0)]));
        assert!(s.exactness.is_exact());
        assert!(max_abs_diff(&s.block, &e00(s.block.nrows(), 3.0)) < 1e-12);
        let s = selfcommutator_exact(&scalar(&[(1, 1.0)]));
        assert!(max_abs_diff(&s.block, &e00(s.block.nrows(), 1.0)) < 1e-12);
        let s = selfcommutator_exact(&scalar(&[(-2, 1.0), (-1, 2.0), (1, 1.0), (2, 2.0)]));
        let (v, _, _) = classify_psd(&s.block, &Tolerances::default());
        assert_eq!(v, PsdVerdict::Psd);
        assert_eq!(numerical_rank(&s.block, 1e-8), 1);
    }

    #[test]
    fn selfcommutator_invariant_under_constant_shift() {
        let phi = scalar(&[(-2, 1.0), (-1, -0.5), (1, 0.3), (3, 1.2)]);
        let shifted = phi.add(&scalar(&[(0, 4.0)])).unwrap();
        assert!(max_abs_diff(&selfcommutator_exact(&phi).block, &selfcommutator_exact(&shifted).block) < 1e-12);
    }

    #[test]
    fn pseudo_selfcommutator_antisymmetry() {
        let phi = MatrixLaurentSymbol::from_coeffs(
            2,
            [(-1, real_matrix(2, 2, &[1.0, 0.0, 2.0, 0.0])), (1, CMat::from_element(2, 2, c(0.5, 1.0)))],
        )
        .unwrap();
        let a = pseudo_selfcommutator(&phi);
        let b = pseudo_selfcommutator(&phi.adjoint());
        assert!(max_abs_diff(&a.block, &(-b.block)) < 1e-12);
    }

    #[test]
    fn hankel_adjoint_identity() {
        let phi = MatrixLaurentSymbol::from_coeffs(
            2,
            [(-2, CMat::from_fn(2, 2, |i, j| c(i as f64, j as f64 + 0.5))), (-1, identity(2))],
        )
        .unwrap();
        let a = hankel_block(&phi, 4).adjoint();
        let b = hankel_block(&phi.tilde(), 4);
        assert!(max_abs_diff(&a, &b) < 1e-15);
    }

    #[test]
    fn product_identity_on_windows() {
        // T_{ΦΨ} - T_Φ T_Ψ = H_{Φ*}* H_Ψ
        let phi = scalar(&[(-2, 1.0), (1, 3.0), (2, -1.0)]);
        let psi = scalar(&[(-1, 2.0), (0, 1.0), (3, 0.5)]);
        let w = 12;
        let big = w + 4;
        let lhs = toeplitz_block(&phi.multiply(&psi).unwrap(), big) - toeplitz_block(&phi, big) * toeplitz_block(&psi, big);
        let rhs = hankel_block(&phi.adjoint(), big).adjoint() * hankel_block(&psi, big);
        assert!(max_abs_diff(&lhs.view((0, 0), (w, w)).into_owned(), &rhs.view((0, 0), (w, w)).into_owned()) < 1e-12);
    }

    #[test]
    fn k_hypo_examples() {
        let tol = Tolerances::default();
        let z = scalar(&[(1, 1.0)]);
        for k in 1..=3 {
            let rep = k_hypo_window(&z, k, 6, &tol).unwrap();
            assert_eq!(rep.verdict, PsdVerdict::Psd);
        }
        let u = scalar(&[(-1, 1.0), (1, 2.0)]);
        let rep = k_hypo_window(&u, 1, 8, &tol).unwrap();
        assert_eq!(rep.verdict, PsdVerdict::Psd);
        assert!(rep.exactness.is_exact());
    }

    #[test]
    fn square_matches_second_diagonal_block() {
        let tol = Tolerances::default();
        let u = scalar(&[(-1, 1.0), (1, 2.0)]);
        let w = 10;
        let sq = square_hypo_window(&u, w, &tol).unwrap();
        assert_eq!(sq.verdict, PsdVerdict::NotPsd);
        assert!(sq.min_eigenvalue < -1e-3);
        let v = sq.witness.clone().unwrap();
        assert!((crate::linalg::quadratic_form(&square_block(&u, w), &v) - sq.min_eigenvalue).abs() < 1e-9);
        let k2 = k_hypo_block(&u, 2, w);
        let b22 = k2.view((w, w), (w, w)).into_owned();
        assert!(max_abs_diff(&b22, &square_block(&u, w)) < 1e-10);
        let analytic = scalar(&[(0, 1.0), (1, 0.5), (2, -2.0)]);
        assert_eq!(square_hypo_window(&analytic, w, &tol).unwrap().verdict, PsdVerdict::Psd);
    }

    #[test]
    fn kernel_inclusion_scalar() {
        assert!(kernel_inclusion(&scalar(&[(-1, 1.0), (1, 2.0)]), 1e-9).holds);
        assert!(!kernel_inclusion(&scalar(&[(-3, 1.0), (1, 1.0)]), 1e-9).holds);
    }

    #[test]
    fn non_toeplitz_completion_properties() {
        let r64 = non_toeplitz_completion(64).unwrap();
        assert!(r64.residual <= 1e-6);
        assert!(r64.c_norm <= 2.0);
        assert!(r64.toeplitz_defect > 0.1);
        assert!(matches!(non_toeplitz_completion(4), Err(Error::Window(_))));
    }

    #[test]
    fn window_budget_enforced() {
        let z = scalar(&[(1, 1.0)]);
        assert!(matches!(k_hypo_window(&z, 1, 0, &Tolerances::default()), Err(Error::Window(_))));
        assert!(matches!(k_hypo_window(&z, 2, 4000, &Tolerances::default()), Err(Error::Window(_))));
    }
}
