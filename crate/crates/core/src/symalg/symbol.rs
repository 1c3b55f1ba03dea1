//! Matrix-valued trigonometric polynomials `Φ(z) = Σ_j A_j z^j` on the unit circle.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{matrix_from_json, matrix_to_json, max_abs, spectral_norm, zeros, MatrixJson, ZERO};
use crate::{CMat, Error, Result};

/// Coefficients at or below this modulus are pruned after arithmetic.
pub const PRUNE_TOL: f64 = 1e-12;
/// Default tolerance of [`MatrixLaurentSymbol::approx_eq`].
pub const APPROX_TOL: f64 = 1e-10;

/// Finite Laurent polynomial with `n×n` coefficients, keyed by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLaurentSymbol {
    n: usize,
    coeffs: BTreeMap<i32, CMat>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    deg: i32,
    matrix: MatrixJson,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    n: usize,
    coeffs: Vec<CoeffJson>,
}

impl MatrixLaurentSymbol {
    pub fn zero(n: usize) -> Self {
        MatrixLaurentSymbol { n, coeffs: BTreeMap::new() }
    }

    /// Builds a symbol from `(degree, coefficient)` pairs; repeated degrees add up.
    pub fn from_coeffs<I>(n: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, CMat)>,
    {
        let mut s = Self::zero(n);
        for (d, m) in coeffs {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::SizeMismatch { left: n, right: m.nrows().max(m.ncols()) });
            }
            let cur = s.fourier_coeff(d);
            s.set(d, cur + m);
        }
        Ok(s.pruned(0.0))
    }

    /// Scalar symbol from `(degree, coefficient)` pairs.
    pub fn scalar<I>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = (i32, Complex64)>,
    {
        Self::from_coeffs(1, coeffs.into_iter().map(|(d, c)| (d, CMat::from_element(1, 1, c))))
            .expect("1x1 coefficients")
    }

    pub fn constant(m: CMat) -> Self {
        let n = m.nrows();
        Self::from_coeffs(n, [(0, m)]).expect("square constant")
    }

    /// `z^deg · m`
    pub fn monomial(deg: i32, m: CMat) -> Self {
        let n = m.nrows();
        Self::from_coeffs(n, [(deg, m)]).expect("square coefficient")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_scalar(&self) -> bool {
        self.n == 1
    }

    /// Replaces the coefficient at `deg`.
    pub fn set(&mut self, deg: i32, m: CMat) {
        assert_eq!(m.shape(), (self.n, self.n), "coefficient size");
        self.coeffs.insert(deg, m);
    }

    pub fn fourier_coeff(&self, deg: i32) -> CMat {
        self.coeffs.get(&deg).cloned().unwrap_or_else(|| zeros(self.n, self.n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &CMat)> {
        self.coeffs.iter().map(|(d, m)| (*d, m))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest and highest degree with a nonzero coefficient.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    /// Degree of the co-analytic part (0 when there is none).
    pub fn coanalytic_degree(&self) -> usize {
        self.degree_range().map_or(0, |(lo, _)| (-lo).max(0) as usize)
    }

    /// Degree of the analytic part (0 when there is none).
    pub fn analytic_degree(&self) -> usize {
        self.degree_range().map_or(0, |(_, hi)| hi.max(0) as usize)
    }

    pub fn bandwidth(&self) -> usize {
        self.coanalytic_degree().max(self.analytic_degree())
    }

    pub fn is_analytic(&self) -> bool {
        self.degree_range().is_none_or(|(lo, _)| lo >= 0)
    }

    pub fn is_coanalytic(&self) -> bool {
        self.degree_range().is_none_or(|(_, hi)| hi <= 0)
    }

    /// `(Φ₊, Φ₋)` with `Φ = Φ₋* + Φ₊`: `Φ₊` collects degrees `≥ 0`, and `Φ₋` has
    /// coefficient `A_{-j}*` at degree `j ≥ 1`.
    pub fn split(&self) -> (Self, Self) {
        let mut plus = Self::zero(self.n);
        let mut minus = Self::zero(self.n);
        for (&d, m) in &self.coeffs {
            if d >= 0 {
                plus.coeffs.insert(d, m.clone());
            } else {
                minus.coeffs.insert(-d, m.adjoint());
            }
        }
        (plus, minus)
    }

    /// Inverse of [`split`](Self::split).
    pub fn from_split(plus: &Self, minus: &Self) -> Result<Self> {
        if !plus.is_analytic() || !minus.is_analytic() {
            return Err(Error::Invalid("split parts must be analytic".into()));
        }
        if minus.coeffs.contains_key(&0) {
            return Err(Error::Invalid("co-analytic part must vanish at the origin".into()));
        }
        plus.add(&minus.adjoint())
    }

    /// Pointwise adjoint on the circle: coefficient `A_{-j}*` at degree `j`.
    pub fn adjoint(&self) -> Self {
        MatrixLaurentSymbol {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(&d, m)| (-d, m.adjoint())).collect(),
        }
    }

    /// `Φ̃(z) = Φ(z̄)*`: coefficient `A_j*` at degree `j`.
    pub fn tilde(&self) -> Self {
        MatrixLaurentSymbol {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(&d, m)| (d, m.adjoint())).collect(),
        }
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (&d, m) in &other.coeffs {
            let cur = out.fourier_coeff(d);
            out.coeffs.insert(d, cur + m);
        }
        Ok(out.pruned(PRUNE_TOL))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-crate::linalg::ONE))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut out: BTreeMap<i32, CMat> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let e = out.entry(i + j).or_insert_with(|| zeros(self.n, self.n));
                *e += a * b;
            }
        }
        Ok(MatrixLaurentSymbol { n: self.n, coeffs: out }.pruned(PRUNE_TOL))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        MatrixLaurentSymbol {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(&d, m)| (d, m * s)).collect(),
        }
        .pruned(0.0)
    }

    /// Left multiplication of every coefficient by a constant matrix.
    pub fn left_mul(&self, m: &CMat) -> Self {
        MatrixLaurentSymbol {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(&d, a)| (d, m * a)).collect(),
        }
        .pruned(PRUNE_TOL)
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: i32) -> Self {
        MatrixLaurentSymbol {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(&d, a)| (d + k, a.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::constant(crate::linalg::identity(self.n));
        for _ in 0..k {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    /// Removes coefficients whose largest entry is at most `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.coeffs.retain(|_, m| max_abs(m) > tol);
        self
    }

    /// Largest coefficient entry of `Φ*Φ - ΦΦ*`.
    pub fn normality_defect(&self) -> f64 {
        let a = self.adjoint();
        let comm = a
            .multiply(self)
            .and_then(|x| x.sub(&self.multiply(&a)?))
            .expect("same size");
        comm.coeffs.values().map(max_abs).fold(0.0, f64::max)
    }

    /// `Φ*Φ = ΦΦ*` coefficientwise within `tol`.
    pub fn is_normal_symbol(&self, tol: f64) -> bool {
        self.normality_defect() <= tol
    }

    pub fn eval(&self, z: Complex64) -> CMat {
        let mut out = zeros(self.n, self.n);
        for (&d, m) in &self.coeffs {
            out += m * z.powi(d);
        }
        out
    }

    /// `max_{|z|=1} ‖Φ(z)‖` sampled on `grid` equispaced points.
    pub fn sup_norm(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|t| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / grid as f64);
                spectral_norm(&self.eval(z))
            })
            .fold(0.0, f64::max)
    }

    /// Largest coefficient difference is at most `tol`.
    pub fn approx_eq_tol(&self, other: &Self, tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let degs = self.coeffs.keys().chain(other.coeffs.keys());
        degs.into_iter().all(|&d| {
            crate::linalg::max_abs_diff(&self.fourier_coeff(d), &other.fourier_coeff(d)) <= tol
        })
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.approx_eq_tol(other, APPROX_TOL)
    }

    /// Scalar symbol of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Self {
        Self::scalar(self.coeffs.iter().map(|(&d, m)| (d, m[(i, j)])))
    }

    /// Assembles a matrix symbol from scalar entry symbols (row-major).
    pub fn from_entries(n: usize, entries: &[Self]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::SizeMismatch { left: n * n, right: entries.len() });
        }
        let mut out = Self::zero(n);
        for (idx, e) in entries.iter().enumerate() {
            if e.n != 1 {
                return Err(Error::SizeMismatch { left: 1, right: e.n });
            }
            for (&d, m) in &e.coeffs {
                let mut cur = out.fourier_coeff(d);
                cur[(idx / n, idx % n)] += m[(0, 0)];
                out.coeffs.insert(d, cur);
            }
        }
        Ok(out.pruned(0.0))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let js = SymbolJson {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&deg, m)| CoeffJson { deg, matrix: matrix_to_json(m) })
                .collect(),
        };
        serde_json::to_value(js).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let js: SymbolJson = serde_json::from_value(v.clone())?;
        let coeffs = js
            .coeffs
            .iter()
            .map(|c| Ok((c.deg, matrix_from_json(&c.matrix)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(js.n, coeffs)
    }
}

impl fmt::Display for MatrixLaurentSymbol {
    /// Scalar symbols print as `a z^d + ...`; matrix symbols print their JSON form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n != 1 {
            return write!(f, "{}", self.to_json());
        }
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&d, m)| {
                let c = m[(0, 0)];
                let cs = if c.im == 0.0 {
                    format!("{}", c.re)
                } else {
                    format!("({}{:+}i)", c.re, c.im)
                };
                match d {
                    0 => cs,
                    1 => format!("{cs}*z"),
                    _ => format!("{cs}*z^{d}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Shorthand for the scalar symbol with the given coefficient at `deg`.
pub fn scalar_term(deg: i32, c: Complex64) -> MatrixLaurentSymbol {
    if c == ZERO {
        return MatrixLaurentSymbol::zero(1);
    }
    MatrixLaurentSymbol::scalar([(deg, c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r, real_matrix};
    use proptest::prelude::*;

    fn arb_symbol(n: usize) -> impl Strategy<Value = MatrixLaurentSymbol> {
        prop::collection::vec(
            (-3i32..=3, prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n)),
            0..5,
        )
        .prop_map(move |terms| {
            MatrixLaurentSymbol::from_coeffs(
                n,
                terms.into_iter().map(|(d, v)| {
                    (d, CMat::from_fn(n, n, |i, j| c(v[i * n + j].0, v[i * n + j].1)))
                }),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn split_reconstructs(s in arb_symbol(2)) {
            let (plus, minus) = s.split();
            let back = MatrixLaurentSymbol::from_split(&plus, &minus).unwrap();
            prop_assert!(back.approx_eq_tol(&s, 1e-12));
        }

        #[test]
        fn tilde_is_involution(s in arb_symbol(2)) {
            prop_assert!(s.tilde().tilde().approx_eq_tol(&s, 0.0));
        }

        #[test]
        fn tilde_reverses_products(a in arb_symbol(2), b in arb_symbol(2)) {
            let lhs = a.multiply(&b).unwrap().tilde();
            let rhs = b.tilde().multiply(&a.tilde()).unwrap();
            prop_assert!(lhs.approx_eq(&rhs));
        }

        #[test]
        fn adjoint_matches_pointwise(s in arb_symbol(2), t in 0.0f64..6.3) {
            let z = Complex64::from_polar(1.0, t);
            let d = crate::linalg::max_abs_diff(&s.adjoint().eval(z), &s.eval(z).adjoint());
            prop_assert!(d < 1e-10);
        }
    }

    #[test]
    fn json_round_trip() {
        let s = MatrixLaurentSymbol::from_coeffs(
            2,
            [(-1, real_matrix(2, 2, &[1.0, 2.0, 0.0, -1.0])), (2, CMat::from_element(2, 2, c(0.5, -0.25)))],
        )
        .unwrap();
        let back = MatrixLaurentSymbol::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = MatrixLaurentSymbol::constant(crate::linalg::identity(2));
        let b = MatrixLaurentSymbol::constant(crate::linalg::identity(3));
        assert!(matches!(a.multiply(&b), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn normality_of_simple_symbols() {
        let s = MatrixLaurentSymbol::scalar([(-1, r(1.0)), (1, r(2.0))]);
        assert!(s.is_normal_symbol(1e-12));
        // [[z, 0], [0, z̄]] is normal; [[z, z], [z, z̄]] is not
        let d = MatrixLaurentSymbol::from_coeffs(
            2,
            [(1, real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])), (-1, real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]))],
        )
        .unwrap();
        assert!(d.is_normal_symbol(1e-12));
        let nn = MatrixLaurentSymbol::from_coeffs(
            2,
            [(1, real_matrix(2, 2, &[1.0, 1.0, 1.0, 0.0])), (-1, real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]))],
        )
        .unwrap();
        assert!(!nn.is_normal_symbol(1e-9));
        // [[z̄, z], [z, z̄]] = z̄I + zJ is normal
        let sw = MatrixLaurentSymbol::from_coeffs(
            2,
            [(-1, crate::linalg::identity(2)), (1, real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]))],
        )
        .unwrap();
        assert!(sw.is_normal_symbol(1e-12));
        // constant shifts leave normality unchanged
        let shifted = nn.add(&MatrixLaurentSymbol::constant(crate::linalg::identity(2) * c(2.0, -1.0))).unwrap();
        assert!((shifted.normality_defect() - nn.normality_defect()).abs() < 1e-12);
    }
}
