//! Finite Blaschke products, zero-multiset arithmetic and inner/outer
//! factorizations of rational co-analytic parts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{min_singular_value, ONE, ZERO};
use crate::symalg::{MatrixLaurentSymbol, Poly, RationalAnalytic, RationalMatrix};
use crate::{Error, Result};

/// Zeros closer than this are identified.
pub const ZERO_MATCH_TOL: f64 = 1e-9;

/// `u · ∏ b_α^m` with `b_α(z) = (z - α)/(1 - ᾱz)`, `|u| = 1`, `|α| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteBlaschkeProduct {
    unimodular: Complex64,
    zeros: Vec<(Complex64, usize)>,
}

#[derive(Serialize, Deserialize)]
struct ZeroJson {
    alpha: [f64; 2],
    mult: usize,
}

#[derive(Serialize, Deserialize)]
struct BlaschkeJson {
    unimodular: [f64; 2],
    zeros: Vec<ZeroJson>,
}

fn add_zero(zeros: &mut Vec<(Complex64, usize)>, a: Complex64, m: usize) {
    if m == 0 {
        return;
    }
    let nearest = zeros
        .iter_mut()
        .filter(|(b, _)| (*b - a).norm() <= ZERO_MATCH_TOL)
        .min_by(|x, y| (x.0 - a).norm().total_cmp(&(y.0 - a).norm()));
    match nearest {
        Some(e) => e.1 += m,
        None => zeros.push((a, m)),
    }
}

fn find_mult(zeros: &[(Complex64, usize)], a: Complex64) -> usize {
    zeros
        .iter()
        .filter(|(b, _)| (*b - a).norm() <= ZERO_MATCH_TOL)
        .map(|e| e.1)
        .sum()
}

impl FiniteBlaschkeProduct {
    pub fn new(unimodular: Complex64, zeros: Vec<(Complex64, usize)>) -> Result<Self> {
        if (unimodular.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("unimodular constant has modulus {}", unimodular.norm())));
        }
        let mut merged = Vec::new();
        for (a, m) in zeros {
            if a.norm() >= 1.0 {
                return Err(Error::OutsideDisk { re: a.re, im: a.im });
            }
            add_zero(&mut merged, a, m);
        }
        Ok(FiniteBlaschkeProduct { unimodular: unimodular / unimodular.norm(), zeros: merged })
    }

    pub fn one() -> Self {
        FiniteBlaschkeProduct { unimodular: ONE, zeros: Vec::new() }
    }

    /// `z^d`
    pub fn z_power(d: usize) -> Self {
        Self::from_zeros(&[(ZERO, d)]).expect("origin is inside the disk")
    }

    pub fn from_zeros(zeros: &[(Complex64, usize)]) -> Result<Self> {
        Self::new(ONE, zeros.to_vec())
    }

    pub fn unimodular(&self) -> Complex64 {
        self.unimodular
    }

    pub fn zeros(&self) -> &[(Complex64, usize)] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|z| z.1).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn multiplicity(&self, a: Complex64) -> usize {
        find_mult(&self.zeros, a)
    }

    /// Zeros listed with repetition, all copies of each zero kept together.
    pub fn ordered_zeros(&self) -> Vec<Complex64> {
        self.zeros.iter().flat_map(|&(a, m)| std::iter::repeat_n(a, m)).collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.unimodular, |acc, &(a, m)| {
            acc * ((z - a) / (ONE - a.conj() * z)).powu(m as u32)
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        for &(a, m) in &other.zeros {
            add_zero(&mut zeros, a, m);
        }
        FiniteBlaschkeProduct { unimodular: self.unimodular * other.unimodular, zeros }
    }

    /// `self` is an inner divisor of `other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.zeros.iter().all(|&(a, m)| other.multiplicity(a) >= m)
    }

    /// `self / other`, provided `other` divides `self`.
    pub fn quotient(&self, other: &Self) -> Result<Self> {
        if !other.divides(self) {
            return Err(Error::Invalid("inner quotient of non-divisor".into()));
        }
        let zeros = self
            .zeros
            .iter()
            .map(|&(a, m)| (a, m - other.multiplicity(a).min(m)))
            .filter(|e| e.1 > 0)
            .collect();
        Ok(FiniteBlaschkeProduct { unimodular: self.unimodular / other.unimodular, zeros })
    }

    /// Rational representation `u ∏ (z - α)^m / ∏ (1 - ᾱz)^m`.
    pub fn as_rational(&self) -> RationalAnalytic {
        let num = self
            .zeros
            .iter()
            .fold(Poly::constant(self.unimodular), |acc, &(a, m)| {
                acc.mul(&Poly::new(vec![-a, ONE]).pow(m))
            });
        let poles = self
            .zeros
            .iter()
            .filter(|(a, _)| *a != ZERO)
            .map(|&(a, m)| (ONE / a.conj(), m))
            .collect();
        RationalAnalytic::new(num, poles).expect("reflected zeros lie outside the disk")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BlaschkeJson {
            unimodular: [self.unimodular.re, self.unimodular.im],
            zeros: self
                .zeros
                .iter()
                .map(|&(a, mult)| ZeroJson { alpha: [a.re, a.im], mult })
                .collect(),
        })
        .expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let js: BlaschkeJson = serde_json::from_value(v.clone())?;
        Self::new(
            Complex64::new(js.unimodular[0], js.unimodular[1]),
            js.zeros.iter().map(|z| (Complex64::new(z.alpha[0], z.alpha[1]), z.mult)).collect(),
        )
    }
}

/// Greatest common inner divisor and least common inner multiple (unimodular 1).
pub fn gcd_lcm(a: &FiniteBlaschkeProduct, b: &FiniteBlaschkeProduct) -> (FiniteBlaschkeProduct, FiniteBlaschkeProduct) {
    let mut gcd = Vec::new();
    let mut lcm = Vec::new();
    for &(z, m) in &a.zeros {
        let mb = b.multiplicity(z);
        add_zero(&mut gcd, z, m.min(mb));
        add_zero(&mut lcm, z, m.max(mb));
    }
    for &(z, m) in &b.zeros {
        if a.multiplicity(z) == 0 {
            add_zero(&mut lcm, z, m);
        }
    }
    (
        FiniteBlaschkeProduct { unimodular: ONE, zeros: gcd },
        FiniteBlaschkeProduct { unimodular: ONE, zeros: lcm },
    )
}

pub fn lcm_all<'a, I>(items: I) -> FiniteBlaschkeProduct
where
    I: IntoIterator<Item = &'a FiniteBlaschkeProduct>,
{
    items
        .into_iter()
        .fold(FiniteBlaschkeProduct::one(), |acc, t| gcd_lcm(&acc, t).1)
}

/// Splits `f ∈ zH^∞` (rational) as `f = θ·b̄` on the circle with `θ` a finite
/// Blaschke product and `b` analytic, `b(α) ≠ 0` at every zero of `θ`.
pub fn coanalytic_decompose(f: &RationalAnalytic) -> Result<(FiniteBlaschkeProduct, RationalAnalytic)> {
    if f.eval(ZERO).norm() > 1e-12 {
        return Err(Error::NotCoanalytic(format!("f(0) = {} ≠ 0", f.eval(ZERO))));
    }
    let mut f = f.clone();
    f.reduce();
    if f.is_zero() {
        return Ok((FiniteBlaschkeProduct::one(), RationalAnalytic::zero()));
    }
    let p = f.numerator();
    let dp = p.degree().unwrap_or(0);
    let dq: usize = f.poles().iter().map(|e| e.1).sum();
    let mut zeros: Vec<(Complex64, usize)> = f.poles().iter().map(|&(b, m)| (ONE / b.conj(), m)).collect();
    if dp > dq {
        zeros.push((ZERO, dp - dq));
    }
    let theta = FiniteBlaschkeProduct::from_zeros(&zeros)?;
    let pflip = p.conj_reversed(dp).shift_up(dq.saturating_sub(dp));
    let b = RationalAnalytic::new(pflip, f.poles().to_vec())?;
    for &(a, _) in theta.zeros() {
        let scale = b.numerator().max_coeff().max(1.0);
        if b.eval(a).norm() <= ZERO_MATCH_TOL * scale {
            return Err(Error::CoprimeReduction(format!("b vanishes at zero {a} of θ")));
        }
    }
    Ok((theta, b))
}

/// Scalar convenience: decomposes the analytic representative of a co-analytic part.
pub fn coanalytic_decompose_laurent(f: &MatrixLaurentSymbol) -> Result<(FiniteBlaschkeProduct, RationalAnalytic)> {
    if !f.is_scalar() {
        return Err(Error::SizeMismatch { left: 1, right: f.n() });
    }
    let rm = RationalMatrix::from_analytic_laurent(f)?;
    coanalytic_decompose(rm.get(0, 0))
}

/// Which side of the factorization the inner part sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Scalar,
}

/// `F = θ·G*` on the circle with `θ = LCM` of the entry inner parts: the analytic
/// matrix `G` has entries `G_{ji} = (θ/θ_{ij})·b_{ij}` where `F_{ij} = θ_{ij} b̄_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoprimePair {
    pub inner: FiniteBlaschkeProduct,
    pub outer_factor: RationalMatrix,
    pub side: Side,
}

/// Entrywise decomposition of an analytic matrix `F` with `F(0) = 0`.
pub fn decompose_matrix(f: &RationalMatrix) -> Result<CoprimePair> {
    let n = f.n();
    let mut parts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            parts.push(coanalytic_decompose(f.get(i, j))?);
        }
    }
    let theta = lcm_all(parts.iter().map(|p| &p.0));
    let mut g = RationalMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            let (tij, bij) = &parts[i * n + j];
            if bij.is_zero() {
                continue;
            }
            let cof = theta.quotient(tij)?.as_rational();
            g.set(j, i, cof.mul(bij));
        }
    }
    let side = if n == 1 { Side::Scalar } else { Side::Left };
    Ok(CoprimePair { inner: theta, outer_factor: g, side })
}

/// Outcome of the invertibility test of `B(α)` at the zeros of `θ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoprimeCheck {
    pub coprime: bool,
    /// Smallest singular value of `B(α)` over the zeros (infinity for constant `θ`).
    pub min_sigma: f64,
    /// The smallest singular value lies within two decades of the cutoff.
    pub marginal: bool,
}

/// `B` and `θI_n` are coprime iff `B(α)` is invertible at every zero `α` of `θ`.
pub fn coprime_matrix_check(b: &RationalMatrix, theta: &FiniteBlaschkeProduct, cutoff: f64) -> CoprimeCheck {
    let min_sigma = theta
        .zeros()
        .iter()
        .map(|&(a, _)| min_singular_value(&b.eval(a)))
        .fold(f64::INFINITY, f64::min);
    CoprimeCheck {
        coprime: min_sigma > cutoff,
        min_sigma,
        marginal: min_sigma.is_finite() && min_sigma > cutoff * 1e-2 && min_sigma < cutoff * 1e2,
    }
}

/// [`coprime_matrix_check`] for a polynomial `B` given as a Laurent symbol.
pub fn coprime_matrix_check_laurent(
    b: &MatrixLaurentSymbol,
    theta: &FiniteBlaschkeProduct,
    cutoff: f64,
) -> Result<CoprimeCheck> {
    Ok(coprime_matrix_check(&RationalMatrix::from_analytic_laurent(b)?, theta, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r, real_matrix};
    use crate::CMat;

    fn circle(t: usize, g: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / g as f64)
    }

    #[test]
    fn eval_examples() {
        let z2 = FiniteBlaschkeProduct::z_power(2);
        assert!((z2.eval(c(0.0, 1.0)) - r(-1.0)).norm() < 1e-15);
        let b = FiniteBlaschkeProduct::from_zeros(&[(r(0.5), 1)]).unwrap();
        assert!(b.eval(r(0.5)).norm() < 1e-15);
    }

    #[test]
    fn unimodular_on_circle() {
        let th = FiniteBlaschkeProduct::new(
            c(0.6, 0.8),
            vec![(c(0.3, -0.2), 2), (c(-0.7, 0.1), 1), (ZERO, 2)],
        )
        .unwrap();
        for t in 0..256 {
            assert!((th.eval(circle(t, 256)).norm() - 1.0).abs() < 1e-12);
        }
        let rat = th.as_rational();
        let z = c(0.2, 0.5);
        assert!((rat.eval(z) - th.eval(z)).norm() < 1e-13);
    }

    #[test]
    fn gcd_lcm_examples() {
        let (g, l) = gcd_lcm(&FiniteBlaschkeProduct::z_power(2), &FiniteBlaschkeProduct::z_power(3));
        assert_eq!(g.degree(), 2);
        assert_eq!(l.degree(), 3);
        let a = FiniteBlaschkeProduct::from_zeros(&[(ZERO, 1), (r(0.5), 1)]).unwrap();
        let (g, l) = gcd_lcm(&a, &FiniteBlaschkeProduct::z_power(2));
        assert_eq!(g.zeros(), &[(ZERO, 1)]);
        assert_eq!(l.multiplicity(ZERO), 2);
        assert_eq!(l.multiplicity(r(0.5)), 1);
        assert_eq!(g.degree() + l.degree(), a.degree() + 2);
    }

    #[test]
    fn divides_examples() {
        let z1 = FiniteBlaschkeProduct::z_power(1);
        let z2 = FiniteBlaschkeProduct::z_power(2);
        assert!(z1.divides(&z2));
        assert!(!z2.divides(&z1));
        assert_eq!(z2.quotient(&z1).unwrap(), z1);
    }

    #[test]
    fn decompose_polynomial_coanalytic_part() {
        // z² + 2z = z²·conj(1 + 2z) on the circle
        let f = RationalAnalytic::polynomial(Poly::new(vec![ZERO, r(2.0), ONE]));
        let (th, b) = coanalytic_decompose(&f).unwrap();
        assert_eq!(th, FiniteBlaschkeProduct::z_power(2));
        assert_eq!(b.numerator().coeffs(), &[ONE, r(2.0)]);
        let (th, b) = coanalytic_decompose(&RationalAnalytic::polynomial(Poly::monomial(ONE, 1))).unwrap();
        assert_eq!(th.degree(), 1);
        assert_eq!(b.numerator().coeffs(), &[ONE]);
    }

    #[test]
    fn decompose_reflects_poles() {
        let beta = c(1.5, -0.8);
        let f = RationalAnalytic::new(Poly::new(vec![ZERO, c(0.4, 1.0), r(-0.3)]), vec![(beta, 1), (r(-3.0), 2)]).unwrap();
        let (th, b) = coanalytic_decompose(&f).unwrap();
        assert_eq!(th.multiplicity(ONE / beta.conj()), 1);
        for t in 0..512 {
            let z = circle(t, 512);
            assert!((th.eval(z) * b.eval(z).conj() - f.eval(z)).norm() < 1e-10);
        }
        for &(a, _) in th.zeros() {
            assert!(b.eval(a).norm() > 1e-6);
        }
    }

    #[test]
    fn decompose_rejects_nonzero_constant() {
        let f = RationalAnalytic::constant(ONE);
        assert!(matches!(coanalytic_decompose(&f), Err(Error::NotCoanalytic(_))));
    }

    #[test]
    fn coprime_check_examples() {
        let z = FiniteBlaschkeProduct::z_power(1);
        let id = MatrixLaurentSymbol::constant(crate::linalg::identity(2));
        assert!(coprime_matrix_check_laurent(&id, &z, 1e-9).unwrap().coprime);
        let ones = MatrixLaurentSymbol::constant(CMat::from_element(2, 2, ONE));
        assert!(!coprime_matrix_check_laurent(&ones, &z, 1e-9).unwrap().coprime);
        let e11 = MatrixLaurentSymbol::constant(real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let b = FiniteBlaschkeProduct::from_zeros(&[(c(0.2, 0.3), 1)]).unwrap();
        assert!(!coprime_matrix_check_laurent(&e11, &b, 1e-9).unwrap().coprime);
    }

    #[test]
    fn json_round_trip() {
        let th = FiniteBlaschkeProduct::new(c(0.0, 1.0), vec![(c(0.1, 0.2), 3)]).unwrap();
        assert_eq!(FiniteBlaschkeProduct::from_json(&th.to_json()).unwrap(), th);
    }
}
