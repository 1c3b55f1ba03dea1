//! Dense univariate polynomials with complex coefficients.

use num_complex::Complex64;
use std::fmt;

use crate::linalg::{ONE, ZERO};

/// Coefficients at or below this modulus are dropped after arithmetic.
pub const DROP_TOL: f64 = 1e-12;

/// Polynomial stored by ascending powers; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim_exact();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![ONE] }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// `c·z^k`
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![ZERO; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// Monic polynomial `∏ (z - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Poly::one(), |acc, &r| acc.mul(&Poly::new(vec![-r, ONE])))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == ZERO) {
            self.coeffs.pop();
        }
    }

    /// Drops trailing coefficients with modulus at most `tol`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        while self.coeffs.last().is_some_and(|c| c.norm() <= tol) {
            self.coeffs.pop();
        }
        self
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect()).trimmed(0.0)
    }

    pub fn sub(&self, other: &Poly) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly::new(v)
    }

    /// Coefficients of `w ↦ p(a + w)` (Taylor coefficients at `a`).
    pub fn taylor_shift(&self, a: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = c[j + 1];
                c[j] += a * next;
            }
        }
        Poly::new(c)
    }

    /// Coefficients of `w ↦ p(s·w)`.
    pub fn scale_var(&self, s: Complex64) -> Self {
        let mut f = ONE;
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let v = c * f;
                    f *= s;
                    v
                })
                .collect(),
        )
    }

    /// `z^deg · conj(p)(1/z)`, the conjugate-reversed polynomial of formal degree `deg`.
    pub fn conj_reversed(&self, deg: usize) -> Self {
        assert!(self.coeffs.len() <= deg + 1, "formal degree below actual degree");
        Poly::new((0..=deg).map(|k| self.coeff(deg - k).conj()).collect())
    }

    /// Euclidean division `self = q·d + r`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![ZERO; rem.len() - dd];
        for k in (0..q.len()).rev() {
            let t = rem[k + dd] / lead;
            q[k] = t;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= t * dc;
            }
        }
        rem.truncate(dd);
        (Poly::new(q), Poly::new(rem).trimmed(0.0))
    }

    /// All complex roots with multiplicity (Aberth-Ehrlich iteration,
    /// followed by Newton polishing on the original polynomial).
    pub fn roots(&self) -> Vec<Complex64> {
        let p = self.clone().trimmed(0.0);
        let Some(n) = p.degree() else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        // strip roots at the origin exactly
        let zeros_at_origin = p.coeffs.iter().take_while(|c| **c == ZERO).count();
        let p = Poly::new(p.coeffs[zeros_at_origin..].to_vec());
        let n = p.degree().unwrap_or(0);
        let mut out = vec![ZERO; zeros_at_origin];
        if n == 0 {
            return out;
        }
        let monic = p.scale(ONE / p.leading());
        let dp = monic.derivative();
        let bound = 1.0 + monic.coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let radius = bound.min(
            // geometric-mean radius is a better start for well-scaled inputs
            monic.coeff(0).norm().powf(1.0 / n as f64).max(1e-3),
        );
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let pv = monic.eval(z[i]);
                let dv = dp.eval(z[i]);
                if pv == ZERO {
                    continue;
                }
                let ratio = pv / dv;
                let s: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| ONE / (z[i] - z[j]))
                    .sum();
                let step = ratio / (ONE - ratio * s);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        for zi in &mut z {
            for _ in 0..3 {
                let dv = dp.eval(*zi);
                if dv.norm() < 1e-300 {
                    break;
                }
                let step = monic.eval(*zi) / dv;
                if !step.is_finite() || step.norm() > 1e-6 * (1.0 + zi.norm()) {
                    break;
                }
                *zi -= step;
            }
        }
        out.extend(z);
        out
    }
}

/// First `count` coefficients of the power series `num/den` (requires `den(0) ≠ 0`).
pub fn series_div(num: &[Complex64], den: &[Complex64], count: usize) -> Vec<Complex64> {
    let d0 = den[0];
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut acc = num.get(k).copied().unwrap_or(ZERO);
        for j in 1..=k.min(den.len().saturating_sub(1)) {
            acc -= den[j] * out[k - j];
        }
        out.push(acc / d0);
    }
    out
}

/// First `count` coefficients of the product of two power series.
pub fn series_mul(a: &[Complex64], b: &[Complex64], count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            (0..=k)
                .map(|j| a.get(j).copied().unwrap_or(ZERO) * b.get(k - j).copied().unwrap_or(ZERO))
                .sum()
        })
        .collect()
}

/// Groups roots lying within `tol` of each other, returning `(root, multiplicity)`.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        match groups.iter_mut().find(|(c, _)| (*c - r).norm() <= tol) {
            Some((center, members)) => {
                members.push(r);
                *center = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => groups.push((r, vec![r])),
        }
    }
    groups.into_iter().map(|(c, m)| (c, m.len())).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| format!("({}{:+}i)z^{}", c.re, c.im, k))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
