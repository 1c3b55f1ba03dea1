//! Rational functions analytic on a neighbourhood of the closed unit disk.

use num_complex::Complex64;

use super::poly::{cluster_roots, series_div, Poly};
use super::symbol::MatrixLaurentSymbol;
use crate::linalg::{ONE, ZERO};
use crate::{CMat, Error, Result};

/// Poles closer than this are merged.
pub const POLE_MERGE_TOL: f64 = 1e-9;
/// Fourier series are truncated once the tail is bounded by this.
pub const SERIES_TAIL_TOL: f64 = 1e-14;

/// `num(z) / ∏ (1 - z/β)^m`, every `|β| > 1`; the denominator equals 1 at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalAnalytic {
    num: Poly,
    poles: Vec<(Complex64, usize)>,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn merge_poles(poles: &mut Vec<(Complex64, usize)>) {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &(b, m) in poles.iter() {
        if m == 0 {
            continue;
        }
        match out.iter_mut().find(|(c, _)| (*c - b).norm() <= POLE_MERGE_TOL) {
            Some(e) => e.1 += m,
            None => out.push((b, m)),
        }
    }
    *poles = out;
}

impl RationalAnalytic {
    pub fn new(num: Poly, poles: Vec<(Complex64, usize)>) -> Result<Self> {
        for &(b, _) in &poles {
            if b.norm() <= 1.0 + 1e-12 {
                return Err(Error::PoleInDisk { modulus: b.norm() });
            }
        }
        let mut poles = poles;
        merge_poles(&mut poles);
        Ok(RationalAnalytic { num, poles })
    }

    pub fn polynomial(p: Poly) -> Self {
        RationalAnalytic { num: p, poles: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::polynomial(Poly::zero())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(Poly::constant(c))
    }

    /// Builds `num/den` from polynomials, locating the poles numerically.
    pub fn from_polys(num: &Poly, den: &Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        let roots = den.roots();
        let poles = cluster_roots(&roots, 1e-6);
        for &(b, _) in &poles {
            if b.norm() <= 1.0 + 1e-12 {
                return Err(Error::PoleInDisk { modulus: b.norm() });
            }
        }
        let d0 = den.coeff(0);
        let mut f = RationalAnalytic::new(num.scale(ONE / d0), poles)?;
        f.reduce();
        Ok(f)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn poles(&self) -> &[(Complex64, usize)] {
        &self.poles
    }

    pub fn is_polynomial(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `∏ (1 - z/β)^m`
    pub fn den_poly(&self) -> Poly {
        self.poles.iter().fold(Poly::one(), |acc, &(b, m)| {
            acc.mul(&Poly::new(vec![ONE, -ONE / b]).pow(m))
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d: Complex64 = self
            .poles
            .iter()
            .map(|&(b, m)| (ONE - z / b).powu(m as u32))
            .product();
        self.num.eval(z) / d
    }

    /// Taylor coefficients `f^{(j)}(a)/j!` for `j < count`.
    pub fn taylor_at(&self, a: Complex64, count: usize) -> Vec<Complex64> {
        let n = self.num.taylor_shift(a);
        let d = self.den_poly().taylor_shift(a);
        let mut nv = n.coeffs().to_vec();
        nv.resize(count.max(1), ZERO);
        series_div(&nv, d.coeffs(), count)
    }

    /// Polynomial part plus principal-part coefficients: for each pole `β`
    /// of multiplicity `m`, `c_l` with `f ∋ Σ_{l=1}^{m} c_l (1 - z/β)^{-l}`.
    pub fn partial_fractions(&self) -> (Poly, Vec<(Complex64, Vec<Complex64>)>) {
        if self.poles.is_empty() {
            return (self.num.clone(), Vec::new());
        }
        let (quot, _) = self.num.div_rem(&self.den_poly());
        let mut parts = Vec::new();
        for (i, &(b, m)) in self.poles.iter().enumerate() {
            // z = β(1 - w)
            let g_num = self.num.taylor_shift(b).scale_var(-b);
            let mut g_den = Poly::one();
            for (j, &(bj, mj)) in self.poles.iter().enumerate() {
                if j == i {
                    continue;
                }
                let lin = Poly::new(vec![ONE - b / bj, b / bj]);
                g_den = g_den.mul(&lin.pow(mj));
            }
            let mut gn = g_num.coeffs().to_vec();
            gn.resize(m, ZERO);
            let g = series_div(&gn, g_den.coeffs(), m);
            parts.push((b, (1..=m).map(|l| g[m - l]).collect()));
        }
        (quot, parts)
    }

    /// Fourier (Taylor at the origin) coefficients, truncated once the tail is
    /// bounded by `SERIES_TAIL_TOL`.
    pub fn fourier_coeffs(&self) -> Vec<Complex64> {
        let (quot, parts) = self.partial_fractions();
        if parts.is_empty() {
            return quot.coeffs().to_vec();
        }
        let start = quot.coeffs().len();
        let mut len = start.max(1);
        while tail_bound(&parts, len) > SERIES_TAIL_TOL && len < 1_000_000 {
            len += 1;
        }
        (0..len)
            .map(|k| {
                let mut v = quot.coeff(k);
                for (b, cs) in &parts {
                    let inv = (ONE / b).powu(k as u32);
                    for (l, &cl) in cs.iter().enumerate() {
                        let l = l + 1;
                        v += cl * binom(k + l - 1, l - 1) * inv;
                    }
                }
                v
            })
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        RationalAnalytic { num: self.num.scale(s), poles: self.poles.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.poles);
        merge_poles(&mut poles);
        let mut f = RationalAnalytic { num: self.num.mul(&other.num), poles };
        f.reduce();
        f
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        let mut f = RationalAnalytic { num: self.num.mul(p), poles: self.poles.clone() };
        f.reduce();
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        // common denominator = max multiplicity per pole
        let mut poles = self.poles.clone();
        for &(b, m) in &other.poles {
            match poles.iter_mut().find(|(c, _)| (*c - b).norm() <= POLE_MERGE_TOL) {
                Some(e) => e.1 = e.1.max(m),
                None => poles.push((b, m)),
            }
        }
        let cofactor = |f: &Self| -> Poly {
            poles.iter().fold(Poly::one(), |acc, &(b, m)| {
                let have = f
                    .poles
                    .iter()
                    .find(|(c, _)| (*c - b).norm() <= POLE_MERGE_TOL)
                    .map_or(0, |e| e.1);
                acc.mul(&Poly::new(vec![ONE, -ONE / b]).pow(m - have))
            })
        };
        let num = self.num.mul(&cofactor(self)).add(&other.num.mul(&cofactor(other)));
        let mut f = RationalAnalytic { num, poles };
        f.reduce();
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Cancels common factors `(1 - z/β)` between numerator and denominator
    /// and drops negligible numerator coefficients.
    pub fn reduce(&mut self) {
        let scale = self.num.max_coeff().max(1e-300);
        self.num = std::mem::take(&mut self.num).trimmed(super::poly::DROP_TOL * scale.max(1.0));
        if self.num.is_zero() {
            self.poles.clear();
            return;
        }
        for e in self.poles.iter_mut() {
            let (b, _) = *e;
            while e.1 > 0 {
                let lin = Poly::new(vec![ONE, -ONE / b]);
                let (q, r) = self.num.div_rem(&lin);
                if r.max_coeff() > 1e-9 * self.num.max_coeff().max(1.0) {
                    break;
                }
                self.num = q;
                e.1 -= 1;
            }
        }
        self.poles.retain(|e| e.1 > 0);
    }

    /// `max_{|z|=1} |f|` on a uniform grid.
    pub fn sup_norm(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|t| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / grid as f64);
                self.eval(z).norm()
            })
            .fold(0.0, f64::max)
    }
}

fn tail_bound(parts: &[(Complex64, Vec<Complex64>)], from: usize) -> f64 {
    let mut total = 0.0;
    for (b, cs) in parts {
        let rho = 1.0 / b.norm();
        for (l, cl) in cs.iter().enumerate() {
            let l = l + 1;
            if cl.norm() == 0.0 {
                continue;
            }
            // Σ_{k≥from} C(k+l-1,l-1) ρ^k, summed until the ratio bound closes it off
            let mut k = from;
            let mut term = binom(k + l - 1, l - 1) * rho.powi(k as i32);
            let mut sum = 0.0;
            loop {
                let ratio = (k + l) as f64 / (k + 1) as f64 * rho;
                if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-3 * SERIES_TAIL_TOL {
                    sum += term / (1.0 - ratio);
                    break;
                }
                sum += term;
                term *= ratio;
                k += 1;
                if k > from + 1_000_000 {
                    return f64::INFINITY;
                }
            }
            total += cl.norm() * sum;
        }
    }
    total
}

/// `n×n` matrix of analytic rational functions, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<RationalAnalytic>,
}

impl RationalMatrix {
    pub fn new(n: usize, entries: Vec<RationalAnalytic>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::SizeMismatch { left: n * n, right: entries.len() });
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        RationalMatrix { n, entries: vec![RationalAnalytic::zero(); n * n] }
    }

    /// Entry-wise polynomial matrix from the analytic part of a Laurent symbol.
    pub fn from_analytic_laurent(s: &MatrixLaurentSymbol) -> Result<Self> {
        if let Some((lo, _)) = s.degree_range() {
            if lo < 0 {
                return Err(Error::NotAnalytic(lo));
            }
        }
        let n = s.n();
        let hi = s.degree_range().map_or(0, |(_, h)| h.max(0) as usize);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let coeffs = (0..=hi).map(|d| s.fourier_coeff(d as i32)[(i, j)]).collect();
                entries.push(RationalAnalytic::polynomial(Poly::new(coeffs)));
            }
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalAnalytic {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: RationalAnalytic) {
        self.entries[i * self.n + j] = f;
    }

    pub fn entries(&self) -> &[RationalAnalytic] {
        &self.entries
    }

    pub fn is_polynomial(&self) -> bool {
        self.entries.iter().all(|e| e.is_polynomial())
    }

    pub fn eval(&self, z: Complex64) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.get(i, j).eval(z))
    }

    /// Matrix Taylor coefficients at `a`.
    pub fn taylor_at(&self, a: Complex64, count: usize) -> Vec<CMat> {
        let per: Vec<Vec<Complex64>> = self.entries.iter().map(|e| e.taylor_at(a, count)).collect();
        (0..count)
            .map(|k| CMat::from_fn(self.n, self.n, |i, j| per[i * self.n + j][k]))
            .collect()
    }

    /// Fourier coefficients as an analytic Laurent symbol (truncated series).
    pub fn to_laurent(&self) -> MatrixLaurentSymbol {
        let per: Vec<Vec<Complex64>> = self.entries.iter().map(|e| e.fourier_coeffs()).collect();
        let len = per.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut s = MatrixLaurentSymbol::zero(self.n);
        for k in 0..len {
            let m = CMat::from_fn(self.n, self.n, |i, j| {
                per[i * self.n + j].get(k).copied().unwrap_or(ZERO)
            });
            s.set(k as i32, m);
        }
        s.pruned(super::symbol::PRUNE_TOL)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RationalAnalytic::zero();
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(RationalMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn scale_by(&self, f: &RationalAnalytic) -> Self {
        RationalMatrix { n: self.n, entries: self.entries.iter().map(|e| e.mul(f)).collect() }
    }

    pub fn sup_norm(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|t| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / grid as f64);
                crate::linalg::spectral_norm(&self.eval(z))
            })
            .fold(0.0, f64::max)
    }
}

/// Matrix symbol `Φ = Φ₋* + Φ₊` whose parts are rational and analytic in the disk.
/// `minus` stores the analytic function whose adjoint on the circle is the co-analytic part
/// and has zero constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSymbol {
    pub minus: RationalMatrix,
    pub plus: RationalMatrix,
}

impl RationalSymbol {
    pub fn new(minus: RationalMatrix, plus: RationalMatrix) -> Result<Self> {
        if minus.n() != plus.n() {
            return Err(Error::SizeMismatch { left: minus.n(), right: plus.n() });
        }
        for f in minus.entries() {
            if f.eval(ZERO).norm() > 1e-12 {
                return Err(Error::Invalid("co-analytic part must vanish at the origin".into()));
            }
        }
        Ok(RationalSymbol { minus, plus })
    }

    pub fn from_laurent(s: &MatrixLaurentSymbol) -> Self {
        let (plus, minus) = s.split();
        RationalSymbol {
            minus: RationalMatrix::from_analytic_laurent(&minus).expect("split minus is analytic"),
            plus: RationalMatrix::from_analytic_laurent(&plus).expect("split plus is analytic"),
        }
    }

    pub fn n(&self) -> usize {
        self.plus.n()
    }

    pub fn is_trig_polynomial(&self) -> bool {
        self.minus.is_polynomial() && self.plus.is_polynomial()
    }

    /// Fourier coefficients as a (truncated) Laurent symbol.
    pub fn to_laurent(&self) -> MatrixLaurentSymbol {
        let plus = self.plus.to_laurent();
        let minus = self.minus.to_laurent();
        plus.add(&minus.adjoint()).expect("same size")
    }

    pub fn eval(&self, z: Complex64) -> CMat {
        self.plus.eval(z) + self.minus.eval(z).adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};

    fn sample() -> RationalAnalytic {
        // (1 + z) / ((1 - z/2)^2 (1 - z/(0.3+1.5i)))
        RationalAnalytic::new(
            Poly::new(vec![ONE, ONE]),
            vec![(r(2.0), 2), (c(0.3, 1.5), 1)],
        )
        .unwrap()
    }

    #[test]
    fn fourier_coeffs_match_series_division() {
        let f = sample();
        let fc = f.fourier_coeffs();
        let direct = f.taylor_at(ZERO, fc.len());
        for (a, b) in fc.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
        // resummation on the circle reproduces the function
        let z = Complex64::from_polar(1.0, 0.7);
        let sum: Complex64 = fc.iter().enumerate().map(|(k, a)| a * z.powu(k as u32)).sum();
        assert!((sum - f.eval(z)).norm() < 1e-12);
    }

    #[test]
    fn pole_in_disk_rejected() {
        let e = RationalAnalytic::new(Poly::one(), vec![(r(0.5), 1)]);
        assert!(matches!(e, Err(Error::PoleInDisk { .. })));
        let e = RationalAnalytic::from_polys(&Poly::one(), &Poly::new(vec![r(-0.5), ONE]));
        assert!(matches!(e, Err(Error::PoleInDisk { .. })));
    }

    #[test]
    fn reduce_cancels_common_factor() {
        let f = RationalAnalytic::from_polys(
            &Poly::from_roots(&[r(3.0), r(0.2)]),
            &Poly::from_roots(&[r(3.0), c(0.0, 2.0)]),
        )
        .unwrap();
        assert_eq!(f.poles().len(), 1);
        let z = c(0.1, 0.4);
        let want = (z - 0.2) / (z - c(0.0, 2.0));
        assert!((f.eval(z) - want).norm() < 1e-12);
    }

    #[test]
    fn add_and_mul_agree_pointwise() {
        let f = sample();
        let g = RationalAnalytic::new(Poly::new(vec![r(0.5), c(0.0, 1.0), r(2.0)]), vec![(r(-3.0), 1)]).unwrap();
        let z = c(-0.3, 0.6);
        assert!((f.add(&g).eval(z) - (f.eval(z) + g.eval(z))).norm() < 1e-12);
        assert!((f.mul(&g).eval(z) - f.eval(z) * g.eval(z)).norm() < 1e-12);
        assert!(f.sub(&f).is_zero());
    }

    #[test]
    fn taylor_at_interior_point() {
        let f = sample();
        let a = c(0.2, -0.1);
        let t = f.taylor_at(a, 4);
        let h = 1e-4;
        let d1 = (f.eval(a + h) - f.eval(a - h)) / (2.0 * h);
        assert!((t[0] - f.eval(a)).norm() < 1e-14);
        assert!((t[1] - d1).norm() < 1e-7);
    }
}
