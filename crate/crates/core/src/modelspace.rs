//! The finite model of the compressed shift on `H(θ) = H² ⊖ θH²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::FiniteBlaschkeProduct;
use crate::linalg::{identity, kron, max_abs, max_abs_diff, min_singular_value, solve_right_lstsq, zeros, JsonMatrix, ONE, ZERO};
use crate::symalg::{MatrixLaurentSymbol, Poly, RationalAnalytic};
use crate::{CMat, Error, Result};

/// Initial quadrature grid of the compression oracle.
pub const ORACLE_START_GRID: usize = 512;
/// Default cap on the quadrature grid; overridden by `BLOCKTOEPLITZ_MAX_GRID`.
pub const ORACLE_MAX_GRID: usize = 16384;
const ORACLE_CONVERGED: f64 = 1e-9;
const ORACLE_FAIL: f64 = 1e-7;

/// Lower-triangular matrix of the compressed shift in the Takenaka-Malmquist basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangularModel {
    #[serde(serialize_with = "ser_complex_list")]
    pub zeros: Vec<Complex64>,
    pub q: Vec<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub m: CMat,
}

fn ser_complex_list<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

fn ser_matrix<S: serde::Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    JsonMatrix::from(m).serialize(s)
}

/// `M_jj = α_j`, `M_jk = q_k q_j ∏_{l=k+1}^{j-1} (-ᾱ_l)` for `j > k`.
pub fn build_m(zeros: &[Complex64]) -> Result<TriangularModel> {
    for a in zeros {
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDisk { re: a.re, im: a.im });
        }
    }
    let d = zeros.len();
    let q: Vec<f64> = zeros.iter().map(|a| (1.0 - a.norm_sqr()).sqrt()).collect();
    let mut m = zeros_mat(d);
    for j in 0..d {
        m[(j, j)] = zeros[j];
        let mut prod = ONE;
        for k in (0..j).rev() {
            m[(j, k)] = prod * q[k] * q[j];
            prod *= -zeros[k].conj();
        }
    }
    Ok(TriangularModel { zeros: zeros.to_vec(), q, m })
}

fn zeros_mat(d: usize) -> CMat {
    zeros(d, d)
}

impl TriangularModel {
    pub fn from_blaschke(theta: &FiniteBlaschkeProduct) -> Result<Self> {
        build_m(&theta.ordered_zeros())
    }

    pub fn dim(&self) -> usize {
        self.zeros.len()
    }
}

/// Values of the Takenaka-Malmquist basis `φ_1..φ_d` at `z`.
pub fn tm_eval(zeros: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(zeros.len());
    let mut prefix = ONE;
    for a in zeros {
        let q = (1.0 - a.norm_sqr()).sqrt();
        let den = ONE - a.conj() * z;
        out.push(prefix * q / den);
        prefix *= (z - a) / den;
    }
    out
}

/// `φ_j = q_j/(1 - ᾱ_j z) · ∏_{l<j} b_{α_l}`, an orthonormal basis of `H(θ)`.
pub fn tm_basis(theta: &FiniteBlaschkeProduct) -> Vec<RationalAnalytic> {
    let zs = theta.ordered_zeros();
    let mut out = Vec::with_capacity(zs.len());
    let mut prefix = RationalAnalytic::constant(ONE);
    for &a in &zs {
        let q = (1.0 - a.norm_sqr()).sqrt();
        let kernel = if a == ZERO {
            RationalAnalytic::constant(Complex64::new(q, 0.0))
        } else {
            RationalAnalytic::new(Poly::constant(Complex64::new(q, 0.0)), vec![(ONE / a.conj(), 1)])
                .expect("reflected pole")
        };
        out.push(prefix.mul(&kernel));
        let factor = FiniteBlaschkeProduct::from_zeros(&[(a, 1)]).expect("zero in disk").as_rational();
        prefix = prefix.mul(&factor);
    }
    out
}

/// `P(M) = Σ_i M^i ⊗ P_i` for an analytic matrix polynomial `P`; block `(j,k)`
/// is `Σ_i P_i (M^i)_{jk}`.
pub fn poly_of_m(p: &MatrixLaurentSymbol, model: &TriangularModel) -> Result<CMat> {
    if let Some((lo, _)) = p.degree_range() {
        if lo < 0 {
            return Err(Error::NotAnalytic(lo));
        }
    }
    let n = p.n();
    let d = model.dim();
    let mut out = zeros(n * d, n * d);
    let mut power = identity(d);
    let hi = p.analytic_degree();
    for i in 0..=hi {
        let pi = p.fourier_coeff(i as i32);
        if max_abs(&pi) > 0.0 {
            out += kron(&power, &pi);
        }
        power = &power * &model.m;
    }
    Ok(out)
}

fn max_grid() -> usize {
    std::env::var("BLOCKTOEPLITZ_MAX_GRID")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&g| g >= 16)
        .unwrap_or(ORACLE_MAX_GRID)
}

fn compress_on_grid(p: &MatrixLaurentSymbol, zs: &[Complex64], g: usize) -> CMat {
    let n = p.n();
    let d = zs.len();
    let mut out = zeros(n * d, n * d);
    for t in 0..g {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / g as f64);
        let phi = tm_eval(zs, z);
        let pz = p.eval(z);
        for j in 0..d {
            for k in 0..d {
                let w = phi[j].conj() * phi[k];
                for r in 0..n {
                    for s in 0..n {
                        out[(j * n + r, k * n + s)] += w * pz[(r, s)];
                    }
                }
            }
        }
    }
    out / Complex64::new(g as f64, 0.0)
}

/// Matrix of `P_{H(θ)} T_P |_{H(θ)}` in the Takenaka-Malmquist basis, by
/// trapezoid quadrature on the circle with grid doubling.
pub fn compression_oracle(p: &MatrixLaurentSymbol, theta: &FiniteBlaschkeProduct) -> Result<CMat> {
    compression_oracle_with(p, theta, ORACLE_START_GRID, max_grid())
}

pub fn compression_oracle_with(
    p: &MatrixLaurentSymbol,
    theta: &FiniteBlaschkeProduct,
    start: usize,
    cap: usize,
) -> Result<CMat> {
    let zs = theta.ordered_zeros();
    let mut g = start.max(2 * p.bandwidth() + 2);
    let mut prev = compress_on_grid(p, &zs, g);
    loop {
        let next_g = g * 2;
        if next_g > cap.max(start) {
            break;
        }
        let next = compress_on_grid(p, &zs, next_g);
        let change = max_abs_diff(&prev, &next);
        prev = next;
        g = next_g;
        if change < ORACLE_CONVERGED {
            return Ok(prev);
        }
        if next_g * 2 > cap {
            if change > ORACLE_FAIL {
                return Err(Error::Quadrature { change, points: next_g });
            }
            return Ok(prev);
        }
    }
    Ok(prev)
}

/// Jets `P^{(j)}(a)/j!`, `j < count`, of an analytic matrix polynomial.
pub fn analytic_jets(p: &MatrixLaurentSymbol, a: Complex64, count: usize) -> Vec<CMat> {
    let n = p.n();
    let mut out = vec![zeros(n, n); count];
    for (k, ak) in p.iter() {
        if k < 0 {
            continue;
        }
        let k = k as usize;
        for (j, o) in out.iter_mut().enumerate().take(count.min(k + 1)) {
            let binom = (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64);
            *o += ak * (a.powu((k - j) as u32) * binom);
        }
    }
    out
}

/// Hermite-Fejér interpolant with its prescribed jets.
#[derive(Clone, Debug, PartialEq)]
pub struct InterpolantK {
    /// Matrix polynomial of degree `< d`.
    pub poly: MatrixLaurentSymbol,
    /// `nodes[i] = (α_i, m_i)`.
    pub nodes: Vec<(Complex64, usize)>,
    /// `data[i][j] = K_{i,j}`.
    pub data: Vec<Vec<CMat>>,
    /// Nodes where `A_{i,0}` was singular and a least-squares solve was used.
    pub flagged_nodes: Vec<usize>,
    /// Largest deviation of the jets of `poly` from `data`.
    pub interpolation_residual: f64,
}

/// Solves `B_{i,j} = Σ_{l≤j} K_{i,j-l} A_{i,l}` for the jets `K_{i,j}`, then assembles
/// the interpolating polynomial `K`.
pub fn hermite_fejer_solve(
    nodes: &[(Complex64, usize)],
    a_data: &[Vec<CMat>],
    b_data: &[Vec<CMat>],
) -> Result<InterpolantK> {
    if nodes.len() != a_data.len() || nodes.len() != b_data.len() {
        return Err(Error::Invalid("one data list per node required".into()));
    }
    let n = a_data
        .iter()
        .flatten()
        .next()
        .map(|m| m.nrows())
        .ok_or_else(|| Error::Invalid("empty interpolation data".into()))?;
    let mut data = Vec::with_capacity(nodes.len());
    let mut flagged = Vec::new();
    for (i, &(_, mi)) in nodes.iter().enumerate() {
        let a = &a_data[i];
        let b = &b_data[i];
        if a.len() < mi || b.len() < mi {
            return Err(Error::Invalid(format!("node {i} needs {mi} jets")));
        }
        let a0 = &a[0];
        let scale = crate::linalg::spectral_norm(a0).max(1.0);
        if min_singular_value(a0) > 1e-9 * scale {
            let inv = a0.clone().try_inverse().ok_or_else(|| Error::Invalid("singular A_{i,0}".into()))?;
            let mut ks: Vec<CMat> = Vec::with_capacity(mi);
            for j in 0..mi {
                let mut rhs = b[j].clone();
                for l in 1..=j {
                    rhs -= &ks[j - l] * &a[l];
                }
                ks.push(rhs * &inv);
            }
            data.push(ks);
        } else {
            flagged.push(i);
            // K·𝒜 = B with 𝒜 block upper-triangular Toeplitz, block (s,j) = A_{j-s}
            let mut big = zeros(n * mi, n * mi);
            let mut rhs = zeros(n, n * mi);
            for j in 0..mi {
                rhs.view_mut((0, j * n), (n, n)).copy_from(&b[j]);
                for s in 0..=j {
                    big.view_mut((s * n, j * n), (n, n)).copy_from(&a[j - s]);
                }
            }
            let x = solve_right_lstsq(&big, &rhs, 1e-12);
            let residual = max_abs(&(&x * &big - &rhs));
            if residual > 1e-9 * max_abs(&rhs).max(1.0) {
                return Err(Error::EmptyC { node: i, residual });
            }
            data.push((0..mi).map(|j| x.view((0, j * n), (n, n)).into_owned()).collect());
        }
    }
    let poly = assemble(nodes, &data, n);
    let mut interpolation_residual: f64 = 0.0;
    for (i, &(a, mi)) in nodes.iter().enumerate() {
        let jets = analytic_jets(&poly, a, mi);
        for j in 0..mi {
            interpolation_residual = interpolation_residual.max(max_abs_diff(&jets[j], &data[i][j]));
        }
    }
    Ok(InterpolantK { poly, nodes: nodes.to_vec(), data, flagged_nodes: flagged, interpolation_residual })
}

/// `P(z) = Σ_i (Σ_j K'_{i,j}(z-α_i)^j) p_i(z)` with `p_i = ∏_{k≠i} ((z-α_k)/(α_i-α_k))^{m_k}`.
fn assemble(nodes: &[(Complex64, usize)], data: &[Vec<CMat>], n: usize) -> MatrixLaurentSymbol {
    let d: usize = nodes.iter().map(|e| e.1).sum();
    let mut coeffs = vec![zeros(n, n); d.max(1)];
    for (i, &(ai, mi)) in nodes.iter().enumerate() {
        let mut pi = Poly::one();
        for (k, &(ak, mk)) in nodes.iter().enumerate() {
            if k != i {
                let lin = Poly::new(vec![-ak, ONE]).scale(ONE / (ai - ak));
                pi = pi.mul(&lin.pow(mk));
            }
        }
        let c = pi.taylor_shift(ai);
        let mut kp: Vec<CMat> = Vec::with_capacity(mi);
        for (j, dj) in data[i].iter().enumerate().take(mi) {
            let mut v = dj.clone();
            for (k, kpk) in kp.iter().enumerate() {
                v -= kpk * c.coeff(j - k);
            }
            kp.push(v);
        }
        let lin = Poly::new(vec![-ai, ONE]);
        for (j, kpj) in kp.iter().enumerate() {
            let basis = lin.pow(j).mul(&pi);
            for (deg, &b) in basis.coeffs().iter().enumerate() {
                coeffs[deg] += kpj * b;
            }
        }
    }
    MatrixLaurentSymbol::from_coeffs(n, coeffs.into_iter().enumerate().map(|(k, m)| (k as i32, m)))
        .expect("square coefficients")
        .pruned(crate::symalg::symbol::PRUNE_TOL)
}
