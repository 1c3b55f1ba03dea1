//! Seeded randomized suites. Each returns one serializable row per case in
//! case order, so identical seeds give identical output.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blaschke::{coprime_matrix_check, decompose_matrix, FiniteBlaschkeProduct};
use crate::decide::{
    classify_normal_or_analytic, complete_ustar, decide_hyponormal_with, no_hypo_completion_tz, Tag,
};
use crate::linalg::{identity, max_abs_diff, numerical_rank, ONE};
use crate::modelspace::{compression_oracle, poly_of_m, TriangularModel};
use crate::operators::{classify_psd, selfcommutator_exact, PsdVerdict};
use crate::symalg::{MatrixLaurentSymbol, RationalMatrix};
use crate::{CMat, Error, Result, Tolerances};

fn rc(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rand_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..2.0 * PI))
}

fn unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

/// Nonzero complex number with modulus in `[0.3, 1.4]`.
fn rc_lead(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.3..1.4), rng.gen_range(0.0..2.0 * PI))
}

fn psd_label(v: PsdVerdict) -> &'static str {
    match v {
        PsdVerdict::Psd => "PSD",
        PsdVerdict::NotPsd => "NotPSD",
        PsdVerdict::Marginal => "Marginal",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub case: usize,
    pub kind: &'static str,
    pub symbol: String,
    pub model_verdict: String,
    pub sigma_max: Option<f64>,
    pub model_rank: Option<usize>,
    pub oracle_verdict: &'static str,
    pub oracle_min_eig: f64,
    pub oracle_rank: usize,
    pub agree: bool,
}

/// Random scalar trigonometric polynomials of degrees ≤ 4, compared against the
/// exact self-commutator. A third of the cases are built as `φ₋ = cφ₊` with
/// `|c| < 1` (hyponormal) and a third with `|c| > 1`.
pub fn oracle_equivalence(seed: u64, count: usize, tol: &Tolerances) -> Result<Vec<OracleRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count);
    for case in 0..count {
        let nd = rng.gen_range(1..=4usize);
        let plus: Vec<Complex64> = (0..=nd).map(|k| if k == nd { rc_lead(&mut rng) } else { rc(&mut rng) }).collect();
        let (kind, minus): (&'static str, Vec<Complex64>) = match case % 3 {
            0 => {
                let md = rng.gen_range(1..=4usize);
                ("random", (0..md).map(|k| if k + 1 == md { rc_lead(&mut rng) } else { rc(&mut rng) }).collect())
            }
            1 => {
                let c = Complex64::from_polar(rng.gen_range(0.1..0.9), rng.gen_range(0.0..2.0 * PI));
                ("contractive", (1..=nd).map(|k| c * plus[k]).collect())
            }
            _ => {
                let c = Complex64::from_polar(rng.gen_range(1.1..2.0), rng.gen_range(0.0..2.0 * PI));
                ("expansive", (1..=nd).map(|k| c * plus[k]).collect())
            }
        };
        let mut terms: Vec<(i32, Complex64)> = plus.iter().enumerate().map(|(k, &a)| (k as i32, a)).collect();
        // φ₋ has coefficient conj(A_{-j}) at degree j
        terms.extend(minus.iter().enumerate().map(|(j, &b)| (-(j as i32 + 1), b.conj())));
        let phi = MatrixLaurentSymbol::scalar(terms);
        let v = decide_hyponormal_with(&phi, tol)?;
        let sc = selfcommutator_exact(&phi);
        let (ov, lmin, _) = classify_psd(&sc.block, tol);
        let orank = numerical_rank(&sc.block, tol.rank);
        let agree = match (v.tag(), ov) {
            (Tag::Hyponormal, PsdVerdict::Psd) => v.rank_defect == Some(orank),
            (Tag::NotHyponormal, PsdVerdict::NotPsd) => true,
            _ => false,
        };
        rows.push(OracleRow {
            case,
            kind,
            symbol: phi.to_string(),
            model_verdict: v.tag().as_str().to_string(),
            sigma_max: v.sigma_max,
            model_rank: v.rank_defect,
            oracle_verdict: psd_label(ov),
            oracle_min_eig: lmin,
            oracle_rank: orank,
            agree,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelIdentityRow {
    pub case: usize,
    pub n: usize,
    pub degree: usize,
    pub d: usize,
    pub max_deviation: f64,
}

/// `‖compression_oracle(P,θ) - P(M)‖_max` for random `P` (n ≤ 2, degree ≤ 3) and `θ` (d ≤ 5).
pub fn model_identity(seed: u64, count: usize) -> Result<Vec<ModelIdentityRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count);
    for case in 0..count {
        let n = rng.gen_range(1..=2usize);
        let degree = rng.gen_range(0..=3usize);
        let p = MatrixLaurentSymbol::from_coeffs(
            n,
            (0..=degree).map(|k| (k as i32, CMat::from_fn(n, n, |_, _| rc(&mut rng)))).collect::<Vec<_>>(),
        )?;
        let d = rng.gen_range(1..=5usize);
        let mut zeros = Vec::new();
        let mut left = d;
        while left > 0 {
            let m = rng.gen_range(1..=left);
            zeros.push((rand_disk(&mut rng, 0.9), m));
            left -= m;
        }
        let theta = FiniteBlaschkeProduct::from_zeros(&zeros)?;
        let model = TriangularModel::from_blaschke(&theta)?;
        let dev = max_abs_diff(&compression_oracle(&p, &theta)?, &poly_of_m(&p, &model)?);
        rows.push(ModelIdentityRow { case, n, degree, d, max_deviation: dev });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionRow {
    pub case: usize,
    pub kind: &'static str,
    pub phi: String,
    pub psi: String,
    pub tag: String,
    pub family: Option<u8>,
    pub min_eigenvalue: Option<f64>,
    pub pass: bool,
}

/// Members of the two completion families on the parameter grid
/// `θ ∈ {0, π/3, π}`, `ω` or `|α|` in `{0, π/3, π}` / `{1/2, 1, 2}`, `β ∈ {0, 1+i}`.
pub fn completion_family_grid(tol: &Tolerances) -> Result<Vec<CompletionRow>> {
    let angles = [0.0, PI / 3.0, PI];
    let betas = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)];
    let moduli = [0.5, 1.0, 2.0];
    let arg_alpha = PI / 4.0;
    let mut rows = Vec::new();
    for family in [1u8, 2] {
        for &theta in &angles {
            for second in 0..3 {
                for &beta in &betas {
                    let (phi, psi) = if family == 1 {
                        let phi = MatrixLaurentSymbol::scalar([(1, Complex64::from_polar(1.0, theta)), (0, beta)]);
                        let psi = phi.scale(Complex64::from_polar(1.0, angles[second]));
                        (phi, psi)
                    } else {
                        let alpha = Complex64::from_polar(moduli[second], arg_alpha);
                        let lead = Complex64::from_polar((1.0 + alpha.norm_sqr()).sqrt(), theta);
                        let phi = MatrixLaurentSymbol::scalar([(-1, alpha), (1, lead), (0, beta)]);
                        let psi = phi.scale(Complex64::from_polar(1.0, PI - 2.0 * arg_alpha));
                        (phi, psi)
                    };
                    let v = complete_ustar(&phi, &psi, 16, tol);
                    let (tag, fam, pass) = match &v {
                        Ok(v) => (v.tag().as_str().to_string(), v.family.as_ref().map(|f| f.family), v.tag() == Tag::Normal),
                        Err(e) => (e.to_string(), None, false),
                    };
                    rows.push(CompletionRow {
                        case: rows.len(),
                        kind: if family == 1 { "family1" } else { "family2" },
                        phi: phi.to_string(),
                        psi: psi.to_string(),
                        tag,
                        family: fam,
                        min_eigenvalue: None,
                        pass,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Random pairs with `|φ| = |ψ|` (`ψ = e^{iω}φ`) outside both families; the
/// 2-hyponormality window must fail.
pub fn completion_outside(seed: u64, count: usize, window: usize, tol: &Tolerances) -> Result<Vec<CompletionRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count);
    for case in 0..count {
        let phi = loop {
            let mut terms: Vec<(i32, Complex64)> = (-2..=2).map(|d| (d, rc(&mut rng))).collect();
            // keep a degree-two term so the pair is outside both families
            if rng.gen_bool(0.5) {
                terms[0].1 = rc_lead(&mut rng);
            } else {
                terms[4].1 = rc_lead(&mut rng);
            }
            let phi = MatrixLaurentSymbol::scalar(terms);
            if phi.bandwidth() == 2 {
                break phi;
            }
        };
        let psi = phi.scale(unit(&mut rng));
        let v = complete_ustar(&phi, &psi, window, tol)?;
        rows.push(CompletionRow {
            case,
            kind: "outside",
            phi: phi.to_string(),
            psi: psi.to_string(),
            tag: v.tag().as_str().to_string(),
            family: v.family.as_ref().map(|f| f.family),
            min_eigenvalue: v.min_eigenvalue,
            pass: v.tag() == Tag::NotKHyponormal,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifierRow {
    pub case: usize,
    pub kind: &'static str,
    pub symbol: String,
    pub outcome: String,
    pub violation: bool,
}

fn hermitian_symbol(rng: &mut ChaCha8Rng) -> MatrixLaurentSymbol {
    let a0 = CMat::from_fn(2, 2, |_, _| rc(rng));
    let mut terms = vec![(0, (&a0 + a0.adjoint()) * Complex64::new(0.5, 0.0))];
    let deg = rng.gen_range(1..=2);
    for d in 1..=deg {
        let a = CMat::from_fn(2, 2, |_, _| rc(rng)) + identity(2) * Complex64::new(1.5, 0.0);
        terms.push((d, a.clone()));
        terms.push((-d, a.adjoint()));
    }
    MatrixLaurentSymbol::from_coeffs(2, terms).expect("2x2")
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMat {
    let m = CMat::from_fn(2, 2, |_, _| rc(rng)) + identity(2) * Complex64::new(0.5, 0.0);
    m.qr().q()
}

fn candidate_symbol(kind: usize, rng: &mut ChaCha8Rng) -> (&'static str, MatrixLaurentSymbol) {
    match kind {
        0 => ("hermitian", hermitian_symbol(rng)),
        1 => {
            let h = hermitian_symbol(rng);
            let c = identity(2) * rc(rng);
            ("rotated-hermitian", h.scale(unit(rng)).add(&MatrixLaurentSymbol::constant(c)).expect("2x2"))
        }
        2 => {
            // unitarily conjugated diagonal of hyponormal scalar symbols a z̄ + b z, |a| < |b|
            let v = random_unitary(rng);
            let mut lo = CMat::zeros(2, 2);
            let mut hi = CMat::zeros(2, 2);
            for i in 0..2 {
                let b = rc_lead(rng) * 2.0;
                lo[(i, i)] = b * rng.gen_range(0.2..0.9);
                hi[(i, i)] = b;
            }
            let s = MatrixLaurentSymbol::from_coeffs(2, [(-1, &v * lo * v.adjoint()), (1, &v * hi * v.adjoint())]).expect("2x2");
            ("conjugated-diagonal", s)
        }
        _ => {
            let deg_m = rng.gen_range(1..=2);
            let deg_n = rng.gen_range(0..=2);
            let mut terms = Vec::new();
            for d in -deg_m..=deg_n {
                let mut a = CMat::from_fn(2, 2, |_, _| rc(rng));
                if d == -deg_m {
                    a += identity(2) * Complex64::new(1.5, 0.0);
                }
                terms.push((d, a));
            }
            ("random", MatrixLaurentSymbol::from_coeffs(2, terms).expect("2x2"))
        }
    }
}

fn coprime_coanalytic(phi: &MatrixLaurentSymbol, tol: &Tolerances) -> bool {
    let (_, minus) = phi.split();
    let Ok(rm) = RationalMatrix::from_analytic_laurent(&minus) else { return false };
    let Ok(pair) = decompose_matrix(&rm) else { return false };
    let check = coprime_matrix_check(&pair.outer_factor, &pair.inner, tol.coprime);
    check.coprime && !check.marginal && check.min_sigma > 1e-6
}

/// Random 2×2 symbols of degree ≤ 2 with invertible outer co-analytic coefficient and
/// certified-coprime co-analytic factorization, run through the classifier.
pub fn classifier_harness(seed: u64, count: usize, tol: &Tolerances) -> Result<Vec<ClassifierRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count);
    for case in 0..count {
        let (kind, phi) = loop {
            let (kind, phi) = candidate_symbol(case % 4, &mut rng);
            if coprime_coanalytic(&phi, tol) {
                break (kind, phi);
            }
        };
        let (outcome, violation) = match classify_normal_or_analytic(&phi, tol) {
            Ok(v) => (v.tag().as_str().to_string(), false),
            Err(e @ Error::TheoremViolation(_)) => (e.to_string(), true),
            Err(e) => (e.to_string(), false),
        };
        rows.push(ClassifierRow { case, kind, symbol: phi.to_json().to_string(), outcome, violation });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TzRow {
    pub case: usize,
    pub normal_enforced: bool,
    pub phi: String,
    pub psi: String,
    pub tag: String,
    pub quadratic_form: Option<f64>,
    pub hyponormal: bool,
}

/// Candidate pairs for `[[T_z, T_φ],[T_ψ, T_z̄]]`; every other case enforces `φ = -ψ̄`.
pub fn tz_candidates(seed: u64, count: usize, tol: &Tolerances) -> Result<Vec<TzRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count);
    for case in 0..count {
        let psi = MatrixLaurentSymbol::scalar((-2..=2).map(|d| (d, rc(&mut rng))).collect::<Vec<_>>());
        let normal_enforced = case % 2 == 0;
        let phi = if normal_enforced {
            psi.adjoint().scale(-ONE)
        } else {
            MatrixLaurentSymbol::scalar((-2..=2).map(|d| (d, rc(&mut rng))).collect::<Vec<_>>())
        };
        let v = no_hypo_completion_tz(&phi, &psi, tol)?;
        rows.push(TzRow {
            case,
            normal_enforced,
            phi: phi.to_string(),
            psi: psi.to_string(),
            tag: v.tag().as_str().to_string(),
            quadratic_form: v.min_eigenvalue,
            hyponormal: v.tag() == Tag::Hyponormal,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_deterministic() {
        let tol = Tolerances::default();
        assert_eq!(oracle_equivalence(3, 6, &tol).unwrap(), oracle_equivalence(3, 6, &tol).unwrap());
        assert_eq!(tz_candidates(3, 4, &tol).unwrap(), tz_candidates(3, 4, &tol).unwrap());
    }

    #[test]
    fn small_oracle_suite_agrees() {
        let rows = oracle_equivalence(1, 30, &Tolerances::default()).unwrap();
        for r in &rows {
            assert!(r.agree, "{r:?}");
        }
    }
}
