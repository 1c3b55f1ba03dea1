//! Verdict engine: hyponormality through the model-space criterion,
//! membership checks, the normal-or-analytic classifier and the
//! `[[T_z̄, ·],[·, T_z̄]]` completion solver.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::blaschke::{coprime_matrix_check, decompose_matrix, FiniteBlaschkeProduct};
use crate::linalg::{
    hermitian_min_eig, identity, matrix_to_json, max_abs, numerical_rank, quadratic_form, spectral_norm,
    unit_vector, vector_to_json, ZERO,
};
use crate::modelspace::{hermite_fejer_solve, poly_of_m, InterpolantK, TriangularModel};
use crate::operators::{
    k_hypo_window, natural_window, positivity, selfcommutator_exact, selfcommutator_window, square_hypo_window,
    PositivityReport, PsdVerdict,
};
use crate::symalg::{MatrixLaurentSymbol, RationalAnalytic, RationalMatrix, RationalSymbol};
use crate::{CMat, CVec, Error, Result, Tolerances};

/// Largest window used when a truncated rational symbol is handed to the window oracle.
const ORACLE_WINDOW_CAP: usize = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    Hyponormal,
    NotHyponormal,
    Normal,
    Analytic,
    Neither,
    NotKHyponormal,
    ConsistentUpToWindow,
    NotNormalSymbol,
    Marginal,
    Inconclusive,
}

impl Tag {
    /// Decided verdicts map to exit code 0, the rest to 2.
    pub fn is_decided(&self) -> bool {
        !matches!(self, Tag::Marginal | Tag::Inconclusive)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Hyponormal => "Hyponormal",
            Tag::NotHyponormal => "NotHyponormal",
            Tag::Normal => "Normal",
            Tag::Analytic => "Analytic",
            Tag::Neither => "Neither",
            Tag::NotKHyponormal => "NotKHyponormal",
            Tag::ConsistentUpToWindow => "ConsistentUpToWindow",
            Tag::NotNormalSymbol => "NotNormalSymbol",
            Tag::Marginal => "Marginal",
            Tag::Inconclusive => "Inconclusive",
        }
    }
}

/// Parameters of a completion family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    pub family: u8,
    pub theta: f64,
    pub beta: [f64; 2],
    /// Phase of `ψ/φ` (family 1).
    pub omega: Option<f64>,
    /// Co-analytic coefficient (family 2).
    pub alpha: Option<[f64; 2]>,
}

/// A tagged decision with its numeric certificate.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Verdict {
    pub tag: Option<Tag>,
    pub sigma_max: Option<f64>,
    /// `I - K(M)*K(M)`.
    pub defect: Option<CMat>,
    pub rank_defect: Option<usize>,
    pub witness: Option<CVec>,
    pub min_eigenvalue: Option<f64>,
    pub notes: Vec<String>,
    pub family: Option<FamilyParams>,
    pub interpolant: Option<InterpolantK>,
    pub model: Option<TriangularModel>,
    /// `K(M)`.
    pub k_of_m: Option<CMat>,
}

impl Verdict {
    fn with_tag(tag: Tag) -> Self {
        Verdict { tag: Some(tag), ..Default::default() }
    }

    pub fn tag(&self) -> Tag {
        self.tag.expect("verdicts are always tagged")
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn attach_report(&mut self, r: &PositivityReport) {
        self.min_eigenvalue = Some(r.min_eigenvalue);
        self.witness = r.witness.clone();
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "tag": self.tag().as_str(),
            "sigma_max": self.sigma_max,
            "defect": self.defect.as_ref().map(matrix_to_json),
            "rank_defect": self.rank_defect,
            "notes": self.notes,
        });
        let obj = v.as_object_mut().expect("object");
        if let Some(w) = &self.witness {
            obj.insert("witness".into(), json!(vector_to_json(w)));
        }
        if let Some(e) = self.min_eigenvalue {
            obj.insert("min_eigenvalue".into(), json!(e));
        }
        if let Some(f) = &self.family {
            obj.insert("family".into(), serde_json::to_value(f).expect("plain data"));
        }
        if let Some(k) = &self.interpolant {
            obj.insert("k".into(), k.poly.to_json());
        }
        v
    }
}

/// Inner/outer data of a rational symbol: `Φ₊ - Φ₊(0) = θ₊A*` and `Φ₋ = θ₁B*`
/// on the circle, with `θ₊ = θ₁θ₀` when `θ₁` divides `θ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypoFactorization {
    pub theta1: FiniteBlaschkeProduct,
    pub theta_plus: FiniteBlaschkeProduct,
    pub theta0: Option<FiniteBlaschkeProduct>,
    pub a: RationalMatrix,
    pub b: RationalMatrix,
}

impl HypoFactorization {
    pub fn divisible(&self) -> bool {
        self.theta0.is_some()
    }
}

pub fn factorize(sym: &RationalSymbol) -> Result<HypoFactorization> {
    let n = sym.n();
    let mut plus0 = sym.plus.clone();
    for i in 0..n {
        for j in 0..n {
            let f = sym.plus.get(i, j);
            plus0.set(i, j, f.sub(&RationalAnalytic::constant(f.eval(ZERO))));
        }
    }
    let pp = decompose_matrix(&plus0)?;
    let pm = decompose_matrix(&sym.minus)?;
    let theta0 = pp.inner.quotient(&pm.inner).ok();
    Ok(HypoFactorization {
        theta1: pm.inner,
        theta_plus: pp.inner,
        theta0,
        a: pp.outer_factor,
        b: pm.outer_factor,
    })
}

pub fn factorize_laurent(phi: &MatrixLaurentSymbol) -> Result<HypoFactorization> {
    factorize(&RationalSymbol::from_laurent(phi))
}

/// Membership `K ∈ C(Φ)`: the largest negative-degree coefficient of `Φ - KΦ*`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub max_negative: f64,
}

pub fn verify_in_c(phi: &MatrixLaurentSymbol, k: &MatrixLaurentSymbol, tol: f64) -> Result<Membership> {
    if let Some((lo, _)) = k.degree_range() {
        if lo < 0 {
            return Err(Error::NotAnalytic(lo));
        }
    }
    let resid = phi.sub(&k.multiply(&phi.adjoint())?)?;
    let max_negative = resid.iter().filter(|(d, _)| *d < 0).map(|(_, m)| max_abs(m)).fold(0.0, f64::max);
    Ok(Membership { member: max_negative <= tol, max_negative })
}

/// [`verify_in_c`] for a rational `K`, expanded into its (tail-certified) Fourier series.
pub fn verify_in_c_rational(phi: &MatrixLaurentSymbol, k: &RationalMatrix, tol: f64) -> Result<Membership> {
    verify_in_c(phi, &k.to_laurent(), tol)
}

pub fn decide_hyponormal(phi: &MatrixLaurentSymbol) -> Result<Verdict> {
    decide_hyponormal_with(phi, &Tolerances::default())
}

pub fn decide_hyponormal_with(phi: &MatrixLaurentSymbol, tol: &Tolerances) -> Result<Verdict> {
    let sym = RationalSymbol::from_laurent(phi);
    let mut v = decide_core(&sym, phi, true, tol)?;
    if !phi.is_normal_symbol(tol.normal) {
        v.note(format!("symbol normality defect {:.3e}", phi.normality_defect()));
    }
    Ok(v)
}

/// Rational symbols; the window oracle runs on a truncated Fourier expansion.
pub fn decide_hyponormal_rational(sym: &RationalSymbol, tol: &Tolerances) -> Result<Verdict> {
    let laurent = sym.to_laurent();
    let exact = sym.is_trig_polynomial();
    decide_core(sym, &laurent, exact, tol)
}

fn normality_on_grid(sym: &RationalSymbol, grid: usize) -> f64 {
    (0..grid)
        .map(|t| {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / grid as f64);
            let f = sym.eval(z);
            max_abs(&(f.adjoint() * &f - &f * f.adjoint()))
        })
        .fold(0.0, f64::max)
}

fn window_oracle(laurent: &MatrixLaurentSymbol, tol: &Tolerances) -> PositivityReport {
    let w = natural_window(laurent).min(ORACLE_WINDOW_CAP);
    positivity(&selfcommutator_window(laurent, w), tol)
}

fn decide_core(sym: &RationalSymbol, laurent: &MatrixLaurentSymbol, exact_symbol: bool, tol: &Tolerances) -> Result<Verdict> {
    let n = sym.n();
    let normal = if exact_symbol {
        laurent.is_normal_symbol(tol.normal)
    } else {
        normality_on_grid(sym, 512) <= tol.normal
    };
    if !normal {
        let mut v = Verdict::with_tag(Tag::NotHyponormal);
        v.note("symbol is not normal");
        let r = window_oracle(laurent, tol);
        if r.verdict == PsdVerdict::NotPsd {
            v.attach_report(&r);
            v.note("window self-commutator has a negative eigenvalue");
        }
        return Ok(v);
    }
    let fac = factorize(sym)?;
    let Some(theta0) = fac.theta0.clone() else {
        let mut v = Verdict::with_tag(Tag::NotHyponormal);
        v.note("inner part of the co-analytic part does not divide the inner part of the analytic part");
        let r = window_oracle(laurent, tol);
        v.attach_report(&r);
        return Ok(v);
    };
    let theta = &fac.theta_plus;
    let d = theta.degree();
    if d == 0 {
        // constant analytic part and no co-analytic part
        let mut v = Verdict::with_tag(Tag::Hyponormal);
        v.sigma_max = Some(0.0);
        v.rank_defect = Some(0);
        v.defect = Some(CMat::zeros(0, 0));
        v.note("constant symbol");
        return Ok(v);
    }
    let nodes: Vec<(Complex64, usize)> = theta.zeros().to_vec();
    let theta0b = fac.b.scale_by(&theta0.as_rational());
    let a_data: Vec<Vec<CMat>> = nodes.iter().map(|&(a, m)| fac.a.taylor_at(a, m)).collect();
    let b_data: Vec<Vec<CMat>> = nodes.iter().map(|&(a, m)| theta0b.taylor_at(a, m)).collect();
    let k = match hermite_fejer_solve(&nodes, &a_data, &b_data) {
        Ok(k) => k,
        Err(Error::EmptyC { node, residual }) => {
            let mut v = Verdict::with_tag(Tag::NotHyponormal);
            v.note(format!("C(Φ) is empty: interpolation inconsistent at node {node} (residual {residual:.3e})"));
            let r = window_oracle(laurent, tol);
            v.attach_report(&r);
            return Ok(v);
        }
        Err(e) => return Err(e),
    };
    let mut v = Verdict::default();
    if !k.flagged_nodes.is_empty() {
        v.note(format!("least-squares interpolation at nodes {:?}", k.flagged_nodes));
    }
    let membership = verify_in_c(laurent, &k.poly, tol.membership.max(1e3 * k.interpolation_residual))?;
    if !membership.member {
        v.note(format!("membership check failed (max negative coefficient {:.3e})", membership.max_negative));
    }
    let model = TriangularModel::from_blaschke(theta)?;
    let km = poly_of_m(&k.poly, &model)?;
    let sigma = spectral_norm(&km);
    let defect = identity(n * d) - km.adjoint() * &km;
    v.sigma_max = Some(sigma);
    v.rank_defect = Some(numerical_rank(&defect, tol.rank));
    v.defect = Some(defect.clone());
    v.model = Some(model);
    v.k_of_m = Some(km);
    v.interpolant = Some(k);
    if !membership.member {
        v.tag = Some(Tag::Inconclusive);
        return Ok(v);
    }
    if sigma <= 1.0 + tol.contract {
        v.tag = Some(Tag::Hyponormal);
        if fac.b.entries().iter().all(|e| e.is_zero()) {
            v.note("analytic symbol");
        }
        return Ok(v);
    }
    let (lmin, w) = hermitian_min_eig(&defect);
    if sigma < 1.0 + tol.contract_marginal {
        v.tag = Some(Tag::Marginal);
        let r = window_oracle(laurent, tol);
        v.note(format!("window oracle: {:?}, min eigenvalue {:.3e}", r.verdict, r.min_eigenvalue));
        v.attach_report(&r);
        return Ok(v);
    }
    let a_invertible = coprime_matrix_check(&fac.a, theta, tol.coprime).coprime;
    if n == 1 || a_invertible {
        v.tag = Some(Tag::NotHyponormal);
        v.min_eigenvalue = Some(lmin);
        v.witness = Some(w);
        v.note("K(M) is not contractive");
        return Ok(v);
    }
    v.note("K(M) is not contractive and A is singular at a zero of θ");
    let r = window_oracle(laurent, tol);
    v.attach_report(&r);
    v.tag = Some(match (r.verdict, exact_symbol && r.exactness.is_exact()) {
        (PsdVerdict::NotPsd, _) => {
            v.note("window self-commutator has a negative eigenvalue");
            Tag::NotHyponormal
        }
        (PsdVerdict::Psd, true) => {
            v.note("exact self-commutator is positive semidefinite");
            Tag::Hyponormal
        }
        _ => Tag::Inconclusive,
    });
    Ok(v)
}

/// If `T_Φ` and `T_Φ²` are both hyponormal and the co-analytic part is coprime,
/// `T_Φ` is normal or analytic; anything else is reported as `Neither`.
pub fn classify_normal_or_analytic(phi: &MatrixLaurentSymbol, tol: &Tolerances) -> Result<Verdict> {
    let (_, minus) = phi.split();
    if minus.is_zero() {
        return Ok(Verdict::with_tag(Tag::Analytic));
    }
    let pm = decompose_matrix(&RationalMatrix::from_analytic_laurent(&minus)?)?;
    let check = coprime_matrix_check(&pm.outer_factor, &pm.inner, tol.coprime);
    if !check.coprime {
        return Err(Error::HypothesisNotMet(format!(
            "co-analytic factorization is not coprime (min singular value {:.3e})",
            check.min_sigma
        )));
    }
    let mut v = Verdict::default();
    if check.marginal {
        v.note(format!("coprimality is marginal (min singular value {:.3e})", check.min_sigma));
    }
    let sc = selfcommutator_exact(phi);
    if sc.exactness.is_exact() && max_abs(&sc.block) <= tol.normal {
        v.tag = Some(Tag::Normal);
        return Ok(v);
    }
    let hyp = decide_hyponormal_with(phi, tol)?;
    let w = (2 * natural_window(phi)).max(16);
    let sq = square_hypo_window(phi, w, tol)?;
    v.note(format!("hyponormality: {}", hyp.tag().as_str()));
    v.note(format!("square window: {:?} (min eigenvalue {:.3e})", sq.verdict, sq.min_eigenvalue));
    if hyp.tag() == Tag::Hyponormal && sq.verdict == PsdVerdict::Psd {
        if sq.exactness.is_exact() {
            return Err(Error::TheoremViolation(format!(
                "T_Φ and T_Φ² hyponormal but T_Φ neither normal nor analytic (max self-commutator entry {:.3e})",
                max_abs(&sc.block)
            )));
        }
        v.note("square window positive but not certified exact");
    }
    v.attach_report(&sq);
    v.tag = Some(Tag::Neither);
    Ok(v)
}

fn coeff(s: &MatrixLaurentSymbol, d: i32) -> Complex64 {
    s.fourier_coeff(d)[(0, 0)]
}

/// `[[z̄, φ],[ψ, z̄]]`
pub fn ustar_symbol(phi: &MatrixLaurentSymbol, psi: &MatrixLaurentSymbol) -> Result<MatrixLaurentSymbol> {
    let zbar = MatrixLaurentSymbol::scalar([(-1, crate::linalg::ONE)]);
    MatrixLaurentSymbol::from_entries(2, &[zbar.clone(), phi.clone(), psi.clone(), zbar])
}

fn family_of(phi: &MatrixLaurentSymbol, psi: &MatrixLaurentSymbol) -> Option<FamilyParams> {
    const TOL: f64 = 1e-9;
    let within = |s: &MatrixLaurentSymbol| s.degree_range().is_none_or(|(lo, hi)| lo >= -1 && hi <= 1);
    if !within(phi) || !within(psi) {
        return None;
    }
    let (am, a0, a1) = (coeff(phi, -1), coeff(phi, 0), coeff(phi, 1));
    if (a1.norm() - (1.0 + am.norm_sqr()).sqrt()).abs() > TOL {
        return None;
    }
    let beta = [a0.re, a0.im];
    let theta = a1.arg();
    if am.norm() < 1e-6 {
        let lam = coeff(psi, 1) / a1;
        if (lam.norm() - 1.0).abs() > TOL || !psi.approx_eq_tol(&phi.scale(lam), TOL) {
            return None;
        }
        return Some(FamilyParams { family: 1, theta, beta, omega: Some(lam.arg()), alpha: None });
    }
    let lam = -am.conj() / am;
    if !psi.approx_eq_tol(&phi.scale(lam), TOL) {
        return None;
    }
    Some(FamilyParams { family: 2, theta, beta, omega: None, alpha: Some([am.re, am.im]) })
}

/// Decides whether `[[T_z̄, T_φ],[T_ψ, T_z̄]]` lies in one of the two normal
/// completion families, and cross-checks against the operator tests.
pub fn complete_ustar(phi: &MatrixLaurentSymbol, psi: &MatrixLaurentSymbol, w: usize, tol: &Tolerances) -> Result<Verdict> {
    let sym = ustar_symbol(phi, psi)?;
    match family_of(phi, psi) {
        Some(f) => {
            let sc = selfcommutator_exact(&sym);
            let dev = max_abs(&sc.block);
            if dev > tol.normal || !sc.exactness.is_exact() {
                return Err(Error::TheoremViolation(format!(
                    "family {} member with self-commutator entry {dev:.3e}",
                    f.family
                )));
            }
            let mut v = Verdict::with_tag(Tag::Normal);
            v.note(format!("family {}; max self-commutator entry {dev:.3e}", f.family));
            v.family = Some(f);
            Ok(v)
        }
        None => {
            let r = k_hypo_window(&sym, 2, w, tol)?;
            let mut v = Verdict::default();
            v.attach_report(&r);
            v.tag = Some(match r.verdict {
                PsdVerdict::NotPsd => Tag::NotKHyponormal,
                PsdVerdict::Marginal => Tag::Marginal,
                PsdVerdict::Psd => {
                    v.note("outside both families but the 2-hyponormality window is positive");
                    Tag::ConsistentUpToWindow
                }
            });
            v.note("not in a completion family");
            Ok(v)
        }
    }
}

/// `[[z, φ],[ψ, z̄]]`
pub fn tz_symbol(phi: &MatrixLaurentSymbol, psi: &MatrixLaurentSymbol) -> Result<MatrixLaurentSymbol> {
    let z = MatrixLaurentSymbol::scalar([(1, crate::linalg::ONE)]);
    let zbar = MatrixLaurentSymbol::scalar([(-1, crate::linalg::ONE)]);
    MatrixLaurentSymbol::from_entries(2, &[z, phi.clone(), psi.clone(), zbar])
}

/// `[[T_z, T_φ],[T_ψ, T_z̄]]` is never hyponormal: normality forces `φ = -ψ̄`, and
/// then the lower-right entry of the self-commutator is `T_zT_z̄ - 1`.
pub fn no_hypo_completion_tz(phi: &MatrixLaurentSymbol, psi: &MatrixLaurentSymbol, tol: &Tolerances) -> Result<Verdict> {
    let sym = tz_symbol(phi, psi)?;
    if !sym.is_normal_symbol(tol.normal) {
        let mut v = Verdict::with_tag(Tag::NotNormalSymbol);
        v.note(format!("symbol normality defect {:.3e}", sym.normality_defect()));
        return Ok(v);
    }
    let sc = selfcommutator_exact(&sym);
    // e₀ in the second component
    let e = unit_vector(sc.block.nrows(), 1);
    let q = quadratic_form(&sc.block, &e);
    let (lmin, _) = hermitian_min_eig(&sc.block);
    let mut v = Verdict::with_tag(Tag::NotHyponormal);
    v.min_eigenvalue = Some(q);
    v.witness = Some(e);
    v.note(format!("quadratic form of T_zT_z̄ - 1 at e₀: {q}"));
    v.note(format!("min eigenvalue of the self-commutator window: {lmin:.6}"));
    if q > -tol.psd_neg {
        return Err(Error::TheoremViolation(format!("lower-right block is not negative at e₀ ({q})")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, r, real_matrix, ONE};
    use crate::symalg::Poly;

    fn scalar(terms: &[(i32, f64)]) -> MatrixLaurentSymbol {
        MatrixLaurentSymbol::scalar(terms.iter().map(|&(d, v)| (d, r(v))))
    }

    fn rank_one_scalar() -> MatrixLaurentSymbol {
        scalar(&[(-2, 1.0), (-1, 2.0), (1, 1.0), (2, 2.0)])
    }

    fn gap_symbol() -> MatrixLaurentSymbol {
        let j = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        MatrixLaurentSymbol::from_coeffs(2, [(-1, identity(2)), (-2, j.clone()), (2, j * r(2.0))]).unwrap()
    }

    #[test]
    fn rank_one_chain() {
        let v = decide_hyponormal(&rank_one_scalar()).unwrap();
        assert_eq!(v.tag(), Tag::Hyponormal);
        let want = real_matrix(2, 2, &[3.0 / 16.0, -3.0 / 8.0, -3.0 / 8.0, 0.75]);
        assert!(max_abs_diff(v.defect.as_ref().unwrap(), &want) < 1e-10);
        assert_eq!(v.rank_defect, Some(1));
        let k = &v.interpolant.as_ref().unwrap().poly;
        assert!(k.approx_eq(&scalar(&[(0, 0.5), (1, 0.75)])));
    }

    #[test]
    fn factorization_examples() {
        let f = factorize_laurent(&rank_one_scalar()).unwrap();
        assert_eq!(f.theta1, FiniteBlaschkeProduct::z_power(2));
        assert_eq!(f.theta0.as_ref().unwrap().degree(), 0);
        assert_eq!(f.a.get(0, 0).numerator().coeffs(), &[r(2.0), ONE]);
        assert_eq!(f.b.get(0, 0).numerator().coeffs(), &[ONE, r(2.0)]);
        let f = factorize_laurent(&scalar(&[(-3, 1.0), (1, 1.0)])).unwrap();
        assert!(!f.divisible());
        let f = factorize_laurent(&scalar(&[(0, 1.0), (2, 1.0)])).unwrap();
        assert!(f.theta1.is_constant());
        assert!(f.b.entries().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn membership_examples() {
        let phi = rank_one_scalar();
        let k = scalar(&[(0, 0.5), (1, 0.75)]);
        assert!(verify_in_c(&phi, &k, 1e-9).unwrap().member);
        let b = RationalAnalytic::from_polys(&Poly::new(vec![r(0.5), ONE]), &Poly::new(vec![ONE, r(0.5)])).unwrap();
        let bm = RationalMatrix::new(1, vec![b.clone()]).unwrap();
        assert!(verify_in_c_rational(&phi, &bm, 1e-9).unwrap().member);
        assert!((b.sup_norm(1024) - 1.0).abs() < 1e-9);
        assert!(!verify_in_c(&phi, &MatrixLaurentSymbol::zero(1), 1e-9).unwrap().member);
    }

    #[test]
    fn unilateral_example() {
        let v = decide_hyponormal(&scalar(&[(-1, 1.0), (1, 2.0)])).unwrap();
        assert_eq!(v.tag(), Tag::Hyponormal);
        assert!((v.defect.as_ref().unwrap()[(0, 0)] - r(0.75)).norm() < 1e-12);
        assert_eq!(v.rank_defect, Some(1));
    }

    #[test]
    fn divisibility_failure() {
        let phi = scalar(&[(-3, 1.0), (1, 1.0)]);
        let v = decide_hyponormal(&phi).unwrap();
        assert_eq!(v.tag(), Tag::NotHyponormal);
        assert!(v.min_eigenvalue.unwrap() < -1e-6);
    }

    #[test]
    fn gap_symbol_hyponormal() {
        let v = decide_hyponormal(&gap_symbol()).unwrap();
        assert_eq!(v.tag(), Tag::Hyponormal);
        let j = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let want = MatrixLaurentSymbol::from_coeffs(2, [(0, identity(2) * r(0.5)), (1, j * r(0.5))]).unwrap();
        assert!(v.interpolant.as_ref().unwrap().poly.approx_eq(&want));
    }

    #[test]
    fn translation_invariance() {
        for phi in [rank_one_scalar(), scalar(&[(-2, 1.0), (1, 0.3), (3, 2.0)]), gap_symbol()] {
            let shift = MatrixLaurentSymbol::constant(identity(phi.n()) * c(3.0, -1.0));
            let a = decide_hyponormal(&phi).unwrap();
            let b = decide_hyponormal(&phi.add(&shift).unwrap()).unwrap();
            assert_eq!(a.tag(), b.tag());
            assert_eq!(a.rank_defect, b.rank_defect);
        }
    }

    #[test]
    fn defect_independent_of_member() {
        let phi = scalar(&[(-2, 0.7), (-1, -0.4), (1, 0.9), (2, 1.3), (3, -0.5)]);
        let v = decide_hyponormal(&phi).unwrap();
        let k = v.interpolant.clone().unwrap();
        let model = v.model.clone().unwrap();
        // K + (∏ (z-α)^m)·Q is another member of C(Φ)
        let theta = factorize_laurent(&phi).unwrap().theta_plus;
        let vanish = theta.zeros().iter().fold(Poly::one(), |acc, &(a, m)| acc.mul(&Poly::new(vec![-a, ONE]).pow(m)));
        let q = Poly::new(vec![c(0.3, -1.0), r(2.0)]);
        let extra = vanish.mul(&q);
        let other = k
            .poly
            .add(&MatrixLaurentSymbol::scalar(extra.coeffs().iter().enumerate().map(|(d, &x)| (d as i32, x))))
            .unwrap();
        assert!(verify_in_c(&phi, &other, 1e-9).unwrap().member);
        let km = poly_of_m(&other, &model).unwrap();
        let d2 = identity(km.nrows()) - km.adjoint() * &km;
        assert!(max_abs_diff(&d2, v.defect.as_ref().unwrap()) < 1e-8);
    }

    #[test]
    fn analytic_and_constant_symbols() {
        let v = decide_hyponormal(&scalar(&[(0, 1.0), (2, 3.0)])).unwrap();
        assert_eq!(v.tag(), Tag::Hyponormal);
        assert_eq!(v.rank_defect, Some(2));
        let v = decide_hyponormal(&scalar(&[(0, 1.0)])).unwrap();
        assert_eq!(v.rank_defect, Some(0));
        let v = decide_hyponormal(&scalar(&[(-1, 1.0), (0, 2.0)])).unwrap();
        assert_eq!(v.tag(), Tag::NotHyponormal);
    }

    #[test]
    fn classifier_examples() {
        let tol = Tolerances::default();
        let diag = MatrixLaurentSymbol::from_coeffs(
            2,
            [(1, identity(2)), (-1, real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]))],
        )
        .unwrap();
        assert!(matches!(classify_normal_or_analytic(&diag, &tol), Err(Error::HypothesisNotMet(_))));
        let v = classify_normal_or_analytic(&scalar(&[(-1, 1.0), (1, 2.0)]), &tol).unwrap();
        assert_eq!(v.tag(), Tag::Neither);
        assert_eq!(classify_normal_or_analytic(&scalar(&[(1, 2.0)]), &tol).unwrap().tag(), Tag::Analytic);
        let herm = scalar(&[(-1, 1.0), (1, 1.0)]);
        assert_eq!(classify_normal_or_analytic(&herm, &tol).unwrap().tag(), Tag::Normal);
    }

    #[test]
    fn ustar_examples() {
        let tol = Tolerances::default();
        let z = scalar(&[(1, 1.0)]);
        let v = complete_ustar(&z, &z, 12, &tol).unwrap();
        assert_eq!(v.tag(), Tag::Normal);
        let f = v.family.unwrap();
        assert_eq!(f.family, 1);
        assert!(f.theta.abs() < 1e-12 && f.omega.unwrap().abs() < 1e-12);
        let phi = scalar(&[(-1, 1.0), (1, 2f64.sqrt())]);
        let v = complete_ustar(&phi, &phi.scale(r(-1.0)), 12, &tol).unwrap();
        assert_eq!(v.tag(), Tag::Normal);
        assert_eq!(v.family.unwrap().family, 2);
        let bad = scalar(&[(-2, 1.0), (2, 2.0)]);
        let v = complete_ustar(&bad, &bad, 12, &tol).unwrap();
        assert_eq!(v.tag(), Tag::NotKHyponormal);
    }

    #[test]
    fn tz_completion_examples() {
        let tol = Tolerances::default();
        let z = scalar(&[(1, 1.0)]);
        let v = no_hypo_completion_tz(&z, &z.scale(r(-1.0)), &tol).unwrap();
        assert_eq!(v.tag(), Tag::NotNormalSymbol);
        let zbar = scalar(&[(-1, 1.0)]);
        let v = no_hypo_completion_tz(&zbar, &z.scale(r(-1.0)), &tol).unwrap();
        assert_eq!(v.tag(), Tag::NotHyponormal);
        assert!((v.min_eigenvalue.unwrap() + 1.0).abs() < 1e-12);
        let one = scalar(&[(0, 1.0)]);
        assert_eq!(no_hypo_completion_tz(&one, &one, &tol).unwrap().tag(), Tag::NotNormalSymbol);
        let zero = MatrixLaurentSymbol::zero(1);
        let v = no_hypo_completion_tz(&zero, &zero, &tol).unwrap();
        assert_eq!(v.tag(), Tag::NotHyponormal);
        assert!((v.min_eigenvalue.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_json_shape() {
        let v = decide_hyponormal(&rank_one_scalar()).unwrap();
        let js = v.to_json();
        assert_eq!(js["tag"], "Hyponormal");
        assert_eq!(js["rank_defect"], 1);
        assert!(js["defect"].is_array());
        assert!(js["notes"].is_array());
    }
}
