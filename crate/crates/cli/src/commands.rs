use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use blocktoeplitz::decide::{self, Tag, Verdict};
use blocktoeplitz::linalg::{matrix_to_json, vector_to_json};
use blocktoeplitz::modelspace::build_m;
use blocktoeplitz::operators::{self, natural_window, PositivityReport, PsdVerdict};
use blocktoeplitz::suites;
use blocktoeplitz::symalg::MatrixLaurentSymbol;
use blocktoeplitz::{CMat, Complex64, Tolerances};
use serde::Serialize;
use serde_json::{json, Value};

use crate::expr::parse_scalar;
use crate::{
    Command, ExportWhat, Format, GlobalOpts, SuiteName, EXIT_DECIDED, EXIT_DISAGREEMENT, EXIT_UNDECIDED,
};

/// Largest deviation accepted by the model-identity suite.
const MODEL_IDENTITY_TOL: f64 = 1e-8;

pub fn run(cmd: Command, opts: &GlobalOpts) -> Result<u8> {
    let tol = tolerances(opts);
    match cmd {
        Command::CheckHyponormal { symbol } => check_hyponormal(&load_symbol(&symbol)?, &tol, opts),
        Command::CheckK { symbol, k, window } => {
            let phi = load_symbol(&symbol)?;
            let w = window.map(|w| w as usize).unwrap_or_else(|| default_window(&phi));
            let r = operators::k_hypo_window(&phi, k as usize, w, &tol)?;
            emit_window(&phi, &r, k as usize, "T", opts)
        }
        Command::CheckSquare { symbol, window } => {
            let phi = load_symbol(&symbol)?;
            let w = window.map(|w| w as usize).unwrap_or_else(|| default_window(&phi));
            let r = operators::square_hypo_window(&phi, w, &tol)?;
            emit_window(&phi, &r, 1, "T^2", opts)
        }
        Command::Classify { symbol } => {
            let phi = load_symbol(&symbol)?;
            let v = decide::classify_normal_or_analytic(&phi, &tol)?;
            emit_verdict(&phi, &v, json!({}), opts)
        }
        Command::CompleteUstar { phi, psi, window } => {
            let (phi, psi) = (parse_scalar(&phi)?, parse_scalar(&psi)?);
            let v = decide::complete_ustar(&phi, &psi, window as usize, &tol)?;
            emit_verdict(&decide::ustar_symbol(&phi, &psi)?, &v, json!({}), opts)
        }
        Command::NoCompletion { phi, psi } => {
            let (phi, psi) = (parse_scalar(&phi)?, parse_scalar(&psi)?);
            let v = decide::no_hypo_completion_tz(&phi, &psi, &tol)?;
            emit_verdict(&decide::tz_symbol(&phi, &psi)?, &v, json!({}), opts)
        }
        Command::Suite { name, seed, count, window } => suite(name, seed, count, window as usize, &tol, opts),
        Command::Export { what } => export(what, &tol, opts),
    }
}

fn tolerances(opts: &GlobalOpts) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(t) = opts.tol_psd {
        tol.psd_rel = t;
    }
    if let Some(t) = opts.tol_contract {
        tol.contract = t;
        tol.contract_marginal = tol.contract_marginal.max(10.0 * t);
    }
    tol
}

fn default_window(phi: &MatrixLaurentSymbol) -> usize {
    (2 * natural_window(phi)).max(16)
}

/// A JSON file holding either a symbol object or a scalar expression string;
/// anything that is not a file is parsed as an expression.
pub fn load_symbol(arg: &str) -> Result<MatrixLaurentSymbol> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
        return match v {
            Value::String(s) => parse_scalar(&s),
            other => MatrixLaurentSymbol::from_json(&other).with_context(|| format!("symbol in {arg}")),
        };
    }
    if arg.ends_with(".json") {
        bail!("no such file: {arg}");
    }
    parse_scalar(arg).with_context(|| format!("parsing expression '{arg}'"))
}

fn symbol_json(phi: &MatrixLaurentSymbol) -> Value {
    if phi.is_scalar() {
        json!(phi.to_string())
    } else {
        phi.to_json()
    }
}

fn exit_for(tag: Tag) -> u8 {
    if tag.is_decided() {
        EXIT_DECIDED
    } else {
        EXIT_UNDECIDED
    }
}

fn write_out(opts: &GlobalOpts, text: &str) -> Result<()> {
    match &opts.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_json(opts: &GlobalOpts, v: &Value) -> Result<()> {
    write_out(opts, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("csv: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn write_rows<T: Serialize>(opts: &GlobalOpts, rows: &[T], default: Format) -> Result<()> {
    match opts.format.unwrap_or(default) {
        Format::Csv => write_out(opts, &csv_string(rows)?),
        Format::Json => write_json(opts, &serde_json::to_value(rows)?),
    }
}

#[derive(Serialize)]
struct VerdictRow<'a> {
    symbol: String,
    tag: &'a str,
    sigma_max: Option<f64>,
    rank_defect: Option<usize>,
    min_eigenvalue: Option<f64>,
    notes: String,
}

fn emit_verdict(phi: &MatrixLaurentSymbol, v: &Verdict, extra: Value, opts: &GlobalOpts) -> Result<u8> {
    match opts.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut out = v.to_json();
            let obj = out.as_object_mut().expect("verdict json is an object");
            obj.insert("symbol".into(), symbol_json(phi));
            if let Value::Object(extra) = extra {
                obj.extend(extra);
            }
            write_json(opts, &out)?;
        }
        Format::Csv => {
            let row = VerdictRow {
                symbol: phi.to_string(),
                tag: v.tag().as_str(),
                sigma_max: v.sigma_max,
                rank_defect: v.rank_defect,
                min_eigenvalue: v.min_eigenvalue,
                notes: v.notes.join("; "),
            };
            write_out(opts, &csv_string(&[row])?)?;
        }
    }
    Ok(exit_for(v.tag()))
}

fn check_hyponormal(phi: &MatrixLaurentSymbol, tol: &Tolerances, opts: &GlobalOpts) -> Result<u8> {
    let v = decide::decide_hyponormal_with(phi, tol)?;
    let extra = match &v.interpolant {
        Some(k) => json!({ "k_sup_norm": k.poly.sup_norm(opts.grid as usize) }),
        None => json!({}),
    };
    emit_verdict(phi, &v, extra, opts)
}

/// Tags a window positivity report. For `k = 1` the window decides
/// hyponormality outright once it is exact.
fn window_tag(r: &PositivityReport, k: usize) -> Tag {
    match (r.verdict, k) {
        (PsdVerdict::NotPsd, 1) => Tag::NotHyponormal,
        (PsdVerdict::NotPsd, _) => Tag::NotKHyponormal,
        (PsdVerdict::Marginal, _) => Tag::Marginal,
        (PsdVerdict::Psd, 1) if r.exactness.is_exact() => Tag::Hyponormal,
        (PsdVerdict::Psd, _) => Tag::ConsistentUpToWindow,
    }
}

fn emit_window(phi: &MatrixLaurentSymbol, r: &PositivityReport, k: usize, operator: &str, opts: &GlobalOpts) -> Result<u8> {
    let tag = window_tag(r, k);
    let mut notes = Vec::new();
    if r.verdict == PsdVerdict::Psd && !r.exactness.is_exact() {
        notes.push(format!("positive on a {}-block window that is not exact", r.window));
    }
    if r.verdict == PsdVerdict::Psd && r.exactness.is_exact() && k > 1 {
        notes.push(format!("window exact: {operator} is {k}-hyponormal"));
    }
    match opts.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut out = r.to_json();
            let obj = out.as_object_mut().expect("report json is an object");
            obj.insert("tag".into(), json!(tag.as_str()));
            obj.insert("operator".into(), json!(operator));
            obj.insert("k".into(), json!(k));
            obj.insert("symbol".into(), symbol_json(phi));
            obj.insert("notes".into(), json!(notes));
            write_json(opts, &out)?;
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                tag: &'a str,
                operator: &'a str,
                k: usize,
                window: usize,
                verdict: PsdVerdict,
                min_eigenvalue: f64,
                exact: bool,
            }
            let row = Row {
                tag: tag.as_str(),
                operator,
                k,
                window: r.window,
                verdict: r.verdict,
                min_eigenvalue: r.min_eigenvalue,
                exact: r.exactness.is_exact(),
            };
            write_out(opts, &csv_string(&[row])?)?;
        }
    }
    Ok(exit_for(tag))
}

fn suite(name: SuiteName, seed: u64, count: Option<usize>, window: usize, tol: &Tolerances, opts: &GlobalOpts) -> Result<u8> {
    let bad = match name {
        SuiteName::OracleEquivalence => {
            let rows = suites::oracle_equivalence(seed, count.unwrap_or(200), tol)?;
            write_rows(opts, &rows, Format::Csv)?;
            rows.iter().filter(|r| !r.agree).count()
        }
        SuiteName::ModelIdentity => {
            let rows = suites::model_identity(seed, count.unwrap_or(50))?;
            write_rows(opts, &rows, Format::Csv)?;
            rows.iter().filter(|r| r.max_deviation.is_nan() || r.max_deviation > MODEL_IDENTITY_TOL).count()
        }
        SuiteName::CompletionFamilies => {
            let mut rows = suites::completion_family_grid(tol)?;
            let offset = rows.len();
            let outside = suites::completion_outside(seed, count.unwrap_or(20), window, tol)?;
            rows.extend(outside.into_iter().map(|mut r| {
                r.case += offset;
                r
            }));
            write_rows(opts, &rows, Format::Csv)?;
            rows.iter().filter(|r| !r.pass).count()
        }
        SuiteName::Classifier => {
            let rows = suites::classifier_harness(seed, count.unwrap_or(100), tol)?;
            write_rows(opts, &rows, Format::Csv)?;
            rows.iter().filter(|r| r.violation).count()
        }
        SuiteName::Tz => {
            let rows = suites::tz_candidates(seed, count.unwrap_or(40), tol)?;
            write_rows(opts, &rows, Format::Csv)?;
            rows.iter().filter(|r| r.hyponormal).count()
        }
    };
    if bad > 0 {
        eprintln!("{bad} case(s) disagree");
        Ok(EXIT_DISAGREEMENT)
    } else {
        Ok(EXIT_DECIDED)
    }
}

#[derive(Serialize)]
struct EntryRow<'a> {
    matrix: &'a str,
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

fn entry_rows<'a>(name: &'a str, m: &CMat, out: &mut Vec<EntryRow<'a>>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(EntryRow { matrix: name, row: i, col: j, re: m[(i, j)].re, im: m[(i, j)].im });
        }
    }
}

fn parse_zeros(list: &str) -> Result<Vec<Complex64>> {
    list.split(',')
        .map(|s| {
            let e = parse_scalar(s)?;
            match e.degree_range() {
                None => Ok(Complex64::new(0.0, 0.0)),
                Some((0, 0)) => Ok(e.fourier_coeff(0)[(0, 0)]),
                _ => bail!("zero '{s}' is not a constant"),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct NonToeplitzRow {
    window: usize,
    interior: usize,
    residual: f64,
    c_norm: f64,
    toeplitz_defect: f64,
}

fn export(what: ExportWhat, tol: &Tolerances, opts: &GlobalOpts) -> Result<u8> {
    let format = opts.format.unwrap_or(Format::Json);
    match what {
        ExportWhat::Model { zeros } => {
            let model = build_m(&parse_zeros(&zeros)?)?;
            match format {
                Format::Json => write_json(opts, &serde_json::to_value(&model)?)?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    entry_rows("M", &model.m, &mut rows);
                    write_out(opts, &csv_string(&rows)?)?;
                }
            }
        }
        ExportWhat::Defect { symbol } => {
            let phi = load_symbol(&symbol)?;
            let v = decide::decide_hyponormal_with(&phi, tol)?;
            let (Some(defect), Some(km)) = (&v.defect, &v.k_of_m) else {
                bail!("no defect matrix for a {} verdict", v.tag().as_str());
            };
            match format {
                Format::Json => write_json(
                    opts,
                    &json!({
                        "tag": v.tag().as_str(),
                        "sigma_max": v.sigma_max,
                        "rank_defect": v.rank_defect,
                        "defect": matrix_to_json(defect),
                        "k_of_m": matrix_to_json(km),
                        "model": v.model.as_ref().map(serde_json::to_value).transpose()?,
                        "k": v.interpolant.as_ref().map(|k| k.poly.to_json()),
                    }),
                )?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    entry_rows("defect", defect, &mut rows);
                    entry_rows("k_of_m", km, &mut rows);
                    write_out(opts, &csv_string(&rows)?)?;
                }
            }
        }
        ExportWhat::Witness { symbol, k, window } => {
            let phi = load_symbol(&symbol)?;
            let r = operators::k_hypo_window(&phi, k as usize, window as usize, tol)?;
            match format {
                Format::Json => write_json(opts, &r.to_json())?,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        index: usize,
                        re: f64,
                        im: f64,
                    }
                    let rows: Vec<Row> = r
                        .witness
                        .as_ref()
                        .map(|w| vector_to_json(w).into_iter().enumerate().map(|(index, [re, im])| Row { index, re, im }).collect())
                        .unwrap_or_default();
                    write_out(opts, &csv_string(&rows)?)?;
                }
            }
        }
        ExportWhat::Sweep { symbol, k, windows } => {
            let phi = load_symbol(&symbol)?;
            let rows = operators::eigen_sweep(&phi, k as usize, &windows, tol)?;
            write_rows(opts, &rows, Format::Json)?;
        }
        ExportWhat::NonToeplitz { windows } => {
            let rows = windows
                .iter()
                .map(|&w| {
                    let r = operators::non_toeplitz_completion(w)?;
                    Ok(NonToeplitzRow {
                        window: w,
                        interior: r.interior,
                        residual: r.residual,
                        c_norm: r.c_norm,
                        toeplitz_defect: r.toeplitz_defect,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_rows(opts, &rows, Format::Json)?;
        }
    }
    Ok(EXIT_DECIDED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_list() {
        let z = parse_zeros("0, 0.5i ,-0.25").unwrap();
        assert_eq!(z, vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-0.25, 0.0)]);
        assert!(parse_zeros("z").is_err());
    }

    #[test]
    fn window_tags() {
        let mk = |verdict, exactness| PositivityReport { verdict, min_eigenvalue: 0.0, witness: None, window: 8, exactness };
        use blocktoeplitz::operators::Exactness::{Exact, TruncatedWithTail};
        assert_eq!(window_tag(&mk(PsdVerdict::Psd, Exact), 1), Tag::Hyponormal);
        assert_eq!(window_tag(&mk(PsdVerdict::Psd, TruncatedWithTail { bound: 1e-3 }), 1), Tag::ConsistentUpToWindow);
        assert_eq!(window_tag(&mk(PsdVerdict::Psd, Exact), 2), Tag::ConsistentUpToWindow);
        assert_eq!(window_tag(&mk(PsdVerdict::NotPsd, Exact), 1), Tag::NotHyponormal);
        assert_eq!(window_tag(&mk(PsdVerdict::NotPsd, Exact), 3), Tag::NotKHyponormal);
        assert_eq!(window_tag(&mk(PsdVerdict::Marginal, Exact), 2), Tag::Marginal);
    }

    #[test]
    fn csv_is_stable() {
        #[derive(Serialize)]
        struct R {
            a: usize,
            b: Option<f64>,
        }
        let s = csv_string(&[R { a: 1, b: None }, R { a: 2, b: Some(0.5) }]).unwrap();
        assert_eq!(s, "a,b\n1,\n2,0.5\n");
    }
}
