use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("point {re}+{im}i lies outside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("denominator vanishes in the closed unit disk (pole modulus {modulus})")]
    PoleInDisk { modulus: f64 },

    #[error("not a co-analytic part: {0}")]
    NotCoanalytic(String),

    #[error("coprime reduction failed: {0}")]
    CoprimeReduction(String),

    #[error("symbol is not analytic (has coefficient at degree {0})")]
    NotAnalytic(i32),

    #[error("quadrature did not converge: last grid change {change:e} at {points} points")]
    Quadrature { change: f64, points: usize },

    #[error("C(Φ) is empty: interpolation system inconsistent at node {node} (residual {residual:e})")]
    EmptyC { node: usize, residual: f64 },

    #[error("window too small: {0}")]
    Window(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("THEOREM-VIOLATION: {0}")]
    TheoremViolation(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
