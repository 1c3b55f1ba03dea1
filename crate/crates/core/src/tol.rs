use serde::{Deserialize, Serialize};

/// Numeric thresholds shared by the decision procedures.
///
/// The defaults are the values every verdict in the test-suite is pinned to;
/// the CLI exposes the PSD and contractivity thresholds as overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative dead-zone for PSD: `λ_min ≥ -psd_rel·(1+‖X‖)` counts as PSD.
    pub psd_rel: f64,
    /// Absolute cutoff below which a minimum eigenvalue certifies NotPSD.
    pub psd_neg: f64,
    /// `σ_max(K(M)) ≤ 1 + contract` counts as contractive.
    pub contract: f64,
    /// `σ_max` in `(1+contract, 1+contract_marginal)` is marginal.
    pub contract_marginal: f64,
    /// Numerical rank threshold for defect and self-commutator ranks.
    pub rank: f64,
    /// Coefficientwise threshold for symbol normality.
    pub normal: f64,
    /// Minimum singular value for invertibility at Blaschke zeros.
    pub coprime: f64,
    /// Threshold on negative-degree coefficients in membership checks.
    pub membership: f64,
    /// Entry threshold for window exactness (doubling test).
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_rel: 1e-9,
            psd_neg: 1e-6,
            contract: 1e-9,
            contract_marginal: 1e-6,
            rank: 1e-8,
            normal: 1e-9,
            coprime: 1e-9,
            membership: 1e-9,
            exact: 1e-11,
        }
    }
}
