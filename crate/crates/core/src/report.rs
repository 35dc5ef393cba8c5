//! Serializable reports emitted by the command-line front end.
//!
//! Exact quantities are always `"num/den"` strings (big integers are plain
//! decimal strings); every exact value is accompanied by a 12-digit decimal
//! rendering. The JSON schemas under `schema/` describe these structures.

use serde::{Deserialize, Serialize};

use crate::counting::{to_decimal, ratio_string, ExactRatio, PochhammerEnclosure, POCHHAMMER_DIGITS};

/// Significant digits of the human-readable decimal renderings.
pub const DECIMAL_DIGITS: usize = 12;

pub fn decimal(x: &ExactRatio) -> String {
    to_decimal(x, DECIMAL_DIGITS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub q: u64,
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub ell: usize,
    pub partition: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PochhammerInfo {
    pub q: u64,
    pub terms: u32,
    /// Partial product, 30 significant digits.
    pub value: String,
    pub lower: String,
    pub upper: String,
}

impl From<&PochhammerEnclosure> for PochhammerInfo {
    fn from(e: &PochhammerEnclosure) -> Self {
        PochhammerInfo {
            q: e.q,
            terms: e.terms,
            value: to_decimal(&e.partial, POCHHAMMER_DIGITS),
            lower: to_decimal(&e.lower, POCHHAMMER_DIGITS),
            upper: to_decimal(e.upper(), POCHHAMMER_DIGITS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateInfo {
    pub hits: u64,
    pub trials: u64,
    pub estimate: String,
    pub estimate_decimal: String,
    pub stderr: f64,
    /// `|estimate - exact|` as a decimal.
    pub abs_error: String,
}

/// One scenario with its exact probability, bounds, and optional
/// simulation and enumeration results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: ScenarioInfo,
    pub exact: String,
    pub exact_decimal: String,
    pub lower_bound: String,
    pub lower_bound_decimal: String,
    pub is_extremal: bool,
    pub corollary_bound: String,
    pub corollary_bound_decimal: String,
    pub pochhammer: PochhammerInfo,
    pub estimate: Option<EstimateInfo>,
    pub oracle: Option<String>,
    pub oracle_agrees: Option<bool>,
    pub timestamp: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub m: usize,
    pub n: Option<usize>,
    pub t: usize,
    /// `Q_t(q^m)`.
    pub q_t_of_q_m: String,
    /// `Q_t(q^n)`, also the number of matrices with a fixed `t`-dim column space.
    pub q_t_of_q_n: Option<String>,
    /// `Q_t(q^t)`, the order of `GL_t(F_q)`.
    pub q_t_of_q_t: String,
    pub gaussian_binomial: String,
    pub count_rank_t: Option<String>,
    pub subspaces: Option<String>,
    pub oracle_count_rank_t: Option<String>,
    pub oracle_subspaces: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub partition: Vec<usize>,
    pub exact: String,
    pub exact_decimal: String,
    pub lower_bound: String,
    pub is_extremal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub q: u64,
    pub n: usize,
    pub ell: usize,
    pub t: usize,
    /// Sorted by exact probability, ascending; ties in lexicographic order.
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub q: u64,
    pub ell: usize,
    pub pentagonal_lower_bound: String,
    pub pentagonal_lower_bound_decimal: String,
    pub corollary_bound: String,
    pub corollary_bound_decimal: String,
    pub pochhammer: PochhammerInfo,
    /// `ell <= q - 1`, where the probability is known to exceed 1/4.
    pub quarter_threshold: bool,
}

/// Render a partition as `(a,b,c)`.
pub fn partition_label(parts: &[usize]) -> String {
    let inner: Vec<_> = parts.iter().map(|p| p.to_string()).collect();
    format!("({})", inner.join(","))
}

pub(crate) fn exact_pair(x: &ExactRatio) -> (String, String) {
    (ratio_string(x), decimal(x))
}
