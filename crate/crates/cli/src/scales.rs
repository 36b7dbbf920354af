//! Conventional evidence scales. They are reported for orientation only;
//! the RB value and its strength are the actual evidence summaries.

use serde::Serialize;
use serde_json::Value;

pub const SCALES_HEADING: &str = "conventional scales (critiqued by the methodology)";

/// Royall's benchmark: parameter values whose likelihood is at least 1/8 of
/// the maximum.
pub const ROYALL_BENCHMARK: f64 = 0.125;

#[derive(Debug, Serialize)]
pub struct ConventionalScales {
    pub heading: &'static str,
    /// Jeffreys' label of each hypothesis' RB read as a Bayes factor.
    pub jeffreys: Vec<Option<String>>,
    pub royall_benchmark: f64,
    pub royall_region: Vec<Value>,
}

/// Jeffreys' half-decade labels; ratios below 1 are labelled by their
/// reciprocal with the direction appended.
pub fn jeffreys_label(ratio: f64) -> String {
    if ratio <= 0.0 {
        return "decisive (against)".into();
    }
    let (r, against) = if ratio < 1.0 { (1.0 / ratio, true) } else { (ratio, false) };
    let l = r.log10();
    let name = if l < 0.5 {
        "barely worth mentioning"
    } else if l < 1.0 {
        "substantial"
    } else if l < 1.5 {
        "strong"
    } else if l < 2.0 {
        "very strong"
    } else {
        "decisive"
    };
    if against && l > 0.0 {
        format!("{name} (against)")
    } else {
        name.to_string()
    }
}
