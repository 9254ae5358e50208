use std::fmt;

use serde::{Deserialize, Serialize};

/// What a reported number is allowed to be used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    Lower,
    Upper,
    MonteCarlo,
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateKind::Exact => "exact",
            EstimateKind::Lower => "lower",
            EstimateKind::Upper => "upper",
            EstimateKind::MonteCarlo => "monte_carlo",
        })
    }
}

/// A nonnegative value tagged with how it was obtained.
///
/// Only `Lower` values may be compared against `Upper`/`Exact` ones (plus a
/// Monte Carlo margin where relevant); two lower bounds say nothing about each
/// other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub stderr: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub meta: String,
}

impl NormEstimate {
    fn tagged(value: f64, kind: EstimateKind, meta: impl Into<String>) -> Self {
        debug_assert!(value >= 0.0 || value.is_nan(), "negative norm estimate {value}");
        NormEstimate { value: value.max(0.0), kind, stderr: 0.0, meta: meta.into() }
    }

    pub fn exact(value: f64, meta: impl Into<String>) -> Self {
        Self::tagged(value, EstimateKind::Exact, meta)
    }

    pub fn lower(value: f64, meta: impl Into<String>) -> Self {
        Self::tagged(value, EstimateKind::Lower, meta)
    }

    pub fn upper(value: f64, meta: impl Into<String>) -> Self {
        Self::tagged(value, EstimateKind::Upper, meta)
    }

    pub fn monte_carlo(value: f64, stderr: f64, meta: impl Into<String>) -> Self {
        NormEstimate { stderr: stderr.max(0.0), ..Self::tagged(value, EstimateKind::MonteCarlo, meta) }
    }

    pub fn is_exact(&self) -> bool {
        self.kind == EstimateKind::Exact
    }

    /// Usable as an upper bound: exact or upper.
    pub fn bounds_above(&self) -> bool {
        matches!(self.kind, EstimateKind::Exact | EstimateKind::Upper)
    }

    /// Usable as a lower bound: exact or lower.
    pub fn bounds_below(&self) -> bool {
        matches!(self.kind, EstimateKind::Exact | EstimateKind::Lower)
    }

    /// `value + k·stderr`; equals `value` for non-Monte-Carlo kinds.
    pub fn upper_margin(&self, k: f64) -> f64 {
        self.value + k * self.stderr
    }
}

impl fmt::Display for NormEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EstimateKind::MonteCarlo => write!(f, "{:.10} ± {:.2e} (monte_carlo)", self.value, self.stderr),
            kind => write!(f, "{:.10} ({kind})", self.value),
        }
    }
}
