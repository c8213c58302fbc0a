use serde::{Deserialize, Serialize};

/// Numeric tolerances shared across the library.
///
/// Every operation that compares floating-point quantities against an exact
/// geometric condition reads its slack from here, so a caller can tighten or
/// loosen all checks from one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// How far a gauge value may be from 1 for a point to count as a boundary point.
    pub boundary: f64,
    /// LP feasibility and generic numeric slack.
    pub numeric: f64,
    /// Slack on the gauge value 2 that defines touching translates.
    pub touch: f64,
    /// Slack on interval membership in the pair-system conditions.
    pub interval: f64,
    /// Slack on vector equality (`x_j = -x_i`, `f_j = -f_i`).
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary: 1e-6,
            numeric: 1e-9,
            touch: 1e-7,
            interval: 1e-9,
            equality: 1e-7,
        }
    }
}
