//! Lower bound on the expected discovery time: `H_n / mean(p)`, where `H_n`
//! is the n-th harmonic number. Equality holds exactly when all entries are
//! equal, which makes the gap a measure of probability imbalance.

use serde::Serialize;

use crate::expectation::{expected_discovery_time_capped, DEFAULT_MAX_EXACT_N};
use crate::model::ProbabilityVector;
use crate::numeric::CompensatedSum;

/// The bound, its ingredients, and (when the neighbor count permits exact
/// enumeration) the exact expectation alongside the gap to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// H_n for the node's neighbor count.
    pub harmonic: f64,
    /// Arithmetic mean of the probability entries.
    pub mean_probability: f64,
    /// harmonic / mean_probability.
    pub bound: f64,
    /// Exact expectation, absent when n exceeds the enumeration cap.
    pub exact: Option<f64>,
    /// exact - bound; never clamped, so a genuinely negative gap is visible.
    pub gap: Option<f64>,
}

/// n-th harmonic number by direct summation, smallest term first so the
/// partial sums grow monotonically and rounding stays at a few ulps.
pub fn harmonic_number(n: usize) -> f64 {
    assert!(n >= 1, "harmonic_number requires n >= 1");
    let mut sum = CompensatedSum::default();
    for k in (1..=n).rev() {
        sum.add(1.0 / k as f64);
    }
    sum.total()
}

/// Computes the lower bound `H_n / mean(p)`. The bound itself never fails;
/// the exact expectation is filled in only when `n` is within the default
/// enumeration cap.
pub fn lower_bound(p: &ProbabilityVector) -> BoundReport {
    lower_bound_capped(p, DEFAULT_MAX_EXACT_N)
}

/// [`lower_bound`] with an explicit enumeration cap for the exact field.
pub fn lower_bound_capped(p: &ProbabilityVector, cap: usize) -> BoundReport {
    let n = p.len();
    let mut sum = CompensatedSum::default();
    for &v in p.values() {
        sum.add(v);
    }
    let mean_probability = sum.total() / n as f64;
    let harmonic = harmonic_number(n);
    let bound = harmonic / mean_probability;
    let exact = expected_discovery_time_capped(p, cap)
        .ok()
        .map(|report| report.value);
    let gap = exact.map(|e| e - bound);
    BoundReport {
        harmonic,
        mean_probability,
        bound,
        exact,
        gap,
    }
}
