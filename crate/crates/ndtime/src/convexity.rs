//! Split of the expected discovery time around one neighbor pair (j, k).
//!
//! Grouping the alternating series by whether a subset contains j, k, both,
//! or neither gives
//!
//! ```text
//! total = only_j(p_j) + only_k(p_k) + both + neither
//! ```
//!
//! where `only_j(x)` sums every term containing j but not k, with j's
//! probability replaced by the free variable `x`. That single-variable
//! function is convex on (0, 1] (its second derivative is non-negative),
//! which is what makes pairwise averaging a lower bound: moving `p_j` and
//! `p_k` to their midpoint can only decrease `only_j(p_j) + only_k(p_k)`,
//! and the other two groups do not depend on either entry.
//!
//! This module evaluates the pieces so tests can confirm the decomposition,
//! the convexity, and the non-negativity of the remaining-neighbor discovery
//! probability that appears in the derivative's integral form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectation::{expected_discovery_time_capped, DEFAULT_MAX_EXACT_N};
use crate::model::{NeighborPair, ProbabilityVector};
use crate::numeric::{for_each_subset_sum, CompensatedSum, TwoFloat};

/// The four term groups, their sum, and its distance from the directly
/// computed expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// Terms containing j's probability but not k's.
    pub only_j: f64,
    /// Terms containing k's probability but not j's.
    pub only_k: f64,
    /// Terms containing both.
    pub both: f64,
    /// Terms containing neither.
    pub neither: f64,
    /// `((only_j + only_k) + both) + neither`, in that association order.
    pub total: f64,
    /// `|total - expected_discovery_time(p)|`.
    pub residual: f64,
}

/// Probabilities of every neighbor other than the pair, in original order.
fn rest_of(p: &ProbabilityVector, pair: NeighborPair) -> Vec<f64> {
    p.values()
        .iter()
        .enumerate()
        .filter(|&(index, _)| index != pair.j && index != pair.k)
        .map(|(_, &v)| v)
        .collect()
}

/// Sum over all subsets R of `rest`, empty included, of
/// `(-1)^{|R|} * term(base + sum of R)`.
fn signed_sum_over_rest<F: Fn(f64) -> f64>(rest: &[f64], base: TwoFloat, term: F) -> f64 {
    let mut acc = CompensatedSum::default();
    acc.add(term(base.value()));
    for_each_subset_sum(rest, base, |members, sum| {
        let value = term(sum);
        acc.add(if members % 2 == 0 { value } else { -value });
    });
    acc.total()
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::ArgOutOfRange {
            name: "x",
            value: x,
            range: "(0, 1]",
        });
    }
    Ok(())
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::TooManyNeighbors { n, cap });
    }
    Ok(())
}

/// Sum of the expectation terms that include the pair's first neighbor and
/// exclude its second, as a function of the first one's probability `x`:
/// the sum over subsets R of the remaining neighbors (empty included) of
/// `(-1)^{|R|} / (x + sum of R)`.
///
/// Symmetric in the pair: swapping j and k leaves the remainder set, and
/// hence the value, unchanged.
pub fn exclusive_contribution(p: &ProbabilityVector, pair: NeighborPair, x: f64) -> Result<f64> {
    p.check_pair(pair)?;
    check_x(x)?;
    check_cap(p.len(), DEFAULT_MAX_EXACT_N)?;
    Ok(signed_sum_over_rest(
        &rest_of(p, pair),
        TwoFloat::new(x),
        |s| 1.0 / s,
    ))
}

/// Analytic second derivative of [`exclusive_contribution`] in `x`:
/// the sum over remainder subsets of `(-1)^{|R|} * 2 / (x + sum of R)^3`.
/// Non-negative on (0, 1], which is the convexity the averaging step needs.
pub fn exclusive_contribution_second_derivative(
    p: &ProbabilityVector,
    pair: NeighborPair,
    x: f64,
) -> Result<f64> {
    p.check_pair(pair)?;
    check_x(x)?;
    check_cap(p.len(), DEFAULT_MAX_EXACT_N)?;
    Ok(signed_sum_over_rest(
        &rest_of(p, pair),
        TwoFloat::new(x),
        |s| 2.0 / (s * s * s),
    ))
}

/// Probability that every neighbor other than the pair has been discovered
/// by time `t`: the product over remaining neighbors of `1 - e^{-p_r t}`.
///
/// The product form is manifestly within [0, 1]; its expansion as an
/// alternating sum over remainder subsets is what the tests compare against.
pub fn rest_discovery_probability(
    p: &ProbabilityVector,
    pair: NeighborPair,
    t: f64,
) -> Result<f64> {
    p.check_pair(pair)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::ArgOutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    let mut product = 1.0;
    for rate in rest_of(p, pair) {
        product *= -(-rate * t).exp_m1();
    }
    Ok(product)
}

/// Splits the expectation into the four pair-relative term groups and
/// reports how far their sum drifts from the directly computed value.
pub fn decompose_expectation(
    p: &ProbabilityVector,
    pair: NeighborPair,
) -> Result<DecompositionReport> {
    decompose_expectation_capped(p, pair, DEFAULT_MAX_EXACT_N)
}

/// [`decompose_expectation`] with an explicit enumeration cap.
pub fn decompose_expectation_capped(
    p: &ProbabilityVector,
    pair: NeighborPair,
    cap: usize,
) -> Result<DecompositionReport> {
    p.check_pair(pair)?;
    check_cap(p.len(), cap)?;
    let values = p.values();
    let rest = rest_of(p, pair);
    let p_j = values[pair.j];
    let p_k = values[pair.k];

    let only_j = signed_sum_over_rest(&rest, TwoFloat::new(p_j), |s| 1.0 / s);
    let only_k = signed_sum_over_rest(&rest, TwoFloat::new(p_k), |s| 1.0 / s);
    // A subset containing both pair members is {j, k} joined with R, so its
    // size has the opposite parity of |R|; the group enters with a leading
    // minus sign.
    let both = -signed_sum_over_rest(&rest, TwoFloat::sum2(p_j, p_k), |s| 1.0 / s);
    let neither = if rest.is_empty() {
        0.0
    } else {
        let mut acc = CompensatedSum::default();
        for_each_subset_sum(&rest, TwoFloat::new(0.0), |members, sum| {
            let term = 1.0 / sum;
            acc.add(if members % 2 == 1 { term } else { -term });
        });
        acc.total()
    };

    let total = ((only_j + only_k) + both) + neither;
    let direct = expected_discovery_time_capped(p, cap)?.value;
    Ok(DecompositionReport {
        only_j,
        only_k,
        both,
        neither,
        total,
        residual: (total - direct).abs(),
    })
}
