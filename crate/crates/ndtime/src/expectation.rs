//! Expected time until every neighbor has been discovered at least once.
//!
//! Three routes to the same quantity, kept deliberately independent so they
//! can cross-validate each other:
//!
//! * [`expected_discovery_time`]: exact alternating-series evaluation for the
//!   continuous model (each neighbor's waiting time exponential with rate
//!   `p_j`), enumerating every non-empty neighbor subset.
//! * [`expected_time_quadrature`]: adaptive numerical integration of the
//!   survival function `1 - prod_j (1 - e^{-p_j t})` over `[0, inf)`.
//! * [`slotted_expected_time`]: exact alternating series for the slotted
//!   model (each neighbor discovered at the first per-slot Bernoulli
//!   success), where subset denominators are `1 - prod(1 - p_j)` instead of
//!   `sum p_j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ProbabilityVector;
use crate::numeric::{
    for_each_gray_flip, for_each_subset_sum, gauss_legendre, CompensatedSum, TwoFloat,
};

/// Default cap on the neighbor count for subset enumeration (2^24 - 1 terms,
/// a few seconds of work). Callers with patience can raise it via the
/// `_capped` variants.
pub const DEFAULT_MAX_EXACT_N: usize = 24;

/// Hard ceiling on the cap itself: beyond 62 the subset index would not fit a
/// `u64`, and the runtime would be geological long before that.
const ABSOLUTE_MAX_EXACT_N: usize = 62;

/// Which route produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    InclusionExclusion,
    Quadrature,
    SlottedInclusionExclusion,
}

/// Result of one expectation computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport {
    /// Expected discovery-completion time, in slots or unit time.
    pub value: f64,
    /// Neighbor count.
    pub n: usize,
    pub method: Method,
    /// Series terms summed, or integrand evaluations spent.
    pub terms_evaluated: u64,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(ABSOLUTE_MAX_EXACT_N);
    if n > cap {
        return Err(Error::TooManyNeighbors { n, cap });
    }
    Ok(())
}

/// Expected time for a node to discover all `n` neighbors under the
/// continuous (exponential waiting time) model: the alternating sum over all
/// non-empty neighbor subsets `S` of `(-1)^{|S|+1} / sum_{j in S} p_j`.
///
/// Subsets are walked in Gray-code order so each step adjusts the running
/// subset sum by a single element; the running sum is kept in double-double
/// precision and the alternating series is accumulated with compensated
/// summation, so the result is independent of element order to well below
/// 1e-15 relative.
pub fn expected_discovery_time(p: &ProbabilityVector) -> Result<ExpectationReport> {
    expected_discovery_time_capped(p, DEFAULT_MAX_EXACT_N)
}

/// [`expected_discovery_time`] with an explicit enumeration cap.
pub fn expected_discovery_time_capped(
    p: &ProbabilityVector,
    cap: usize,
) -> Result<ExpectationReport> {
    let n = p.len();
    check_cap(n, cap)?;
    let mut acc = CompensatedSum::default();
    for_each_subset_sum(p.values(), TwoFloat::new(0.0), |members, sum| {
        let term = 1.0 / sum;
        acc.add(if members % 2 == 1 { term } else { -term });
    });
    Ok(ExpectationReport {
        value: acc.total(),
        n,
        method: Method::InclusionExclusion,
        terms_evaluated: (1u64 << n) - 1,
    })
}

/// Expected completion time under the slotted model, where neighbor `j` is
/// discovered at the first success of per-slot Bernoulli(`p_j`) trials.
///
/// Same alternating series over neighbor subsets, but each denominator is
/// the per-slot probability that at least one subset member is heard:
/// `1 - prod_{j in S} (1 - p_j)`.
pub fn slotted_expected_time(p: &ProbabilityVector) -> Result<ExpectationReport> {
    slotted_expected_time_capped(p, DEFAULT_MAX_EXACT_N)
}

/// [`slotted_expected_time`] with an explicit enumeration cap.
pub fn slotted_expected_time_capped(
    p: &ProbabilityVector,
    cap: usize,
) -> Result<ExpectationReport> {
    let n = p.len();
    check_cap(n, cap)?;
    // Work in log space: the subset product prod(1 - p_j) is tracked as a
    // running sum of ln(1 - p_j), and the denominator recovered through
    // -expm1, which stays accurate when the product is close to 1 (all
    // probabilities small). Entries with p = 1 would contribute ln(0); they
    // are counted separately, and any subset containing one has denominator
    // exactly 1.
    let values = p.values();
    let logs: Vec<f64> = values.iter().map(|&v| (-v).ln_1p()).collect();
    let mut log_sum = TwoFloat::new(0.0);
    let mut certain_members = 0u32;
    let mut acc = CompensatedSum::default();
    for_each_gray_flip(n, |bit, added, members| {
        if values[bit] == 1.0 {
            if added {
                certain_members += 1;
            } else {
                certain_members -= 1;
            }
        } else if added {
            log_sum.add(logs[bit]);
        } else {
            log_sum.sub(logs[bit]);
        }
        let denom = if certain_members > 0 {
            1.0
        } else {
            -log_sum.value().exp_m1()
        };
        let term = 1.0 / denom;
        acc.add(if members % 2 == 1 { term } else { -term });
    });
    Ok(ExpectationReport {
        value: acc.total(),
        n,
        method: Method::SlottedInclusionExclusion,
        terms_evaluated: (1u64 << n) - 1,
    })
}

/// Integrand evaluations allowed per quadrature call.
const QUADRATURE_BUDGET: u64 = 20_000_000;
/// Initial uniform split of the truncated range, refined adaptively.
const INITIAL_PANELS: usize = 16;
/// Recursion floor; panels this deep are narrower than any feature the
/// smooth, monotone integrand can have.
const MAX_DEPTH: u32 = 60;

struct AdaptiveQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    evaluations: u64,
}

impl AdaptiveQuadrature {
    fn new() -> Self {
        let (nodes, weights) = gauss_legendre(15);
        Self {
            nodes,
            weights,
            evaluations: 0,
        }
    }

    fn panel<F: Fn(f64) -> f64>(&mut self, g: &F, a: f64, b: f64) -> Result<f64> {
        self.evaluations += self.nodes.len() as u64;
        if self.evaluations > QUADRATURE_BUDGET {
            return Err(Error::QuadratureBudgetExhausted {
                evaluations: self.evaluations,
            });
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * g(mid + half * x);
        }
        Ok(half * sum)
    }

    /// Accepts `[a, b]` when the two-half estimate agrees with the
    /// whole-panel estimate within `eps`, otherwise recurses with half the
    /// tolerance on each side.
    fn refine<F: Fn(f64) -> f64>(
        &mut self,
        g: &F,
        a: f64,
        b: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let left = self.panel(g, a, mid)?;
        let right = self.panel(g, mid, b)?;
        let refined = left + right;
        if (refined - whole).abs() <= eps || depth >= MAX_DEPTH {
            return Ok(refined);
        }
        let finer_left = self.refine(g, a, mid, left, 0.5 * eps, depth + 1)?;
        let finer_right = self.refine(g, mid, b, right, 0.5 * eps, depth + 1)?;
        Ok(finer_left + finer_right)
    }
}

/// Survival probability that discovery is still incomplete at time `t`:
/// `1 - prod_j (1 - e^{-p_j t})`, evaluated in log space for stability.
fn survival(p: &[f64], t: f64) -> f64 {
    let mut log_product = 0.0;
    for &rate in p {
        log_product += (-(-rate * t).exp()).ln_1p();
    }
    -log_product.exp_m1()
}

/// Independent numerical route to [`expected_discovery_time`]: integrates the
/// survival function over `[0, T]` with adaptive Gauss-Legendre panels, `T`
/// chosen so the discarded tail is provably below the requested tolerance.
///
/// `rel_tol` must lie in `(0, 1e-3]`; the result agrees with the exact series
/// within `rel_tol` relative.
pub fn expected_time_quadrature(p: &ProbabilityVector, rel_tol: f64) -> Result<ExpectationReport> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::ArgOutOfRange {
            name: "rel_tol",
            value: rel_tol,
            range: "(0, 1e-3]",
        });
    }
    let values = p.values();
    let n = values.len() as f64;
    let p_min = p.min();
    let p_max = p.max();
    // The expectation is at least the time to hear the loudest neighbor
    // alone, so 1/p_max is a valid stand-in for the unknown result when
    // converting the relative tolerance to absolute targets.
    let floor = 1.0 / p_max;
    // Tail bound: the integrand is at most sum_j e^{-p_j t} <= n e^{-p_min t},
    // so cutting at T leaves less than (n / p_min) e^{-p_min T}, which this
    // choice of T pins to rel_tol * floor / 4.
    let cutoff = (4.0 * n / (p_min * rel_tol * floor)).ln() / p_min;
    let abs_tol = 0.5 * rel_tol * floor;

    let g = |t: f64| survival(values, t);
    let mut quad = AdaptiveQuadrature::new();
    let mut total = CompensatedSum::default();
    let width = cutoff / INITIAL_PANELS as f64;
    let panel_tol = abs_tol / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let a = i as f64 * width;
        let b = if i + 1 == INITIAL_PANELS {
            cutoff
        } else {
            (i + 1) as f64 * width
        };
        let whole = quad.panel(&g, a, b)?;
        total.add(quad.refine(&g, a, b, whole, panel_tol, 0)?);
    }
    Ok(ExpectationReport {
        value: total.total(),
        n: values.len(),
        method: Method::Quadrature,
        terms_evaluated: quad.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(values: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(values.to_vec()).unwrap()
    }

    fn assert_close(actual: f64, expected: f64, rel: f64) {
        let scale = expected.abs().max(1.0);
        assert!(
            (actual - expected).abs() <= rel * scale,
            "expected {expected}, got {actual} (rel {rel})"
        );
    }

    #[test]
    fn single_neighbor_is_reciprocal() {
        let report = expected_discovery_time(&vector(&[0.5])).unwrap();
        assert_eq!(report.value, 2.0);
        assert_eq!(report.terms_evaluated, 1);
        assert_eq!(report.method, Method::InclusionExclusion);
    }

    #[test]
    fn two_neighbor_value() {
        // 1/0.2 + 1/0.5 - 1/0.7
        let report = expected_discovery_time(&vector(&[0.2, 0.5])).unwrap();
        assert_close(report.value, 5.571428571428571, 1e-15);
        assert_eq!(report.terms_evaluated, 3);
    }

    #[test]
    fn equal_probability_case() {
        // (1 + 1/2 + 1/3) / 0.5
        let report = expected_discovery_time(&vector(&[0.5, 0.5, 0.5])).unwrap();
        assert_close(report.value, 3.6666666666666665, 1e-15);
        assert_eq!(report.terms_evaluated, 7);
    }

    #[test]
    fn cap_is_enforced() {
        let p = vector(&[0.5; 5]);
        assert_eq!(
            expected_discovery_time_capped(&p, 4),
            Err(Error::TooManyNeighbors { n: 5, cap: 4 })
        );
        assert!(expected_discovery_time_capped(&p, 5).is_ok());
    }

    #[test]
    fn quadrature_single_neighbor() {
        let report = expected_time_quadrature(&vector(&[0.5]), 1e-9).unwrap();
        assert!((report.value - 2.0).abs() <= 2e-9, "{}", report.value);
        assert_eq!(report.method, Method::Quadrature);
    }

    #[test]
    fn quadrature_matches_series() {
        let report = expected_time_quadrature(&vector(&[0.2, 0.5]), 1e-9).unwrap();
        assert!((report.value - 5.571428571428571).abs() <= 6e-9);
        let report = expected_time_quadrature(&vector(&[0.5, 0.5, 0.5]), 1e-9).unwrap();
        assert!((report.value - 3.6666666666666665).abs() <= 4e-9);
    }

    #[test]
    fn quadrature_rejects_bad_tolerance() {
        let p = vector(&[0.5]);
        assert!(matches!(
            expected_time_quadrature(&p, 0.0),
            Err(Error::ArgOutOfRange {
                name: "rel_tol",
                ..
            })
        ));
        assert!(matches!(
            expected_time_quadrature(&p, 1e-2),
            Err(Error::ArgOutOfRange {
                name: "rel_tol",
                ..
            })
        ));
    }

    #[test]
    fn slotted_certain_discovery() {
        let report = slotted_expected_time(&vector(&[1.0])).unwrap();
        assert_eq!(report.value, 1.0);
        assert_eq!(report.method, Method::SlottedInclusionExclusion);
    }

    #[test]
    fn slotted_single_neighbor() {
        let report = slotted_expected_time(&vector(&[0.5])).unwrap();
        assert_close(report.value, 2.0, 1e-15);
    }

    #[test]
    fn slotted_pair_value() {
        // 2 + 2 - 1/0.75
        let report = slotted_expected_time(&vector(&[0.5, 0.5])).unwrap();
        assert_close(report.value, 2.6666666666666665, 1e-14);
    }

    #[test]
    fn slotted_mixes_certain_and_uncertain() {
        // With p = [1.0, 0.5] every subset containing the certain neighbor
        // has denominator 1: E = 1 + 2 - 1 = 2 (the geometric neighbor
        // dominates).
        let report = slotted_expected_time(&vector(&[1.0, 0.5])).unwrap();
        assert_close(report.value, 2.0, 1e-14);
    }

    #[test]
    fn slotted_differs_from_continuous() {
        // Not a general law, but for this instance the slotted expectation
        // is strictly smaller; pin the relationship so regressions surface.
        let p = vector(&[0.5, 0.5]);
        let slotted = slotted_expected_time(&p).unwrap().value;
        let continuous = expected_discovery_time(&p).unwrap().value;
        assert!(slotted < continuous);
        assert_close(continuous, 3.0, 1e-15);
    }

    #[test]
    fn survival_boundaries() {
        assert_eq!(survival(&[0.2, 0.5], 0.0), 1.0);
        let far = survival(&[0.2, 0.5], 1e4);
        assert!((0.0..1e-300).contains(&far));
    }
}
