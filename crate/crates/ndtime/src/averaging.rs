//! Pairwise averaging and its matrix form.
//!
//! Replacing two entries of a probability vector by their midpoint never
//! increases the expected discovery time, so iterating the replacement walks
//! the expectation down toward the equal-entry case, where the harmonic
//! lower bound is met with equality. One full pass of disjoint midpoint
//! replacements is a doubly stochastic matrix; composing an aligned pass
//! (pairs starting at element 0) with a shifted pass (pairs starting at
//! element 1) couples every element to its neighbors, and powers of the
//! composite drive any vector to the all-mean vector.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectation::expected_discovery_time;
use crate::model::{NeighborPair, ProbabilityVector};
use crate::numeric::CompensatedSum;

/// Dense square matrix describing one full averaging pass (or a product of
/// passes). Entries are dyadic rationals, so construction is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMatrix {
    entries: Vec<f64>,
    n: usize,
}

impl SweepMatrix {
    fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { entries, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    /// Rows as owned vectors, the layout [`is_doubly_stochastic`] accepts.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.n)
            .map(|row| row.to_vec())
            .collect()
    }

    /// Matrix product `self * other`. Both operands must have equal
    /// dimension; sweeps of different sizes cannot meet in one expression.
    pub fn multiply(&self, other: &SweepMatrix) -> SweepMatrix {
        assert_eq!(self.n, other.n, "sweep dimensions must match");
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        SweepMatrix { entries, n }
    }

    /// `self^exponent`; the zeroth power is the identity.
    pub fn power(&self, exponent: u32) -> SweepMatrix {
        let mut result = SweepMatrix::identity(self.n);
        for _ in 0..exponent {
            result = result.multiply(self);
        }
        result
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "vector length must match dimension");
        (0..self.n)
            .map(|i| {
                let row = &self.entries[i * self.n..(i + 1) * self.n];
                row.iter().zip(v).map(|(&a, &x)| a * x).sum()
            })
            .collect()
    }

    /// Largest |entry - reference| over all positions against a constant
    /// reference matrix; used to measure distance from the rank-one limit.
    pub fn max_distance_from_constant(&self, reference: f64) -> f64 {
        self.entries
            .iter()
            .map(|&e| (e - reference).abs())
            .fold(0.0, f64::max)
    }
}

/// Identity matrix with one 2x2 block replaced by the averaging block
/// `[[1/2, 1/2], [1/2, 1/2]]`. `block` is 1-based; the block's top-left
/// corner sits at element `2*block - 2` (aligned) or `2*block - 1`
/// (shifted), 0-based.
pub fn block_average_matrix(n: usize, block: usize, shifted: bool) -> Result<SweepMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    if block < 1 {
        return Err(Error::BlockOutOfRange { block, n });
    }
    let start = if shifted {
        2 * block - 1
    } else {
        2 * block - 2
    };
    if start + 1 >= n {
        return Err(Error::BlockOutOfRange { block, n });
    }
    let mut m = SweepMatrix::identity(n);
    for row in [start, start + 1] {
        for col in [start, start + 1] {
            m.entries[row * n + col] = 0.5;
        }
    }
    Ok(m)
}

/// Identity with averaging blocks at every listed 0-based start position.
/// Equal to the product of the corresponding single-block matrices because
/// the blocks are disjoint.
fn place_blocks(n: usize, starts: impl Iterator<Item = usize>) -> SweepMatrix {
    let mut m = SweepMatrix::identity(n);
    for start in starts {
        debug_assert!(start + 1 < n);
        for row in [start, start + 1] {
            for col in [start, start + 1] {
                m.entries[row * n + col] = 0.5;
            }
        }
    }
    m
}

/// Builds the two half-passes and their composite:
///
/// * aligned pass: midpoint blocks on pairs (0,1), (2,3), ...
/// * shifted pass: midpoint blocks on pairs (1,2), (3,4), ...
/// * full sweep: shifted applied after aligned.
///
/// For odd n each pass holds (n-1)/2 blocks and leaves one end element to
/// its own pass. For even n the aligned pass covers all n/2 pairs and the
/// shifted pass holds n/2 - 1 interior blocks.
pub fn build_sweep(n: usize) -> Result<(SweepMatrix, SweepMatrix, SweepMatrix)> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let aligned_blocks = n / 2;
    let shifted_blocks = if n.is_multiple_of(2) {
        n / 2 - 1
    } else {
        (n - 1) / 2
    };
    let aligned = place_blocks(n, (0..aligned_blocks).map(|b| 2 * b));
    let shifted = place_blocks(n, (0..shifted_blocks).map(|b| 2 * b + 1));
    let sweep = shifted.multiply(&aligned);
    Ok((aligned, shifted, sweep))
}

/// True iff every entry is at least `-tol` and every row and column sum is
/// within `tol` of 1.
pub fn is_doubly_stochastic(matrix: &[Vec<f64>], tol: f64) -> Result<bool> {
    let n = matrix.len();
    for (row, values) in matrix.iter().enumerate() {
        if values.len() != n {
            return Err(Error::NotSquare {
                row,
                cols: values.len(),
                expected: n,
            });
        }
    }
    for values in matrix {
        if values.iter().any(|&e| e < -tol) {
            return Ok(false);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Ok(false);
        }
    }
    for col in 0..n {
        let sum: f64 = matrix.iter().map(|row| row[col]).sum();
        if (sum - 1.0).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Returns a copy of `p` with both pair positions holding the pair's
/// midpoint; every other position is untouched.
pub fn pair_average(p: &ProbabilityVector, pair: NeighborPair) -> Result<ProbabilityVector> {
    p.check_pair(pair)?;
    let mut values = p.values().to_vec();
    let mid = 0.5 * (values[pair.j] + values[pair.k]);
    values[pair.j] = mid;
    values[pair.k] = mid;
    Ok(ProbabilityVector::new(values).expect("midpoint of entries in (0, 1] stays in (0, 1]"))
}

/// Expectation before and after one midpoint replacement. The after value
/// never exceeds the before value (up to rounding); tests assert it.
pub fn averaged_expected_time(p: &ProbabilityVector, pair: NeighborPair) -> Result<(f64, f64)> {
    let before = expected_discovery_time(p)?.value;
    let after = expected_discovery_time(&pair_average(p, pair)?)?.value;
    Ok((before, after))
}

/// Outcome of repeated sweeps: how many were needed, where the vector ended
/// up, and the per-sweep distance from the known limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    /// Sweeps applied.
    pub iterations: usize,
    /// Vector after the last sweep.
    #[serde(rename = "final")]
    pub final_values: Vec<f64>,
    /// Max-norm distance of the final vector from the all-mean vector.
    pub max_deviation: f64,
    /// Mean of the input, which every sweep preserves; the limit is the
    /// constant vector at this value.
    pub mean: f64,
    /// Max-norm deviation before any sweep and after each one;
    /// `history.len() == iterations + 1`.
    pub history: Vec<f64>,
}

/// Applies the full sweep until the vector is within `tol` (max-norm) of the
/// constant vector at its mean, which mean preservation makes the only
/// possible limit. Works on any finite real vector, not only probabilities.
pub fn iterate_average(values: &[f64], tol: f64, max_iters: usize) -> Result<ConvergenceTrace> {
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::ArgOutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let n = values.len();
    let mut mean_sum = CompensatedSum::default();
    for &v in values {
        mean_sum.add(v);
    }
    let mean = mean_sum.total() / n as f64;
    let deviation = |v: &[f64]| v.iter().map(|&x| (x - mean).abs()).fold(0.0, f64::max);

    let mut current = values.to_vec();
    let mut history = vec![deviation(&current)];
    if n == 1 || history[0] <= tol {
        return Ok(ConvergenceTrace {
            iterations: 0,
            final_values: current,
            max_deviation: history[0],
            mean,
            history,
        });
    }

    let (_, _, sweep) = build_sweep(n)?;
    for iteration in 1..=max_iters {
        current = sweep.apply(&current);
        let dev = deviation(&current);
        history.push(dev);
        if dev <= tol {
            return Ok(ConvergenceTrace {
                iterations: iteration,
                final_values: current,
                max_deviation: dev,
                mean,
                history,
            });
        }
    }
    let max_deviation = *history.last().expect("history is non-empty");
    Err(Error::NoConvergence {
        tol,
        max_iters,
        trace: Box::new(ConvergenceTrace {
            iterations: max_iters,
            final_values: current,
            max_deviation,
            mean,
            history,
        }),
    })
}
