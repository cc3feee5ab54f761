//! Slow, obviously-correct reference implementations that the integration
//! tests compare the library against, plus seeded instance generators.
//! Everything here sticks to plain loops and plain f64 arithmetic on
//! purpose: no shared code paths with the crate under test.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Expected completion time by direct bitmask enumeration of the
/// alternating series, recomputing every subset sum from scratch.
pub fn naive_expected_time(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n <= 20, "oracle is exponential; keep instances small");
    let mut total = 0.0;
    for mask in 1u32..(1u32 << n) {
        let mut sum = 0.0;
        for (j, &v) in values.iter().enumerate() {
            if mask & (1 << j) != 0 {
                sum += v;
            }
        }
        if mask.count_ones() % 2 == 1 {
            total += 1.0 / sum;
        } else {
            total -= 1.0 / sum;
        }
    }
    total
}

/// Slotted-model expectation by the same direct enumeration, with each
/// denominator built from the plain product of (1 - p_j).
pub fn naive_slotted_time(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n <= 20, "oracle is exponential; keep instances small");
    let mut total = 0.0;
    for mask in 1u32..(1u32 << n) {
        let mut miss = 1.0;
        for (j, &v) in values.iter().enumerate() {
            if mask & (1 << j) != 0 {
                miss *= 1.0 - v;
            }
        }
        let term = 1.0 / (1.0 - miss);
        if mask.count_ones() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Probability that every listed neighbor is discovered by time `t`,
/// via the expanded alternating sum over non-empty subsets (the library
/// uses the product form instead).
pub fn expanded_rest_probability(rest: &[f64], t: f64) -> f64 {
    let n = rest.len();
    assert!(n <= 20);
    let mut undiscovered_any = 0.0;
    for mask in 1u32..(1u32 << n) {
        let mut product = 1.0;
        for (j, &v) in rest.iter().enumerate() {
            if mask & (1 << j) != 0 {
                product *= (-v * t).exp();
            }
        }
        if mask.count_ones() % 2 == 1 {
            undiscovered_any += product;
        } else {
            undiscovered_any -= product;
        }
    }
    1.0 - undiscovered_any
}

/// Dense matrix product, the textbook triple loop.
pub fn matrix_product(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut sum = 0.0;
            for k in 0..n {
                sum += a[i][k] * b[k][j];
            }
            out[i][j] = sum;
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Probability entries uniform in (0.01, 1].
pub fn random_entries(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 1.0 - rng.random::<f64>() * 0.99).collect()
}

/// Two distinct indices below `n`.
pub fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    assert!(n >= 2);
    let j = rng.random_range(0..n);
    let mut k = rng.random_range(0..n - 1);
    if k >= j {
        k += 1;
    }
    (j, k)
}
