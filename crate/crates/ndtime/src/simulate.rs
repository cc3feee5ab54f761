//! Monte Carlo estimation of the discovery-completion time.
//!
//! Each replication draws one waiting time per neighbor and records the
//! latest one. Replication `r` seeds its own generator from `(seed, r)`, so
//! the sample depends only on the arguments, never on scheduling: runs are
//! bit-identical across repeats and across any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ProbabilityVector, TimeModel};
use crate::numeric::CompensatedSum;

/// Fewest replications for which the normal-approximation interval is
/// defensible.
pub const MIN_REPS: u64 = 100;

/// Hard cap on slots within one slotted replication; hit only for
/// probabilities far below anything a real protocol would use.
pub const SLOT_BUDGET: u64 = 1_000_000_000;

/// Replications per parallel work unit. Fixed so the grouping, and with it
/// the exact summation order, never depends on the thread count.
const CHUNK: u64 = 4096;

/// Sample statistics from one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub mean: f64,
    pub std_error: f64,
    /// mean - 1.96 * std_error.
    pub ci95_low: f64,
    /// mean + 1.96 * std_error.
    pub ci95_high: f64,
    pub reps: u64,
    pub model: TimeModel,
    pub seed: u64,
}

/// One replication: the time at which the last neighbor is discovered.
/// Exponential draws by inversion of the survival function; slotted draws
/// by inversion of the geometric CDF, so no per-slot loop is needed.
fn replicate(values: &[f64], model: TimeModel, base: &ChaCha8Rng, rep: u64) -> Result<f64> {
    let mut rng = base.clone();
    rng.set_stream(rep);
    match model {
        TimeModel::ContinuousExponential => {
            let mut last: f64 = 0.0;
            for &rate in values {
                let u: f64 = rng.random();
                last = last.max(-(-u).ln_1p() / rate);
            }
            Ok(last)
        }
        TimeModel::SlottedGeometric => {
            let mut last: f64 = 0.0;
            for &prob in values {
                let u: f64 = rng.random();
                let slot = if prob == 1.0 {
                    1.0
                } else {
                    ((-u).ln_1p() / (-prob).ln_1p()).floor() + 1.0
                };
                if slot > SLOT_BUDGET as f64 {
                    return Err(Error::SlotBudgetExceeded { cap: SLOT_BUDGET });
                }
                last = last.max(slot);
            }
            Ok(last)
        }
    }
}

/// Estimates the expected discovery-completion time from `reps` independent
/// replications. Identical arguments give byte-identical reports regardless
/// of how many threads the run is spread over.
pub fn simulate_discovery(
    p: &ProbabilityVector,
    model: TimeModel,
    reps: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if reps < MIN_REPS {
        return Err(Error::TooFewReps {
            reps,
            min: MIN_REPS,
        });
    }
    let values = p.values();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = reps.div_ceil(CHUNK);

    // Each chunk accumulates its replications in index order; the chunk
    // partials are then folded in index order below. Both stages are fixed,
    // so parallelism never changes a single bit of the result.
    let partials: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let first = chunk * CHUNK;
            let last = (first + CHUNK).min(reps);
            let mut sum = CompensatedSum::default();
            let mut sum_sq = CompensatedSum::default();
            for rep in first..last {
                let t = replicate(values, model, &base, rep)?;
                sum.add(t);
                sum_sq.add(t * t);
            }
            Ok((sum.total(), sum_sq.total()))
        })
        .collect();

    let mut sum = CompensatedSum::default();
    let mut sum_sq = CompensatedSum::default();
    for partial in partials {
        let (s, s2) = partial?;
        sum.add(s);
        sum_sq.add(s2);
    }
    let total = sum.total();
    let total_sq = sum_sq.total();
    let count = reps as f64;
    let mean = total / count;
    // Clamped at zero: cancellation can push the numerator a hair negative
    // when every replication returns the same value.
    let variance = ((total_sq - total * total / count) / (count - 1.0)).max(0.0);
    let std_error = (variance / count).sqrt();
    Ok(SimulationReport {
        mean,
        std_error,
        ci95_low: mean - 1.96 * std_error,
        ci95_high: mean + 1.96 * std_error,
        reps,
        model,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(values: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn certain_discovery_has_no_spread() {
        let report =
            simulate_discovery(&vector(&[1.0]), TimeModel::SlottedGeometric, 500, 7).unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.std_error, 0.0);
        assert_eq!(report.ci95_low, 1.0);
        assert_eq!(report.ci95_high, 1.0);
    }

    #[test]
    fn too_few_reps_is_rejected() {
        assert_eq!(
            simulate_discovery(&vector(&[0.5]), TimeModel::ContinuousExponential, 99, 1),
            Err(Error::TooFewReps { reps: 99, min: 100 })
        );
    }

    #[test]
    fn exponential_mean_is_near_truth() {
        let report = simulate_discovery(
            &vector(&[0.5]),
            TimeModel::ContinuousExponential,
            100_000,
            42,
        )
        .unwrap();
        assert!(
            (report.mean - 2.0).abs() <= 3.0 * report.std_error,
            "mean {} se {}",
            report.mean,
            report.std_error
        );
        assert_eq!(report.ci95_low, report.mean - 1.96 * report.std_error);
        assert_eq!(report.ci95_high, report.mean + 1.96 * report.std_error);
    }

    #[test]
    fn slotted_mean_is_near_truth() {
        // Truth 8/3 for two equal coin-flip neighbors.
        let report = simulate_discovery(
            &vector(&[0.5, 0.5]),
            TimeModel::SlottedGeometric,
            100_000,
            42,
        )
        .unwrap();
        assert!((report.mean - 2.6666666666666665).abs() <= 3.0 * report.std_error);
    }

    #[test]
    fn repeat_runs_are_identical() {
        let p = vector(&[0.2, 0.5]);
        let a = simulate_discovery(&p, TimeModel::ContinuousExponential, 5_000, 11).unwrap();
        let b = simulate_discovery(&p, TimeModel::ContinuousExponential, 5_000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let p = vector(&[0.3, 0.7, 0.9]);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                simulate_discovery(&p, TimeModel::SlottedGeometric, 20_000, 99).unwrap()
            })
        };
        let serial = run(1);
        let parallel = run(4);
        assert_eq!(serial, parallel);
        assert_eq!(serial.mean.to_bits(), parallel.mean.to_bits());
        assert_eq!(serial.std_error.to_bits(), parallel.std_error.to_bits());
    }

    #[test]
    fn seeds_matter_and_are_recorded() {
        let p = vector(&[0.4]);
        let a = simulate_discovery(&p, TimeModel::ContinuousExponential, 1_000, 1).unwrap();
        let b = simulate_discovery(&p, TimeModel::ContinuousExponential, 1_000, 2).unwrap();
        assert_ne!(a.mean, b.mean);
        assert_eq!(a.seed, 1);
        assert_eq!(b.seed, 2);
    }

    #[test]
    fn slot_budget_guards_liveness() {
        let p = vector(&[1e-300]);
        assert_eq!(
            simulate_discovery(&p, TimeModel::SlottedGeometric, 100, 3),
            Err(Error::SlotBudgetExceeded { cap: SLOT_BUDGET })
        );
    }
}
