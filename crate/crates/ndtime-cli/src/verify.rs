//! The `verify` subcommand: numerical sweeps of the library's structural
//! guarantees over randomly generated instances.
//!
//! Four checks run, each reported as one row:
//!
//! * `curvature_nonnegative` — the second derivative of a pair's exclusive
//!   contribution stays above `-1e-12` across a grid on `(0, 1]`; `worst`
//!   is the smallest value seen.
//! * `rest_probability_nonnegative` — the probability that every neighbor
//!   outside a pair has been heard by time `t` stays above `-1e-15` on a
//!   time grid; `worst` is the smallest value seen.
//! * `decomposition_residual` — regrouping the expectation by a pair's
//!   membership reproduces the ungrouped value to a relative `1e-12`;
//!   `worst` is the largest relative residual.
//! * `doubly_stochastic_sweep` — the averaging matrices (aligned, shifted,
//!   and powers of their product) each have nonnegative entries and unit
//!   row/column sums to `1e-12`; `worst` is the largest deviation.
//!
//! The exit code is 0 when every check is clean and 2 when any point
//! violates its threshold.

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ndtime::{
    build_sweep, decompose_expectation, exclusive_contribution_second_derivative,
    is_doubly_stochastic, rest_discovery_probability, NeighborPair, ProbabilityVector, SweepMatrix,
};

use crate::output::{emit_rows, Cell, Format, Tabular};

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Random instances per check
    #[arg(long, default_value_t = 1000)]
    instances: u64,
    /// Grid points on (0, 1] for the curvature check
    #[arg(long, default_value_t = 100)]
    x_points: u64,
    /// Upper end of the time grid for the rest-probability check
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    /// Spacing of the time grid
    #[arg(long, default_value_t = 0.1)]
    t_step: f64,
    /// Largest vector length for the doubly-stochastic sweep
    #[arg(long, default_value_t = 25)]
    sweep_max_n: usize,
    /// Seed for instance generation
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Serialize)]
struct SweepOutcome {
    check: String,
    points: u64,
    violations: u64,
    worst: f64,
    threshold: f64,
}

impl Tabular for SweepOutcome {
    const HEADER: &'static [&'static str] =
        &["check", "points", "violations", "worst", "threshold"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::text(&self.check),
            Cell::Int(self.points),
            Cell::Int(self.violations),
            Cell::Float(self.worst),
            Cell::Float(self.threshold),
        ]
    }
}

pub fn run(args: VerifyArgs) -> Result<i32, String> {
    if args.instances < 1 {
        return Err("--instances must be at least 1".into());
    }
    if args.x_points < 1 {
        return Err("--x-points must be at least 1".into());
    }
    if !args.t_step.is_finite() || args.t_step <= 0.0 {
        return Err("--t-step must be a positive finite number".into());
    }
    if !args.t_max.is_finite() || args.t_max < 0.0 {
        return Err("--t-max must be a nonnegative finite number".into());
    }
    if args.sweep_max_n < 2 {
        return Err("--sweep-max-n must be at least 2".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let rows = vec![
        sweep_curvature(&mut rng, &args)?,
        sweep_rest_probability(&mut rng, &args)?,
        sweep_decomposition(&mut rng, &args)?,
        sweep_doubly_stochastic(&args)?,
    ];
    emit_rows(&rows, args.format)?;
    let total: u64 = rows.iter().map(|row| row.violations).sum();
    Ok(if total == 0 { 0 } else { 2 })
}

/// Entries uniform on (0.01, 1], matching the library's domain.
fn random_entries(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 1.0 - rng.random::<f64>() * 0.99).collect()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Result<ProbabilityVector, String> {
    ProbabilityVector::new(random_entries(rng, n)).map_err(|e| e.to_string())
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> NeighborPair {
    let j = rng.random_range(0..n);
    let mut k = rng.random_range(0..n - 1);
    if k >= j {
        k += 1;
    }
    NeighborPair::new(j, k)
}

fn sweep_curvature(rng: &mut ChaCha8Rng, args: &VerifyArgs) -> Result<SweepOutcome, String> {
    const THRESHOLD: f64 = -1e-12;
    let mut points = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..args.instances {
        let n = rng.random_range(2..=8);
        let p = random_vector(rng, n)?;
        let pair = random_pair(rng, n);
        for i in 0..args.x_points {
            let x = (i + 1) as f64 / args.x_points as f64;
            let second =
                exclusive_contribution_second_derivative(&p, pair, x).map_err(|e| e.to_string())?;
            points += 1;
            worst = worst.min(second);
            if second < THRESHOLD {
                violations += 1;
            }
        }
    }
    Ok(SweepOutcome {
        check: "curvature_nonnegative".into(),
        points,
        violations,
        worst,
        threshold: THRESHOLD,
    })
}

fn sweep_rest_probability(rng: &mut ChaCha8Rng, args: &VerifyArgs) -> Result<SweepOutcome, String> {
    const THRESHOLD: f64 = -1e-15;
    // Tiny slack so an exactly representable quotient like 50/0.1 is not
    // rounded below the intended last grid index.
    let steps = (args.t_max / args.t_step + 1e-9).floor() as u64;
    let mut points = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..args.instances {
        let n = rng.random_range(2..=10);
        let p = random_vector(rng, n)?;
        let pair = random_pair(rng, n);
        for i in 0..=steps {
            let t = i as f64 * args.t_step;
            let z = rest_discovery_probability(&p, pair, t).map_err(|e| e.to_string())?;
            points += 1;
            worst = worst.min(z);
            if z < THRESHOLD {
                violations += 1;
            }
        }
    }
    Ok(SweepOutcome {
        check: "rest_probability_nonnegative".into(),
        points,
        violations,
        worst,
        threshold: THRESHOLD,
    })
}

fn sweep_decomposition(rng: &mut ChaCha8Rng, args: &VerifyArgs) -> Result<SweepOutcome, String> {
    const THRESHOLD: f64 = 1e-12;
    let mut points = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..args.instances {
        let n = rng.random_range(2..=10);
        let p = random_vector(rng, n)?;
        let pair = random_pair(rng, n);
        let report = decompose_expectation(&p, pair).map_err(|e| e.to_string())?;
        let relative = report.residual / report.total.abs().max(1.0);
        points += 1;
        worst = worst.max(relative);
        if relative > THRESHOLD {
            violations += 1;
        }
    }
    Ok(SweepOutcome {
        check: "decomposition_residual".into(),
        points,
        violations,
        worst,
        threshold: THRESHOLD,
    })
}

const SWEEP_POWERS: [u32; 5] = [1, 2, 5, 10, 50];

fn sweep_doubly_stochastic(args: &VerifyArgs) -> Result<SweepOutcome, String> {
    const THRESHOLD: f64 = 1e-12;
    let mut points = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut check = |matrix: &SweepMatrix| -> Result<(), String> {
        let rows = matrix.rows();
        let ok = is_doubly_stochastic(&rows, THRESHOLD).map_err(|e| e.to_string())?;
        points += 1;
        worst = worst.max(stochastic_deviation(&rows));
        if !ok {
            violations += 1;
        }
        Ok(())
    };
    for n in 2..=args.sweep_max_n {
        let (aligned, shifted, sweep) = build_sweep(n).map_err(|e| e.to_string())?;
        check(&aligned)?;
        check(&shifted)?;
        for power in SWEEP_POWERS {
            check(&sweep.power(power))?;
        }
    }
    Ok(SweepOutcome {
        check: "doubly_stochastic_sweep".into(),
        points,
        violations,
        worst,
        threshold: THRESHOLD,
    })
}

/// Largest of: negative-entry magnitude, row-sum error, column-sum error.
fn stochastic_deviation(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut worst = 0.0f64;
    for row in rows {
        let sum: f64 = row.iter().sum();
        worst = worst.max((sum - 1.0).abs());
        for &entry in row {
            if entry < 0.0 {
                worst = worst.max(-entry);
            }
        }
    }
    for col in 0..n {
        let sum: f64 = rows.iter().map(|row| row[col]).sum();
        worst = worst.max((sum - 1.0).abs());
    }
    worst
}
