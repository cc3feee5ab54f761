//! Expected-time analysis for one-way neighbor discovery.
//!
//! A node listens for announcements from `n` neighbors; neighbor `j` is
//! heard with probability `p_j` per slot (or at rate `p_j` in continuous
//! time), and discovery completes when every neighbor has been heard at
//! least once. This crate computes the expected completion time exactly,
//! bounds it from below by `H_n / mean(p)`, dissects why pairwise averaging
//! of probabilities can only shorten it, and cross-checks everything with
//! numerical integration and Monte Carlo simulation.
//!
//! Entry points:
//!
//! * [`expected_discovery_time`] / [`slotted_expected_time`] /
//!   [`expected_time_quadrature`]: three independent routes to the
//!   expectation.
//! * [`lower_bound`]: the harmonic-number bound with gap reporting.
//! * [`pair_average`], [`build_sweep`], [`iterate_average`]: the averaging
//!   step, its matrix form, and iteration to the all-mean limit.
//! * [`decompose_expectation`] and friends: the term grouping behind the
//!   averaging argument.
//! * [`simulate_discovery`]: deterministic, parallel Monte Carlo.
//! * [`analyze_topology`]: all of the above across a set of named nodes.

mod analyze;
mod averaging;
mod bounds;
mod convexity;
mod error;
mod expectation;
mod model;
mod numeric;
mod simulate;

pub use analyze::{analyze_topology, AnalysisOptions, AnalysisRow, SimulationOptions};
pub use averaging::{
    averaged_expected_time, block_average_matrix, build_sweep, is_doubly_stochastic,
    iterate_average, pair_average, ConvergenceTrace, SweepMatrix,
};
pub use bounds::{harmonic_number, lower_bound, lower_bound_capped, BoundReport};
pub use convexity::{
    decompose_expectation, decompose_expectation_capped, exclusive_contribution,
    exclusive_contribution_second_derivative, rest_discovery_probability, DecompositionReport,
};
pub use error::{Error, Result};
pub use expectation::{
    expected_discovery_time, expected_discovery_time_capped, expected_time_quadrature,
    slotted_expected_time, slotted_expected_time_capped, ExpectationReport, Method,
    DEFAULT_MAX_EXACT_N,
};
pub use model::{NeighborPair, NetworkTopology, ProbabilityVector, TimeModel};
pub use simulate::{simulate_discovery, SimulationReport, MIN_REPS, SLOT_BUDGET};
