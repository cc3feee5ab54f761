//! Whole-topology sweep: one result row per node, combining the exact
//! expectation (when the neighbor count permits enumeration), the harmonic
//! lower bound, and optionally a simulation estimate.

use serde::Serialize;

use crate::bounds::lower_bound_capped;
use crate::error::Error;
use crate::expectation::DEFAULT_MAX_EXACT_N;
use crate::model::{NetworkTopology, TimeModel};
use crate::simulate::simulate_discovery;

/// Simulation settings for [`analyze_topology`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub model: TimeModel,
    pub reps: u64,
    pub seed: u64,
}

/// What to compute per node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Attempt the exact expectation (skipped per node when over the cap).
    pub exact: bool,
    /// Enumeration cap for the exact expectation.
    pub max_exact_n: usize,
    /// Run a simulation per node when set.
    pub simulation: Option<SimulationOptions>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            exact: true,
            max_exact_n: DEFAULT_MAX_EXACT_N,
            simulation: None,
        }
    }
}

/// Per-node results. Fields that could not be computed are `None`, with the
/// reason in `error`; the bound is always present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisRow {
    pub node_id: String,
    pub n: usize,
    pub exact: Option<f64>,
    pub bound: f64,
    pub gap: Option<f64>,
    pub sim_mean: Option<f64>,
    pub sim_ci95_low: Option<f64>,
    pub sim_ci95_high: Option<f64>,
    pub error: Option<String>,
}

/// Analyzes every node, in ascending node-id order. A failure on one node
/// (too many neighbors for exact enumeration, simulation rejected) lands in
/// that node's row and never aborts the others.
pub fn analyze_topology(topology: &NetworkTopology, options: &AnalysisOptions) -> Vec<AnalysisRow> {
    topology
        .nodes()
        .map(|(id, p)| {
            let n = p.len();
            let cap = if options.exact {
                options.max_exact_n
            } else {
                0
            };
            let report = lower_bound_capped(p, cap);
            let mut errors = Vec::new();
            if options.exact && report.exact.is_none() {
                errors.push(
                    Error::TooManyNeighbors {
                        n,
                        cap: options.max_exact_n,
                    }
                    .to_string(),
                );
            }
            let mut sim_mean = None;
            let mut sim_ci95_low = None;
            let mut sim_ci95_high = None;
            if let Some(sim) = options.simulation {
                match simulate_discovery(p, sim.model, sim.reps, sim.seed) {
                    Ok(sim_report) => {
                        sim_mean = Some(sim_report.mean);
                        sim_ci95_low = Some(sim_report.ci95_low);
                        sim_ci95_high = Some(sim_report.ci95_high);
                    }
                    Err(e) => errors.push(e.to_string()),
                }
            }
            AnalysisRow {
                node_id: id.to_string(),
                n,
                exact: report.exact,
                bound: report.bound,
                gap: report.gap,
                sim_mean,
                sim_ci95_low,
                sim_ci95_high,
                error: if errors.is_empty() {
                    None
                } else {
                    Some(errors.join("; "))
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProbabilityVector;
    use std::collections::BTreeMap;

    fn topology(nodes: &[(&str, &[f64])]) -> NetworkTopology {
        let map: BTreeMap<String, ProbabilityVector> = nodes
            .iter()
            .map(|&(id, values)| {
                (
                    id.to_string(),
                    ProbabilityVector::new(values.to_vec()).unwrap(),
                )
            })
            .collect();
        NetworkTopology::new(map).unwrap()
    }

    #[test]
    fn single_node_row() {
        let rows = analyze_topology(&topology(&[("a", &[0.5])]), &AnalysisOptions::default());
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.node_id, "a");
        assert_eq!(row.n, 1);
        assert_eq!(row.exact, Some(2.0));
        assert_eq!(row.bound, 2.0);
        assert_eq!(row.gap, Some(0.0));
        assert!(row.error.is_none());
    }

    #[test]
    fn rows_are_sorted_by_node_id() {
        let rows = analyze_topology(
            &topology(&[("b", &[0.5, 0.5, 0.5]), ("a", &[0.2, 0.5])]),
            &AnalysisOptions::default(),
        );
        assert_eq!(rows[0].node_id, "a");
        assert_eq!(rows[1].node_id, "b");
        assert!((rows[0].exact.unwrap() - 5.571428571428571).abs() < 1e-14);
        assert!((rows[0].bound - 4.285714285714286).abs() < 1e-14);
        assert!((rows[1].exact.unwrap() - 3.6666666666666665).abs() < 1e-14);
        assert!((rows[1].bound - 3.6666666666666665).abs() < 1e-13);
    }

    #[test]
    fn over_cap_node_keeps_its_bound() {
        let values = vec![0.3; 30];
        let rows = analyze_topology(&topology(&[("big", &values)]), &AnalysisOptions::default());
        let row = &rows[0];
        assert!(row.exact.is_none());
        assert!(row.gap.is_none());
        assert!(row.bound > 0.0);
        assert!(row.error.as_deref().unwrap().contains("cap"));
    }

    #[test]
    fn exact_can_be_disabled() {
        let rows = analyze_topology(
            &topology(&[("a", &[0.2, 0.5])]),
            &AnalysisOptions {
                exact: false,
                ..AnalysisOptions::default()
            },
        );
        assert!(rows[0].exact.is_none());
        assert!(rows[0].error.is_none());
        assert!((rows[0].bound - 4.285714285714286).abs() < 1e-14);
    }

    #[test]
    fn simulation_fields_appear_on_request() {
        let rows = analyze_topology(
            &topology(&[("a", &[0.5])]),
            &AnalysisOptions {
                simulation: Some(SimulationOptions {
                    model: TimeModel::ContinuousExponential,
                    reps: 10_000,
                    seed: 42,
                }),
                ..AnalysisOptions::default()
            },
        );
        let row = &rows[0];
        let mean = row.sim_mean.unwrap();
        assert!(row.sim_ci95_low.unwrap() <= mean);
        assert!(row.sim_ci95_high.unwrap() >= mean);
        assert!((mean - 2.0).abs() < 0.1);
    }
}
