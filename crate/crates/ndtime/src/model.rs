//! Domain types shared by every analysis routine.
//!
//! All types are immutable after construction, so they can be read from any
//! number of threads and moved freely between them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-neighbor discovery probabilities for one node.
///
/// Each entry is the probability (per slot, or per unit time as a rate) that
/// the node successfully receives the corresponding neighbor's announcement.
/// Entries must lie in `(0, 1]`: a probability of exactly 1 is fine, while 0
/// would make that neighbor undiscoverable and every expectation infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct ProbabilityVector {
    values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VectorRepr {
    probabilities: Vec<f64>,
}

impl From<ProbabilityVector> for VectorRepr {
    fn from(v: ProbabilityVector) -> Self {
        Self {
            probabilities: v.values,
        }
    }
}

impl TryFrom<VectorRepr> for ProbabilityVector {
    type Error = Error;

    fn try_from(repr: VectorRepr) -> Result<Self> {
        Self::new(repr.probabilities)
    }
}

impl ProbabilityVector {
    /// Validates `values` and wraps them. Reports the first offending index.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value <= 0.0 || value > 1.0 {
                return Err(Error::OutOfRange { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Neighbor count.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; vectors are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks that `pair` indexes two distinct entries of this vector.
    pub fn check_pair(&self, pair: NeighborPair) -> Result<()> {
        let n = self.len();
        if pair.j == pair.k || pair.j >= n || pair.k >= n {
            return Err(Error::BadPair {
                j: pair.j,
                k: pair.k,
                n,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// An unordered pair of distinct indices into a [`ProbabilityVector`].
/// Indices are 0-based everywhere, including the JSON interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborPair {
    pub j: usize,
    pub k: usize,
}

impl NeighborPair {
    pub fn new(j: usize, k: usize) -> Self {
        Self { j, k }
    }
}

/// Waiting-time model for discovery of a single neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeModel {
    /// Discovery of neighbor j happens after an exponential waiting time with
    /// rate equal to its probability entry.
    #[serde(rename = "exponential")]
    ContinuousExponential,
    /// Discovery of neighbor j happens at the first success of independent
    /// per-slot Bernoulli trials.
    #[serde(rename = "slotted")]
    SlottedGeometric,
}

impl std::fmt::Display for TimeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeModel::ContinuousExponential => f.write_str("exponential"),
            TimeModel::SlottedGeometric => f.write_str("slotted"),
        }
    }
}

/// A set of named nodes, each carrying its own probability vector.
///
/// JSON schema: `{"nodes": {"<id>": {"probabilities": [<float>, ...]}, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr")]
pub struct NetworkTopology {
    nodes: BTreeMap<String, ProbabilityVector>,
}

#[derive(Debug, Clone, Deserialize)]
struct TopologyRepr {
    nodes: BTreeMap<String, ProbabilityVector>,
}

impl TryFrom<TopologyRepr> for NetworkTopology {
    type Error = Error;

    fn try_from(repr: TopologyRepr) -> Result<Self> {
        Self::new(repr.nodes)
    }
}

impl NetworkTopology {
    pub fn new(nodes: BTreeMap<String, ProbabilityVector>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyTopology);
        }
        Ok(Self { nodes })
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = (&str, &ProbabilityVector)> {
        self.nodes.iter().map(|(id, p)| (id.as_str(), p))
    }

    pub fn get(&self, id: &str) -> Option<&ProbabilityVector> {
        self.nodes.get(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_single_valid_element() {
        let p = ProbabilityVector::new(vec![0.5]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn accepts_valid_pair() {
        let p = ProbabilityVector::new(vec![0.2, 0.5]).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn accepts_probability_of_exactly_one() {
        assert!(ProbabilityVector::new(vec![1.0]).is_ok());
    }

    #[test]
    fn rejects_zero() {
        assert_eq!(
            ProbabilityVector::new(vec![0.2, 0.0]),
            Err(Error::OutOfRange {
                index: 1,
                value: 0.0
            })
        );
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(ProbabilityVector::new(vec![]), Err(Error::EmptyVector));
    }

    #[test]
    fn rejects_above_one_and_negative() {
        assert_eq!(
            ProbabilityVector::new(vec![1.5]),
            Err(Error::OutOfRange {
                index: 0,
                value: 1.5
            })
        );
        assert_eq!(
            ProbabilityVector::new(vec![0.5, -0.1]),
            Err(Error::OutOfRange {
                index: 1,
                value: -0.1
            })
        );
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            ProbabilityVector::new(vec![f64::NAN]),
            Err(Error::NonFinite { index: 0 })
        );
        assert_eq!(
            ProbabilityVector::new(vec![0.5, f64::INFINITY]),
            Err(Error::NonFinite { index: 1 })
        );
    }

    #[test]
    fn duplicate_values_are_allowed() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5, 0.5]).is_ok());
    }

    #[test]
    fn pair_validation() {
        let p = ProbabilityVector::new(vec![0.2, 0.5]).unwrap();
        assert!(p.check_pair(NeighborPair::new(0, 1)).is_ok());
        assert_eq!(
            p.check_pair(NeighborPair::new(1, 1)),
            Err(Error::BadPair { j: 1, k: 1, n: 2 })
        );
        assert_eq!(
            p.check_pair(NeighborPair::new(0, 2)),
            Err(Error::BadPair { j: 0, k: 2, n: 2 })
        );
    }

    #[test]
    fn topology_json_round_trip() {
        let json =
            r#"{"nodes": {"a": {"probabilities": [0.2, 0.5]}, "b": {"probabilities": [1.0]}}}"#;
        let topo: NetworkTopology = serde_json::from_str(json).unwrap();
        assert_eq!(topo.len(), 2);
        assert_eq!(topo.get("a").unwrap().values(), &[0.2, 0.5]);
        let back = serde_json::to_string(&topo).unwrap();
        let reparsed: NetworkTopology = serde_json::from_str(&back).unwrap();
        assert_eq!(topo, reparsed);
    }

    #[test]
    fn topology_rejects_invalid_vector() {
        let json = r#"{"nodes": {"a": {"probabilities": [0.2, 0.0]}}}"#;
        let err = serde_json::from_str::<NetworkTopology>(json).unwrap_err();
        assert!(err.to_string().contains("outside (0, 1]"), "{err}");
    }

    #[test]
    fn topology_rejects_empty() {
        let json = r#"{"nodes": {}}"#;
        assert!(serde_json::from_str::<NetworkTopology>(json).is_err());
    }

    #[test]
    fn time_model_tags() {
        assert_eq!(
            serde_json::to_string(&TimeModel::ContinuousExponential).unwrap(),
            "\"exponential\""
        );
        assert_eq!(
            serde_json::to_string(&TimeModel::SlottedGeometric).unwrap(),
            "\"slotted\""
        );
    }
}
