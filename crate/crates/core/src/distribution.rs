use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{IfmError, Result};
use crate::PROB_TOLERANCE;

/// Probabilities of mutually exclusive outcomes, keyed by label.
///
/// Labels are kept in lexicographic order. That order is also the order the
/// Monte Carlo sampler walks when inverting the cumulative distribution, so
/// iteration order here is part of the sampling contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct OutcomeDistribution {
    probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    /// Validates that every probability is finite and in `[0, 1]` and that
    /// they sum to one within [`PROB_TOLERANCE`].
    pub fn new(probs: BTreeMap<String, f64>) -> Result<Self> {
        for (label, &p) in &probs {
            if !p.is_finite() || !(0.0..=1.0 + PROB_TOLERANCE).contains(&p) {
                return Err(IfmError::InvalidProbability {
                    label: label.clone(),
                    value: p,
                });
            }
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(IfmError::NotNormalized(total));
        }
        Ok(Self { probs })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
    }

    /// Probability of `label`; zero for labels the distribution does not list.
    pub fn prob(&self, label: &str) -> f64 {
        self.probs.get(label).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.probs.contains_key(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn as_map(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    /// Adds zero-probability entries so that every label in `labels` is listed.
    pub fn with_labels<'a>(mut self, labels: impl IntoIterator<Item = &'a str>) -> Self {
        for label in labels {
            self.probs.entry(label.to_owned()).or_insert(0.0);
        }
        self
    }

    /// Renames outcomes. Labels mapping onto the same target are summed.
    pub fn relabel(&self, mapping: &[(&str, &str)]) -> Self {
        let mut probs = BTreeMap::new();
        for (label, &p) in &self.probs {
            let target = mapping
                .iter()
                .find(|(from, _)| from == label)
                .map_or(label.as_str(), |(_, to)| to);
            *probs.entry(target.to_owned()).or_insert(0.0) += p;
        }
        Self { probs }
    }

    /// Largest absolute difference over the union of both label sets.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.labels()
            .chain(other.labels())
            .map(|l| (self.prob(l) - other.prob(l)).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<BTreeMap<String, f64>> for OutcomeDistribution {
    type Error = IfmError;

    fn try_from(probs: BTreeMap<String, f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<OutcomeDistribution> for BTreeMap<String, f64> {
    fn from(d: OutcomeDistribution) -> Self {
        d.probs
    }
}
