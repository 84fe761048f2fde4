use crate::chain::StateId;
use crate::error::{domain, Error, Result};

/// Dense probability vector over the states of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    probs: Vec<f64>,
}

impl DistributionVector {
    /// Wraps `probs`, which must be nonnegative and sum to 1 within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(domain("empty distribution"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(domain(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(domain(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![1.0 / n as f64; n] }
    }

    pub fn point_mass(n: usize, at: StateId) -> Self {
        let mut probs = vec![0.0; n];
        probs[at.0] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, u: StateId) -> f64 {
        self.probs[u.0]
    }

    /// Euclidean norm.
    pub fn l2_norm(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum::<f64>().sqrt()
    }

    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        tv_distance(self, other)
    }

    /// The `k` most probable states, ties broken by lower index.
    pub fn top_k(&self, k: usize) -> Vec<(StateId, f64)> {
        let mut idx: Vec<usize> = (0..self.probs.len()).collect();
        idx.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]).then(a.cmp(&b)));
        idx.into_iter().take(k).map(|i| (StateId(i), self.probs[i])).collect()
    }
}

/// Total variation distance `0.5 * |a - b|_1`.
pub fn tv_distance(a: &DistributionVector, b: &DistributionVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(0.5 * a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum::<f64>())
}
