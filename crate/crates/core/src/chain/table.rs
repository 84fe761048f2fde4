use crate::chain::DistributionVector;
use crate::error::{domain, Error, Result};

/// Explicit row-stochastic transition table for a general (possibly
/// non-reversible) chain.
///
/// Deliberately not a [`ReversibleChain`](crate::chain::ReversibleChain):
/// the estimators only accept the latter.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    rows: Vec<Vec<(usize, f64)>>,
    /// Set by constructors that know the chain violates detailed balance.
    pub non_reversible: bool,
}

impl TransitionTable {
    /// Builds a table from sparse rows; each row must sum to 1 within 1e-12.
    pub fn new(rows: Vec<Vec<(usize, f64)>>, non_reversible: bool) -> Result<Self> {
        let n = rows.len();
        for (u, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for &(v, p) in row {
                if v >= n {
                    return Err(Error::InvalidState { state: v, n });
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(domain(format!("p({u},{v}) = {p} is not a probability")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(domain(format!("row {u} sums to {sum}")));
            }
        }
        Ok(Self { rows, non_reversible })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, u: usize) -> &[(usize, f64)] {
        &self.rows[u]
    }

    pub fn prob(&self, u: usize, v: usize) -> f64 {
        self.rows[u].iter().filter(|(x, _)| *x == v).map(|(_, p)| p).sum()
    }

    pub fn row_sum(&self, u: usize) -> f64 {
        self.rows[u].iter().map(|(_, p)| p).sum()
    }

    /// Detailed balance check over every ordered pair with positive flow
    /// in at least one direction, relative tolerance 1e-9.
    pub fn is_reversible_under(&self, pi: &DistributionVector) -> Result<bool> {
        if pi.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: pi.len() });
        }
        let p = pi.probs();
        for u in 0..self.n() {
            for &(v, puv) in &self.rows[u] {
                let forward = p[u] * puv;
                let backward = p[v] * self.prob(v, u);
                if (forward - backward).abs() > 1e-9 * forward.abs().max(backward.abs()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
