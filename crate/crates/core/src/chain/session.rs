use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{ReversibleChain, StateId};
use crate::error::{Error, Result};

/// Metered, locality-enforcing access to a chain.
///
/// A state counts as visited if it is the start state or has been returned
/// by [`step`](Self::step). Both queries reject unvisited arguments.
/// Randomness comes from a ChaCha8 stream seeded at construction, so two
/// sessions with the same seed and call sequence return identical results.
#[derive(Debug, Clone)]
pub struct QuerySession<'a> {
    chain: &'a ReversibleChain,
    start: StateId,
    visited: Vec<bool>,
    footprint: usize,
    step_calls: u64,
    probe_calls: u64,
    rng: ChaCha8Rng,
}

impl<'a> QuerySession<'a> {
    pub fn new(chain: &'a ReversibleChain, start: StateId, seed: u64) -> Result<Self> {
        chain.check_state(start)?;
        let mut visited = vec![false; chain.n()];
        visited[start.0] = true;
        Ok(Self {
            chain,
            start,
            visited,
            footprint: 1,
            step_calls: 0,
            probe_calls: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn chain(&self) -> &'a ReversibleChain {
        self.chain
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    /// Simulates one transition from `u`.
    pub fn step(&mut self, u: StateId) -> Result<StateId> {
        self.require_visited(u)?;
        self.step_calls += 1;
        let next = self.chain.sample_next(u, &mut self.rng);
        if !self.visited[next.0] {
            self.visited[next.0] = true;
            self.footprint += 1;
        }
        Ok(next)
    }

    /// Returns `p(u, u2)`, zero when the states are not adjacent.
    pub fn probe(&mut self, u: StateId, u2: StateId) -> Result<f64> {
        self.require_visited(u)?;
        self.require_visited(u2)?;
        self.probe_calls += 1;
        Ok(self.chain.transition_prob(u, u2))
    }

    pub fn is_visited(&self, u: StateId) -> bool {
        self.visited.get(u.0).copied().unwrap_or(false)
    }

    /// Number of distinct visited states.
    pub fn footprint(&self) -> usize {
        self.footprint
    }

    pub fn step_calls(&self) -> u64 {
        self.step_calls
    }

    pub fn probe_calls(&self) -> u64 {
        self.probe_calls
    }

    pub fn total_calls(&self) -> u64 {
        self.step_calls + self.probe_calls
    }

    fn require_visited(&self, u: StateId) -> Result<()> {
        self.chain.check_state(u)?;
        if self.visited[u.0] {
            Ok(())
        } else {
            Err(Error::LocalityViolation { state: u.0 })
        }
    }
}
