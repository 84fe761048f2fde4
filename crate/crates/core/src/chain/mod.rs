//! Time-reversible chains as weighted undirected graphs.
//!
//! A [`ReversibleChain`] is the random walk on a weighted undirected graph
//! with optional self-loops: from `u` the walk moves to `u'` with
//! probability `w(u,u') / s(u)`, where `s(u)` is the strength of `u`
//! (self-loop weight counted once). Its stationary distribution is
//! `s(u) / sum_w s(w)` and it satisfies detailed balance by construction.
//!
//! Estimators never touch the chain directly; they go through a
//! [`QuerySession`], which meters `step`/`probe` calls and enforces that
//! queries only touch visited states.

mod distribution;
mod format;
mod session;
mod table;

pub use distribution::{tv_distance, DistributionVector};
pub use format::{read_chain, write_chain};
pub use session::QuerySession;
pub use table::TransitionTable;

use std::fmt;

use rand::Rng;

use crate::error::{domain, Error, Result};

/// Dense 0-based state index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for StateId {
    fn from(i: usize) -> Self {
        StateId(i)
    }
}

/// Accumulates undirected weighted edges, merging parallel edges by
/// summing their weights.
#[derive(Debug, Clone)]
pub struct ChainBuilder {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl ChainBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn with_capacity(n: usize, edges: usize) -> Self {
        Self { n, edges: Vec::with_capacity(edges) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds the undirected edge `{u, v}`; `u == v` adds a self-loop.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> &mut Self {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        self.edges.push((a, b, weight));
        self
    }

    pub fn build(mut self) -> Result<ReversibleChain> {
        if self.n == 0 {
            return Err(domain("a chain needs at least one state"));
        }
        for &(u, v, w) in &self.edges {
            if v >= self.n {
                return Err(Error::InvalidState { state: v.max(u), n: self.n });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(domain(format!("edge {{{u},{v}}} has non-positive or non-finite weight {w}")));
            }
        }
        self.edges.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(self.edges.len());
        for (u, v, w) in self.edges {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }

        let n = self.n;
        let mut degree = vec![0usize; n];
        for &(u, v, _) in &merged {
            degree[u] += 1;
            if u != v {
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let nnz = *offsets.last().unwrap();
        let mut neighbors = vec![0u32; nnz];
        let mut weights = vec![0.0; nnz];
        let mut fill = offsets[..n].to_vec();
        // `merged` is sorted by (u, v), so every row receives its neighbors
        // in increasing order: for row x, entries (x', x) with x' < x come
        // first (from earlier u), then (x, v) with v >= x.
        for &(u, v, w) in &merged {
            neighbors[fill[u]] = v as u32;
            weights[fill[u]] = w;
            fill[u] += 1;
            if u != v {
                neighbors[fill[v]] = u as u32;
                weights[fill[v]] = w;
                fill[v] += 1;
            }
        }

        let mut cumulative = vec![0.0; nnz];
        let mut strength = vec![0.0; n];
        for x in 0..n {
            let mut acc = 0.0;
            for i in offsets[x]..offsets[x + 1] {
                acc += weights[i];
                cumulative[i] = acc;
            }
            strength[x] = acc;
        }
        let total_strength = strength.iter().sum();

        Ok(ReversibleChain {
            offsets,
            neighbors,
            weights,
            cumulative,
            strength,
            total_strength,
            edge_count: merged.len(),
        })
    }
}

/// Random walk on a weighted undirected graph, stored in CSR form.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct ReversibleChain {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    strength: Vec<f64>,
    total_strength: f64,
    edge_count: usize,
}

impl ReversibleChain {
    pub fn builder(n: usize) -> ChainBuilder {
        ChainBuilder::new(n)
    }

    /// Builds a chain from an edge list.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut b = ChainBuilder::new(n);
        for (u, v, w) in edges {
            b.add_edge(u, v, w);
        }
        b.build()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.strength.len()
    }

    /// Number of distinct undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, u: StateId) -> bool {
        u.0 < self.n()
    }

    pub(crate) fn check_state(&self, u: StateId) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::InvalidState { state: u.0, n: self.n() })
        }
    }

    #[inline]
    pub fn degree(&self, u: StateId) -> usize {
        self.offsets[u.0 + 1] - self.offsets[u.0]
    }

    /// Strength `s(u)`: sum of the weights incident to `u`.
    #[inline]
    pub fn strength(&self, u: StateId) -> f64 {
        self.strength[u.0]
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strength
    }

    pub fn total_strength(&self) -> f64 {
        self.total_strength
    }

    /// `(neighbor, weight)` pairs of `u` in increasing neighbor order.
    pub fn neighbors(&self, u: StateId) -> impl Iterator<Item = (StateId, f64)> + '_ {
        let range = self.offsets[u.0]..self.offsets[u.0 + 1];
        self.neighbors[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&x, &w)| (StateId(x as usize), w))
    }

    pub(crate) fn row(&self, u: usize) -> (&[u32], &[f64]) {
        let range = self.offsets[u]..self.offsets[u + 1];
        (&self.neighbors[range.clone()], &self.weights[range])
    }

    /// Weight of edge `{u, v}`, zero when absent.
    pub fn weight(&self, u: StateId, v: StateId) -> f64 {
        let (nbrs, ws) = self.row(u.0);
        match nbrs.binary_search(&(v.0 as u32)) {
            Ok(i) => ws[i],
            Err(_) => 0.0,
        }
    }

    /// Unmetered transition probability `p(u, v)`.
    pub fn transition_prob(&self, u: StateId, v: StateId) -> f64 {
        self.weight(u, v) / self.strength[u.0]
    }

    /// Draws the next state of the walk from `u`.
    pub fn sample_next<R: Rng + ?Sized>(&self, u: StateId, rng: &mut R) -> StateId {
        let lo = self.offsets[u.0];
        let hi = self.offsets[u.0 + 1];
        let cum = &self.cumulative[lo..hi];
        let target = rng.random::<f64>() * self.strength[u.0];
        let i = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
        StateId(self.neighbors[lo + i] as usize)
    }

    /// Each undirected edge once as `(u, v, weight)` with `u <= v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            let (nbrs, ws) = self.row(u);
            nbrs.iter()
                .zip(ws)
                .filter(move |(&v, _)| v as usize >= u)
                .map(move |(&v, &w)| (u, v as usize, w))
        })
    }

    /// True when the underlying graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &x in self.row(u).0 {
                let x = x as usize;
                if !seen[x] {
                    seen[x] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
        count == n
    }

    /// Checks the structural invariants: symmetric adjacency, positive
    /// weights, and strengths matching the adjacency sums.
    pub fn check_invariants(&self) -> Result<()> {
        for u in 0..self.n() {
            let (nbrs, ws) = self.row(u);
            let mut sum = 0.0;
            for (&x, &w) in nbrs.iter().zip(ws) {
                if w.is_nan() || w <= 0.0 {
                    return Err(domain(format!("edge {{{u},{x}}} has weight {w}")));
                }
                let back = self.weight(StateId(x as usize), StateId(u));
                if back != w {
                    return Err(domain(format!("edge {{{u},{x}}} is asymmetric: {w} vs {back}")));
                }
                sum += w;
            }
            let s = self.strength[u];
            if (s - sum).abs() > 1e-12 * s.abs().max(sum.abs()) {
                return Err(domain(format!("strength of {u} is {s}, adjacency sums to {sum}")));
            }
        }
        Ok(())
    }
}

/// Checks detailed balance `pi(u) p(u,u') = pi(u') p(u',u)` on every edge
/// within relative tolerance 1e-9.
pub fn validate_reversibility(chain: &ReversibleChain, pi: &DistributionVector) -> Result<bool> {
    if pi.len() != chain.n() {
        return Err(Error::DimensionMismatch { expected: chain.n(), actual: pi.len() });
    }
    let p = pi.probs();
    for (u, v, w) in chain.edges() {
        let forward = p[u] * w / chain.strength[u];
        let backward = p[v] * w / chain.strength[v];
        if (forward - backward).abs() > 1e-9 * forward.abs().max(backward.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}
