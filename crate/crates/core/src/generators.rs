//! Chain families and adversarial instances.
//!
//! All constructions are deterministic given their seed (ChaCha8).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainBuilder, ReversibleChain, StateId, TransitionTable};
use crate::error::{domain, Error, Result};
use crate::sum_approx::VectorSource;

/// Arc weighting for torus chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weighting {
    /// Every arc has weight 1.
    Uniform,
    /// Every non-loop arc gets an independent weight `1/X`, `X ~ U(0,1]`.
    InverseUniform,
}

impl Weighting {
    fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            Weighting::Uniform => 1.0,
            // 1 - U[0,1) lies in (0, 1]
            Weighting::InverseUniform => 1.0 / (1.0 - rng.random::<f64>()),
        }
    }
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "inverse-uniform" | "inverse_uniform" | "skewed" => Ok(Weighting::InverseUniform),
            other => Err(domain(format!("unknown weighting `{other}`"))),
        }
    }
}

/// Periodic grid plus random shortcuts and a unit self-loop per node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec {
    pub rows: usize,
    pub cols: usize,
    /// Shortcut edges added, as a fraction of the node count.
    pub shortcut_fraction: f64,
    pub weighting: Weighting,
    pub seed: u64,
}

impl TorusSpec {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, shortcut_fraction: 0.0, weighting: Weighting::Uniform, seed: 0 }
    }

    pub fn shortcuts(mut self, fraction: f64) -> Self {
        self.shortcut_fraction = fraction;
        self
    }

    pub fn weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.rows * self.cols
    }
}

/// Builds the torus chain of `spec`.
///
/// Wraparound arcs that coincide (sides of length 2) are merged by summing
/// weights; sides of length 1 contribute no arc.
pub fn torus_chain(spec: &TorusSpec) -> Result<ReversibleChain> {
    let TorusSpec { rows, cols, shortcut_fraction, weighting, seed } = *spec;
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(domain(format!("torus {rows}x{cols} needs at least 2 nodes")));
    }
    if !(shortcut_fraction.is_finite() && shortcut_fraction >= 0.0) {
        return Err(domain(format!("shortcut fraction must be nonnegative, got {shortcut_fraction}")));
    }
    let n = rows * cols;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ChainBuilder::with_capacity(n, 3 * n);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(2 * n);
    let id = |r: usize, c: usize| r * cols + c;

    for r in 0..rows {
        for c in 0..cols {
            let u = id(r, c);
            for v in [id(r, (c + 1) % cols), id((r + 1) % rows, c)] {
                if v != u {
                    b.add_edge(u, v, weighting.draw(&mut rng));
                    present.insert((u.min(v), u.max(v)));
                }
            }
        }
    }

    let shortcuts = (shortcut_fraction * n as f64).floor() as usize;
    let possible = n * (n - 1) / 2 - present.len();
    if shortcuts > possible {
        return Err(domain(format!("cannot place {shortcuts} shortcuts, only {possible} free pairs")));
    }
    let mut added = 0;
    while added < shortcuts {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || !present.insert((u.min(v), u.max(v))) {
            continue;
        }
        b.add_edge(u, v, weighting.draw(&mut rng));
        added += 1;
    }

    for u in 0..n {
        b.add_edge(u, u, 1.0);
    }
    b.build()
}

/// Which member of the star-expander pair to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StarVariant {
    /// `G(delta, n0)`.
    G,
    /// `G(delta, n0/2)` padded with leaves on one node to the size of `G`.
    GPrime,
}

impl std::str::FromStr for StarVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" | "G" => Ok(StarVariant::G),
            "g-prime" | "g_prime" | "G'" | "gprime" => Ok(StarVariant::GPrime),
            other => Err(domain(format!("unknown star-expander variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarExpanderSpec {
    /// Expander nodes of `G`.
    pub n0: usize,
    pub d: usize,
    /// Star size: each expander edge becomes a center with `delta` arcs.
    pub delta: usize,
    pub variant: StarVariant,
    /// Total weight of the padding arcs in `G'`.
    pub eps_attach: f64,
    pub seed: u64,
}

impl StarExpanderSpec {
    pub fn new(n0: usize, d: usize, delta: usize) -> Self {
        Self { n0, d, delta, variant: StarVariant::G, eps_attach: 0.01, seed: 0 }
    }

    pub fn variant(mut self, variant: StarVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn eps_attach(mut self, eps: f64) -> Self {
        self.eps_attach = eps;
        self
    }
}

/// A star-expander chain together with the roles of its states.
#[derive(Debug, Clone)]
pub struct StarExpander {
    pub chain: ReversibleChain,
    /// States of the underlying expander.
    pub expander_nodes: Vec<StateId>,
    /// One center per expander edge.
    pub star_centers: Vec<StateId>,
    /// Padding leaves (empty for `G`).
    pub padding: Vec<StateId>,
    /// Node the padding hangs from (`G'` only).
    pub attach: Option<StateId>,
}

/// Node count of `G(delta, n0)`: `n0 + (n0 d / 2) (delta - 1)`.
pub fn star_expander_size(n0: usize, d: usize, delta: usize) -> usize {
    n0 + n0 * d / 2 * (delta - 1)
}

const PAIRING_ATTEMPTS: usize = 10_000;

/// Random `d`-regular multigraph by the configuration model, retried until
/// it has no self-loops and is connected. Parallel edges are kept.
fn configuration_model(n0: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n0).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(rng);
        let edges: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        if edges.iter().any(|(a, b)| a == b) {
            continue;
        }
        let mut parent: Vec<usize> = (0..n0).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = n0;
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        if components == 1 {
            return Ok(edges);
        }
    }
    Err(Error::ConstructionFailure(format!(
        "no loop-free connected {d}-regular pairing on {n0} nodes after {PAIRING_ATTEMPTS} attempts"
    )))
}

/// Stars over a fresh expander on states `0..n0`; the builder spans
/// `star_expander_size(n0, d, delta) + extra` states.
fn build_stars(n0: usize, d: usize, delta: usize, rng: &mut ChaCha8Rng, extra: usize) -> Result<(ChainBuilder, Vec<StateId>, usize)> {
    let expander = configuration_model(n0, d, rng)?;
    let n = star_expander_size(n0, d, delta);
    let mut b = ChainBuilder::with_capacity(n + extra, n0 * d / 2 * (2 * delta - 1) + extra);
    let mut next = n0;
    let mut centers = Vec::with_capacity(expander.len());
    let loop_weight = (d - 1) as f64;
    for (u, v) in expander {
        let center = next;
        next += 1;
        centers.push(StateId(center));
        b.add_edge(u, center, 1.0);
        b.add_edge(v, center, 1.0);
        for _ in 0..delta - 2 {
            let leaf = next;
            next += 1;
            b.add_edge(leaf, center, 1.0);
            b.add_edge(leaf, leaf, loop_weight);
        }
    }
    debug_assert_eq!(next, n);
    Ok((b, centers, n))
}

/// Star-expander lower-bound chain `G(delta, n0)` or its padded twin `G'`.
///
/// Every expander edge `{u, v}` becomes a center `s` joined to `u`, `v` and
/// `delta - 2` leaves; leaves carry a self-loop of weight `d - 1`, all other
/// arcs weight 1. From a center each neighbor has probability `1/delta`;
/// from a leaf the center has probability `1/d`.
pub fn star_expander_chain(spec: &StarExpanderSpec) -> Result<StarExpander> {
    let StarExpanderSpec { n0, d, delta, variant, eps_attach, seed } = *spec;
    if d < 3 || delta < 2 || (n0 * d) % 2 != 0 || n0 < 2 {
        return Err(domain(format!("invalid star-expander parameters n0={n0} d={d} delta={delta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match variant {
        StarVariant::G => {
            let (b, star_centers, _) = build_stars(n0, d, delta, &mut rng, 0)?;
            Ok(StarExpander {
                chain: b.build()?,
                expander_nodes: (0..n0).map(StateId).collect(),
                star_centers,
                padding: Vec::new(),
                attach: None,
            })
        }
        StarVariant::GPrime => {
            let half = n0 / 2;
            if n0 % 2 != 0 || (half * d) % 2 != 0 || half < 2 {
                return Err(domain(format!("G' needs n0/2 * d even, got n0={n0} d={d}")));
            }
            if !(eps_attach.is_finite() && eps_attach > 0.0) {
                return Err(domain(format!("eps_attach must be positive, got {eps_attach}")));
            }
            let target = star_expander_size(n0, d, delta);
            let base = star_expander_size(half, d, delta);
            let k = target - base;
            let (mut b, star_centers, _) = build_stars(half, d, delta, &mut rng, k)?;
            let attach = StateId(0);
            let padding: Vec<StateId> = (base..target).map(StateId).collect();
            for p in &padding {
                b.add_edge(attach.0, p.0, eps_attach / k as f64);
            }
            Ok(StarExpander {
                chain: b.build()?,
                expander_nodes: (0..half).map(StateId).collect(),
                star_centers,
                padding,
                attach: Some(attach),
            })
        }
    }
}

/// Which version of the hub-and-satellites lower-bound chain to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HubVariant {
    /// Hub `u` plus satellites, as defined.
    Base,
    /// The indistinguishable alternative: one satellite `u_j` is redirected
    /// to the target with probability 1.
    Redirected,
}

/// Hub-and-satellites chain with a small-mass target.
#[derive(Debug, Clone)]
pub struct HubChain {
    pub table: TransitionTable,
    pub hub: usize,
    /// Target satellite `v`.
    pub target: usize,
    /// Satellite redirected to the target, if any.
    pub redirected: Option<usize>,
}

/// Lower-bound chain on `n` states: hub `0` with `p(u,u) = 1 - (n-1)p/tau`
/// and `p(u,u_i) = p/tau`; satellites with `p(u_i,u_i) = 1 - 1/tau` and
/// `p(u_i,u) = 1/tau`. Satellite 1 is the target; the `Redirected` variant
/// sends satellite `n - 1` to the target deterministically.
///
/// The base chain is a star and therefore satisfies detailed balance; the
/// redirected chain does not (flow `u_j -> v` has no reverse).
pub fn nonreversible_lb_chain(n: usize, tau_fn: usize, p_fn: f64, variant: HubVariant) -> Result<HubChain> {
    if n < 3 {
        return Err(domain("hub chain needs at least 3 states"));
    }
    if tau_fn == 0 {
        return Err(domain("tau must be at least 1"));
    }
    let tau = tau_fn as f64;
    let leave_hub = (n - 1) as f64 * p_fn / tau;
    if !(p_fn > 0.0 && leave_hub < 1.0) {
        return Err(domain(format!("(n-1) p / tau = {leave_hub} must lie in (0, 1)")));
    }
    let hub = 0;
    let target = 1;
    let redirected = match variant {
        HubVariant::Base => None,
        HubVariant::Redirected => Some(n - 1),
    };
    let mut rows = Vec::with_capacity(n);
    let mut hub_row = vec![(hub, 1.0 - leave_hub)];
    hub_row.extend((1..n).map(|i| (i, p_fn / tau)));
    rows.push(hub_row);
    for i in 1..n {
        if Some(i) == redirected {
            rows.push(vec![(target, 1.0)]);
        } else if tau_fn == 1 {
            rows.push(vec![(hub, 1.0)]);
        } else {
            rows.push(vec![(i, 1.0 - 1.0 / tau), (hub, 1.0 / tau)]);
        }
    }
    Ok(HubChain {
        table: TransitionTable::new(rows, redirected.is_some())?,
        hub,
        target,
        redirected,
    })
}

/// Which of the two sum-estimation instances to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialVariant {
    /// `k` unit entries, the rest `sqrt(k)/n`.
    X,
    /// `2k` unit entries, the rest `sqrt(k)/n`.
    XPrime,
}

/// Randomly permuted weight vector of the sum-estimation lower bound.
#[derive(Debug, Clone)]
pub struct AdversarialVector {
    pub gammas: Vec<f64>,
    pub n: usize,
    pub k: usize,
    pub variant: AdversarialVariant,
}

impl AdversarialVector {
    pub fn sum(&self) -> f64 {
        self.gammas.iter().sum()
    }

    /// Norm of `gamma / sum gamma`.
    pub fn pi_norm(&self) -> f64 {
        let total = self.sum();
        self.gammas.iter().map(|g| (g / total).powi(2)).sum::<f64>().sqrt()
    }

    pub fn source(&self, seed: u64) -> Result<VectorSource> {
        VectorSource::new(self.gammas.clone(), seed)
    }
}

pub fn adversarial_sum_vectors(n: usize, k: usize, variant: AdversarialVariant, seed: u64) -> Result<AdversarialVector> {
    if k == 0 || 2 * k > n {
        return Err(domain(format!("need 1 <= k <= n/2, got n={n} k={k}")));
    }
    let units = match variant {
        AdversarialVariant::X => k,
        AdversarialVariant::XPrime => 2 * k,
    };
    let small = (k as f64).sqrt() / n as f64;
    let mut gammas: Vec<f64> = (0..n).map(|j| if j < units { 1.0 } else { small }).collect();
    gammas.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(AdversarialVector { gammas, n, k, variant })
}
