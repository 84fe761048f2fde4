//! MassApprox and FullMassApprox.
//!
//! Both walk from the target `v` and record, for every state the walk
//! reaches, `gamma_u = pi(u) / pi(v)` via the detailed-balance identity
//! `pi(u') / pi(u) = p(u,u') / p(u',u)`. Walk endpoints then feed a repeat
//! counter whose threshold is four times the SumApprox threshold, and
//! `r / w` estimates `pi(v) = 1 / sum_u gamma_u`.

use crate::chain::{QuerySession, ReversibleChain, StateId};
use crate::error::{domain, Error, Result};
use crate::report::{EstimatorReport, Stopwatch};
use crate::sum_approx::{repeat_threshold, SumApproxState, WeightedSample};

/// Map from visited states to `gamma_u`, anchored at `gamma_v = 1`.
#[derive(Debug, Clone)]
pub struct GammaLedger {
    anchor: StateId,
    // zero marks "not recorded"; recorded values are strictly positive
    gammas: Vec<f64>,
    recorded: usize,
}

impl GammaLedger {
    pub fn new(n: usize, anchor: StateId) -> Self {
        let mut gammas = vec![0.0; n];
        gammas[anchor.0] = 1.0;
        Self { anchor, gammas, recorded: 1 }
    }

    pub fn anchor(&self) -> StateId {
        self.anchor
    }

    #[inline]
    pub fn get(&self, u: StateId) -> Option<f64> {
        let g = self.gammas[u.0];
        (g > 0.0).then_some(g)
    }

    #[inline]
    pub fn is_recorded(&self, u: StateId) -> bool {
        self.gammas[u.0] > 0.0
    }

    pub fn len(&self) -> usize {
        self.recorded
    }

    pub fn is_empty(&self) -> bool {
        self.recorded == 0
    }

    /// Recorded `(state, gamma)` pairs in state order.
    pub fn iter(&self) -> impl Iterator<Item = (StateId, f64)> + '_ {
        self.gammas
            .iter()
            .enumerate()
            .filter(|(_, g)| **g > 0.0)
            .map(|(i, &g)| (StateId(i), g))
    }
}

/// Records `gamma(u_next) = gamma(u) * p(u,u_next) / p(u_next,u)` if
/// `u_next` is new, spending two probes; returns `gamma(u_next)`.
pub fn gamma_step(ledger: &mut GammaLedger, session: &mut QuerySession<'_>, u: StateId, u_next: StateId) -> Result<f64> {
    if let Some(g) = ledger.get(u_next) {
        return Ok(g);
    }
    let g_u = ledger
        .get(u)
        .ok_or_else(|| domain(format!("gamma of {u} is not recorded")))?;
    let forward = session.probe(u, u_next)?;
    let backward = session.probe(u_next, u)?;
    if backward == 0.0 {
        return Err(Error::ZeroBackProbability { from: u_next.0, to: u.0 });
    }
    let g = g_u * forward / backward;
    if !(g.is_finite() && g > 0.0) {
        return Err(domain(format!("gamma of {u_next} left the representable range: {g}")));
    }
    ledger.gammas[u_next.0] = g;
    ledger.recorded += 1;
    Ok(g)
}

/// Walk length per sample (MassApprox) or sampling period (FullMassApprox).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub t: usize,
    /// Steps walked before the first FullMassApprox round.
    pub burn_in: usize,
    /// Multiplier used when `t` was derived from a mixing time.
    pub c_constant: f64,
}

impl WalkConfig {
    pub fn new(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(domain("walk length must be at least 1"));
        }
        Ok(Self { t, burn_in: 0, c_constant: 1.0 })
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// `t` chosen by [`walk_length_from_tau`].
    pub fn from_tau(tau: usize, pi_norm: f64, epsilon: f64, delta: f64, c_constant: f64) -> Result<Self> {
        let t = walk_length_from_tau(tau, pi_norm, epsilon, delta, c_constant)?;
        Ok(Self { t, burn_in: 0, c_constant })
    }
}

/// `ceil(tau * c * ln(eps^-1 ||pi||^-1 ln(3/delta)) / ln 2)`, at least 1.
///
/// Accepts `epsilon` in `(0, 1]` and `delta` in `(0, 3)`.
pub fn walk_length_from_tau(tau: usize, pi_norm: f64, epsilon: f64, delta: f64, c_constant: f64) -> Result<usize> {
    if tau == 0 {
        return Err(domain("tau must be at least 1"));
    }
    if !(pi_norm > 0.0 && pi_norm <= 1.0) {
        return Err(domain(format!("pi_norm must lie in (0, 1], got {pi_norm}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0 && delta > 0.0 && delta < 3.0) {
        return Err(domain(format!("need epsilon in (0, 1] and delta in (0, 3), got {epsilon}, {delta}")));
    }
    if !(c_constant.is_finite() && c_constant > 0.0) {
        return Err(domain(format!("c must be positive, got {c_constant}")));
    }
    let arg = (3.0 / delta).ln() / (pi_norm * epsilon);
    if arg <= 1.0 {
        return Ok(1);
    }
    let t = tau as f64 * c_constant * arg.ln() / std::f64::consts::LN_2;
    Ok((t.ceil() as usize).max(1))
}

/// Run-level knobs shared by the walk-based estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimatorOptions {
    pub seed: u64,
    /// Maximum number of samples (walks or rounds). `None` means ten times
    /// the worst-case bound for `||pi|| >= 1/sqrt(n)`.
    pub sample_cap: Option<u64>,
}

impl EstimatorOptions {
    pub fn seeded(seed: u64) -> Self {
        Self { seed, sample_cap: None }
    }
}

/// Ten times `ceil(720 sqrt(n) eps^-3 ln(3/delta)^1.5)`; every chain on `n`
/// states has `||pi|| >= 1/sqrt(n)`.
pub fn default_walk_cap(n: usize, epsilon: f64, delta: f64) -> u64 {
    let bound = 720.0 * (n as f64).sqrt() * epsilon.powi(-3) * (3.0 / delta).ln().powf(1.5);
    (bound.ceil() as u64).saturating_mul(10)
}

/// Repeat threshold used by both walk-based estimators: `4 k(eps, delta)`.
pub fn mass_threshold(epsilon: f64, delta: f64) -> Result<u64> {
    Ok(4 * repeat_threshold(epsilon, delta)?)
}

/// MassApprox: every sample is the endpoint of a fresh `t`-step walk
/// from `v`.
///
/// States seen mid-walk enter the gamma ledger and the footprint, but only
/// endpoints enter the repeat set.
pub fn mass_approx(
    chain: &ReversibleChain,
    v: StateId,
    epsilon: f64,
    delta: f64,
    walk: &WalkConfig,
    options: EstimatorOptions,
) -> Result<(f64, EstimatorReport)> {
    let started = Stopwatch::start();
    let threshold = mass_threshold(epsilon, delta)?;
    let walk = WalkConfig::new(walk.t)?;
    let cap = options.sample_cap.unwrap_or_else(|| default_walk_cap(chain.n(), epsilon, delta));
    let mut session = QuerySession::new(chain, v, options.seed)?;
    let mut ledger = GammaLedger::new(chain.n(), v);
    let mut state = SumApproxState::new(threshold).with_cap(Some(cap));

    while !state.is_done() {
        state.ensure_capacity()?;
        let mut u = v;
        for _ in 0..walk.t {
            let next = session.step(u)?;
            gamma_step(&mut ledger, &mut session, u, next)?;
            u = next;
        }
        let gamma = ledger.get(u).expect("endpoint recorded");
        state.observe(WeightedSample { element: u.0 as u64, gamma })?;
    }

    let estimate = state.inverse_estimate().expect("threshold reached");
    Ok((
        estimate,
        EstimatorReport {
            estimate,
            repeats: state.repeats(),
            samples: state.samples(),
            step_calls: session.step_calls(),
            probe_calls: session.probe_calls(),
            footprint: session.footprint(),
            elapsed: started.elapsed(),
        },
    ))
}

/// FullMassApprox: one long walk sampled every `t` steps, where the
/// repeat set absorbs every state the walk has visited.
///
/// Each round adds the current `w_S` to `w`, walks `t` steps collecting
/// newly reached states in `N`, counts a repeat iff the endpoint was in
/// `S` before the round, and only then merges `N` into `S`. Burn-in states
/// join `S` before the first round.
pub fn full_mass_approx(
    chain: &ReversibleChain,
    v: StateId,
    epsilon: f64,
    delta: f64,
    walk: &WalkConfig,
    options: EstimatorOptions,
) -> Result<(f64, EstimatorReport)> {
    let started = Stopwatch::start();
    let threshold = mass_threshold(epsilon, delta)?;
    if walk.t == 0 {
        return Err(domain("walk length must be at least 1"));
    }
    let cap = options.sample_cap.unwrap_or_else(|| default_walk_cap(chain.n(), epsilon, delta));
    let mut session = QuerySession::new(chain, v, options.seed)?;
    let mut ledger = GammaLedger::new(chain.n(), v);

    let mut in_s = vec![false; chain.n()];
    in_s[v.0] = true;
    let mut weight_seen = 1.0;
    let mut accumulated = 0.0;
    let mut repeats = 0u64;
    let mut rounds = 0u64;
    let mut u = v;

    for _ in 0..walk.burn_in {
        let next = session.step(u)?;
        let g = gamma_step(&mut ledger, &mut session, u, next)?;
        if !in_s[next.0] {
            in_s[next.0] = true;
            weight_seen += g;
        }
        u = next;
    }

    let mut fresh: Vec<StateId> = Vec::new();
    while repeats < threshold {
        if rounds >= cap {
            return Err(Error::SampleCapExceeded { cap });
        }
        accumulated += weight_seen;
        fresh.clear();
        for _ in 0..walk.t {
            let next = session.step(u)?;
            if !ledger.is_recorded(next) {
                gamma_step(&mut ledger, &mut session, u, next)?;
                fresh.push(next);
            }
            u = next;
        }
        if in_s[u.0] {
            repeats += 1;
        }
        for &x in &fresh {
            in_s[x.0] = true;
            weight_seen += ledger.get(x).expect("recorded this round");
        }
        rounds += 1;
    }

    let estimate = repeats as f64 / accumulated;
    Ok((
        estimate,
        EstimatorReport {
            estimate,
            repeats,
            samples: rounds,
            step_calls: session.step_calls(),
            probe_calls: session.probe_calls(),
            footprint: session.footprint(),
            elapsed: started.elapsed(),
        },
    ))
}
