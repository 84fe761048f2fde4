//! Exact ground truth for small and medium chains: stationary distribution,
//! the worst-case distance curve `d(t)`, the 1/4-mixing time, and `||pi||`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::chain::{DistributionVector, ReversibleChain, StateId, TransitionTable};
use crate::error::{domain, Error, Result};

/// Largest chain the mixing oracle accepts.
pub const MIXING_ORACLE_LIMIT: usize = 20_000;

/// Largest general table the dense linear solve accepts.
pub const TABLE_SOLVE_LIMIT: usize = 2_000;

/// Worst-case distance curve and the 1/4-mixing time.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingProfile {
    /// `d(t)` for `t = 0..=tau`.
    pub d_values: Vec<f64>,
    pub tau: usize,
}

/// Stationary distribution `pi(u) = s(u) / sum_w s(w)`.
///
/// Fails with `NotErgodic` when the graph is disconnected. The result is
/// checked against one application of the transition operator.
pub fn stationary_exact(chain: &ReversibleChain) -> Result<DistributionVector> {
    if !chain.is_connected() {
        return Err(Error::NotErgodic("graph is disconnected".into()));
    }
    let total = chain.total_strength();
    let probs: Vec<f64> = chain.strengths().iter().map(|s| s / total).collect();
    let next = step_distribution(chain, &probs);
    let residual: f64 = next.iter().zip(&probs).map(|(a, b)| (a - b).abs()).sum();
    if residual > 1e-9 {
        return Err(domain(format!("stationary check failed: |pi P - pi|_1 = {residual}")));
    }
    Ok(DistributionVector::from_raw(probs))
}

/// One step of the chain applied to a row vector: returns `x P`.
pub fn step_distribution(chain: &ReversibleChain, x: &[f64]) -> Vec<f64> {
    let mut scaled = vec![0.0; chain.n()];
    let mut out = vec![0.0; chain.n()];
    advance(chain, x, &mut scaled, &mut out);
    out
}

// (xP)(v) = sum_u x(u) w(u,v) / s(u); symmetric weights let us gather over
// v's own adjacency row.
fn advance(chain: &ReversibleChain, x: &[f64], scaled: &mut [f64], out: &mut [f64]) {
    for ((sc, xi), s) in scaled.iter_mut().zip(x).zip(chain.strengths()) {
        *sc = xi / s;
    }
    for (v, o) in out.iter_mut().enumerate() {
        let (nbrs, ws) = chain.row(v);
        *o = nbrs.iter().zip(ws).map(|(&u, &w)| scaled[u as usize] * w).sum();
    }
}

fn half_l1(x: &[f64], pi: &[f64]) -> f64 {
    0.5 * x.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `tvd(delta_u P^t, pi)` for `t = 0..=horizon`, or until the first value
/// at most 1/4 when `stop_at_quarter` is set.
fn start_curve(chain: &ReversibleChain, pi: &[f64], start: usize, horizon: usize, stop_at_quarter: bool) -> Vec<f64> {
    let n = chain.n();
    let mut x = vec![0.0; n];
    x[start] = 1.0;
    let mut y = vec![0.0; n];
    let mut scaled = vec![0.0; n];
    let mut curve = Vec::with_capacity(horizon.min(1 << 16) + 1);
    curve.push(half_l1(&x, pi));
    for _ in 0..horizon {
        if stop_at_quarter && *curve.last().unwrap() <= 0.25 {
            break;
        }
        advance(chain, &x, &mut scaled, &mut y);
        std::mem::swap(&mut x, &mut y);
        curve.push(half_l1(&x, pi));
    }
    curve
}

fn max_merge(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    if a.len() < b.len() {
        return max_merge(b, a);
    }
    for (x, y) in a.iter_mut().zip(&b) {
        *x = x.max(*y);
    }
    a
}

fn for_each_start<F>(starts: &[usize], f: F) -> Vec<Vec<f64>>
where
    F: Fn(usize) -> Vec<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        starts.par_iter().map(|&u| f(u)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        starts.iter().map(|&u| f(u)).collect()
    }
}

fn guard(chain: &ReversibleChain) -> Result<()> {
    if chain.n() > MIXING_ORACLE_LIMIT {
        return Err(Error::TooLarge { n: chain.n(), limit: MIXING_ORACLE_LIMIT });
    }
    Ok(())
}

/// Exact `d(t)` for `t = 0..=t_max`, maximizing over point-mass starts.
pub fn d_curve(chain: &ReversibleChain, t_max: usize) -> Result<Vec<f64>> {
    guard(chain)?;
    let pi = stationary_exact(chain)?;
    let starts: Vec<usize> = (0..chain.n()).collect();
    let curves = for_each_start(&starts, |u| start_curve(chain, pi.probs(), u, t_max, false));
    Ok(curves.into_iter().fold(Vec::new(), max_merge))
}

/// Exact `d(t)` up to the 1/4-mixing time.
///
/// The distance from a fixed start is non-increasing in `t` (P contracts
/// the l1 norm and fixes pi), so each start is first run only until it
/// drops to 1/4; starts that got there before the global `tau` are rerun to
/// `tau` so that every reported `d(t)` is an exact maximum.
pub fn mixing_profile(chain: &ReversibleChain, t_max: usize) -> Result<MixingProfile> {
    guard(chain)?;
    let pi = stationary_exact(chain)?;
    let pi = pi.probs();
    let starts: Vec<usize> = (0..chain.n()).collect();
    let first = for_each_start(&starts, |u| start_curve(chain, pi, u, t_max, true));

    let unmixed = first
        .iter()
        .filter(|c| *c.last().unwrap() > 0.25)
        .map(|c| *c.last().unwrap())
        .fold(f64::NAN, f64::max);
    if !unmixed.is_nan() {
        return Err(Error::NotMixedWithin { t_max, d: unmixed });
    }
    let tau = first.iter().map(|c| c.len() - 1).max().unwrap_or(0);
    let rerun: Vec<usize> = starts.iter().copied().filter(|&u| first[u].len() - 1 < tau).collect();
    let mut d_values = first.into_iter().fold(Vec::new(), max_merge);
    for c in for_each_start(&rerun, |u| start_curve(chain, pi, u, tau, false)) {
        d_values = max_merge(d_values, c);
    }
    Ok(MixingProfile { d_values, tau })
}

/// Euclidean norm of a distribution.
pub fn pi_norm(pi: &DistributionVector) -> f64 {
    pi.l2_norm()
}

/// Stationary distribution of a general table, by dense Gaussian
/// elimination on `pi (P - I) = 0, sum pi = 1`.
pub fn stationary_of_table(table: &TransitionTable) -> Result<DistributionVector> {
    let n = table.n();
    if n > TABLE_SOLVE_LIMIT {
        return Err(Error::TooLarge { n, limit: TABLE_SOLVE_LIMIT });
    }
    // Row v of the system: sum_u pi(u) (p(u,v) - [u == v]) = 0.
    let mut a = vec![vec![0.0; n + 1]; n];
    #[allow(clippy::needless_range_loop)]
    for u in 0..n {
        a[u][u] -= 1.0;
        for &(v, p) in table.row(u) {
            a[v][u] += p;
        }
    }
    // The system has rank n - 1; swap its last equation for normalization.
    for x in a[n - 1].iter_mut() {
        *x = 1.0;
    }

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::NotErgodic("transition table is reducible".into()));
        }
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (row, r) in a.iter_mut().enumerate() {
            let factor = r[col] / pivot_row[col];
            if row != col && factor != 0.0 {
                for (x, p) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * p;
                }
            }
        }
    }
    let probs: Vec<f64> = (0..n).map(|i| (a[i][n] / a[i][i]).max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    DistributionVector::new(probs.into_iter().map(|p| p / total).collect())
}

/// Mass of `target` under the exact stationary distribution.
pub fn true_mass(chain: &ReversibleChain, target: StateId) -> Result<f64> {
    chain.check_state(target)?;
    Ok(stationary_exact(chain)?.get(target))
}
