//! Browser bindings: each operation builds a torus chain from the page's
//! controls and returns JSON. The `*_json` functions are plain Rust so they
//! can be tested natively; the `#[wasm_bindgen]` wrappers only convert the
//! error type.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pimass::baselines::{return_time_estimate, ReturnTimeConfig};
use pimass::experiment::{aggregate, render_svg, run_sweep, Algo, SweepConfig};
use pimass::generators::{torus_chain, TorusSpec, Weighting};
use pimass::mass_approx::{full_mass_approx, mass_approx, EstimatorOptions, WalkConfig};
use pimass::oracle::{mixing_profile, pi_norm, stationary_exact};
use pimass::{ReversibleChain, StateId};

/// Largest torus the page will build; the exact mixing profile is
/// quadratic in the state count.
pub const MAX_STATES: usize = 1600;

fn chain(rows: usize, cols: usize, shortcuts: f64, weighting: &str, seed: u64) -> Result<ReversibleChain, String> {
    if rows * cols > MAX_STATES {
        return Err(format!("at most {MAX_STATES} states in the browser, got {}", rows * cols));
    }
    let weighting: Weighting = weighting.parse().map_err(|e: pimass::Error| e.to_string())?;
    let spec = TorusSpec::new(rows, cols).shortcuts(shortcuts).weighting(weighting).seed(seed);
    torus_chain(&spec).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Mixing {
    n: usize,
    tau: usize,
    pi_norm: f64,
    d: Vec<f64>,
}

/// Worst-case distance curve `d(t)` up to the mixing time.
pub fn mixing_curve_json(rows: usize, cols: usize, shortcuts: f64, weighting: &str, seed: u64, t_max: usize) -> Result<String, String> {
    let c = chain(rows, cols, shortcuts, weighting, seed)?;
    let pi = stationary_exact(&c).map_err(|e| e.to_string())?;
    let profile = mixing_profile(&c, t_max).map_err(|e| e.to_string())?;
    to_json(&Mixing { n: c.n(), tau: profile.tau, pi_norm: pi_norm(&pi), d: profile.d_values })
}

#[derive(Serialize)]
struct Estimate {
    algo: String,
    estimate: f64,
    true_pi: f64,
    rel_error: f64,
    repeats: u64,
    samples: u64,
    step_calls: u64,
    probe_calls: u64,
    footprint: usize,
}

/// One estimator run on state `target`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_json(
    rows: usize,
    cols: usize,
    shortcuts: f64,
    weighting: &str,
    chain_seed: u64,
    algo: &str,
    walk_len: usize,
    eps: f64,
    delta: f64,
    target: usize,
    seed: u64,
) -> Result<String, String> {
    let c = chain(rows, cols, shortcuts, weighting, chain_seed)?;
    let algo: Algo = algo.parse().map_err(|e: pimass::Error| e.to_string())?;
    let v = StateId(target);
    if !c.contains(v) {
        return Err(format!("target {target} is not a state of a {}-state chain", c.n()));
    }
    let true_pi = stationary_exact(&c).map_err(|e| e.to_string())?.get(v);
    let options = EstimatorOptions::seeded(seed);
    let walk = WalkConfig::new(walk_len).map_err(|e| e.to_string())?;
    let result = match algo {
        Algo::MassApprox => mass_approx(&c, v, eps, delta, &walk, options),
        Algo::FullMassApprox => full_mass_approx(&c, v, eps, delta, &walk, options),
        Algo::ReturnTime => ReturnTimeConfig::trials_for(eps, delta)
            .and_then(|k| ReturnTimeConfig::new(walk_len as u64, k))
            .and_then(|cfg| return_time_estimate(&c, v, &cfg, seed)),
    };
    let (estimate, r) = result.map_err(|e| e.to_string())?;
    to_json(&Estimate {
        algo: algo.name().to_string(),
        estimate,
        true_pi,
        rel_error: (estimate - true_pi).abs() / true_pi,
        repeats: r.repeats,
        samples: r.samples,
        step_calls: r.step_calls,
        probe_calls: r.probe_calls,
        footprint: r.footprint,
    })
}

#[derive(Serialize)]
struct Point {
    walk_len: u64,
    calls: f64,
    rel_error: f64,
}

#[derive(Serialize)]
struct Series {
    algo: &'static str,
    points: Vec<Point>,
    stopped: Option<String>,
}

#[derive(Serialize)]
struct Sweep {
    series: Vec<Series>,
    svg: String,
}

/// Walk-length sweep over all three estimators; returns per-level means and
/// the rendered chart.
#[allow(clippy::too_many_arguments)]
pub fn sweep_json(rows: usize, cols: usize, weighting: &str, chain_seed: u64, eps: f64, delta: f64, seed: u64, budget: u64) -> Result<String, String> {
    let c = chain(rows, cols, 0.0, weighting, chain_seed)?;
    let mut config = SweepConfig::new(eps, delta, seed);
    config.budget = budget;
    let out = run_sweep(&c, StateId(0), &Algo::ALL, &config).map_err(|e| e.to_string())?;
    if out.records.is_empty() {
        return Err("budget too small for a single level".into());
    }
    let series = Algo::ALL
        .iter()
        .map(|&a| Series {
            algo: a.name(),
            points: aggregate(&out.records, a).into_iter().map(|(walk_len, calls, rel_error)| Point { walk_len, calls, rel_error }).collect(),
            stopped: out.stopped.iter().find(|(s, _)| *s == a).map(|(_, e)| e.to_string()),
        })
        .collect();
    to_json(&Sweep { series, svg: render_svg(&out.records) })
}

#[wasm_bindgen]
pub fn mixing_curve(rows: usize, cols: usize, shortcuts: f64, weighting: &str, seed: u64, t_max: usize) -> Result<String, JsError> {
    mixing_curve_json(rows, cols, shortcuts, weighting, seed, t_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn estimate(
    rows: usize,
    cols: usize,
    shortcuts: f64,
    weighting: &str,
    chain_seed: u64,
    algo: &str,
    walk_len: usize,
    eps: f64,
    delta: f64,
    target: usize,
    seed: u64,
) -> Result<String, JsError> {
    estimate_json(rows, cols, shortcuts, weighting, chain_seed, algo, walk_len, eps, delta, target, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(rows: usize, cols: usize, weighting: &str, chain_seed: u64, eps: f64, delta: f64, seed: u64, budget: u64) -> Result<String, JsError> {
    sweep_json(rows, cols, weighting, chain_seed, eps, delta, seed, budget).map_err(|e| JsError::new(&e))
}
