//! Walk-length sweeps comparing estimators by relative error against
//! metered query cost.
//!
//! Each algorithm starts at `l = 10` and grows `l` by a factor `sqrt 2`
//! (rounded), running a fixed number of trials per level. An algorithm
//! stops once every trial of a level lands within `(1 +- eps) pi(v)`, or
//! when its cumulative `step + probe` count reaches the budget. For the
//! return-time baseline `l` is the truncation length.
//!
//! Per-trial seeds come from [`trial_seed`], so records do not depend on
//! scheduling; they are sorted by `(algo, walk_len, trial)` on return.

mod csv;
mod svg;

pub use csv::{parse_csv, write_csv, CSV_HEADER};
pub use svg::render_svg;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::baselines::{return_time_estimate, ReturnTimeConfig};
use crate::chain::{ReversibleChain, StateId};
use crate::error::{domain, Error, Result};
use crate::mass_approx::{full_mass_approx, mass_approx, EstimatorOptions, WalkConfig};
use crate::oracle::true_mass;
use crate::report::EstimatorReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    MassApprox,
    FullMassApprox,
    ReturnTime,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::MassApprox, Algo::FullMassApprox, Algo::ReturnTime];

    pub fn name(self) -> &'static str {
        match self {
            Algo::MassApprox => "mass_approx",
            Algo::FullMassApprox => "full_mass_approx",
            Algo::ReturnTime => "return_time",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "mass_approx" | "mass" => Ok(Algo::MassApprox),
            "full_mass_approx" | "full" => Ok(Algo::FullMassApprox),
            "return_time" => Ok(Algo::ReturnTime),
            _ => Err(domain(format!("unknown algorithm `{s}`"))),
        }
    }
}

/// One estimator run inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub algo: Algo,
    pub walk_len: u64,
    pub trial: u32,
    pub seed: u64,
    pub estimate: f64,
    pub true_pi: f64,
    pub rel_error: f64,
    pub step_calls: u64,
    pub probe_calls: u64,
    pub footprint: u64,
    pub elapsed_ms: u64,
}

impl SweepRecord {
    pub fn total_calls(&self) -> u64 {
        self.step_calls + self.probe_calls
    }
}

/// `round(10 * sqrt(2)^k)`.
pub fn schedule_value(k: u32) -> u64 {
    (10.0 * std::f64::consts::SQRT_2.powi(k as i32)).round() as u64
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial: the master seed passed through splitmix64 once per
/// coordinate, in the order algorithm, walk length, trial.
pub fn trial_seed(master: u64, algo: Algo, walk_len: u64, trial: u32) -> u64 {
    let mut s = splitmix64(master);
    for coord in [algo.index(), walk_len, trial as u64] {
        s = splitmix64(s ^ coord);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub master_seed: u64,
    /// Trials per walk length.
    pub trials: u32,
    /// Cumulative `step + probe` ceiling per algorithm.
    pub budget: u64,
    /// Safety stop on the number of schedule levels.
    pub max_levels: u32,
    /// Burn-in for FullMassApprox.
    pub burn_in: usize,
    /// Walks per return-time run; `None` uses `ceil(2/eps^2 ln(2/delta))`.
    pub return_time_trials: Option<u64>,
    /// Record wall-clock time; off keeps output byte-reproducible.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(epsilon: f64, delta: f64, master_seed: u64) -> Self {
        Self {
            epsilon,
            delta,
            master_seed,
            trials: 3,
            budget: 100_000_000,
            max_levels: 64,
            burn_in: 0,
            return_time_trials: None,
            timing: false,
        }
    }
}

/// Records of a sweep plus the algorithms that ran out of budget.
#[derive(Debug)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    /// `(algo, error)` for every algorithm stopped by the budget.
    pub stopped: Vec<(Algo, Error)>,
}

impl SweepOutcome {
    pub fn records_for(&self, algo: Algo) -> impl Iterator<Item = &SweepRecord> + '_ {
        self.records.iter().filter(move |r| r.algo == algo)
    }
}

struct Run<'a> {
    chain: &'a ReversibleChain,
    v: StateId,
    config: &'a SweepConfig,
    true_pi: f64,
    rt_trials: u64,
}

impl Run<'_> {
    /// One trial at walk length `l`, with at most `allowance` calls.
    fn trial(&self, algo: Algo, l: u64, trial: u32, allowance: u64) -> Result<SweepRecord> {
        let seed = trial_seed(self.config.master_seed, algo, l, trial);
        let (eps, delta) = (self.config.epsilon, self.config.delta);
        let t = l as usize;
        let report: EstimatorReport = match algo {
            Algo::MassApprox => {
                // at most l steps and 2l probes per walk
                let cap = (allowance / (3 * l)).max(1);
                let options = EstimatorOptions { seed, sample_cap: Some(cap) };
                mass_approx(self.chain, self.v, eps, delta, &WalkConfig::new(t)?, options)?.1
            }
            Algo::FullMassApprox => {
                let steps_left = allowance.saturating_sub(3 * self.config.burn_in as u64);
                let cap = (steps_left / (3 * l)).max(1);
                let options = EstimatorOptions { seed, sample_cap: Some(cap) };
                let walk = WalkConfig::new(t)?.with_burn_in(self.config.burn_in);
                full_mass_approx(self.chain, self.v, eps, delta, &walk, options)?.1
            }
            Algo::ReturnTime => {
                if self.rt_trials.saturating_mul(l) > allowance {
                    return Err(Error::BudgetExceeded { budget: self.config.budget });
                }
                return_time_estimate(self.chain, self.v, &ReturnTimeConfig::new(l, self.rt_trials)?, seed)?.1
            }
        };
        Ok(SweepRecord {
            algo,
            walk_len: l,
            trial,
            seed,
            estimate: report.estimate,
            true_pi: self.true_pi,
            rel_error: (report.estimate - self.true_pi).abs() / self.true_pi,
            step_calls: report.step_calls,
            probe_calls: report.probe_calls,
            footprint: report.footprint as u64,
            elapsed_ms: if self.config.timing { report.elapsed.as_millis() as u64 } else { 0 },
        })
    }

    fn level(&self, algo: Algo, l: u64, allowance: u64) -> Vec<Result<SweepRecord>> {
        let per_trial = allowance / self.config.trials as u64;
        let trials: Vec<u32> = (0..self.config.trials).collect();
        #[cfg(feature = "parallel")]
        let it = trials.into_par_iter();
        #[cfg(not(feature = "parallel"))]
        let it = trials.into_iter();
        it.map(|i| self.trial(algo, l, i, per_trial)).collect()
    }

    fn sweep_algo(&self, algo: Algo) -> (Vec<SweepRecord>, Option<Error>) {
        let mut out = Vec::new();
        let mut spent: u64 = 0;
        for k in 0..self.config.max_levels {
            let l = schedule_value(k);
            let allowance = self.config.budget.saturating_sub(spent);
            if allowance == 0 {
                return (out, Some(Error::BudgetExceeded { budget: self.config.budget }));
            }
            let mut level = Vec::with_capacity(self.config.trials as usize);
            for r in self.level(algo, l, allowance) {
                match r {
                    Ok(rec) => level.push(rec),
                    Err(Error::SampleCapExceeded { .. }) | Err(Error::BudgetExceeded { .. }) => {
                        return (out, Some(Error::BudgetExceeded { budget: self.config.budget }));
                    }
                    Err(e) => return (out, Some(e)),
                }
            }
            spent += level.iter().map(SweepRecord::total_calls).sum::<u64>();
            let converged = level.iter().all(|r| r.rel_error <= self.config.epsilon);
            out.extend(level);
            if converged {
                return (out, None);
            }
        }
        (out, Some(domain(format!("no convergence within {} levels", self.config.max_levels))))
    }
}

/// Runs the walk-length sweep for each of `algos` on target `v`.
///
/// `true_pi` comes from the exact oracle. An algorithm whose level would
/// overrun its budget is stopped and listed in `stopped`; the remaining
/// algorithms still run. A stopped level contributes no records.
pub fn run_sweep(chain: &ReversibleChain, v: StateId, algos: &[Algo], config: &SweepConfig) -> Result<SweepOutcome> {
    if config.trials == 0 {
        return Err(domain("at least one trial per level is required"));
    }
    let true_pi = true_mass(chain, v)?;
    let rt_trials = match config.return_time_trials {
        Some(t) => t,
        None => ReturnTimeConfig::trials_for(config.epsilon, config.delta)?,
    };
    let run = Run { chain, v, config, true_pi, rt_trials };
    let mut algos = algos.to_vec();
    algos.sort();
    algos.dedup();

    let mut records = Vec::new();
    let mut stopped = Vec::new();
    for algo in algos {
        let (recs, err) = run.sweep_algo(algo);
        records.extend(recs);
        if let Some(e) = err {
            stopped.push((algo, e));
        }
    }
    records.sort_by_key(|r| (r.algo, r.walk_len, r.trial));
    Ok(SweepOutcome { records, stopped })
}

/// Mean `(walk_len, total calls, rel_error)` per walk length for one
/// algorithm, in increasing walk length.
pub fn aggregate(records: &[SweepRecord], algo: Algo) -> Vec<(u64, f64, f64)> {
    let mut out: Vec<(u64, f64, f64, u32)> = Vec::new();
    for r in records.iter().filter(|r| r.algo == algo) {
        match out.iter_mut().find(|e| e.0 == r.walk_len) {
            Some(e) => {
                e.1 += r.total_calls() as f64;
                e.2 += r.rel_error;
                e.3 += 1;
            }
            None => out.push((r.walk_len, r.total_calls() as f64, r.rel_error, 1)),
        }
    }
    out.sort_by_key(|e| e.0);
    out.into_iter().map(|(l, c, e, k)| (l, c / k as f64, e / k as f64)).collect()
}

/// Mean total calls at the first walk length whose mean relative error is
/// at most `threshold`; `None` if no level gets there.
pub fn cost_to_reach(records: &[SweepRecord], algo: Algo, threshold: f64) -> Option<f64> {
    aggregate(records, algo).into_iter().find(|&(_, _, e)| e <= threshold).map(|(_, c, _)| c)
}

/// Writes the CSV file; refuses empty input before touching the path.
pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(records, &mut f)?;
    std::io::Write::flush(&mut f)?;
    Ok(())
}

/// Writes the SVG chart; refuses empty input before touching the path.
pub fn emit_svg(records: &[SweepRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    std::fs::write(path, render_svg(records))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_prefix() {
        let first: Vec<u64> = (0..8).map(schedule_value).collect();
        assert_eq!(first, [10, 14, 20, 28, 40, 57, 80, 113]);
    }

    #[test]
    fn seeds_are_distinct_per_coordinate() {
        let a = trial_seed(1, Algo::MassApprox, 10, 0);
        assert_ne!(a, trial_seed(1, Algo::MassApprox, 10, 1));
        assert_ne!(a, trial_seed(1, Algo::MassApprox, 14, 0));
        assert_ne!(a, trial_seed(1, Algo::FullMassApprox, 10, 0));
        assert_ne!(a, trial_seed(2, Algo::MassApprox, 10, 0));
        assert_eq!(a, trial_seed(1, Algo::MassApprox, 10, 0));
    }

    #[test]
    fn algo_names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        assert_eq!("return-time".parse::<Algo>().unwrap(), Algo::ReturnTime);
        assert!("pagerank".parse::<Algo>().is_err());
    }

    #[test]
    fn single_state_stops_at_first_level() {
        let c = ReversibleChain::from_edges(1, [(0, 0, 1.0)]).unwrap();
        let out = run_sweep(&c, StateId(0), &Algo::ALL, &SweepConfig::new(0.25, 0.1, 3)).unwrap();
        assert!(out.stopped.is_empty());
        assert_eq!(out.records.len(), 9);
        for r in &out.records {
            assert_eq!(r.walk_len, 10);
            assert_eq!(r.rel_error, 0.0);
        }
    }

    #[test]
    fn budget_stops_one_algorithm_only() {
        let c = ReversibleChain::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 0, 1.0), (2, 2, 1.0)]).unwrap();
        let mut cfg = SweepConfig::new(0.25, 0.1, 3);
        cfg.budget = 500;
        cfg.return_time_trials = Some(5);
        let out = run_sweep(&c, StateId(0), &[Algo::MassApprox, Algo::ReturnTime], &cfg).unwrap();
        assert!(out.stopped.iter().any(|(a, e)| *a == Algo::MassApprox && matches!(e, Error::BudgetExceeded { .. })));
        assert_eq!(out.records_for(Algo::MassApprox).count(), 0);
        assert!(out.records_for(Algo::ReturnTime).count() >= 3);
        let sorted = out.records.windows(2).all(|w| (w[0].algo, w[0].walk_len, w[0].trial) <= (w[1].algo, w[1].walk_len, w[1].trial));
        assert!(sorted);
    }

    #[test]
    fn cost_to_reach_uses_level_means() {
        let rec = |l, trial, calls, err| SweepRecord {
            algo: Algo::ReturnTime,
            walk_len: l,
            trial,
            seed: 0,
            estimate: 0.0,
            true_pi: 1.0,
            rel_error: err,
            step_calls: calls,
            probe_calls: 0,
            footprint: 0,
            elapsed_ms: 0,
        };
        let recs = [rec(10, 0, 100, 0.9), rec(10, 1, 100, 0.3), rec(14, 0, 300, 0.4), rec(14, 1, 500, 0.2)];
        assert_eq!(cost_to_reach(&recs, Algo::ReturnTime, 0.5), Some(400.0));
        assert_eq!(cost_to_reach(&recs, Algo::ReturnTime, 0.1), None);
        assert_eq!(cost_to_reach(&recs, Algo::MassApprox, 0.5), None);
    }

    #[test]
    fn empty_records_create_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        assert!(matches!(emit_csv(&[], &p), Err(Error::EmptyRecords)));
        assert!(!p.exists());
        let s = dir.path().join("out.svg");
        assert!(matches!(emit_svg(&[], &s), Err(Error::EmptyRecords)));
        assert!(!s.exists());
    }
}
