//! Truncated return-time baseline: `pi(v) = 1 / E[return time to v]`.

use crate::chain::{QuerySession, ReversibleChain, StateId};
use crate::error::{domain, Result};
use crate::report::{EstimatorReport, Stopwatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReturnTimeConfig {
    /// Walks that have not returned after this many steps count as this
    /// many steps.
    pub truncation: u64,
    pub trials: u64,
}

impl ReturnTimeConfig {
    pub fn new(truncation: u64, trials: u64) -> Result<Self> {
        if truncation == 0 || trials == 0 {
            return Err(domain("truncation and trials must both be positive"));
        }
        Ok(Self { truncation, trials })
    }

    /// `ceil(2 / eps^2 * ln(2 / delta))` trials.
    pub fn trials_for(epsilon: f64, delta: f64) -> Result<u64> {
        if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
            return Err(domain(format!("epsilon and delta must lie in (0,1), got {epsilon}, {delta}")));
        }
        Ok((2.0 / (epsilon * epsilon) * (2.0 / delta).ln()).ceil() as u64)
    }
}

/// Averages `trials` censored return times and inverts the mean.
///
/// `repeats` in the report counts walks that actually returned.
pub fn return_time_estimate(chain: &ReversibleChain, v: StateId, config: &ReturnTimeConfig, seed: u64) -> Result<(f64, EstimatorReport)> {
    let started = Stopwatch::start();
    let ReturnTimeConfig { truncation, trials } = ReturnTimeConfig::new(config.truncation, config.trials)?;
    let mut session = QuerySession::new(chain, v, seed)?;
    let mut total: u64 = 0;
    let mut returned = 0u64;
    for _ in 0..trials {
        let mut u = v;
        let mut steps = 0;
        while steps < truncation {
            u = session.step(u)?;
            steps += 1;
            if u == v {
                returned += 1;
                break;
            }
        }
        total += steps;
    }
    let estimate = trials as f64 / total as f64;
    Ok((
        estimate,
        EstimatorReport {
            estimate,
            repeats: returned,
            samples: trials,
            step_calls: session.step_calls(),
            probe_calls: session.probe_calls(),
            footprint: session.footprint(),
            elapsed: started.elapsed(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{torus_chain, TorusSpec};

    #[test]
    fn single_state_returns_immediately() {
        let c = ReversibleChain::from_edges(1, [(0, 0, 1.0)]).unwrap();
        let (est, rep) = return_time_estimate(&c, StateId(0), &ReturnTimeConfig::new(10, 7).unwrap(), 0).unwrap();
        assert_eq!(est, 1.0);
        assert_eq!(rep.step_calls, 7);
        assert_eq!(rep.repeats, 7);
    }

    #[test]
    fn periodic_two_state() {
        let c = ReversibleChain::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let (est, rep) = return_time_estimate(&c, StateId(0), &ReturnTimeConfig::new(10, 20).unwrap(), 3).unwrap();
        assert_eq!(est, 0.5);
        assert_eq!(rep.step_calls, 40);
        assert_eq!(rep.probe_calls, 0);
    }

    #[test]
    fn censoring_caps_every_trial() {
        let c = ReversibleChain::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let (est, rep) = return_time_estimate(&c, StateId(0), &ReturnTimeConfig::new(1, 5).unwrap(), 3).unwrap();
        assert_eq!(est, 1.0);
        assert_eq!(rep.repeats, 0);
    }

    #[test]
    fn trial_count_formula() {
        assert_eq!(ReturnTimeConfig::trials_for(0.25, 0.1).unwrap(), 96);
        assert!(ReturnTimeConfig::trials_for(0.0, 0.1).is_err());
        assert!(ReturnTimeConfig::new(0, 1).is_err());
    }

    #[test]
    fn torus_estimates_concentrate() {
        let c = torus_chain(&TorusSpec::new(30, 30)).unwrap();
        let truth = 1.0 / 900.0;
        let cfg = ReturnTimeConfig::new(50 * 900, 400).unwrap();
        let good = (0..50)
            .filter(|&s| {
                let (est, _) = return_time_estimate(&c, StateId(0), &cfg, s).unwrap();
                (est - truth).abs() <= 0.5 * truth
            })
            .count();
        assert!(good >= 35, "{good}/50 within 50%");
    }

    #[test]
    fn truncation_biases_upward() {
        let c = torus_chain(&TorusSpec::new(10, 10)).unwrap();
        let median = |trunc: u64| {
            let cfg = ReturnTimeConfig::new(trunc, 50).unwrap();
            let mut v: Vec<f64> = (0..21).map(|s| return_time_estimate(&c, StateId(0), &cfg, s).unwrap().0).collect();
            v.sort_by(f64::total_cmp);
            v[10]
        };
        let medians: Vec<f64> = [5u64, 50, 500, 5000].iter().map(|&t| median(t)).collect();
        assert!(medians.windows(2).all(|w| w[0] >= w[1]), "{medians:?}");
    }
}
