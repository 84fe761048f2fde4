use std::time::Duration;

/// Outcome and cost ledger of a single estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub estimate: f64,
    /// Repeats (collisions) witnessed; zero for the return-time baseline.
    pub repeats: u64,
    /// Samples drawn: draws for SumApprox, walks for MassApprox, rounds for
    /// FullMassApprox, trials for the return-time baseline.
    pub samples: u64,
    pub step_calls: u64,
    pub probe_calls: u64,
    /// Distinct states visited (distinct elements for plain SumApprox).
    pub footprint: usize,
    pub elapsed: Duration,
}

impl EstimatorReport {
    pub fn total_calls(&self) -> u64 {
        self.step_calls + self.probe_calls
    }
}

/// Wall-clock timer for reports. `std::time::Instant` is unavailable on
/// `wasm32-unknown-unknown`, where every run reports zero elapsed time.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stopwatch {
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    started: std::time::Instant,
}

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Self {
            #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
            started: std::time::Instant::now(),
        }
    }

    pub(crate) fn elapsed(&self) -> Duration {
        #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
        return self.started.elapsed();
        #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
        return Duration::ZERO;
    }
}
