//! Collision-based estimation of a vector sum from weighted samples.
//!
//! Elements are drawn with probability `gamma_u / gamma` and each draw
//! reports its own `gamma_u`. Before every draw the weight `w_S` of the
//! distinct elements seen so far is added to an accumulator `w`; a draw of
//! an already-seen element is a repeat. Once the repeat count `r` reaches
//! the threshold `k(eps, delta)`, `w / r` estimates `gamma`.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::report::{EstimatorReport, Stopwatch};

/// One weighted draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSample {
    pub element: u64,
    pub gamma: f64,
}

/// Yields elements with probability proportional to their `gamma`.
pub trait WeightedSampleSource {
    fn draw(&mut self) -> Result<WeightedSample>;
}

impl<F> WeightedSampleSource for F
where
    F: FnMut() -> Result<WeightedSample>,
{
    fn draw(&mut self) -> Result<WeightedSample> {
        self()
    }
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {x}")))
    }
}

/// Halting threshold `ceil((2 + 4.4 eps) / eps^2 * ln(3 / delta))`.
pub fn repeat_threshold(epsilon: f64, delta: f64) -> Result<u64> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let k = (2.0 + 4.4 * epsilon) / (epsilon * epsilon) * (3.0 / delta).ln();
    Ok(k.ceil() as u64)
}

/// Worst-case draw count `ceil(45 / ||pi|| * eps^-3 * ln(3/delta)^1.5)`,
/// exceeded with probability at most `delta / 3`.
///
/// Being only a formula, it accepts `epsilon = 1` and any `delta` in
/// `(0, 3)` (where `ln(3/delta) > 0`).
pub fn theoretical_sample_bound(pi_norm: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(pi_norm > 0.0 && pi_norm <= 1.0) {
        return Err(domain(format!("pi_norm must lie in (0, 1], got {pi_norm}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 3.0) {
        return Err(domain(format!("delta must lie in (0, 3), got {delta}")));
    }
    let bound = 45.0 / pi_norm * epsilon.powi(-3) * (3.0 / delta).ln().powf(1.5);
    Ok(bound.ceil() as u64)
}

/// Default cap: ten times the worst-case draw count.
pub fn default_sample_cap(pi_norm: f64, epsilon: f64, delta: f64) -> Result<u64> {
    Ok(theoretical_sample_bound(pi_norm, epsilon, delta)?.saturating_mul(10))
}

/// Whether a draw was a repeat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    Repeat,
    New,
}

/// Incremental SumApprox, one loop iteration per [`observe`](Self::observe).
#[derive(Debug, Clone)]
pub struct SumApproxState {
    seen: HashMap<u64, f64>,
    weight_seen: f64,
    accumulated: f64,
    repeats: u64,
    threshold: u64,
    samples: u64,
    sample_cap: Option<u64>,
}

impl SumApproxState {
    pub fn new(threshold: u64) -> Self {
        Self {
            seen: HashMap::new(),
            weight_seen: 0.0,
            accumulated: 0.0,
            repeats: 0,
            threshold: threshold.max(1),
            samples: 0,
            sample_cap: None,
        }
    }

    pub fn for_accuracy(epsilon: f64, delta: f64) -> Result<Self> {
        Ok(Self::new(repeat_threshold(epsilon, delta)?))
    }

    pub fn with_cap(mut self, cap: Option<u64>) -> Self {
        self.sample_cap = cap;
        self
    }

    pub fn is_done(&self) -> bool {
        self.repeats >= self.threshold
    }

    /// Errors if drawing one more sample would exceed the cap.
    pub fn ensure_capacity(&self) -> Result<()> {
        match self.sample_cap {
            Some(cap) if self.samples >= cap => Err(Error::SampleCapExceeded { cap }),
            _ => Ok(()),
        }
    }

    /// Runs one loop iteration on an externally drawn sample.
    pub fn observe(&mut self, sample: WeightedSample) -> Result<Draw> {
        self.ensure_capacity()?;
        if !(sample.gamma.is_finite() && sample.gamma > 0.0) {
            return Err(domain(format!("element {} has gamma {}", sample.element, sample.gamma)));
        }
        self.accumulated += self.weight_seen;
        self.samples += 1;
        match self.seen.get(&sample.element) {
            Some(&first) => {
                if (first - sample.gamma).abs() > 1e-9 * first.max(sample.gamma) {
                    return Err(Error::InconsistentGamma { element: sample.element, first, seen: sample.gamma });
                }
                self.repeats += 1;
                Ok(Draw::Repeat)
            }
            None => {
                self.seen.insert(sample.element, sample.gamma);
                self.weight_seen += sample.gamma;
                Ok(Draw::New)
            }
        }
    }

    /// `w / r`, the estimate of the sum (once at least one repeat exists).
    pub fn estimate(&self) -> Option<f64> {
        (self.repeats > 0).then(|| self.accumulated / self.repeats as f64)
    }

    /// `r / w`, the estimate of the inverse sum.
    pub fn inverse_estimate(&self) -> Option<f64> {
        (self.repeats > 0).then(|| self.repeats as f64 / self.accumulated)
    }

    pub fn weight_seen(&self) -> f64 {
        self.weight_seen
    }

    pub fn accumulated(&self) -> f64 {
        self.accumulated
    }

    pub fn repeats(&self) -> u64 {
        self.repeats
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn distinct(&self) -> usize {
        self.seen.len()
    }
}

/// Runs SumApprox to completion on `source`.
pub fn sum_approx<S>(source: &mut S, epsilon: f64, delta: f64, sample_cap: Option<u64>) -> Result<(f64, EstimatorReport)>
where
    S: WeightedSampleSource + ?Sized,
{
    let started = Stopwatch::start();
    let mut state = SumApproxState::for_accuracy(epsilon, delta)?.with_cap(sample_cap);
    while !state.is_done() {
        state.ensure_capacity()?;
        state.observe(source.draw()?)?;
    }
    let estimate = state.estimate().expect("threshold reached");
    let report = EstimatorReport {
        estimate,
        repeats: state.repeats(),
        samples: state.samples(),
        step_calls: 0,
        probe_calls: 0,
        footprint: state.distinct(),
        elapsed: started.elapsed(),
    };
    Ok((estimate, report))
}

/// Draws indices of a fixed weight vector, `P(i) = gamma_i / sum gamma`.
#[derive(Debug, Clone)]
pub struct VectorSource {
    gammas: Vec<f64>,
    index: WeightedIndex<f64>,
    rng: ChaCha8Rng,
}

impl VectorSource {
    pub fn new(gammas: Vec<f64>, seed: u64) -> Result<Self> {
        if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(domain("weights must be positive and finite"));
        }
        let index = WeightedIndex::new(&gammas).map_err(|e| domain(e.to_string()))?;
        Ok(Self { gammas, index, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn sum(&self) -> f64 {
        self.gammas.iter().sum()
    }

    /// Norm of the sampling distribution `gamma / sum gamma`.
    pub fn pi_norm(&self) -> f64 {
        let total = self.sum();
        self.gammas.iter().map(|g| (g / total).powi(2)).sum::<f64>().sqrt()
    }
}

impl WeightedSampleSource for VectorSource {
    fn draw(&mut self) -> Result<WeightedSample> {
        let i = self.index.sample(&mut self.rng);
        Ok(WeightedSample { element: i as u64, gamma: self.gammas[i] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(repeat_threshold(0.5, 0.3).unwrap(), 39);
        assert_eq!(repeat_threshold(0.25, 0.1).unwrap(), 169);
        assert_eq!(repeat_threshold(1.0 - 1e-12, 3.0 * (-3.0f64).exp()).unwrap(), 20);
        assert!(repeat_threshold(0.0, 0.5).is_err());
        assert!(repeat_threshold(0.5, 1.0).is_err());
        assert!(repeat_threshold(1.2, 0.5).is_err());
    }

    #[test]
    fn sample_bound_examples() {
        assert_eq!(theoretical_sample_bound(1.0, 1.0, 3.0 / std::f64::consts::E).unwrap(), 45);
        // 45 * 10 * 8 * ln(10)^1.5 = 12578.418...
        assert_eq!(theoretical_sample_bound(0.1, 0.5, 0.3).unwrap(), 12_579);
        // 45 * 1000 * 64 * ln(30)^1.5 = 18065094.67...
        assert_eq!(theoretical_sample_bound(0.001, 0.25, 0.1).unwrap(), 18_065_095);
        assert!(theoretical_sample_bound(0.0, 0.5, 0.5).is_err());
        assert!(theoretical_sample_bound(1.5, 0.5, 0.5).is_err());
    }

    fn constant(gamma: f64) -> impl FnMut() -> Result<WeightedSample> {
        move || Ok(WeightedSample { element: 0, gamma })
    }

    #[test]
    fn single_element_is_exact() {
        let k = repeat_threshold(0.25, 0.1).unwrap();
        let (est, report) = sum_approx(&mut constant(1.0), 0.25, 0.1, None).unwrap();
        assert_eq!(est, 1.0);
        assert_eq!(report.samples, k + 1);
        assert_eq!(report.repeats, k);
        assert_eq!(report.footprint, 1);
        let (est, _) = sum_approx(&mut constant(7.5), 0.25, 0.1, None).unwrap();
        assert_eq!(est, 7.5);
    }

    #[test]
    fn uniform_hundred() {
        let mut ok = 0;
        for trial in 0..200 {
            let mut src = VectorSource::new(vec![1.0; 100], 1000 + trial).unwrap();
            let (est, _) = sum_approx(&mut src, 0.25, 0.1, None).unwrap();
            if (75.0..=125.0).contains(&est) {
                ok += 1;
            }
        }
        assert!(ok >= 170, "{ok}/200 within 25%");
    }

    #[test]
    fn cap_and_consistency_errors() {
        let mut counter = 0u64;
        let mut never_repeats = || {
            counter += 1;
            Ok(WeightedSample { element: counter, gamma: 1.0 })
        };
        assert!(matches!(
            sum_approx(&mut never_repeats, 0.5, 0.5, Some(1000)),
            Err(Error::SampleCapExceeded { cap: 1000 })
        ));

        let mut flip = false;
        let mut inconsistent = || {
            flip = !flip;
            Ok(WeightedSample { element: 3, gamma: if flip { 1.0 } else { 2.0 } })
        };
        assert!(matches!(
            sum_approx(&mut inconsistent, 0.5, 0.5, None),
            Err(Error::InconsistentGamma { element: 3, .. })
        ));

        let mut state = SumApproxState::new(5);
        assert!(state.observe(WeightedSample { element: 1, gamma: 0.0 }).is_err());
    }

    /// Straight transcription of the loop, kept separate from the state
    /// machine on purpose.
    fn reference_trace(draws: &[(u64, f64)], k: u64) -> Vec<(f64, f64, u64)> {
        let mut s: Vec<u64> = Vec::new();
        let (mut w_s, mut w, mut r) = (0.0, 0.0, 0u64);
        let mut trace = Vec::new();
        let mut i = 0;
        while r < k && i < draws.len() {
            w += w_s;
            let (u, g) = draws[i];
            i += 1;
            if s.contains(&u) {
                r += 1;
            } else {
                s.push(u);
                w_s += g;
            }
            trace.push((w_s, w, r));
        }
        trace
    }

    proptest! {
        #[test]
        fn trace_matches_reference(ids in proptest::collection::vec(0u64..12, 1..200), k in 1u64..30) {
            let gamma = |id: u64| 0.5 + id as f64 * 1.25;
            let draws: Vec<(u64, f64)> = ids.iter().map(|&id| (id, gamma(id))).collect();
            let expected = reference_trace(&draws, k);
            let mut state = SumApproxState::new(k);
            for (step, &(id, g)) in draws.iter().enumerate() {
                if state.is_done() { break; }
                let before = state.accumulated();
                state.observe(WeightedSample { element: id, gamma: g }).unwrap();
                prop_assert!(state.accumulated() >= before);
                prop_assert!(state.repeats() <= k);
                let (w_s, w, r) = expected[step];
                prop_assert_eq!(state.weight_seen(), w_s);
                prop_assert_eq!(state.accumulated(), w);
                prop_assert_eq!(state.repeats(), r);
            }
        }

        #[test]
        fn scale_equivariance(seed in any::<u64>(), c in 0.01f64..100.0) {
            // powers of two keep the products exact
            let scale = 2f64.powi(c.log2().round() as i32);
            let gammas: Vec<f64> = (0..40).map(|i| 1.0 + (i % 7) as f64).collect();
            let mut a = VectorSource::new(gammas.clone(), seed).unwrap();
            let mut b = VectorSource::new(gammas.iter().map(|g| g * scale).collect(), seed).unwrap();
            let (ea, ra) = sum_approx(&mut a, 0.5, 0.3, None).unwrap();
            let (eb, rb) = sum_approx(&mut b, 0.5, 0.3, None).unwrap();
            prop_assert_eq!(ra.samples, rb.samples);
            prop_assert_eq!(eb, ea * scale);
        }

        #[test]
        fn scale_equivariance_on_replayed_draws(ids in proptest::collection::vec(0u64..15, 50..300), c in 0.001f64..1000.0) {
            let run = |scale: f64| {
                let mut state = SumApproxState::new(8);
                for &id in &ids {
                    if state.is_done() { break; }
                    state.observe(WeightedSample { element: id, gamma: scale * (1.0 + id as f64) }).unwrap();
                }
                state.estimate()
            };
            if let (Some(a), Some(b)) = (run(1.0), run(c)) {
                prop_assert!((b - c * a).abs() <= 1e-12 * c * a);
            }
        }
    }
}
