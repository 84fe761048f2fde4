//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one `PASS`/`FAIL` line; exits nonzero if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pimass::chain::tv_distance;
use pimass::experiment::{cost_to_reach, run_sweep, Algo, SweepConfig};
use pimass::generators::{
    adversarial_sum_vectors, star_expander_chain, torus_chain, AdversarialVariant, StarExpanderSpec, StarVariant, TorusSpec, Weighting,
};
use pimass::mass_approx::{full_mass_approx, gamma_step, mass_approx, EstimatorOptions, GammaLedger, WalkConfig};
use pimass::oracle::{mixing_profile, pi_norm, stationary_exact, step_distribution};
use pimass::sum_approx::{sum_approx, theoretical_sample_bound, VectorSource};
use pimass::{validate_reversibility, DistributionVector, QuerySession, ReversibleChain, StateId};

const EPS: f64 = 0.25;
const DELTA: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn generator_chains(count: usize) -> Vec<ReversibleChain> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let chain = if i % 2 == 0 {
            let side = [10usize, 20, 30, 40, 50][(i / 2) as usize % 5];
            let weighting = if i % 4 == 0 { Weighting::Uniform } else { Weighting::InverseUniform };
            torus_chain(&TorusSpec::new(side, side).shortcuts(0.01 * (i % 3) as f64).weighting(weighting).seed(i)).unwrap()
        } else {
            let (n0, delta) = [(20usize, 8usize), (50, 8), (40, 16), (100, 8), (20, 32)][(i / 2) as usize % 5];
            let variant = if i % 4 == 1 { StarVariant::G } else { StarVariant::GPrime };
            star_expander_chain(&StarExpanderSpec::new(n0, 4, delta).variant(variant).seed(i)).unwrap().chain
        };
        out.push(chain);
    }
    out
}

fn crit1_oracle() -> Outcome {
    let started = Instant::now();
    let chains = generator_chains(20);
    let mut worst: f64 = 0.0;
    let mut all_reversible = true;
    let mut max_n = 0;
    for c in &chains {
        max_n = max_n.max(c.n());
        let pi = stationary_exact(c).unwrap();
        let next = DistributionVector::new(step_distribution(c, pi.probs())).unwrap();
        worst = worst.max(tv_distance(&pi, &next).unwrap());
        all_reversible &= validate_reversibility(c, &pi).unwrap();
    }
    let elapsed = started.elapsed();
    outcome(
        worst <= 1e-9 && all_reversible && max_n <= 2500 && elapsed < Duration::from_secs(10),
        format!("20 chains (n <= {max_n}): max tvd(pi P, pi) = {worst:.2e}, reversible = {all_reversible}, {elapsed:.2?}"),
    )
}

fn uniform_gammas(_seed: u64) -> Vec<f64> {
    vec![1.0; 100]
}

fn skewed_gammas(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..100).map(|_| 1.0 / (1.0 - rng.random::<f64>())).collect()
}

type Family = (&'static str, fn(u64) -> Vec<f64>);
const FAMILIES: [Family; 2] = [("uniform", uniform_gammas), ("skewed", skewed_gammas)];

fn crit2_sum_accuracy() -> Outcome {
    let started = Instant::now();
    let allowed = DELTA + 3.0 * (DELTA / 200.0).sqrt();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, make) in FAMILIES {
        let mut failures = 0;
        for trial in 0..200u64 {
            let mut src = VectorSource::new(make(trial), 1000 + trial).unwrap();
            let truth = src.sum();
            let (est, _) = sum_approx(&mut src, EPS, DELTA, None).unwrap();
            if (est - truth).abs() >= EPS * truth {
                failures += 1;
            }
        }
        let frac = failures as f64 / 200.0;
        pass &= frac <= allowed;
        parts.push(format!("{name} failure fraction {frac:.3}"));
    }
    let elapsed = started.elapsed();
    outcome(pass && elapsed < Duration::from_secs(30), format!("{} (limit {allowed:.3}), {elapsed:.2?}", parts.join(", ")))
}

fn crit3_sample_bound() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, make) in FAMILIES {
        let mut exceed = 0;
        let mut max_ratio: f64 = 0.0;
        for trial in 0..200u64 {
            let mut src = VectorSource::new(make(trial), 1000 + trial).unwrap();
            let bound = theoretical_sample_bound(src.pi_norm(), EPS, DELTA).unwrap();
            let (_, report) = sum_approx(&mut src, EPS, DELTA, None).unwrap();
            max_ratio = max_ratio.max(report.samples as f64 / bound as f64);
            if report.samples > bound {
                exceed += 1;
            }
        }
        let frac = exceed as f64 / 200.0;
        pass &= frac <= 0.05;
        parts.push(format!("{name}: {exceed}/200 over bound (max samples/bound {max_ratio:.3})"));
    }
    outcome(pass, parts.join(", "))
}

/// Fewer distinct elements among the draws suggests fewer heavy entries,
/// i.e. `x` rather than `x'`.
fn distinct_in(src: &mut VectorSource, draws: usize) -> usize {
    use pimass::sum_approx::WeightedSampleSource;
    let mut seen: Vec<u64> = (0..draws).map(|_| src.draw().unwrap().element).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn crit4_adversarial() -> Outcome {
    let (n, k) = (10_000usize, 400usize);
    let budget = ((k as f64).sqrt() / 4.0).floor() as usize;
    let mut coin = ChaCha8Rng::seed_from_u64(44);
    let mut correct = 0;
    let mut separated = 0;
    for trial in 0..200u64 {
        let x = adversarial_sum_vectors(n, k, AdversarialVariant::X, 2 * trial).unwrap();
        let xp = adversarial_sum_vectors(n, k, AdversarialVariant::XPrime, 2 * trial + 1).unwrap();
        let dx = distinct_in(&mut x.source(7 * trial).unwrap(), budget);
        let dxp = distinct_in(&mut xp.source(7 * trial + 3).unwrap(), budget);
        let guess_first_is_x = match dx.cmp(&dxp) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => coin.random::<bool>(),
        };
        if guess_first_is_x {
            correct += 1;
        }

        let (ex, _) = sum_approx(&mut x.source(11 * trial).unwrap(), EPS, DELTA, None).unwrap();
        let (exp, _) = sum_approx(&mut xp.source(11 * trial + 5).unwrap(), EPS, DELTA, None).unwrap();
        if ex * (1.0 + EPS) < exp * (1.0 - EPS) {
            separated += 1;
        }
    }
    let distinguish = correct as f64 / 200.0;
    let separate = separated as f64 / 200.0;
    outcome(
        distinguish <= 0.60 && separate >= 0.80,
        format!("{budget}-sample distinguisher correct {distinguish:.3} (<= 0.60), full runs separated {separate:.3} (>= 0.80)"),
    )
}

struct TorusSetup {
    chain: ReversibleChain,
    tau: usize,
    truth: f64,
}

fn torus50() -> TorusSetup {
    let chain = torus_chain(&TorusSpec::new(50, 50)).unwrap();
    let tau = mixing_profile(&chain, 100_000).unwrap().tau;
    let truth = stationary_exact(&chain).unwrap().get(StateId(0));
    TorusSetup { chain, tau, truth }
}

fn crit5_mass(setup: &TorusSetup, setup_time: Duration) -> Outcome {
    let started = Instant::now();
    let walk = WalkConfig::new(4 * setup.tau).unwrap();
    let good = (0..100u64)
        .filter(|&s| {
            let (est, _) = mass_approx(&setup.chain, StateId(0), EPS, DELTA, &walk, EstimatorOptions::seeded(s)).unwrap();
            (est - setup.truth).abs() <= EPS * setup.truth
        })
        .count();
    let elapsed = started.elapsed() + setup_time;
    outcome(
        good >= 85 && (setup.truth - 4e-4).abs() < 1e-15 && elapsed < Duration::from_secs(300),
        format!("tau = {}, t = {}: {good}/100 within 25% of pi(v) = {:.1e}, {elapsed:.2?}", setup.tau, walk.t, setup.truth),
    )
}

fn crit6_full(setup: &TorusSetup) -> Outcome {
    let walk = WalkConfig::new(4 * setup.tau).unwrap();
    let good = (0..100u64)
        .filter(|&s| {
            let (est, _) = full_mass_approx(&setup.chain, StateId(0), EPS, DELTA, &walk, EstimatorOptions::seeded(s)).unwrap();
            (est - setup.truth).abs() <= EPS * setup.truth
        })
        .count();
    let mut smaller = 0;
    let (mut sum_full, mut sum_mass) = (0usize, 0usize);
    for s in 0..50u64 {
        let opts = EstimatorOptions::seeded(500 + s);
        let (_, full) = full_mass_approx(&setup.chain, StateId(0), EPS, DELTA, &walk, opts).unwrap();
        let (_, mass) = mass_approx(&setup.chain, StateId(0), EPS, DELTA, &walk, opts).unwrap();
        sum_full += full.footprint;
        sum_mass += mass.footprint;
        if full.footprint < mass.footprint {
            smaller += 1;
        }
    }
    outcome(
        good >= 85 && smaller >= 40,
        format!(
            "{good}/100 within 25%; footprint(full) < footprint(mass) in {smaller}/50 (mean {:.0} vs {:.0} of {})",
            sum_full as f64 / 50.0,
            sum_mass as f64 / 50.0,
            setup.chain.n()
        ),
    )
}

fn crit7_gamma() -> Outcome {
    let mut chains: Vec<ReversibleChain> = (0..5u64)
        .map(|i| {
            let w = if i % 2 == 0 { Weighting::InverseUniform } else { Weighting::Uniform };
            torus_chain(&TorusSpec::new(20 + 5 * i as usize, 20).shortcuts(0.02).weighting(w).seed(70 + i)).unwrap()
        })
        .collect();
    for i in 0..5u64 {
        let variant = if i % 2 == 0 { StarVariant::G } else { StarVariant::GPrime };
        chains.push(star_expander_chain(&StarExpanderSpec::new(40, 4, 8 + 4 * i as usize).variant(variant).seed(80 + i)).unwrap().chain);
    }
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (i, c) in chains.iter().enumerate() {
        let pi = stationary_exact(c).unwrap();
        let v = StateId(0);
        let mut session = QuerySession::new(c, v, 900 + i as u64).unwrap();
        let mut ledger = GammaLedger::new(c.n(), v);
        let mut u = v;
        for _ in 0..100_000 {
            let next = session.step(u).unwrap();
            gamma_step(&mut ledger, &mut session, u, next).unwrap();
            u = next;
        }
        for (x, g) in ledger.iter() {
            let exact = pi.get(x) / pi.get(v);
            worst = worst.max((g - exact).abs() / exact);
            checked += 1;
        }
    }
    outcome(worst <= 1e-6, format!("{checked} recorded states over 10 chains, max relative error {worst:.2e}"))
}

fn crit8_star_family() -> Outcome {
    let (n0, d) = (200usize, 4usize);
    let norm = |delta: usize| {
        let s = star_expander_chain(&StarExpanderSpec::new(n0, d, delta).seed(8)).unwrap();
        let pi = stationary_exact(&s.chain).unwrap();
        let center_mass: f64 = s.star_centers.iter().map(|&c| pi.get(c)).sum();
        (pi_norm(&pi), center_mass)
    };
    let (norm8, mass8) = norm(8);
    let (norm32, mass32) = norm(32);
    let ratio = norm32 / norm8;

    let g = star_expander_chain(&StarExpanderSpec::new(n0, d, 8).seed(9)).unwrap();
    let gp = star_expander_chain(&StarExpanderSpec::new(n0, d, 8).seed(9).variant(StarVariant::GPrime)).unwrap();
    let pi_g = stationary_exact(&g.chain).unwrap();
    let pi_gp = stationary_exact(&gp.chain).unwrap();
    // star center i of G' is the homologue of star center i of G
    let worst_homologue = g
        .star_centers
        .iter()
        .zip(&gp.star_centers)
        .map(|(&a, &b)| pi_gp.get(b) / pi_g.get(a))
        .max_by(|a, b| (a - 2.0).abs().total_cmp(&(b - 2.0).abs()))
        .unwrap();
    let pass = (ratio - 2.0).abs() <= 0.25 * 2.0 && mass8.min(mass32) >= 0.2 && (worst_homologue - 2.0).abs() <= 0.15 * 2.0;
    outcome(
        pass,
        format!(
            "n0 = {n0}, d = {d}: ||pi||(32)/||pi||(8) = {ratio:.4}, center mass {mass8:.3}/{mass32:.3}, worst pi_G'(v)/pi_G(v) = {worst_homologue:.4}"
        ),
    )
}

fn crit9_sweep() -> Outcome {
    let started = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for weighting in [Weighting::Uniform, Weighting::InverseUniform] {
        let mut wins = 0;
        for rep in 0..5u64 {
            let chain = torus_chain(&TorusSpec::new(100, 100).weighting(weighting).seed(rep)).unwrap();
            let config = SweepConfig::new(EPS, DELTA, 9_000 + rep);
            let out = run_sweep(&chain, StateId(0), &[Algo::FullMassApprox, Algo::ReturnTime], &config).unwrap();
            let full = cost_to_reach(&out.records, Algo::FullMassApprox, 0.5);
            let base = cost_to_reach(&out.records, Algo::ReturnTime, 0.5);
            let won = match (full, base) {
                (Some(f), Some(b)) => f < b,
                (Some(_), None) => true,
                _ => false,
            };
            wins += won as usize;
        }
        pass &= wins >= 4;
        parts.push(format!("{weighting:?}: full cheaper in {wins}/5"));
    }
    let elapsed = started.elapsed();
    outcome(pass && elapsed < Duration::from_secs(900), format!("{}, {elapsed:.2?}", parts.join(", ")))
}

fn crit10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_pimass"))
            .args(["sweep", "--torus", "30x30", "--weighting", "inverse-uniform", "--chain-seed", "3", "--seed", "17", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    outcome(!a.is_empty() && a == b, format!("two sweep runs, {} bytes, identical = {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, o: Outcome| {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {}", o.detail);
        failed += (!o.pass) as u32;
    };
    report(1, "oracle correctness", crit1_oracle());
    report(2, "sum estimator accuracy", crit2_sum_accuracy());
    report(3, "sum estimator sample bound", crit3_sample_bound());
    report(4, "adversarial sum instances", crit4_adversarial());
    let t0 = Instant::now();
    let setup = torus50();
    let setup_time = t0.elapsed();
    report(5, "MassApprox end-to-end", crit5_mass(&setup, setup_time));
    report(6, "FullMassApprox end-to-end", crit6_full(&setup));
    report(7, "gamma ledger fidelity", crit7_gamma());
    report(8, "star-expander family shape", crit8_star_family());
    report(9, "sweep cost ordering", crit9_sweep());
    report(10, "sweep determinism", crit10_determinism());
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
