use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pimass::baselines::{return_time_estimate, ReturnTimeConfig};
use pimass::chain::{read_chain, write_chain};
use pimass::experiment::{emit_csv, emit_svg, run_sweep, Algo, SweepConfig};
use pimass::generators::{star_expander_chain, torus_chain, StarExpanderSpec, StarVariant, TorusSpec, Weighting};
use pimass::mass_approx::{full_mass_approx, mass_approx, walk_length_from_tau, EstimatorOptions, WalkConfig};
use pimass::oracle::{mixing_profile, pi_norm, stationary_exact};
use pimass::{Error, EstimatorReport, ReversibleChain, StateId};

#[derive(Parser)]
#[command(name = "pimass", version, about = "Estimate the stationary mass of one state of a reversible Markov chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a chain and write it in the text format.
    Gen {
        #[command(flatten)]
        source: ChainSource,
        /// Generator seed (overrides --chain-seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact stationary distribution, its norm, and the d(t) table.
    Exact {
        #[command(flatten)]
        source: ChainSource,
        #[arg(long)]
        target: Option<usize>,
        /// Also list the k heaviest states.
        #[arg(long, default_value_t = 0)]
        top_k: usize,
        #[arg(long, default_value_t = 100_000)]
        t_max: usize,
        /// Write the `t,d_t` table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One estimator run; prints key=value lines.
    Estimate {
        #[command(flatten)]
        source: ChainSource,
        #[command(flatten)]
        accuracy: Accuracy,
        #[arg(long, default_value = "full-mass-approx")]
        algo: Algo,
        /// Walk length (truncation for return-time). Derived from the exact
        /// mixing time when omitted.
        #[arg(long)]
        walk_len: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        c_const: f64,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Return-time walks; defaults to ceil(2/eps^2 ln(2/delta)).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        t_max: usize,
    },
    /// Walk-length sweep over one or more estimators; writes CSV and SVG.
    Sweep {
        #[command(flatten)]
        source: ChainSource,
        #[command(flatten)]
        accuracy: Accuracy,
        /// Comma-separated algorithms.
        #[arg(long, value_delimiter = ',', default_value = "mass-approx,full-mass-approx,return-time")]
        algo: Vec<Algo>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Combined step + probe ceiling per algorithm.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 3)]
        trials_per_len: u32,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Walks per return-time run.
        #[arg(long)]
        return_trials: Option<u64>,
        /// Record wall-clock milliseconds (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args)]
struct Accuracy {
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ChainSource {
    /// Read the chain from a file in the text format.
    #[arg(long, conflicts_with_all = ["torus", "rows", "star_expander"])]
    chain: Option<PathBuf>,
    /// Torus size as RxC.
    #[arg(long, conflicts_with_all = ["rows", "star_expander"])]
    torus: Option<String>,
    #[arg(long, requires = "cols")]
    rows: Option<usize>,
    #[arg(long, requires = "rows")]
    cols: Option<usize>,
    /// Torus shortcuts as a fraction of the node count.
    #[arg(long, default_value_t = 0.0)]
    shortcuts: f64,
    #[arg(long, default_value = "uniform")]
    weighting: Weighting,
    /// Build a star-expander chain from --n0 --d --star-delta --variant.
    #[arg(long)]
    star_expander: bool,
    #[arg(long, default_value_t = 200)]
    n0: usize,
    #[arg(long, default_value_t = 8)]
    d: usize,
    /// Star size (arcs per star center).
    #[arg(long, default_value_t = 8)]
    star_delta: usize,
    #[arg(long, default_value = "g")]
    variant: StarVariant,
    #[arg(long, default_value_t = 0.01)]
    eps_attach: f64,
    #[arg(long, default_value_t = 0)]
    chain_seed: u64,
}

impl ChainSource {
    fn load(&self, seed_override: Option<u64>) -> Result<ReversibleChain, Error> {
        let seed = seed_override.unwrap_or(self.chain_seed);
        if let Some(path) = &self.chain {
            return read_chain(BufReader::new(File::open(path)?));
        }
        if self.star_expander {
            let spec = StarExpanderSpec { n0: self.n0, d: self.d, delta: self.star_delta, variant: self.variant, eps_attach: self.eps_attach, seed };
            return Ok(star_expander_chain(&spec)?.chain);
        }
        let (rows, cols) = match (&self.torus, self.rows, self.cols) {
            (Some(t), _, _) => parse_dims(t)?,
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err(Error::Domain("choose a chain: --chain FILE, --torus RxC, --rows/--cols or --star-expander".into())),
        };
        let spec = TorusSpec { rows, cols, shortcut_fraction: self.shortcuts, weighting: self.weighting, seed };
        torus_chain(&spec)
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Domain(format!("torus size must look like 50x50, got `{s}`"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_report(out: &mut impl Write, algo: Algo, walk_len: usize, true_pi: f64, report: &EstimatorReport) -> io::Result<()> {
    writeln!(out, "algo={algo}")?;
    writeln!(out, "walk_len={walk_len}")?;
    writeln!(out, "estimate={:.16e}", report.estimate)?;
    writeln!(out, "true_pi={true_pi:.16e}")?;
    writeln!(out, "rel_error={:.16e}", (report.estimate - true_pi).abs() / true_pi)?;
    writeln!(out, "repeats={}", report.repeats)?;
    writeln!(out, "samples={}", report.samples)?;
    writeln!(out, "step_calls={}", report.step_calls)?;
    writeln!(out, "probe_calls={}", report.probe_calls)?;
    writeln!(out, "footprint={}", report.footprint)?;
    writeln!(out, "elapsed_ms={}", report.elapsed.as_millis())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen { source, seed, out } => {
            let chain = source.load(seed)?;
            let mut w = output(&out)?;
            write_chain(&chain, &mut w)?;
            w.flush()?;
        }
        Command::Exact { source, target, top_k, t_max, out } => {
            let chain = source.load(None)?;
            let pi = stationary_exact(&chain)?;
            let stdout = io::stdout();
            let mut s = stdout.lock();
            writeln!(s, "n={}", chain.n())?;
            writeln!(s, "pi_norm={:.16e}", pi_norm(&pi))?;
            if let Some(v) = target {
                if !chain.contains(StateId(v)) {
                    return Err(Error::InvalidState { state: v, n: chain.n() });
                }
                writeln!(s, "pi[{v}]={:.16e}", pi.get(StateId(v)))?;
            }
            for (rank, (u, p)) in pi.top_k(top_k).into_iter().enumerate() {
                writeln!(s, "top[{rank}]={u}:{p:.16e}")?;
            }
            let profile = mixing_profile(&chain, t_max)?;
            writeln!(s, "tau={}", profile.tau)?;
            drop(s);
            let mut w = output(&out)?;
            writeln!(w, "t,d_t")?;
            for (t, d) in profile.d_values.iter().enumerate() {
                writeln!(w, "{t},{d:.16e}")?;
            }
            w.flush()?;
        }
        Command::Estimate { source, accuracy, algo, walk_len, c_const, burn_in, trials, t_max } => {
            let chain = source.load(None)?;
            let v = StateId(accuracy.target);
            if !chain.contains(v) {
                return Err(Error::InvalidState { state: v.0, n: chain.n() });
            }
            let pi = stationary_exact(&chain)?;
            let true_pi = pi.get(v);
            let t = match walk_len {
                Some(t) => t,
                None if algo == Algo::ReturnTime => 50 * chain.n(),
                None => {
                    let tau = mixing_profile(&chain, t_max)?.tau;
                    walk_length_from_tau(tau, pi_norm(&pi), accuracy.eps, accuracy.delta, c_const)?
                }
            };
            let options = EstimatorOptions::seeded(accuracy.seed);
            let (_, report) = match algo {
                Algo::MassApprox => mass_approx(&chain, v, accuracy.eps, accuracy.delta, &WalkConfig::new(t)?, options)?,
                Algo::FullMassApprox => {
                    let walk = WalkConfig::new(t)?.with_burn_in(burn_in);
                    full_mass_approx(&chain, v, accuracy.eps, accuracy.delta, &walk, options)?
                }
                Algo::ReturnTime => {
                    let trials = match trials {
                        Some(k) => k,
                        None => ReturnTimeConfig::trials_for(accuracy.eps, accuracy.delta)?,
                    };
                    return_time_estimate(&chain, v, &ReturnTimeConfig::new(t as u64, trials)?, accuracy.seed)?
                }
            };
            let mut s = io::stdout().lock();
            print_report(&mut s, algo, t, true_pi, &report)?;
        }
        Command::Sweep { source, accuracy, algo, out, svg, budget, trials_per_len, burn_in, return_trials, timing } => {
            let chain = source.load(None)?;
            let mut config = SweepConfig::new(accuracy.eps, accuracy.delta, accuracy.seed);
            config.budget = budget;
            config.trials = trials_per_len;
            config.burn_in = burn_in;
            config.return_time_trials = return_trials;
            config.timing = timing;
            let outcome = run_sweep(&chain, StateId(accuracy.target), &algo, &config)?;
            for (a, e) in &outcome.stopped {
                eprintln!("{a}: {e}");
            }
            emit_csv(&outcome.records, &out)?;
            if let Some(p) = svg {
                emit_svg(&outcome.records, &p)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
