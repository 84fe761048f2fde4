//! Estimating the stationary mass `pi(v)` of a single state in a
//! time-reversible Markov chain from random-walk samples.
//!
//! The chain is only reachable through a metered [`QuerySession`]
//! (`step` simulates a transition, `probe` reads a transition probability,
//! both restricted to visited states). Walks track `gamma_u = pi(u) / pi(v)`
//! through detailed-balance ratios, which turns mass estimation into sum
//! estimation: sample states near-stationarily, count repeats, and invert
//! the estimated sum `sum_u gamma_u = 1 / pi(v)`.
//!
//! - [`chain`]: chains, sessions, distributions, the text format.
//! - [`oracle`]: exact stationary distribution, `d(t)`, mixing time.
//! - [`sum_approx`]: the repeat-counting sum estimator.
//! - [`mass_approx`]: MassApprox and FullMassApprox.
//! - [`generators`]: torus chains, star-expander family, the adversarial
//!   instances.
//! - [`baselines`]: truncated return-time estimator.
//! - [`experiment`]: walk-length sweeps, CSV and SVG output.

pub mod baselines;
pub mod chain;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod mass_approx;
pub mod oracle;
pub mod report;
pub mod sum_approx;

pub use chain::{validate_reversibility, DistributionVector, QuerySession, ReversibleChain, StateId};
pub use error::{Error, Result};
pub use report::EstimatorReport;
