//! Communication equilibria of finite Bayesian games.
//!
//! The crate simulates uncoupled no-regret dynamics in which every player runs
//! an untruthful-swap-regret learner, and audits the outcome exactly: regret
//! ledgers, deviation gains for each equilibrium class, strategy
//! representability, adversarial reward streams and price-of-anarchy bounds.

pub mod adversary;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod learners;
pub mod linalg;
pub mod poa;
pub mod radix;
pub mod regret;
pub mod rng;
pub mod transforms;
pub mod verifier;

pub use error::{Error, Result};
pub use game::{
    BayesianGame, Dims, MixtureComponent, MixtureDistribution, PayoffScope, PriorModel,
    StrategyDistribution, StrategySpace, TabularDistribution, TypeWisePolicy,
};

/// Tolerance for probability sums on ingested data.
pub const INGEST_TOL: f64 = 1e-12;
/// Tolerance for derived quantities.
pub const DERIVED_TOL: f64 = 1e-9;
/// Default cap on enumerated sets (strategy spaces, opponent profiles, tabular entries).
pub const DEFAULT_CAP: usize = 1_000_000;
