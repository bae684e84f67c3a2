//! Uncoupled dynamics: every player runs its own learner, rewards are computed
//! from the joint play, and the empirical distribution of play is returned
//! together with exact per-player regret ledgers.

use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    BayesianGame, MixtureComponent, MixtureDistribution, StrategyDistribution, TypeWisePolicy,
};
use crate::learners::{StrategySwapLearner, TypewiseLearner, UntruthfulLearner};
use crate::regret::{RegretLedger, StrategyLedger};
use crate::rng::{self, Purpose};
use crate::DEFAULT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    Untruthful,
    Typewise,
    StrategySwap,
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "untruthful" => Ok(LearnerKind::Untruthful),
            "typewise" => Ok(LearnerKind::Typewise),
            "strategy-swap" => Ok(LearnerKind::StrategySwap),
            other => Err(Error::InvalidInput(format!("unknown learner {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardMode {
    Exact,
    Sampled { eps: f64, delta: f64 },
}

#[derive(Debug, Clone)]
pub struct DynamicsConfig {
    /// Learner per player.
    pub learners: Vec<LearnerKind>,
    pub horizon: usize,
    pub reward: RewardMode,
    pub seed: u64,
    /// Compute players' steps and rewards on the rayon pool.
    pub parallel: bool,
    /// Keep every k-th round as a mixture component of weight k/T. 1 keeps all
    /// rounds; larger values break exact agreement between certificate and verifier.
    pub thin: usize,
    /// Record a regret curve point every this many rounds (and always at T); 0 disables the curve.
    pub curve_every: usize,
    /// Cap on enumerated opponent profiles and strategy spaces.
    pub cap: usize,
}

impl DynamicsConfig {
    pub fn new(n_players: usize, learner: LearnerKind, horizon: usize) -> Self {
        DynamicsConfig {
            learners: vec![learner; n_players],
            horizon,
            reward: RewardMode::Exact,
            seed: 0,
            parallel: false,
            thin: 1,
            curve_every: 1,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: usize,
    pub player: usize,
    pub external: f64,
    pub typewise: f64,
    pub untruthful: f64,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub mixture: MixtureDistribution,
    pub ledgers: Vec<RegretLedger>,
    /// Present for players running the strategy swap learner.
    pub strategy_ledgers: Vec<Option<StrategyLedger>>,
    pub curve: Vec<CurvePoint>,
    /// max_i untruthful_regret_i / T.
    pub certificate: f64,
}

/// √(½t ln|Θ|) + 6√(t|A| ln|A|) + 2|A| ln|A|.
pub fn regret_bound(t: usize, n_types: usize, n_actions: usize) -> f64 {
    let (t, lt, na) = (t as f64, (n_types as f64).ln(), n_actions as f64);
    let la = na.ln();
    (0.5 * t * lt).sqrt() + 6.0 * (t * na * la).sqrt() + 2.0 * na * la
}

fn opponents_size(game: &BayesianGame, i: usize) -> u128 {
    let d = game.dims();
    (0..game.n_players())
        .filter(|&j| j != i)
        .fold(1u128, |acc, j| {
            acc.saturating_mul(d.types[j] as u128)
                .saturating_mul(d.actions[j] as u128)
        })
}

/// u_i(θ_i,a_i) = E_{θ_{-i}∼ρ|θ_i} E_{a_{-i}∼π_{-i}} v_i(θ; a) by full enumeration.
///
/// `profile` holds one policy per player; entry i is ignored. Zero-mass types get zero rewards.
pub fn exact_reward(
    game: &BayesianGame,
    i: usize,
    profile: &[TypeWisePolicy],
    cap: usize,
) -> Result<Vec<f64>> {
    let size = opponents_size(game, i);
    if size > cap as u128 {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    let d = game.dims();
    let (nt, na) = (d.types[i], d.actions[i]);
    let (tr, ar) = (&d.type_radix, &d.action_radix);
    let n_oa = ar.others_total(i);
    let mut u = vec![0.0; nt * na];
    let mut q = vec![0.0; n_oa];
    for ti in 0..nt {
        let Some(cond) = game.prior().conditional(i, ti) else {
            continue;
        };
        for (o, &p) in cond.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let t = tr.join(i, ti, o);
            for (oa, qv) in q.iter_mut().enumerate() {
                let full = ar.join(i, 0, oa);
                *qv = (0..game.n_players())
                    .filter(|&j| j != i)
                    .map(|j| profile[j].get(tr.digit(t, j), ar.digit(full, j)))
                    .product();
            }
            let row = game.payoff_row(i, t);
            for ai in 0..na {
                let s: f64 = q
                    .iter()
                    .enumerate()
                    .filter(|(_, qv)| **qv != 0.0)
                    .map(|(oa, qv)| qv * row[ar.join(i, ai, oa)])
                    .sum();
                u[ti * na + ai] += p * s;
            }
        }
    }
    Ok(u)
}

/// ⌈(8/ε²)·ln(2nT·max_i|Θ_i||A_i| / δ)⌉.
pub fn sample_count(
    n_players: usize,
    horizon: usize,
    max_type_actions: usize,
    eps: f64,
    delta: f64,
) -> usize {
    let arg = 2.0 * n_players as f64 * horizon as f64 * max_type_actions as f64 / delta;
    (8.0 / (eps * eps) * arg.ln()).ceil() as usize
}

/// Monte-Carlo estimate of [`exact_reward`] from `samples` draws of (θ_{-i}, a_{-i}) per own type.
///
/// The same draws are reused for every own action of a type.
pub fn sampled_reward<R: Rng>(
    game: &BayesianGame,
    i: usize,
    profile: &[TypeWisePolicy],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let d = game.dims();
    let (nt, na) = (d.types[i], d.actions[i]);
    let (tr, ar) = (&d.type_radix, &d.action_radix);
    let n = game.n_players();
    let mut u = vec![0.0; nt * na];
    let mut a = vec![0usize; n];
    for ti in 0..nt {
        let Some(cond) = game.prior().conditional(i, ti) else {
            continue;
        };
        let types = WeightedIndex::new(cond).map_err(|e| Error::NotStochastic(e.to_string()))?;
        for _ in 0..samples {
            let t = tr.join(i, ti, types.sample(rng));
            for j in (0..n).filter(|&j| j != i) {
                let row = profile[j].row(tr.digit(t, j));
                a[j] = sample_row(row, rng);
            }
            let row = game.payoff_row(i, t);
            for ai in 0..na {
                a[i] = ai;
                u[ti * na + ai] += row[ar.encode(&a)];
            }
        }
        for v in &mut u[ti * na..(ti + 1) * na] {
            *v /= samples as f64;
        }
    }
    Ok(u)
}

fn sample_row<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, p) in row.iter().enumerate() {
        acc += p;
        if x < acc {
            return k;
        }
    }
    row.iter().rposition(|p| *p > 0.0).unwrap_or(row.len() - 1)
}

/// Uniform-weight mixture of per-round product profiles.
pub fn empirical_distribution(trace: &[Vec<TypeWisePolicy>]) -> MixtureDistribution {
    MixtureDistribution::uniform(trace.to_vec())
}

enum PlayerLearner {
    Untruthful(UntruthfulLearner),
    Typewise(TypewiseLearner),
    StrategySwap(StrategySwapLearner),
}

impl PlayerLearner {
    fn step(
        &mut self,
        prev: Option<&[f64]>,
    ) -> Result<(TypeWisePolicy, Option<StrategyDistribution>)> {
        match self {
            PlayerLearner::Untruthful(l) => Ok((l.step(prev)?, None)),
            PlayerLearner::Typewise(l) => Ok((l.step(prev)?, None)),
            PlayerLearner::StrategySwap(l) => {
                let sigma = l.step(prev)?;
                Ok((sigma.type_marginals(), Some(sigma)))
            }
        }
    }
}

fn validate_config(game: &BayesianGame, cfg: &DynamicsConfig) -> Result<()> {
    if cfg.horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    if cfg.learners.len() != game.n_players() {
        return Err(Error::InvalidInput(format!(
            "{} learners for {} players",
            cfg.learners.len(),
            game.n_players()
        )));
    }
    if cfg.thin == 0 {
        return Err(Error::InvalidInput(
            "thinning stride must be at least 1".into(),
        ));
    }
    if let RewardMode::Sampled { eps, delta } = cfg.reward {
        if !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "sampled mode needs eps > 0 and delta in (0,1), got {eps}, {delta}"
            )));
        }
    }
    Ok(())
}

pub fn run_dynamics(game: &BayesianGame, cfg: &DynamicsConfig) -> Result<RunResult> {
    validate_config(game, cfg)?;
    let n = game.n_players();
    let d = game.dims();
    let horizon = cfg.horizon;
    for i in 0..n {
        if cfg.reward == RewardMode::Exact {
            let size = opponents_size(game, i);
            if size > cfg.cap as u128 {
                return Err(Error::EnumerationTooLarge { size, cap: cfg.cap });
            }
        }
    }
    let mut learners = Vec::with_capacity(n);
    let mut strategy_ledgers = Vec::with_capacity(n);
    for (i, kind) in cfg.learners.iter().enumerate() {
        let rho = game.prior().marginal(i);
        let (nt, na) = (d.types[i], d.actions[i]);
        match kind {
            LearnerKind::Untruthful => {
                learners.push(PlayerLearner::Untruthful(UntruthfulLearner::new(
                    rho, na, horizon,
                )));
                strategy_ledgers.push(None);
            }
            LearnerKind::Typewise => {
                learners.push(PlayerLearner::Typewise(TypewiseLearner::new(rho, na)));
                strategy_ledgers.push(None);
            }
            LearnerKind::StrategySwap => {
                let l = StrategySwapLearner::new(nt, na, cfg.cap)?;
                strategy_ledgers.push(Some(StrategyLedger::new(l.space().clone(), rho)));
                learners.push(PlayerLearner::StrategySwap(l));
            }
        }
    }
    let mut ledgers: Vec<RegretLedger> = (0..n)
        .map(|i| RegretLedger::new(game.prior().marginal(i), d.actions[i]))
        .collect();
    let samples = match cfg.reward {
        RewardMode::Sampled { eps, delta } => {
            let max_ta = (0..n).map(|i| d.types[i] * d.actions[i]).max().unwrap_or(1);
            sample_count(n, horizon, max_ta, eps, delta)
        }
        RewardMode::Exact => 0,
    };

    let mut components = Vec::with_capacity(horizon.div_ceil(cfg.thin));
    let mut curve = Vec::new();
    let mut prev: Option<Vec<Vec<f64>>> = None;
    for t in 1..=horizon {
        let steps: Vec<Result<(TypeWisePolicy, Option<StrategyDistribution>)>> = if cfg.parallel {
            learners
                .par_iter_mut()
                .enumerate()
                .map(|(i, l)| l.step(prev.as_ref().map(|p| p[i].as_slice())))
                .collect()
        } else {
            learners
                .iter_mut()
                .enumerate()
                .map(|(i, l)| l.step(prev.as_ref().map(|p| p[i].as_slice())))
                .collect()
        };
        let mut profile = Vec::with_capacity(n);
        let mut sigmas = Vec::with_capacity(n);
        for s in steps {
            let (x, sigma) = s?;
            profile.push(x);
            sigmas.push(sigma);
        }
        let reward_for = |i: usize| -> Result<Vec<f64>> {
            match cfg.reward {
                RewardMode::Exact => exact_reward(game, i, &profile, cfg.cap),
                RewardMode::Sampled { .. } => {
                    let mut r = rng::stream(cfg.seed, i, t, Purpose::RewardSample);
                    sampled_reward(game, i, &profile, samples, &mut r)
                }
            }
        };
        let rewards: Vec<Vec<f64>> = if cfg.parallel {
            (0..n)
                .into_par_iter()
                .map(reward_for)
                .collect::<Result<_>>()?
        } else {
            (0..n).map(reward_for).collect::<Result<_>>()?
        };
        for i in 0..n {
            ledgers[i].accumulate(&profile[i], &rewards[i]);
            if let (Some(sl), Some(sigma)) = (&mut strategy_ledgers[i], &sigmas[i]) {
                sl.accumulate(sigma, &rewards[i]);
            }
        }
        if cfg.curve_every > 0 && (t % cfg.curve_every == 0 || t == horizon) {
            for (i, l) in ledgers.iter().enumerate() {
                curve.push(CurvePoint {
                    t,
                    player: i,
                    external: l.external_regret()?,
                    typewise: l.typewise_regret()?,
                    untruthful: l.untruthful_regret()?,
                    bound: regret_bound(t, d.types[i], d.actions[i]),
                });
            }
        }
        if (t - 1) % cfg.thin == 0 {
            let span = cfg.thin.min(horizon - (t - 1));
            components.push(MixtureComponent {
                weight: span as f64 / horizon as f64,
                policies: profile,
            });
        }
        prev = Some(rewards);
    }
    let mut certificate = 0.0f64;
    for l in &ledgers {
        certificate = certificate.max(l.untruthful_regret()? / horizon as f64);
    }
    Ok(RunResult {
        mixture: MixtureDistribution { components },
        ledgers,
        strategy_ledgers,
        curve,
        certificate,
    })
}
