//! Conditional smoothness checks and price-of-anarchy reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BayesianGame, PayoffScope, TabularDistribution};
use crate::verifier::comm_eq_epsilon;
use crate::{DERIVED_TOL, INGEST_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothnessMode {
    Game,
    Mechanism,
}

/// Candidate (λ, μ) with a deviation map a*[i][θ][a_i], θ a full type-profile index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessSpec {
    pub a_star: Vec<Vec<Vec<usize>>>,
    pub lambda: f64,
    pub mu: f64,
    pub mode: SmoothnessMode,
}

impl SmoothnessSpec {
    /// A deviation map that depends only on the player's own type.
    pub fn own_type(
        game: &BayesianGame,
        lambda: f64,
        mu: f64,
        mode: SmoothnessMode,
        f: impl Fn(usize, usize, usize) -> usize,
    ) -> Self {
        let d = game.dims();
        let a_star = (0..game.n_players())
            .map(|i| {
                (0..d.n_type_profiles())
                    .map(|t| {
                        (0..d.actions[i])
                            .map(|ai| f(i, d.type_radix.digit(t, i), ai))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SmoothnessSpec {
            a_star,
            lambda,
            mu,
            mode,
        }
    }

    fn check(&self, game: &BayesianGame) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.mu >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "need λ > 0 and μ ≥ 0, got ({}, {})",
                self.lambda, self.mu
            )));
        }
        let d = game.dims();
        let ok = self.a_star.len() == game.n_players()
            && self.a_star.iter().enumerate().all(|(i, per)| {
                per.len() == d.n_type_profiles()
                    && per.iter().all(|row| {
                        row.len() == d.actions[i] && row.iter().all(|&a| a < d.actions[i])
                    })
            });
        if !ok {
            return Err(Error::BadDims(
                "deviation map does not match the game".into(),
            ));
        }
        Ok(())
    }
}

/// On-disk smoothness spec; mechanism mode also carries the v⁺ and v⁻ tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessFile {
    #[serde(flatten)]
    pub spec: SmoothnessSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payment: Option<Vec<Vec<f64>>>,
}

impl SmoothnessFile {
    /// The quasilinear decomposition of `game` when the file carries one.
    pub fn mechanism(&self, game: &BayesianGame) -> Result<Option<QuasilinearGame>> {
        match (&self.value, &self.payment) {
            (Some(v), Some(p)) => Ok(Some(QuasilinearGame::new(
                game.clone(),
                v.clone(),
                p.clone(),
            )?)),
            (None, None) => Ok(None),
            _ => Err(Error::InvalidInput(
                "value and payment must be given together".into(),
            )),
        }
    }
}

/// v_i(θ_i; a) = v⁺_i(θ_i; f_i(a)) − v⁻_i(a), with v⁺ tabulated over (θ_i, a).
#[derive(Debug, Clone)]
pub struct QuasilinearGame {
    game: BayesianGame,
    /// [i][θ_i · |A| + a]
    value: Vec<Vec<f64>>,
    /// [i][a]
    payment: Vec<Vec<f64>>,
}

impl QuasilinearGame {
    pub fn new(game: BayesianGame, value: Vec<Vec<f64>>, payment: Vec<Vec<f64>>) -> Result<Self> {
        require_assumptions(&game)?;
        let d = game.dims().clone();
        let na = d.n_action_profiles();
        if value.len() != game.n_players()
            || payment.len() != game.n_players()
            || value
                .iter()
                .enumerate()
                .any(|(i, v)| v.len() != d.types[i] * na)
            || payment.iter().any(|p| p.len() != na)
        {
            return Err(Error::BadDims(
                "value/payment tensors do not match the game".into(),
            ));
        }
        for i in 0..game.n_players() {
            for t in 0..d.n_type_profiles() {
                let ti = d.type_radix.digit(t, i);
                for a in 0..na {
                    let (vp, vm) = (value[i][ti * na + a], payment[i][a]);
                    if !(0.0..=1.0).contains(&vp) || !(0.0..=1.0).contains(&vm) {
                        return Err(Error::InvalidGame(format!(
                            "value or payment out of [0,1] for player {i}"
                        )));
                    }
                    if (vp - vm - game.payoff(i, t, a)).abs() > INGEST_TOL {
                        return Err(Error::InvalidGame(format!(
                            "v+ - v- does not recompose the payoff of player {i} at ({t}, {a})"
                        )));
                    }
                }
            }
        }
        Ok(QuasilinearGame {
            game,
            value,
            payment,
        })
    }

    pub fn game(&self) -> &BayesianGame {
        &self.game
    }

    pub fn value(&self, i: usize, ti: usize, a: usize) -> f64 {
        self.value[i][ti * self.game.dims().n_action_profiles() + a]
    }

    pub fn payment(&self, i: usize, a: usize) -> f64 {
        self.payment[i][a]
    }

    pub fn to_file(&self, spec: SmoothnessSpec) -> SmoothnessFile {
        SmoothnessFile {
            spec,
            value: Some(self.value.clone()),
            payment: Some(self.payment.clone()),
        }
    }
}

/// Either a plain game (welfare Σ v_i) or a mechanism (welfare Σ v⁺_i).
#[derive(Clone, Copy)]
pub enum Setting<'a> {
    Game(&'a BayesianGame),
    Mechanism(&'a QuasilinearGame),
}

impl<'a> Setting<'a> {
    pub fn game(&self) -> &'a BayesianGame {
        match self {
            Setting::Game(g) => g,
            Setting::Mechanism(q) => &q.game,
        }
    }

    fn welfare(&self, t: usize, a: usize) -> f64 {
        match self {
            Setting::Game(g) => (0..g.n_players()).map(|i| g.payoff(i, t, a)).sum(),
            Setting::Mechanism(q) => {
                let tr = &q.game.dims().type_radix;
                (0..q.game.n_players())
                    .map(|i| q.value(i, tr.digit(t, i), a))
                    .sum()
            }
        }
    }

    /// The term multiplied by μ: current welfare, or total payment for mechanisms.
    fn mu_term(&self, t: usize, a: usize) -> f64 {
        match self {
            Setting::Game(_) => self.welfare(t, a),
            Setting::Mechanism(q) => (0..q.game.n_players()).map(|i| q.payment(i, a)).sum(),
        }
    }

    fn optimum(&self, t: usize) -> f64 {
        (0..self.game().dims().n_action_profiles())
            .map(|a| self.welfare(t, a))
            .fold(0.0, f64::max)
    }
}

fn require_assumptions(game: &BayesianGame) -> Result<()> {
    if !game.prior().is_product() {
        return Err(Error::AssumptionViolated(
            "smoothness bounds need a product prior".into(),
        ));
    }
    if game.payoff_scope() != PayoffScope::OwnType {
        return Err(Error::AssumptionViolated(
            "smoothness bounds need own-type payoffs".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessOutcome {
    pub passed: bool,
    /// min over (θ, a) of lhs − rhs.
    pub min_slack: f64,
    /// (type profile, action profile) labels attaining the minimum slack when it is negative.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// Σ_i v_i(θ; a*_{i,θ,a_i}, a_{-i}) at one cell.
fn deviation_sum(game: &BayesianGame, spec: &SmoothnessSpec, t: usize, a: usize) -> f64 {
    let ar = &game.dims().action_radix;
    (0..game.n_players())
        .map(|i| game.payoff(i, t, ar.with_digit(a, i, spec.a_star[i][t][ar.digit(a, i)])))
        .sum()
}

pub fn check_smoothness(setting: Setting<'_>, spec: &SmoothnessSpec) -> Result<SmoothnessOutcome> {
    let game = setting.game();
    require_assumptions(game)?;
    spec.check(game)?;
    if (spec.mode == SmoothnessMode::Mechanism) != matches!(setting, Setting::Mechanism(_)) {
        return Err(Error::InvalidInput(
            "smoothness mode does not match the setting".into(),
        ));
    }
    let d = game.dims();
    let (mut min_slack, mut arg) = (f64::INFINITY, (0, 0));
    for t in 0..d.n_type_profiles() {
        let opt = setting.optimum(t);
        for a in 0..d.n_action_profiles() {
            let slack = deviation_sum(game, spec, t, a)
                - (spec.lambda * opt - spec.mu * setting.mu_term(t, a));
            if slack < min_slack {
                (min_slack, arg) = (slack, (t, a));
            }
        }
    }
    let passed = min_slack >= -DERIVED_TOL;
    Ok(SmoothnessOutcome {
        passed,
        min_slack,
        witness: (!passed).then(|| (d.type_radix.decode(arg.0), d.action_radix.decode(arg.1))),
    })
}

/// Largest λ passing with the given a* for each μ; a cell with zero optimum never binds.
pub fn max_lambda_sweep(
    setting: Setting<'_>,
    a_star: &[Vec<Vec<usize>>],
    mus: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let game = setting.game();
    require_assumptions(game)?;
    let d = game.dims();
    let mode = if matches!(setting, Setting::Mechanism(_)) {
        SmoothnessMode::Mechanism
    } else {
        SmoothnessMode::Game
    };
    let spec = SmoothnessSpec {
        a_star: a_star.to_vec(),
        lambda: 1.0,
        mu: 0.0,
        mode,
    };
    spec.check(game)?;
    Ok(mus
        .iter()
        .map(|&mu| {
            let mut lambda = f64::INFINITY;
            for t in 0..d.n_type_profiles() {
                let opt = setting.optimum(t);
                if opt <= 0.0 {
                    continue;
                }
                for a in 0..d.n_action_profiles() {
                    lambda = lambda
                        .min((deviation_sum(game, &spec, t, a) + mu * setting.mu_term(t, a)) / opt);
                }
            }
            (mu, lambda)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoaReport {
    pub eq_welfare: f64,
    pub opt_welfare: f64,
    /// eq/opt, with 0/0 reported as 1.
    pub ratio: f64,
    /// λ/(1+μ) for games, λ/max{1,μ} for mechanisms.
    pub bound: f64,
    /// Verifier ε of the distribution as a communication equilibrium.
    pub epsilon: f64,
    /// n·ε/opt, the allowance for approximate equilibria.
    pub slack: f64,
    pub bound_satisfied: bool,
}

pub fn poa_report(
    setting: Setting<'_>,
    pi: &TabularDistribution,
    spec: &SmoothnessSpec,
    eps_tol: f64,
) -> Result<PoaReport> {
    let game = setting.game();
    let smooth = check_smoothness(setting, spec)?;
    if !smooth.passed {
        return Err(Error::SmoothnessFailed(format!(
            "min slack {} at {:?}",
            smooth.min_slack,
            smooth.witness.unwrap_or_default()
        )));
    }
    let epsilon = comm_eq_epsilon(game, pi)?.epsilon;
    if epsilon > eps_tol {
        return Err(Error::NotAnEquilibrium {
            epsilon,
            tol: eps_tol,
        });
    }
    let d = game.dims();
    let (mut eq_welfare, mut opt_welfare) = (0.0, 0.0);
    for t in 0..d.n_type_profiles() {
        let rho = game.prior().joint(t);
        if rho == 0.0 {
            continue;
        }
        opt_welfare += rho * setting.optimum(t);
        eq_welfare += rho
            * pi.row(t)
                .iter()
                .enumerate()
                .map(|(a, q)| q * setting.welfare(t, a))
                .sum::<f64>();
    }
    let ratio = if opt_welfare == 0.0 {
        1.0
    } else {
        eq_welfare / opt_welfare
    };
    let bound = match spec.mode {
        SmoothnessMode::Game => spec.lambda / (1.0 + spec.mu),
        SmoothnessMode::Mechanism => spec.lambda / spec.mu.max(1.0),
    };
    let slack = if opt_welfare == 0.0 {
        0.0
    } else {
        game.n_players() as f64 * epsilon / opt_welfare
    };
    Ok(PoaReport {
        eq_welfare,
        opt_welfare,
        ratio,
        bound,
        epsilon,
        slack,
        bound_satisfied: ratio >= bound - slack - DERIVED_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn auction_smoothness_half_one_passes() {
        let q = fixtures::first_price_auction();
        let spec = fixtures::first_price_spec(&q, 0.5, 1.0);
        let out = check_smoothness(Setting::Mechanism(&q), &spec).unwrap();
        assert!(out.passed, "{out:?}");
    }

    #[test]
    fn auction_smoothness_point_nine_fails_with_witness() {
        let q = fixtures::first_price_auction();
        let spec = fixtures::first_price_spec(&q, 0.9, 1.0);
        let out = check_smoothness(Setting::Mechanism(&q), &spec).unwrap();
        assert!(!out.passed);
        assert!(out.witness.is_some());
    }

    #[test]
    fn correlated_prior_is_rejected() {
        let (game, _) = fixtures::coarse_split();
        let spec = SmoothnessSpec::own_type(&game, 1.0, 0.0, SmoothnessMode::Game, |_, _, a| a);
        assert!(matches!(
            check_smoothness(Setting::Game(&game), &spec),
            Err(Error::AssumptionViolated(_))
        ));
    }
}
