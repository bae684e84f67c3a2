//! Finite Bayesian games: types, actions, common prior and payoff tensors.

mod policy;
mod prior;
mod strategy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radix::Radix;

pub use policy::{MixtureComponent, MixtureDistribution, TabularDistribution, TypeWisePolicy};
pub use prior::{PriorModel, PriorSpec};
pub use strategy::{StrategyDistribution, StrategySpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayoffScope {
    #[serde(rename = "own-type")]
    OwnType,
    #[serde(rename = "full")]
    Full,
}

/// Type and action counts with their profile indexers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dims {
    pub types: Vec<usize>,
    pub actions: Vec<usize>,
    pub type_radix: Radix,
    pub action_radix: Radix,
}

impl Dims {
    pub fn new(types: &[usize], actions: &[usize]) -> Self {
        Dims {
            types: types.to_vec(),
            actions: actions.to_vec(),
            type_radix: Radix::new(types),
            action_radix: Radix::new(actions),
        }
    }

    pub fn n_players(&self) -> usize {
        self.types.len()
    }

    pub fn n_type_profiles(&self) -> usize {
        self.type_radix.total()
    }

    pub fn n_action_profiles(&self) -> usize {
        self.action_radix.total()
    }
}

/// On-disk game format.
///
/// Payoff tensors are flat, row-major over (type profile, action profile) with
/// player 1 the outermost digit inside each profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub players: usize,
    pub types: Vec<Vec<String>>,
    pub actions: Vec<Vec<String>>,
    pub prior: PriorSpec,
    pub payoffs: Vec<Vec<f64>>,
    pub payoff_scope: PayoffScope,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every invariant of a game file and lists the violations with coordinates.
pub fn validate_game(g: &GameFile) -> ValidationReport {
    let mut v = Vec::new();
    let n = g.players;
    if n == 0 {
        v.push("game has no players".to_string());
    }
    if g.types.len() != n || g.actions.len() != n {
        v.push(format!(
            "expected {n} type and action lists, got {} and {}",
            g.types.len(),
            g.actions.len()
        ));
        return ValidationReport { violations: v };
    }
    for i in 0..n {
        if g.types[i].is_empty() {
            v.push(format!("player {i} has no types"));
        }
        if g.actions[i].is_empty() {
            v.push(format!("player {i} has no actions"));
        }
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }
    let tdims: Vec<usize> = g.types.iter().map(Vec::len).collect();
    let adims: Vec<usize> = g.actions.iter().map(Vec::len).collect();
    let dims = Dims::new(&tdims, &adims);
    let nt = dims.n_type_profiles();
    let na = dims.n_action_profiles();

    match &g.prior {
        PriorSpec::Product { rows } => {
            if rows.len() != n {
                v.push(format!(
                    "product prior has {} rows for {n} players",
                    rows.len()
                ));
            } else {
                for (i, r) in rows.iter().enumerate() {
                    if r.len() != tdims[i] {
                        v.push(format!(
                            "prior row {i} has {} entries for {} types",
                            r.len(),
                            tdims[i]
                        ));
                    } else if let Some(p) = prior::prob_vector_problem(r) {
                        v.push(format!(
                            "prior row {i}: {}",
                            p.replace("mass", "prior mass")
                        ));
                    }
                }
            }
        }
        PriorSpec::Tabular { table } => {
            if table.len() != nt {
                v.push(format!(
                    "tabular prior has {} entries for {nt} type profiles",
                    table.len()
                ));
            } else if let Some(p) = prior::prob_vector_problem(table) {
                v.push(format!(
                    "tabular prior: {}",
                    p.replace("mass", "prior mass")
                ));
            }
        }
    }

    if g.payoffs.len() != n {
        v.push(format!(
            "{} payoff tensors for {n} players",
            g.payoffs.len()
        ));
        return ValidationReport { violations: v };
    }
    for (i, tensor) in g.payoffs.iter().enumerate() {
        if tensor.len() != nt * na {
            v.push(format!(
                "payoff tensor {i} has {} entries, expected {}",
                tensor.len(),
                nt * na
            ));
            continue;
        }
        for (k, &x) in tensor.iter().enumerate() {
            if !(-crate::DERIVED_TOL..=1.0 + crate::DERIVED_TOL).contains(&x) {
                let (t, a) = (k / na, k % na);
                v.push(format!(
                    "payoff out of [0,1] at ({i},{:?},{:?}): {x}",
                    dims.type_radix.decode(t),
                    dims.action_radix.decode(a)
                ));
            }
        }
        if g.payoff_scope == PayoffScope::OwnType {
            'scope: for t in 0..nt {
                let base = dims.type_radix.join(i, dims.type_radix.digit(t, i), 0);
                for a in 0..na {
                    if (tensor[t * na + a] - tensor[base * na + a]).abs() > crate::INGEST_TOL {
                        v.push(format!(
                            "player {i} payoff depends on other types at θ={:?}, a={:?} despite own-type scope",
                            dims.type_radix.decode(t),
                            dims.action_radix.decode(a)
                        ));
                        break 'scope;
                    }
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// A validated, immutable Bayesian game.
#[derive(Debug, Clone)]
pub struct BayesianGame {
    type_labels: Vec<Vec<String>>,
    action_labels: Vec<Vec<String>>,
    dims: Dims,
    prior: PriorModel,
    payoffs: Vec<Vec<f64>>,
    scope: PayoffScope,
}

impl BayesianGame {
    pub fn from_file(file: GameFile) -> Result<Self> {
        let report = validate_game(&file);
        if !report.is_ok() {
            return Err(Error::InvalidGame(report.violations.join("; ")));
        }
        let tdims: Vec<usize> = file.types.iter().map(Vec::len).collect();
        let adims: Vec<usize> = file.actions.iter().map(Vec::len).collect();
        let dims = Dims::new(&tdims, &adims);
        let prior = PriorModel::build(file.prior, &dims.type_radix);
        let payoffs = file
            .payoffs
            .into_iter()
            .map(|t| t.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
            .collect();
        Ok(BayesianGame {
            type_labels: file.types,
            action_labels: file.actions,
            dims,
            prior,
            payoffs,
            scope: file.payoff_scope,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    /// Tabulates a payoff oracle `v(i, θ, a)` given per-player ordinals.
    ///
    /// Values outside [0,1] by at most 1e-9 are clamped with a warning; larger
    /// excursions are rejected.
    pub fn from_oracle(
        types: &[usize],
        actions: &[usize],
        prior: PriorSpec,
        scope: PayoffScope,
        v: impl Fn(usize, &[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let dims = Dims::new(types, actions);
        let (nt, na) = (dims.n_type_profiles(), dims.n_action_profiles());
        let mut clamped = 0usize;
        let mut payoffs = Vec::with_capacity(types.len());
        for i in 0..types.len() {
            let mut tensor = Vec::with_capacity(nt * na);
            for t in 0..nt {
                let theta = dims.type_radix.decode(t);
                for a in 0..na {
                    let x = v(i, &theta, &dims.action_radix.decode(a));
                    if !(0.0..=1.0).contains(&x) {
                        if !(-crate::DERIVED_TOL..=1.0 + crate::DERIVED_TOL).contains(&x) {
                            return Err(Error::InvalidGame(format!(
                                "payoff out of [0,1] at ({i},{theta:?},{:?}): {x}",
                                dims.action_radix.decode(a)
                            )));
                        }
                        clamped += 1;
                    }
                    tensor.push(x.clamp(0.0, 1.0));
                }
            }
            payoffs.push(tensor);
        }
        if clamped > 0 {
            eprintln!("warning: clamped {clamped} payoff values into [0,1]");
        }
        let labels = |d: &[usize], p: char| -> Vec<Vec<String>> {
            d.iter()
                .map(|&k| (0..k).map(|j| format!("{p}{j}")).collect())
                .collect()
        };
        Self::from_file(GameFile {
            players: types.len(),
            types: labels(types, 't'),
            actions: labels(actions, 'a'),
            prior,
            payoffs,
            payoff_scope: scope,
        })
    }

    pub fn to_file(&self) -> GameFile {
        GameFile {
            players: self.n_players(),
            types: self.type_labels.clone(),
            actions: self.action_labels.clone(),
            prior: self.prior.spec().clone(),
            payoffs: self.payoffs.clone(),
            payoff_scope: self.scope,
        }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn n_players(&self) -> usize {
        self.dims.n_players()
    }

    pub fn n_types(&self, i: usize) -> usize {
        self.dims.types[i]
    }

    pub fn n_actions(&self, i: usize) -> usize {
        self.dims.actions[i]
    }

    pub fn prior(&self) -> &PriorModel {
        &self.prior
    }

    pub fn payoff_scope(&self) -> PayoffScope {
        self.scope
    }

    pub fn type_labels(&self) -> &[Vec<String>] {
        &self.type_labels
    }

    pub fn action_labels(&self) -> &[Vec<String>] {
        &self.action_labels
    }

    /// v_i(θ; a) by profile indices.
    pub fn payoff(&self, i: usize, t: usize, a: usize) -> f64 {
        self.payoffs[i][t * self.dims.n_action_profiles() + a]
    }

    /// Payoff row of player i at type profile `t`, over all action profiles.
    pub fn payoff_row(&self, i: usize, t: usize) -> &[f64] {
        let na = self.dims.n_action_profiles();
        &self.payoffs[i][t * na..(t + 1) * na]
    }

    /// ρ|θ_i over Θ_{-i}; a single entry of mass 1 when n = 1.
    pub fn conditional_prior(&self, i: usize, ti: usize) -> Result<&[f64]> {
        self.prior
            .conditional(i, ti)
            .ok_or(Error::ZeroMassType { player: i, ty: ti })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(payoff: f64, prior: PriorSpec) -> GameFile {
        GameFile {
            players: 2,
            types: vec![vec!["x".into(), "y".into()], vec!["x".into(), "y".into()]],
            actions: vec![vec!["l".into(), "r".into()], vec!["l".into(), "r".into()]],
            prior,
            payoffs: vec![vec![payoff; 16], vec![payoff; 16]],
            payoff_scope: PayoffScope::Full,
        }
    }

    fn uniform_product() -> PriorSpec {
        PriorSpec::Product {
            rows: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        }
    }

    #[test]
    fn constant_game_validates() {
        assert!(validate_game(&two_by_two(0.5, uniform_product())).is_ok());
    }

    #[test]
    fn payoff_above_one_is_reported() {
        let mut g = two_by_two(0.5, uniform_product());
        g.payoffs[1][5] = 1.2;
        let r = validate_game(&g);
        assert_eq!(r.violations.len(), 1);
        assert!(
            r.violations[0].starts_with("payoff out of [0,1] at (1,[0, 1],[0, 1])"),
            "{:?}",
            r
        );
    }

    #[test]
    fn short_prior_mass_is_reported() {
        let g = two_by_two(
            0.5,
            PriorSpec::Tabular {
                table: vec![0.25, 0.25, 0.25, 0.23],
            },
        );
        let r = validate_game(&g);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].contains("prior mass 0.98"), "{:?}", r);
    }

    #[test]
    fn product_conditional_is_the_other_row() {
        let g = BayesianGame::from_file(two_by_two(
            0.5,
            PriorSpec::Product {
                rows: vec![vec![0.5, 0.5], vec![0.3, 0.7]],
            },
        ))
        .unwrap();
        for t in 0..2 {
            let c = g.conditional_prior(0, t).unwrap();
            assert!((c[0] - 0.3).abs() < 1e-15 && (c[1] - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn correlated_conditional_is_point_mass() {
        let g = BayesianGame::from_file(two_by_two(
            0.5,
            PriorSpec::Tabular {
                table: vec![0.5, 0.0, 0.0, 0.5],
            },
        ))
        .unwrap();
        assert_eq!(g.conditional_prior(0, 0).unwrap(), &[1.0, 0.0]);
        assert_eq!(g.conditional_prior(1, 1).unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn zero_mass_type_errors() {
        let g = BayesianGame::from_file(two_by_two(
            0.5,
            PriorSpec::Product {
                rows: vec![vec![1.0, 0.0], vec![0.5, 0.5]],
            },
        ))
        .unwrap();
        assert!(matches!(
            g.conditional_prior(0, 1),
            Err(Error::ZeroMassType { player: 0, ty: 1 })
        ));
    }

    #[test]
    fn single_player_conditional_is_unit_mass() {
        let g = BayesianGame::from_oracle(
            &[3],
            &[2],
            PriorSpec::Product {
                rows: vec![vec![0.2, 0.3, 0.5]],
            },
            PayoffScope::OwnType,
            |_, _, _| 0.0,
        )
        .unwrap();
        assert_eq!(g.conditional_prior(0, 2).unwrap(), &[1.0]);
    }

    #[test]
    fn oracle_clamps_tiny_excursions_and_rejects_large_ones() {
        let p = || PriorSpec::Product {
            rows: vec![vec![1.0]],
        };
        let g = BayesianGame::from_oracle(&[1], &[2], p(), PayoffScope::Full, |_, _, a| {
            if a[0] == 0 {
                1.0 + 1e-10
            } else {
                -1e-10
            }
        })
        .unwrap();
        assert_eq!(g.payoff(0, 0, 0), 1.0);
        assert_eq!(g.payoff(0, 0, 1), 0.0);
        assert!(
            BayesianGame::from_oracle(&[1], &[2], p(), PayoffScope::Full, |_, _, _| 1.1).is_err()
        );
    }

    #[test]
    fn own_type_scope_is_checked() {
        let mut g = two_by_two(0.5, uniform_product());
        g.payoff_scope = PayoffScope::OwnType;
        assert!(validate_game(&g).is_ok());
        g.payoffs[0][4] = 0.1;
        assert!(!validate_game(&g).is_ok());
    }
}
