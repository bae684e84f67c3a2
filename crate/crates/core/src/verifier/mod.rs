//! Exact equilibrium audits of play distributions.

mod ci;
mod simplex;

pub use ci::{conditional_independence, CiOutcome};
pub use simplex::{strategy_representable, Representability, AMBIGUITY_BAND};

use serde::{Deserialize, Serialize, Serializer};

use crate::dynamics::exact_reward;
use crate::error::{Error, Result};
use crate::game::{
    BayesianGame, Dims, MixtureComponent, MixtureDistribution, StrategyDistribution, StrategySpace,
    TabularDistribution, TypeWisePolicy,
};
use crate::transforms::DeviationPair;
use crate::DEFAULT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EqClass {
    Comm,
    AnfBs,
    Bne,
    CoarseBs,
    Sfce,
    Sfcce,
    Anfcce,
}

impl std::str::FromStr for EqClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidInput(format!("unknown equilibrium class {s:?}")))
    }
}

/// Best deviation found for one player.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    /// Misreport ψ with action swap φ.
    Deviation(DeviationPair),
    /// A fixed strategy: one action per own type.
    Strategy { strategy: Vec<usize> },
    /// A fixed (type, action): deviate to `action` whenever the own type is `type`.
    TypeAction {
        #[serde(rename = "type")]
        ty: usize,
        action: usize,
    },
    /// Strategy swap: own strategy index (in that player's A^Θ) mapped to a replacement strategy.
    StrategyMap { map: Vec<(usize, Vec<usize>)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerCertificate {
    /// Best deviation value minus truthful value, unclamped.
    pub gain: f64,
    pub witness: Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representable {
    Yes,
    No,
    NotApplicable,
}

impl Serialize for Representable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Representable::Yes => s.serialize_bool(true),
            Representable::No => s.serialize_bool(false),
            Representable::NotApplicable => s.serialize_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumCertificate {
    pub class: EqClass,
    /// max over players of max(0, gain).
    pub epsilon: f64,
    pub per_player: Vec<PlayerCertificate>,
    pub representable: Representable,
}

impl EquilibriumCertificate {
    fn from_players(class: EqClass, per_player: Vec<PlayerCertificate>) -> Self {
        let epsilon = per_player
            .iter()
            .map(|p| p.gain.max(0.0))
            .fold(0.0, f64::max);
        EquilibriumCertificate {
            class,
            epsilon,
            per_player,
            representable: Representable::NotApplicable,
        }
    }
}

/// G(θ,θ',a',a): expected payoff of true type θ reporting θ', being recommended a' and playing a.
#[derive(Debug, Clone)]
pub struct DeviationGainTensor {
    n_types: usize,
    n_actions: usize,
    rho: Vec<f64>,
    g: Vec<f64>,
    /// V_i = E_θ E_{a∼π(θ)} v_i.
    pub truthful: f64,
}

impl DeviationGainTensor {
    pub fn get(&self, t: usize, tp: usize, ap: usize, a: usize) -> f64 {
        self.g[((t * self.n_types + tp) * self.n_actions + ap) * self.n_actions + a]
    }

    fn swap_value(&self, t: usize, tp: usize) -> (f64, Vec<usize>) {
        let na = self.n_actions;
        let mut phi = Vec::with_capacity(na);
        let mut total = 0.0;
        for ap in 0..na {
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
            for a in 0..na {
                let v = self.get(t, tp, ap, a);
                if v > best {
                    (best, arg) = (v, a);
                }
            }
            phi.push(arg);
            total += best;
        }
        (total, phi)
    }

    /// Σ_θ ρ(θ) max_{θ'} Σ_{a'} max_a G − V with ties to the lowest ordinal;
    /// `truthful_only` pins θ' = θ.
    fn best(&self, truthful_only: bool) -> PlayerCertificate {
        let nt = self.n_types;
        let (mut psi, mut phi, mut value) = (Vec::new(), Vec::new(), 0.0);
        for t in 0..nt {
            let candidates: Vec<usize> = if truthful_only {
                vec![t]
            } else {
                (0..nt).collect()
            };
            let (mut best, mut best_tp, mut best_phi) = (f64::NEG_INFINITY, t, Vec::new());
            for tp in candidates {
                let (v, p) = self.swap_value(t, tp);
                if v > best {
                    (best, best_tp, best_phi) = (v, tp, p);
                }
            }
            psi.push(best_tp);
            phi.push(best_phi);
            value += self.rho[t] * best;
        }
        PlayerCertificate {
            gain: value - self.truthful,
            witness: Witness::Deviation(DeviationPair { psi, phi }),
        }
    }
}

fn check_enumeration(game: &BayesianGame, i: usize, cap: usize) -> Result<()> {
    let d = game.dims();
    let size = (0..game.n_players())
        .filter(|&j| j != i)
        .fold(1u128, |acc, j| {
            acc.saturating_mul(d.types[j] as u128)
                .saturating_mul(d.actions[j] as u128)
        });
    if size > cap as u128 {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    Ok(())
}

fn check_table(game: &BayesianGame, pi: &TabularDistribution) -> Result<()> {
    if pi.dims() != game.dims() {
        return Err(Error::BadDims(
            "distribution does not match the game".into(),
        ));
    }
    Ok(())
}

/// Truthful value V_i = Σ_θ ρ(θ) Σ_a π(θ;a) v_i(θ;a).
pub fn truthful_value(game: &BayesianGame, i: usize, pi: &TabularDistribution) -> f64 {
    let nt = game.dims().n_type_profiles();
    (0..nt)
        .map(|t| {
            let rho = game.prior().joint(t);
            if rho == 0.0 {
                return 0.0;
            }
            rho * pi
                .row(t)
                .iter()
                .zip(game.payoff_row(i, t))
                .map(|(p, v)| p * v)
                .sum::<f64>()
        })
        .sum()
}

pub fn deviation_tensor(
    game: &BayesianGame,
    i: usize,
    pi: &TabularDistribution,
) -> Result<DeviationGainTensor> {
    check_table(game, pi)?;
    check_enumeration(game, i, DEFAULT_CAP)?;
    let d = game.dims();
    let (nt, na) = (d.types[i], d.actions[i]);
    let (tr, ar) = (&d.type_radix, &d.action_radix);
    let mut g = vec![0.0; nt * nt * na * na];
    for ti in 0..nt {
        let Some(cond) = game.prior().conditional(i, ti) else {
            continue;
        };
        for (o, &p) in cond.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let t = tr.join(i, ti, o);
            let row = game.payoff_row(i, t);
            for tp in 0..nt {
                let reported = tr.with_digit(t, i, tp);
                for (a, &q) in pi.row(reported).iter().enumerate() {
                    if q == 0.0 {
                        continue;
                    }
                    let ap = ar.digit(a, i);
                    let base = ((ti * nt + tp) * na + ap) * na;
                    for ai in 0..na {
                        g[base + ai] += p * q * row[ar.with_digit(a, i, ai)];
                    }
                }
            }
        }
    }
    Ok(DeviationGainTensor {
        n_types: nt,
        n_actions: na,
        rho: game.prior().marginal(i).to_vec(),
        g,
        truthful: truthful_value(game, i, pi),
    })
}

/// Communication equilibrium gap: misreports combined with action swaps.
pub fn comm_eq_epsilon(
    game: &BayesianGame,
    pi: &TabularDistribution,
) -> Result<EquilibriumCertificate> {
    let players = (0..game.n_players())
        .map(|i| Ok(deviation_tensor(game, i, pi)?.best(false)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumCertificate::from_players(EqClass::Comm, players))
}

/// Bayesian-solution gap: action swaps under truthful reporting. Records
/// strategy representability when |S| ≤ `cap`.
pub fn anf_bs_epsilon(
    game: &BayesianGame,
    pi: &TabularDistribution,
    cap: usize,
) -> Result<EquilibriumCertificate> {
    let players = (0..game.n_players())
        .map(|i| Ok(deviation_tensor(game, i, pi)?.best(true)))
        .collect::<Result<Vec<_>>>()?;
    let mut cert = EquilibriumCertificate::from_players(EqClass::AnfBs, players);
    cert.representable = match strategy_representable(game.dims(), pi, cap) {
        Ok(Representability::Feasible { .. }) => Representable::Yes,
        Ok(Representability::Infeasible { .. }) => Representable::No,
        Err(Error::SupportTooLarge { .. }) => Representable::NotApplicable,
        Err(e) => return Err(e),
    };
    Ok(cert)
}

/// Best-response gap of a product profile.
pub fn bne_epsilon(
    game: &BayesianGame,
    profile: &[TypeWisePolicy],
) -> Result<EquilibriumCertificate> {
    let d = game.dims();
    let players = (0..game.n_players())
        .map(|i| {
            let u = exact_reward(game, i, profile, DEFAULT_CAP)?;
            let (nt, na) = (d.types[i], d.actions[i]);
            let rho = game.prior().marginal(i);
            let (mut best, mut current, mut strategy) = (0.0, 0.0, Vec::with_capacity(nt));
            for t in 0..nt {
                let row = &u[t * na..(t + 1) * na];
                let (mut b, mut arg) = (f64::NEG_INFINITY, 0);
                for (a, &v) in row.iter().enumerate() {
                    if v > b {
                        (b, arg) = (v, a);
                    }
                }
                strategy.push(arg);
                best += rho[t] * b;
                current += rho[t]
                    * row
                        .iter()
                        .zip(profile[i].row(t))
                        .map(|(v, p)| v * p)
                        .sum::<f64>();
            }
            Ok(PlayerCertificate {
                gain: best - current,
                witness: Witness::Strategy { strategy },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumCertificate::from_players(EqClass::Bne, players))
}

/// Input of [`coarse_epsilon`]: a type-wise table for coarse-bs, a strategy distribution otherwise.
pub enum CoarseInput<'a> {
    Tabular(&'a TabularDistribution),
    Strategy(&'a StrategyDistribution),
}

/// D(θ_i, a) = Σ_{θ: θ_i} ρ(θ) Σ_b π(θ;b) v_i(θ; a, b_{-i}): value of playing `a` at own type θ_i
/// against the others' recommendations.
fn fixed_action_values(game: &BayesianGame, i: usize, pi: &TabularDistribution) -> Vec<f64> {
    let d = game.dims();
    let (nt, na) = (d.types[i], d.actions[i]);
    let (tr, ar) = (&d.type_radix, &d.action_radix);
    let mut out = vec![0.0; nt * na];
    for t in 0..tr.total() {
        let rho = game.prior().joint(t);
        if rho == 0.0 {
            continue;
        }
        let ti = tr.digit(t, i);
        let row = game.payoff_row(i, t);
        for (b, &q) in pi.row(t).iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            for a in 0..na {
                out[ti * na + a] += rho * q * row[ar.with_digit(b, i, a)];
            }
        }
    }
    out
}

pub fn coarse_epsilon(
    game: &BayesianGame,
    input: CoarseInput<'_>,
    class: EqClass,
) -> Result<EquilibriumCertificate> {
    let pi = match (&input, class) {
        (CoarseInput::Tabular(pi), EqClass::CoarseBs) => (*pi).clone(),
        (CoarseInput::Strategy(sigma), EqClass::Sfcce | EqClass::Anfcce) => {
            sigma.to_tabular(game.dims())?
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "class {class:?} needs a {} input",
                if class == EqClass::CoarseBs {
                    "type-wise"
                } else {
                    "strategy"
                }
            )))
        }
    };
    check_table(game, &pi)?;
    let d = game.dims();
    let players = (0..game.n_players())
        .map(|i| {
            check_enumeration(game, i, DEFAULT_CAP)?;
            let (nt, na) = (d.types[i], d.actions[i]);
            let values = fixed_action_values(game, i, &pi);
            let truthful = truthful_value(game, i, &pi);
            let argmax = |row: &[f64]| {
                row.iter()
                    .enumerate()
                    .fold(
                        (0, f64::NEG_INFINITY),
                        |acc, (a, &v)| if v > acc.1 { (a, v) } else { acc },
                    )
            };
            if class == EqClass::Sfcce {
                let mut strategy = Vec::with_capacity(nt);
                let mut best = 0.0;
                for t in 0..nt {
                    let (a, v) = argmax(&values[t * na..(t + 1) * na]);
                    strategy.push(a);
                    best += v;
                }
                return Ok(PlayerCertificate {
                    gain: best - truthful,
                    witness: Witness::Strategy { strategy },
                });
            }
            // Deviating only at own type θ' leaves the other types' truthful value in place.
            let own_truthful = own_type_truthful(game, i, &pi);
            let mut out = PlayerCertificate {
                gain: f64::NEG_INFINITY,
                witness: Witness::TypeAction { ty: 0, action: 0 },
            };
            for t in 0..nt {
                for a in 0..na {
                    let gain = values[t * na + a] - own_truthful[t];
                    if gain > out.gain {
                        out = PlayerCertificate {
                            gain,
                            witness: Witness::TypeAction { ty: t, action: a },
                        };
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumCertificate::from_players(class, players))
}

/// Σ_{θ: θ_i = t} ρ(θ) Σ_a π(θ;a) v_i(θ;a) for each own type t.
fn own_type_truthful(game: &BayesianGame, i: usize, pi: &TabularDistribution) -> Vec<f64> {
    let d = game.dims();
    let tr = &d.type_radix;
    let mut out = vec![0.0; d.types[i]];
    for t in 0..tr.total() {
        let rho = game.prior().joint(t);
        if rho > 0.0 {
            out[tr.digit(t, i)] += rho
                * pi.row(t)
                    .iter()
                    .zip(game.payoff_row(i, t))
                    .map(|(p, v)| p * v)
                    .sum::<f64>();
        }
    }
    out
}

/// Strategic-form correlated equilibrium gap: each own strategy s_i may be swapped for another.
pub fn sfce_epsilon(
    game: &BayesianGame,
    sigma: &StrategyDistribution,
) -> Result<EquilibriumCertificate> {
    let d = game.dims();
    let space = sigma.space();
    if space.types() != d.types.as_slice() || space.actions() != d.actions.as_slice() {
        return Err(Error::BadDims(
            "strategy space does not match the game".into(),
        ));
    }
    let (tr, ar) = (&d.type_radix, &d.action_radix);
    let n = game.n_players();
    let players = (0..n)
        .map(|i| {
            let (nt, na) = (d.types[i], d.actions[i]);
            let own = StrategySpace::new(&d.types[i..=i], &d.actions[i..=i], usize::MAX)?;
            // values[(s_i, θ_i, a)]: Σ_{s ∋ s_i} σ(s) Σ_{θ: θ_i} ρ(θ) v_i(θ; a, s_{-i}(θ_{-i})).
            let mut values = std::collections::BTreeMap::<usize, Vec<f64>>::new();
            let mut truthful = 0.0;
            let mut a = vec![0usize; n];
            for (s, p) in sigma.support() {
                let own_actions: Vec<usize> = (0..nt).map(|t| space.action(s, i, t)).collect();
                let si = own.encode(&[own_actions]);
                let entry = values.entry(si).or_insert_with(|| vec![0.0; nt * na]);
                for t in 0..tr.total() {
                    let rho = game.prior().joint(t);
                    if rho == 0.0 {
                        continue;
                    }
                    for (j, aj) in a.iter_mut().enumerate() {
                        *aj = space.action(s, j, tr.digit(t, j));
                    }
                    let row = game.payoff_row(i, t);
                    let ti = tr.digit(t, i);
                    truthful += p * rho * row[ar.encode(&a)];
                    let played = ar.encode(&a);
                    for ai in 0..na {
                        entry[ti * na + ai] += p * rho * row[ar.with_digit(played, i, ai)];
                    }
                }
            }
            let mut best = 0.0;
            let mut map = Vec::new();
            for (si, v) in values {
                let mut target = Vec::with_capacity(nt);
                for t in 0..nt {
                    let (mut b, mut arg) = (f64::NEG_INFINITY, 0);
                    for (k, &x) in v[t * na..(t + 1) * na].iter().enumerate() {
                        if x > b {
                            (b, arg) = (x, k);
                        }
                    }
                    best += b;
                    target.push(arg);
                }
                map.push((si, target));
            }
            Ok(PlayerCertificate {
                gain: best - truthful,
                witness: Witness::StrategyMap { map },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumCertificate::from_players(EqClass::Sfce, players))
}

/// Recomputes a comm or anf-bs witness gain directly from its definition, without the tensor.
pub fn replay_deviation(
    game: &BayesianGame,
    i: usize,
    pi: &TabularDistribution,
    d: &DeviationPair,
) -> f64 {
    let dims = game.dims();
    let (tr, ar) = (&dims.type_radix, &dims.action_radix);
    let mut value = 0.0;
    for t in 0..tr.total() {
        let rho = game.prior().joint(t);
        if rho == 0.0 {
            continue;
        }
        let ti = tr.digit(t, i);
        let reported = tr.with_digit(t, i, d.psi[ti]);
        for (a, &q) in pi.row(reported).iter().enumerate() {
            let swapped = ar.with_digit(a, i, d.phi[ti][ar.digit(a, i)]);
            value += rho * q * game.payoff(i, t, swapped);
        }
    }
    value - truthful_value(game, i, pi)
}

/// On-disk distribution: a mixture of product profiles, an explicit table over (Θ, A),
/// or a distribution over the strategy profiles of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionFile {
    Mixture { components: Vec<MixtureComponent> },
    Tabular { table: Vec<f64> },
    Strategy { probs: Vec<f64> },
}

impl DistributionFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_tabular(&self, dims: &Dims, cap: usize) -> Result<TabularDistribution> {
        match self {
            DistributionFile::Mixture { components } => {
                MixtureDistribution::new(components.clone())?.to_tabular(dims, cap)
            }
            DistributionFile::Tabular { table } => TabularDistribution::new(dims, table.clone()),
            DistributionFile::Strategy { .. } => self.strategy(dims, cap)?.to_tabular(dims),
        }
    }

    pub fn strategy(&self, dims: &Dims, cap: usize) -> Result<StrategyDistribution> {
        match self {
            DistributionFile::Strategy { probs } => {
                StrategyDistribution::new(StrategySpace::for_game(dims, cap)?, probs.clone())
            }
            _ => Err(Error::InvalidInput(
                "this class needs a strategy distribution".into(),
            )),
        }
    }

    /// The single product profile of a one-component mixture.
    pub fn profile(&self) -> Result<Vec<TypeWisePolicy>> {
        match self {
            DistributionFile::Mixture { components } if components.len() == 1 => {
                Ok(components[0].policies.clone())
            }
            _ => Err(Error::InvalidInput(
                "this class needs a one-component mixture".into(),
            )),
        }
    }
}

impl From<&MixtureDistribution> for DistributionFile {
    fn from(m: &MixtureDistribution) -> Self {
        DistributionFile::Mixture {
            components: m.components.clone(),
        }
    }
}

impl From<&TabularDistribution> for DistributionFile {
    fn from(t: &TabularDistribution) -> Self {
        DistributionFile::Tabular {
            table: t.as_slice().to_vec(),
        }
    }
}

impl From<&StrategyDistribution> for DistributionFile {
    fn from(s: &StrategyDistribution) -> Self {
        DistributionFile::Strategy {
            probs: s.probs().to_vec(),
        }
    }
}
