use super::policy::{MixtureComponent, MixtureDistribution, TabularDistribution, TypeWisePolicy};
use super::Dims;
use crate::error::{Error, Result};
use crate::radix::Radix;
use crate::INGEST_TOL;

/// Strategy-profile set S = Π_i A_i^{Θ_i} for a list of players.
///
/// A strategy profile is encoded mixed-radix over the digits
/// (player 1, type 1), (player 1, type 2), ..., (player n, last type), the first
/// digit most significant, each digit taking values in that player's actions.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpace {
    types: Vec<usize>,
    actions: Vec<usize>,
    offsets: Vec<usize>,
    radix: Radix,
}

impl StrategySpace {
    pub fn new(types: &[usize], actions: &[usize], cap: usize) -> Result<Self> {
        let mut digits = Vec::new();
        let mut offsets = Vec::new();
        for (&nt, &na) in types.iter().zip(actions) {
            offsets.push(digits.len());
            digits.extend(std::iter::repeat(na).take(nt));
        }
        let size = Radix::size_of(&digits);
        if size > cap as u128 {
            return Err(Error::SupportTooLarge { size, cap });
        }
        Ok(StrategySpace {
            types: types.to_vec(),
            actions: actions.to_vec(),
            offsets,
            radix: Radix::new(&digits),
        })
    }

    pub fn for_game(dims: &Dims, cap: usize) -> Result<Self> {
        Self::new(&dims.types, &dims.actions, cap)
    }

    pub fn size(&self) -> usize {
        self.radix.total()
    }

    pub fn n_players(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    /// s_i(θ_i) for profile index `s`.
    pub fn action(&self, s: usize, i: usize, ti: usize) -> usize {
        self.radix.digit(s, self.offsets[i] + ti)
    }

    /// Profile index from per-(player, type) actions.
    pub fn encode(&self, per_player: &[Vec<usize>]) -> usize {
        let digits: Vec<usize> = per_player.iter().flatten().copied().collect();
        self.radix.encode(&digits)
    }

    pub fn decode(&self, s: usize) -> Vec<Vec<usize>> {
        (0..self.n_players())
            .map(|i| (0..self.types[i]).map(|t| self.action(s, i, t)).collect())
            .collect()
    }
}

/// Explicit distribution σ over a strategy space.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyDistribution {
    space: StrategySpace,
    probs: Vec<f64>,
}

impl StrategyDistribution {
    pub fn new(space: StrategySpace, probs: Vec<f64>) -> Result<Self> {
        Self::checked(space, probs, INGEST_TOL)
    }

    pub(crate) fn checked(space: StrategySpace, probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.len() != space.size() {
            return Err(Error::BadDims(format!(
                "{} probabilities for |S| = {}",
                probs.len(),
                space.size()
            )));
        }
        if probs.iter().any(|p| !(*p >= -tol)) {
            return Err(Error::NotStochastic("negative strategy probability".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > tol {
            return Err(Error::NotStochastic(format!(
                "strategy probabilities sum to {s}"
            )));
        }
        Ok(StrategyDistribution { space, probs })
    }

    pub fn point_mass(space: StrategySpace, s: usize) -> Self {
        let mut probs = vec![0.0; space.size()];
        probs[s] = 1.0;
        StrategyDistribution { space, probs }
    }

    pub fn uniform(space: StrategySpace) -> Self {
        let n = space.size();
        StrategyDistribution {
            space,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
    }

    /// One deterministic product component per support profile.
    pub fn to_mixture(&self) -> MixtureDistribution {
        let components = self
            .support()
            .map(|(s, w)| {
                let decoded = self.space.decode(s);
                MixtureComponent {
                    weight: w,
                    policies: decoded
                        .iter()
                        .enumerate()
                        .map(|(i, acts)| TypeWisePolicy::pure(self.space.actions[i], acts))
                        .collect(),
                }
            })
            .collect();
        MixtureDistribution { components }
    }

    /// Push-forward π(θ;a) = Pr_{s∼σ}(s(θ) = a).
    pub fn to_tabular(&self, dims: &Dims) -> Result<TabularDistribution> {
        if dims.types != self.space.types || dims.actions != self.space.actions {
            return Err(Error::BadDims(
                "strategy space does not match the game".into(),
            ));
        }
        let na = dims.action_radix.total();
        let nt = dims.type_radix.total();
        let n = dims.n_players();
        let mut data = vec![0.0; nt * na];
        let mut a = vec![0; n];
        for (s, w) in self.support() {
            for t in 0..nt {
                for (i, ai) in a.iter_mut().enumerate() {
                    *ai = self.space.action(s, i, dims.type_radix.digit(t, i));
                }
                data[t * na + dims.action_radix.encode(&a)] += w;
            }
        }
        TabularDistribution::from_derived(dims, data)
    }

    /// Per-player marginal over that player's own strategies.
    pub fn player_marginal(&self, i: usize) -> Result<StrategyDistribution> {
        let space = StrategySpace::new(
            &self.space.types[i..=i],
            &self.space.actions[i..=i],
            usize::MAX,
        )?;
        let mut probs = vec![0.0; space.size()];
        for (s, w) in self.support() {
            let own: Vec<usize> = (0..self.space.types[i])
                .map(|t| self.space.action(s, i, t))
                .collect();
            probs[space.encode(&[own])] += w;
        }
        Ok(StrategyDistribution { space, probs })
    }

    /// Per-type action marginals of a single-player distribution.
    pub fn type_marginals(&self) -> TypeWisePolicy {
        assert_eq!(
            self.space.n_players(),
            1,
            "type_marginals needs a single-player space"
        );
        let (nt, na) = (self.space.types[0], self.space.actions[0]);
        let mut probs = vec![0.0; nt * na];
        for (s, w) in self.support() {
            for t in 0..nt {
                probs[t * na + self.space.action(s, 0, t)] += w;
            }
        }
        for t in 0..nt {
            let row = &mut probs[t * na..(t + 1) * na];
            let z: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= z);
        }
        TypeWisePolicy::from_derived(nt, na, probs)
            .expect("marginals of a distribution are stochastic")
    }
}
