use super::untruthful::FIXED_POINT_TOL;
use super::{check_unit_rewards, DoublingMwuState};
use crate::error::Result;
use crate::game::{StrategyDistribution, StrategySpace};
use crate::linalg;
use crate::transforms::FIXED_POINT_MAX_ITER;

/// Largest |S_i| accepted by [`StrategySwapLearner`]; the learner stores a dense |S_i|² matrix.
pub const STRATEGY_LEARNER_CAP: usize = 1024;

/// Strategy swap regret learner over S_i = A^Θ.
///
/// One doubling MWU E_{s,θ} over A per (strategy, type); the played σ is the
/// stationary distribution of P(s,s') = Π_θ z_{s',θ}(s(θ)).
#[derive(Debug, Clone)]
pub struct StrategySwapLearner {
    space: StrategySpace,
    experts: Vec<DoublingMwuState>,
    last: Option<StrategyDistribution>,
}

impl StrategySwapLearner {
    pub fn new(n_types: usize, n_actions: usize, cap: usize) -> Result<Self> {
        let space = StrategySpace::new(&[n_types], &[n_actions], cap.min(STRATEGY_LEARNER_CAP))?;
        let experts = (0..space.size() * n_types)
            .map(|_| DoublingMwuState::new(n_actions, 1.0))
            .collect();
        Ok(StrategySwapLearner {
            space,
            experts,
            last: None,
        })
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    /// Feeds the previous reward vector over (θ, a), then emits the next σ.
    pub fn step(&mut self, prev_reward: Option<&[f64]>) -> Result<StrategyDistribution> {
        let (nt, na) = (self.space.types()[0], self.space.actions()[0]);
        let ns = self.space.size();
        if let (Some(u), Some(sigma)) = (prev_reward, &self.last) {
            check_unit_rewards(u, nt * na)?;
            for s in 0..ns {
                let p = sigma.probs()[s];
                for t in 0..nt {
                    let reward: Vec<f64> = (0..na).map(|a| p * u[t * na + a]).collect();
                    self.experts[s * nt + t].update(&reward)?;
                }
            }
        }
        let mut m = vec![0.0; ns * ns];
        for s in 0..ns {
            for sp in 0..ns {
                m[s * ns + sp] = (0..nt)
                    .map(|t| self.experts[sp * nt + t].decision()[self.space.action(s, 0, t)])
                    .product();
            }
        }
        let seed = match &self.last {
            Some(s) => s.probs().to_vec(),
            None => vec![1.0 / ns as f64; ns],
        };
        let sigma =
            linalg::fixed_point_dense(&m, ns, ns, &seed, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)?;
        let sigma = StrategyDistribution::checked(self.space.clone(), sigma, crate::DERIVED_TOL)?;
        self.last = Some(sigma.clone());
        Ok(sigma)
    }
}
