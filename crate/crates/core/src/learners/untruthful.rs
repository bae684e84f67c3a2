use super::{check_unit_rewards, DoublingMwuState, MwuState};
use crate::error::Result;
use crate::game::TypeWisePolicy;
use crate::transforms::{assemble_transform, fixed_point, SwapTransform};

pub const FIXED_POINT_TOL: f64 = 1e-10;

/// Untruthful swap regret minimizer.
///
/// E_θ (fixed-rate MWU over Θ) picks the type mixer row w_θ and E_{θ,θ',a'}
/// (doubling MWU over A) the action map y_{θ,θ',a'}; the emitted policy is the
/// fixed point of the assembled transform.
#[derive(Debug, Clone)]
pub struct UntruthfulLearner {
    n_types: usize,
    n_actions: usize,
    rho: Vec<f64>,
    type_mixers: Vec<MwuState>,
    action_maps: Vec<DoublingMwuState>,
    last: Option<(SwapTransform, TypeWisePolicy)>,
}

impl UntruthfulLearner {
    /// `rho` is the player's marginal prior; `horizon` tunes the E_θ learning rates.
    pub fn new(rho: &[f64], n_actions: usize, horizon: usize) -> Self {
        let nt = rho.len();
        let type_mixers = rho
            .iter()
            .map(|&r| MwuState::for_horizon(nt, horizon, r))
            .collect();
        let action_maps = (0..nt * nt * n_actions)
            .map(|k| DoublingMwuState::new(n_actions, rho[k / (nt * n_actions)]))
            .collect();
        UntruthfulLearner {
            n_types: nt,
            n_actions,
            rho: rho.to_vec(),
            type_mixers,
            action_maps,
            last: None,
        }
    }

    pub fn subroutine_count(&self) -> usize {
        self.type_mixers.len() + self.action_maps.len()
    }

    /// The transform and policy emitted last round.
    pub fn last(&self) -> Option<&(SwapTransform, TypeWisePolicy)> {
        self.last.as_ref()
    }

    /// Feeds the previous round's reward vector over (θ, a), then emits the next policy.
    pub fn step(&mut self, prev_reward: Option<&[f64]>) -> Result<TypeWisePolicy> {
        let (nt, na) = (self.n_types, self.n_actions);
        if let (Some(u), Some((q, x))) = (prev_reward, &self.last) {
            check_unit_rewards(u, nt * na)?;
            for t in 0..nt {
                let rho = self.rho[t];
                let mut mixer_reward = vec![0.0; nt];
                for (tp, g) in mixer_reward.iter_mut().enumerate() {
                    for ap in 0..na {
                        let y = q.block(t, tp, ap);
                        let xv = x.get(tp, ap);
                        for a in 0..na {
                            *g += y[a] * xv * rho * u[t * na + a];
                        }
                    }
                }
                self.type_mixers[t].update(&mixer_reward)?;
                for tp in 0..nt {
                    for ap in 0..na {
                        let xv = x.get(tp, ap);
                        let reward: Vec<f64> = (0..na).map(|a| xv * rho * u[t * na + a]).collect();
                        self.action_maps[(t * nt + tp) * na + ap].update(&reward)?;
                    }
                }
            }
        }
        let w: Vec<Vec<f64>> = self
            .type_mixers
            .iter()
            .map(|m| m.decision().to_vec())
            .collect();
        let y: Vec<Vec<f64>> = self
            .action_maps
            .iter()
            .map(|m| m.decision().to_vec())
            .collect();
        let q = assemble_transform(&w, &y)?;
        let seed = match &self.last {
            Some((_, x)) => x.clone(),
            None => TypeWisePolicy::uniform(nt, na),
        };
        let x = fixed_point(&q, FIXED_POINT_TOL, &seed)?;
        self.last = Some((q, x.clone()));
        Ok(x)
    }
}
