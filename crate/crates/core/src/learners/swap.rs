use super::untruthful::FIXED_POINT_TOL;
use super::{check_unit_rewards, DoublingMwuState};
use crate::error::Result;
use crate::game::TypeWisePolicy;
use crate::linalg;
use crate::transforms::FIXED_POINT_MAX_ITER;

/// Blum–Mansour swap regret learner over A: one doubling MWU expert per
/// recommended action, playing the stationary distribution of their outputs.
#[derive(Debug, Clone)]
pub struct SwapLearner {
    n_actions: usize,
    rho: f64,
    experts: Vec<DoublingMwuState>,
    last: Option<Vec<f64>>,
}

impl SwapLearner {
    /// `rho` scales incoming rewards and is the experts' reward range.
    pub fn new(n_actions: usize, rho: f64) -> Self {
        SwapLearner {
            n_actions,
            rho,
            experts: (0..n_actions)
                .map(|_| DoublingMwuState::new(n_actions, rho))
                .collect(),
            last: None,
        }
    }

    /// Feeds the previous reward row over A, then emits the next action distribution.
    pub fn step(&mut self, prev_reward: Option<&[f64]>) -> Result<Vec<f64>> {
        let na = self.n_actions;
        if let (Some(u), Some(x)) = (prev_reward, &self.last) {
            check_unit_rewards(u, na)?;
            let rho = self.rho;
            for (ap, e) in self.experts.iter_mut().enumerate() {
                let reward: Vec<f64> = (0..na).map(|a| x[ap] * rho * u[a]).collect();
                e.update(&reward)?;
            }
        }
        let mut q = vec![0.0; na * na];
        for (ap, e) in self.experts.iter().enumerate() {
            for (a, &p) in e.decision().iter().enumerate() {
                q[a * na + ap] = p;
            }
        }
        let seed = self
            .last
            .clone()
            .unwrap_or_else(|| vec![1.0 / na as f64; na]);
        let x =
            linalg::fixed_point_dense(&q, na, na, &seed, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)?;
        self.last = Some(x.clone());
        Ok(x)
    }
}

/// One independent swap learner per type, on the reward rows ρ(θ)·u(θ,·).
#[derive(Debug, Clone)]
pub struct TypewiseLearner {
    n_actions: usize,
    per_type: Vec<SwapLearner>,
}

impl TypewiseLearner {
    pub fn new(rho: &[f64], n_actions: usize) -> Self {
        TypewiseLearner {
            n_actions,
            per_type: rho
                .iter()
                .map(|&r| SwapLearner::new(n_actions, r))
                .collect(),
        }
    }

    pub fn step(&mut self, prev_reward: Option<&[f64]>) -> Result<TypeWisePolicy> {
        let na = self.n_actions;
        let nt = self.per_type.len();
        if let Some(u) = prev_reward {
            check_unit_rewards(u, nt * na)?;
        }
        let mut probs = Vec::with_capacity(nt * na);
        for (t, l) in self.per_type.iter_mut().enumerate() {
            probs.extend(l.step(prev_reward.map(|u| &u[t * na..(t + 1) * na]))?);
        }
        TypeWisePolicy::from_derived(nt, na, probs)
    }
}
