use crate::error::{Error, Result};
use crate::DERIVED_TOL;

/// Learning rate √(8 ln d / T) of the fixed-horizon learner.
pub fn fixed_rate(d: usize, horizon: usize) -> f64 {
    (8.0 * (d as f64).ln() / horizon.max(1) as f64).sqrt()
}

fn softmax(log_w: &[f64]) -> Vec<f64> {
    let m = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = log_w.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

fn check_reward(reward: &[f64], d: usize, r: f64) -> Result<()> {
    if reward.len() != d {
        return Err(Error::BadDims(format!(
            "reward of length {} for {d} decisions",
            reward.len()
        )));
    }
    for (index, &value) in reward.iter().enumerate() {
        if !(value >= -DERIVED_TOL && value <= r + DERIVED_TOL) {
            return Err(Error::RewardOutOfRange {
                index,
                value,
                range: r,
            });
        }
    }
    Ok(())
}

/// Multiplicative weights with a fixed learning rate. Weights are kept in log form.
#[derive(Debug, Clone)]
pub struct MwuState {
    log_w: Vec<f64>,
    eta: f64,
    range: f64,
    decision: Vec<f64>,
}

impl MwuState {
    pub fn new(d: usize, eta: f64, range: f64) -> Self {
        MwuState {
            log_w: vec![0.0; d],
            eta,
            range,
            decision: vec![1.0 / d as f64; d],
        }
    }

    /// Rate tuned for horizon T.
    pub fn for_horizon(d: usize, horizon: usize, range: f64) -> Self {
        Self::new(d, fixed_rate(d, horizon), range)
    }

    pub fn decision(&self) -> &[f64] {
        &self.decision
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// w_j ← w_j·exp(η·reward_j / r); returns the next decision.
    pub fn update(&mut self, reward: &[f64]) -> Result<&[f64]> {
        check_reward(reward, self.log_w.len(), self.range)?;
        if self.range > 0.0 {
            for (l, g) in self.log_w.iter_mut().zip(reward) {
                *l += self.eta * g / self.range;
            }
            self.decision = softmax(&self.log_w);
        }
        Ok(&self.decision)
    }
}

/// Multiplicative weights with the doubling trick on the best arm's realized reward.
///
/// Epoch k has budget U_k = 2^k ln d (in units of r) and rate √(ln d / U_k). When
/// the best arm's cumulative reward within the epoch exceeds U_k, weights reset
/// to uniform and the next epoch starts.
#[derive(Debug, Clone)]
pub struct DoublingMwuState {
    inner: MwuState,
    epoch: usize,
    budget: f64,
    epoch_totals: Vec<f64>,
}

impl DoublingMwuState {
    pub fn new(d: usize, range: f64) -> Self {
        let budget = (d as f64).ln();
        let eta = if budget > 0.0 { 1.0 } else { 0.0 };
        DoublingMwuState {
            inner: MwuState::new(d, eta, range),
            epoch: 0,
            budget,
            epoch_totals: vec![0.0; d],
        }
    }

    pub fn decision(&self) -> &[f64] {
        self.inner.decision()
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn update(&mut self, reward: &[f64]) -> Result<&[f64]> {
        let d = self.epoch_totals.len();
        self.inner.update(reward)?;
        let r = self.inner.range;
        if r > 0.0 && d > 1 {
            for (s, g) in self.epoch_totals.iter_mut().zip(reward) {
                *s += g / r;
            }
            let best = self
                .epoch_totals
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            if best > self.budget {
                self.epoch += 1;
                self.budget *= 2.0;
                self.inner = MwuState::new(d, ((d as f64).ln() / self.budget).sqrt(), r);
                self.epoch_totals.iter_mut().for_each(|s| *s = 0.0);
            }
        }
        Ok(self.inner.decision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step_closed_form() {
        let mut m = MwuState::new(2, 0.5, 1.0);
        let d = m.update(&[1.0, 0.0]).unwrap().to_vec();
        let e = 0.5f64.exp();
        assert!((d[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((d[0] - 0.6225).abs() < 1e-4 && (d[1] - 0.3775).abs() < 1e-4);
    }

    #[test]
    fn equal_rewards_leave_decision_unchanged() {
        let mut m = MwuState::new(3, 0.7, 1.0);
        m.update(&[0.2, 0.9, 0.1]).unwrap();
        let before = m.decision().to_vec();
        let after = m.update(&[0.4, 0.4, 0.4]).unwrap().to_vec();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_reward_is_rejected() {
        let mut m = MwuState::new(2, 0.5, 0.5);
        assert!(matches!(
            m.update(&[0.6, 0.0]),
            Err(Error::RewardOutOfRange { index: 0, .. })
        ));
        assert!(m.update(&[0.5 + 1e-10, 0.0]).is_ok());
    }

    #[test]
    fn fixed_rate_regret_on_constant_stream() {
        let t = 1000;
        let mut m = MwuState::for_horizon(2, t, 1.0);
        let mut got = 0.0;
        for _ in 0..t {
            got += m.decision()[0];
            m.update(&[1.0, 0.0]).unwrap();
        }
        let regret = t as f64 - got;
        assert!(
            regret <= (0.5 * t as f64 * 2f64.ln()).sqrt(),
            "regret {regret}"
        );
    }

    #[test]
    fn first_restart_when_best_arm_exceeds_initial_budget() {
        let mut m = DoublingMwuState::new(2, 1.0);
        let u0 = 2f64.ln();
        m.update(&[0.5, 0.0]).unwrap();
        assert_eq!(m.epoch(), 0);
        m.update(&[0.5, 0.0]).unwrap();
        assert!(1.0 > u0);
        assert_eq!(m.epoch(), 1);
        assert_eq!(m.decision(), &[0.5, 0.5]);
        assert!((m.budget() - 2.0 * u0).abs() < 1e-15);
    }

    #[test]
    fn zero_rewards_never_restart() {
        let mut m = DoublingMwuState::new(4, 1.0);
        for _ in 0..100 {
            m.update(&[0.0; 4]).unwrap();
        }
        assert_eq!(m.epoch(), 0);
        assert!(m.decision().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn doubling_regret_against_adversarial_stream() {
        // Reward goes to the arm currently played with lower probability until
        // some arm has collected 100.
        let mut m = DoublingMwuState::new(2, 1.0);
        let (mut totals, mut got) = ([0.0f64; 2], 0.0);
        while totals[0].max(totals[1]) < 100.0 {
            let d = m.decision().to_vec();
            let k = if d[0] <= d[1] { 0 } else { 1 };
            let mut g = [0.0; 2];
            g[k] = 1.0;
            got += d[k];
            totals[k] += 1.0;
            m.update(&g).unwrap();
        }
        let u_star = totals[0].max(totals[1]);
        let bound = 6.0 * (u_star * 2f64.ln()).sqrt() + 2.0 * 2f64.ln();
        assert!(
            u_star - got <= bound,
            "regret {} bound {bound}",
            u_star - got
        );
    }
}
