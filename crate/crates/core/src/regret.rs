//! Exact regret accounting from cumulative cross tensors.
//!
//! Every deviation (ψ, φ) earns Σ_θ Σ_a' C(θ, ψ(θ), φ(θ,a'), a') in total, so the
//! best one is found by maximizing independently per (θ, θ', a') and the maximum
//! over doubly exponentially many maps costs O(|Θ|²|A|²).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{StrategyDistribution, StrategySpace, TypeWisePolicy};
use crate::transforms::DeviationPair;
use crate::DERIVED_TOL;

fn audited(value: f64, what: &str) -> Result<f64> {
    if value < -DERIVED_TOL {
        return Err(Error::Audit(format!("{what} regret {value} is negative")));
    }
    Ok(value)
}

/// Index of the first maximum.
fn argmax(v: impl Iterator<Item = f64>) -> (usize, f64) {
    v.enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (k, x)| if x > acc.1 { (k, x) } else { acc },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretLedger {
    n_types: usize,
    n_actions: usize,
    rho: Vec<f64>,
    /// C(θ,θ',a,a') = Σ_t ρ(θ) u^t(θ,a) x^t(θ',a'), indexed ((θ·|Θ| + θ')·|A| + a)·|A| + a'.
    cross: Vec<f64>,
    gain: f64,
    rounds: usize,
}

impl RegretLedger {
    pub fn new(rho: &[f64], n_actions: usize) -> Self {
        let nt = rho.len();
        RegretLedger {
            n_types: nt,
            n_actions,
            rho: rho.to_vec(),
            cross: vec![0.0; nt * nt * n_actions * n_actions],
            gain: 0.0,
            rounds: 0,
        }
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// G = Σ_t ⟨x^t, ū^t⟩.
    pub fn achieved(&self) -> f64 {
        self.gain
    }

    pub fn cross(&self, t: usize, tp: usize, a: usize, ap: usize) -> f64 {
        self.cross[((t * self.n_types + tp) * self.n_actions + a) * self.n_actions + ap]
    }

    /// Records one round: played policy `x` and reward vector `u` over (θ, a).
    pub fn accumulate(&mut self, x: &TypeWisePolicy, u: &[f64]) {
        let (nt, na) = (self.n_types, self.n_actions);
        debug_assert_eq!(x.n_types(), nt);
        debug_assert_eq!(u.len(), nt * na);
        for t in 0..nt {
            let rho = self.rho[t];
            for a in 0..na {
                let ub = rho * u[t * na + a];
                self.gain += x.get(t, a) * ub;
                if ub == 0.0 {
                    continue;
                }
                for tp in 0..nt {
                    let base = ((t * nt + tp) * na + a) * na;
                    let xr = x.row(tp);
                    for (c, xv) in self.cross[base..base + na].iter_mut().zip(xr) {
                        *c += ub * xv;
                    }
                }
            }
        }
        self.rounds += 1;
    }

    /// Σ_{a'} max_a C(θ,θ',a,a') and the maximizing φ(θ, ·).
    fn swap_value(&self, t: usize, tp: usize) -> (f64, Vec<usize>) {
        let na = self.n_actions;
        let mut phi = Vec::with_capacity(na);
        let mut total = 0.0;
        for ap in 0..na {
            let (a, v) = argmax((0..na).map(|a| self.cross(t, tp, a, ap)));
            phi.push(a);
            total += v;
        }
        (total, phi)
    }

    /// Best total reward over all (ψ, φ) with the maximizing deviation, ties to the lowest ordinal.
    pub fn untruthful_best(&self) -> (f64, DeviationPair) {
        let nt = self.n_types;
        let mut psi = Vec::with_capacity(nt);
        let mut phi = Vec::with_capacity(nt);
        let mut total = 0.0;
        for t in 0..nt {
            let (mut best, mut best_tp, mut best_phi) = (f64::NEG_INFINITY, 0, Vec::new());
            for tp in 0..nt {
                let (v, p) = self.swap_value(t, tp);
                if v > best {
                    (best, best_tp, best_phi) = (v, tp, p);
                }
            }
            psi.push(best_tp);
            phi.push(best_phi);
            total += best;
        }
        (total, DeviationPair { psi, phi })
    }

    pub fn untruthful_regret(&self) -> Result<f64> {
        audited(self.untruthful_best().0 - self.gain, "untruthful swap")
    }

    pub fn untruthful_witness(&self) -> DeviationPair {
        self.untruthful_best().1
    }

    pub fn typewise_regret(&self) -> Result<f64> {
        let best: f64 = (0..self.n_types).map(|t| self.swap_value(t, t).0).sum();
        audited(best - self.gain, "type-wise swap")
    }

    pub fn external_regret(&self) -> Result<f64> {
        let na = self.n_actions;
        let best: f64 = (0..self.n_types)
            .map(|t| argmax((0..na).map(|a| (0..na).map(|ap| self.cross(t, t, a, ap)).sum())).1)
            .sum();
        // No identity deviation here, so a learner that sees rewards first can go negative.
        Ok(best - self.gain)
    }

    /// Adds another ledger over the same player, e.g. one built on a separate segment of rounds.
    pub fn merge(&mut self, other: &RegretLedger) {
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
        self.gain += other.gain;
        self.rounds += other.rounds;
    }
}

/// Per-(s, θ, a) tallies D(s,θ,a) = Σ_t σ^t(s) u^t(θ,a) for strategy swap regret.
#[derive(Debug, Clone)]
pub struct StrategyLedger {
    space: StrategySpace,
    rho: Vec<f64>,
    tallies: Vec<f64>,
    achieved: f64,
    rounds: usize,
}

impl StrategyLedger {
    /// `space` must be a single-player strategy space.
    pub fn new(space: StrategySpace, rho: &[f64]) -> Self {
        let (nt, na) = (space.types()[0], space.actions()[0]);
        let n = space.size();
        StrategyLedger {
            space,
            rho: rho.to_vec(),
            tallies: vec![0.0; n * nt * na],
            achieved: 0.0,
            rounds: 0,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn accumulate(&mut self, sigma: &StrategyDistribution, u: &[f64]) {
        let (nt, na) = (self.space.types()[0], self.space.actions()[0]);
        for (s, p) in sigma.support() {
            for t in 0..nt {
                let base = (s * nt + t) * na;
                for a in 0..na {
                    self.tallies[base + a] += p * u[t * na + a];
                }
                self.achieved += p * self.rho[t] * u[t * na + self.space.action(s, 0, t)];
            }
        }
        self.rounds += 1;
    }

    /// Σ_θ ρ(θ) Σ_s max_a D(s,θ,a) − achieved.
    pub fn strategy_regret(&self) -> Result<f64> {
        let (nt, na) = (self.space.types()[0], self.space.actions()[0]);
        let mut best = 0.0;
        for s in 0..self.space.size() {
            for t in 0..nt {
                let base = (s * nt + t) * na;
                best += self.rho[t] * argmax(self.tallies[base..base + na].iter().copied()).1;
            }
        }
        audited(best - self.achieved, "strategy swap")
    }

    pub fn achieved(&self) -> f64 {
        self.achieved
    }
}

/// Strategy swap regret of a recorded trace of (σ^t, u^t) pairs.
pub fn strategy_regret(trace: &[(StrategyDistribution, Vec<f64>)], rho: &[f64]) -> Result<f64> {
    let Some((first, _)) = trace.first() else {
        return Ok(0.0);
    };
    let mut ledger = StrategyLedger::new(first.space().clone(), rho);
    for (sigma, u) in trace {
        ledger.accumulate(sigma, u);
    }
    ledger.strategy_regret()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_round_uniform() {
        let mut l = RegretLedger::new(&[1.0], 2);
        l.accumulate(&TypeWisePolicy::uniform(1, 2), &[1.0, 0.0]);
        assert_eq!(l.cross(0, 0, 0, 0), 0.5);
        assert_eq!(l.cross(0, 0, 0, 1), 0.5);
        assert_eq!(l.cross(0, 0, 1, 0), 0.0);
        assert_eq!(l.cross(0, 0, 1, 1), 0.0);
        assert_eq!(l.achieved(), 0.5);
        assert_eq!(l.untruthful_regret().unwrap(), 0.5);
    }

    #[test]
    fn zero_round_changes_nothing_and_rounds_add() {
        let x = TypeWisePolicy::new(1, 2, vec![0.3, 0.7]).unwrap();
        let mut l = RegretLedger::new(&[1.0], 2);
        l.accumulate(&x, &[0.4, 0.9]);
        let once = l.clone();
        l.accumulate(&x, &[0.0, 0.0]);
        assert_eq!(l.cross, once.cross);
        assert_eq!(l.achieved(), once.achieved());
        l.accumulate(&x, &[0.4, 0.9]);
        for (a, b) in l.cross.iter().zip(&once.cross) {
            assert_eq!(*a, 2.0 * b);
        }
    }

    #[test]
    fn type_swap_example() {
        let mut l = RegretLedger::new(&[0.5, 0.5], 2);
        let x = TypeWisePolicy::pure(2, &[0, 1]);
        l.accumulate(&x, &[0.0, 1.0, 1.0, 0.0]);
        assert!((l.untruthful_regret().unwrap() - 1.0).abs() < 1e-15);
        // Every type ties between reports; ties go to the lowest ordinal.
        let w = l.untruthful_witness();
        assert_eq!(w.psi, vec![0, 0]);
        assert_eq!(w.phi[0][0], 1);
        assert_eq!(w.phi[1][1], 0);
        assert!((l.typewise_regret().unwrap() - 1.0).abs() < 1e-15);
        assert!((l.external_regret().unwrap() - 1.0).abs() < 1e-15);
    }
}
