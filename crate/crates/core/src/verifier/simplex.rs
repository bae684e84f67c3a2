//! Strategy representability as a phase-1 feasibility LP.
//!
//! Find σ ≥ 0 with Σσ = 1 and Σ_{s: s(θ)=a} σ(s) = π(θ;a) for every (θ, a).
//! Solved with a dense tableau and Bland's rule.

use crate::error::{Error, Result};
use crate::game::{Dims, StrategyDistribution, StrategySpace, TabularDistribution};
use crate::DERIVED_TOL;

/// Phase-1 optima strictly between DERIVED_TOL and this are reported as ambiguous.
pub const AMBIGUITY_BAND: f64 = 1e-7;

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Representability {
    Feasible {
        witness: StrategyDistribution,
    },
    /// Farkas certificate y: yᵀA_s ≤ 0 for every strategy profile s and yᵀb = `violation` > 0.
    /// Rows are ordered (θ, a) row-major, then the normalization row.
    Infeasible {
        farkas: Vec<f64>,
        violation: f64,
    },
}

struct Lp {
    m: usize,
    n: usize,
    /// Row-major, m rows of n + m coefficients followed by the right-hand side.
    tab: Vec<f64>,
    /// Reduced costs over n + m columns, then minus the objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Lp {
    fn width(&self) -> usize {
        self.n + self.m + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.tab[r * self.width() + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let p = self.at(pr, pc);
        for c in 0..w {
            self.tab[pr * w + c] /= p;
        }
        let prow: Vec<f64> = self.tab[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.m {
            if r == pr {
                continue;
            }
            let f = self.tab[r * w + pc];
            if f != 0.0 {
                for (x, &y) in self.tab[r * w..(r + 1) * w].iter_mut().zip(&prow) {
                    *x -= f * y;
                }
            }
        }
        let f = self.cost[pc];
        if f != 0.0 {
            for (x, &y) in self.cost.iter_mut().zip(&prow) {
                *x -= f * y;
            }
        }
        self.basis[pr] = pc;
    }

    fn solve(&mut self) {
        let rhs = self.n + self.m;
        loop {
            let Some(pc) = (0..rhs).find(|&c| self.cost[c] < -PIVOT_EPS) else {
                return;
            };
            let mut best: Option<(f64, usize)> = None;
            for r in 0..self.m {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.at(r, rhs) / a;
                    best = match best {
                        None => Some((ratio, r)),
                        Some((br, brow)) => {
                            if ratio < br - PIVOT_EPS
                                || (ratio <= br + PIVOT_EPS && self.basis[r] < self.basis[brow])
                            {
                                Some((ratio, r))
                            } else {
                                Some((br, brow))
                            }
                        }
                    };
                }
            }
            // Phase 1 is bounded below by 0, so an entering column always has a blocking row.
            let Some((_, pr)) = best else { return };
            self.pivot(pr, pc);
        }
    }
}

/// Decides whether π is the push-forward of some σ ∈ Δ(S). Fails with
/// `SupportTooLarge` when |S| exceeds `cap`.
pub fn strategy_representable(
    dims: &Dims,
    pi: &TabularDistribution,
    cap: usize,
) -> Result<Representability> {
    if pi.dims() != dims {
        return Err(Error::BadDims(
            "distribution does not match the game".into(),
        ));
    }
    let space = StrategySpace::for_game(dims, cap)?;
    let (nt, na) = (dims.n_type_profiles(), dims.n_action_profiles());
    let (m, n) = (nt * na + 1, space.size());
    let w = n + m + 1;

    let mut rows_of = vec![Vec::with_capacity(nt + 1); n];
    let mut a = vec![0usize; dims.n_players()];
    for (s, rows) in rows_of.iter_mut().enumerate() {
        for t in 0..nt {
            for (i, ai) in a.iter_mut().enumerate() {
                *ai = space.action(s, i, dims.type_radix.digit(t, i));
            }
            rows.push(t * na + dims.action_radix.encode(&a));
        }
        rows.push(m - 1);
    }
    let b: Vec<f64> = pi
        .as_slice()
        .iter()
        .map(|x| x.max(0.0))
        .chain(std::iter::once(1.0))
        .collect();

    let mut tab = vec![0.0; m * w];
    for (s, rows) in rows_of.iter().enumerate() {
        for &r in rows {
            tab[r * w + s] = 1.0;
        }
    }
    for r in 0..m {
        tab[r * w + n + r] = 1.0;
        tab[r * w + n + m] = b[r];
    }
    let mut cost = vec![0.0; w];
    for (s, rows) in rows_of.iter().enumerate() {
        cost[s] = -(rows.len() as f64);
    }
    cost[n + m] = -b.iter().sum::<f64>();

    let mut lp = Lp {
        m,
        n,
        tab,
        cost,
        basis: (n..n + m).collect(),
    };
    lp.solve();
    let objective = -lp.cost[n + m];

    if objective <= DERIVED_TOL {
        let mut probs = vec![0.0; n];
        for (r, &c) in lp.basis.iter().enumerate() {
            if c < n {
                probs[c] = lp.at(r, n + m).max(0.0);
            }
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let witness = StrategyDistribution::checked(space, probs, DERIVED_TOL)?;
        let back = witness.to_tabular(dims)?;
        let err = back
            .as_slice()
            .iter()
            .zip(pi.as_slice())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if err > AMBIGUITY_BAND {
            return Err(Error::NumericallyAmbiguous(err));
        }
        return Ok(Representability::Feasible { witness });
    }
    if objective < AMBIGUITY_BAND {
        return Err(Error::NumericallyAmbiguous(objective));
    }

    let farkas: Vec<f64> = (0..m).map(|r| 1.0 - lp.cost[n + r]).collect();
    let violation: f64 = farkas.iter().zip(&b).map(|(y, x)| y * x).sum();
    let worst = rows_of
        .iter()
        .map(|rows| rows.iter().map(|&r| farkas[r]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if violation < AMBIGUITY_BAND || worst > DERIVED_TOL {
        return Err(Error::NumericallyAmbiguous(violation));
    }
    Ok(Representability::Infeasible { farkas, violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example_distribution_is_not_representable() {
        let (game, pi) = fixtures::unrepresentable();
        match strategy_representable(game.dims(), &pi, 1 << 20).unwrap() {
            Representability::Infeasible { violation, .. } => assert!(violation >= AMBIGUITY_BAND),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn push_forward_is_representable() {
        let dims = Dims::new(&[2, 2], &[2, 2]);
        let space = StrategySpace::for_game(&dims, 1 << 20).unwrap();
        let mut probs = vec![0.0; space.size()];
        probs[3] = 0.25;
        probs[9] = 0.75;
        let sigma = StrategyDistribution::new(space, probs).unwrap();
        let pi = sigma.to_tabular(&dims).unwrap();
        match strategy_representable(&dims, &pi, 1 << 20).unwrap() {
            Representability::Feasible { witness } => {
                let back = witness.to_tabular(&dims).unwrap();
                for (x, y) in back.as_slice().iter().zip(pi.as_slice()) {
                    assert!((x - y).abs() < 1e-9);
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn cap_is_enforced() {
        let (game, pi) = fixtures::unrepresentable();
        assert!(matches!(
            strategy_representable(game.dims(), &pi, 4),
            Err(Error::SupportTooLarge { .. })
        ));
    }
}
