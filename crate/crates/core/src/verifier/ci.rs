use crate::game::{BayesianGame, TabularDistribution};
use crate::DERIVED_TOL;

/// Whether each recommended a_i is independent of θ_{-i} given θ_i.
#[derive(Debug, Clone, PartialEq)]
pub enum CiOutcome {
    Holds,
    /// First violating cell: Pr(a_i, θ_{-i} | θ_i) = `joint` against Pr(a_i | θ_i)·Pr(θ_{-i} | θ_i) = `product`.
    Violated {
        player: usize,
        own_type: usize,
        action: usize,
        others: usize,
        joint: f64,
        product: f64,
    },
}

pub fn conditional_independence(game: &BayesianGame, pi: &TabularDistribution) -> CiOutcome {
    let d = game.dims();
    let (tr, ar) = (&d.type_radix, &d.action_radix);
    for i in 0..game.n_players() {
        let na = d.actions[i];
        for ti in 0..d.types[i] {
            let Some(cond) = game.prior().conditional(i, ti) else {
                continue;
            };
            // own[o][a_i] = π_i(θ_i, θ_{-i} = o; a_i)
            let own: Vec<Vec<f64>> = (0..cond.len())
                .map(|o| {
                    let mut m = vec![0.0; na];
                    for (a, &q) in pi.row(tr.join(i, ti, o)).iter().enumerate() {
                        m[ar.digit(a, i)] += q;
                    }
                    m
                })
                .collect();
            for ai in 0..na {
                let marginal: f64 = cond.iter().zip(&own).map(|(p, m)| p * m[ai]).sum();
                for (o, &p) in cond.iter().enumerate() {
                    let (joint, product) = (p * own[o][ai], p * marginal);
                    if (joint - product).abs() > DERIVED_TOL {
                        return CiOutcome::Violated {
                            player: i,
                            own_type: ti,
                            action: ai,
                            others: o,
                            joint,
                            product,
                        };
                    }
                }
            }
        }
    }
    CiOutcome::Holds
}
