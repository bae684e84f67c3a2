//! Small named games and distributions used by tests, examples and the shipped JSON files.

use std::path::Path;

use crate::error::Result;
use crate::game::{
    BayesianGame, Dims, PayoffScope, PriorSpec, StrategyDistribution, StrategySpace,
    TabularDistribution,
};
use crate::poa::{QuasilinearGame, SmoothnessMode, SmoothnessSpec};
use crate::verifier::DistributionFile;

fn relabel(game: BayesianGame, types: &[&[&str]], actions: &[&[&str]]) -> BayesianGame {
    let mut file = game.to_file();
    let own = |v: &[&[&str]]| {
        v.iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    };
    file.types = own(types);
    file.actions = own(actions);
    BayesianGame::from_file(file).expect("relabelled fixture")
}

fn uniform_rows(types: &[usize]) -> PriorSpec {
    PriorSpec::Product {
        rows: types.iter().map(|&k| vec![1.0 / k as f64; k]).collect(),
    }
}

fn table(dims: &Dims, entries: &[(&[usize], &[usize], f64)]) -> TabularDistribution {
    let mut data = vec![0.0; dims.n_type_profiles() * dims.n_action_profiles()];
    for (theta, a, p) in entries {
        data[dims.type_radix.encode(theta) * dims.n_action_profiles()
            + dims.action_radix.encode(a)] += p;
    }
    TabularDistribution::new(dims, data).expect("fixture table")
}

/// All-zero 2×2×2 game with a uniform prior and the non-representable distribution
/// that correlates actions differently at (θ'_1, θ'_2).
pub fn unrepresentable() -> (BayesianGame, TabularDistribution) {
    let game = BayesianGame::from_oracle(
        &[2, 2],
        &[2, 2],
        uniform_rows(&[2, 2]),
        PayoffScope::OwnType,
        |_, _, _| 0.0,
    )
    .expect("zero game");
    let game = relabel(
        game,
        &[&["t1", "t1'"], &["t2", "t2'"]],
        &[&["a1", "a1'"], &["a2", "a2'"]],
    );
    let pi = table(
        game.dims(),
        &[
            (&[0, 0], &[0, 0], 0.5),
            (&[0, 0], &[1, 1], 0.5),
            (&[0, 1], &[0, 0], 0.5),
            (&[0, 1], &[1, 1], 0.5),
            (&[1, 0], &[0, 0], 0.5),
            (&[1, 0], &[1, 1], 0.5),
            (&[1, 1], &[0, 1], 0.5),
            (&[1, 1], &[1, 0], 0.5),
        ],
    );
    (game, pi)
}

/// Player 1 has three types and actions 0..=4, player 2 one type and actions 1..=4.
/// Returns the game, its distribution π and the four-profile σ with η(σ) = π.
pub fn comm_not_sfce() -> (BayesianGame, TabularDistribution, StrategyDistribution) {
    const T1: [(usize, usize); 4] = [(4, 1), (4, 2), (1, 3), (1, 4)];
    const T2: [(usize, usize); 4] = [(2, 1), (2, 3), (3, 2), (3, 4)];
    let game = BayesianGame::from_oracle(
        &[3, 1],
        &[5, 4],
        uniform_rows(&[3, 1]),
        PayoffScope::OwnType,
        |i, theta, a| {
            let (a1, a2) = (a[0], a[1] + 1);
            if i == 1 {
                return if a1 != a2 { 1.0 } else { 0.0 };
            }
            match theta[0] {
                0 if a1 == 0 => 0.5,
                0 => {
                    if a1 == a2 {
                        1.0
                    } else {
                        0.0
                    }
                }
                1 => {
                    if T1.contains(&(a1, a2)) {
                        0.5
                    } else {
                        0.0
                    }
                }
                _ => {
                    if T2.contains(&(a1, a2)) {
                        0.5
                    } else {
                        0.0
                    }
                }
            }
        },
    )
    .expect("prop game");
    let game = relabel(
        game,
        &[&["t", "t'", "t''"], &["t"]],
        &[&["0", "1", "2", "3", "4"], &["1", "2", "3", "4"]],
    );
    let dims = game.dims().clone();
    let mut entries: Vec<(Vec<usize>, Vec<usize>, f64)> = Vec::new();
    for a2 in 1..=4 {
        entries.push((vec![0, 0], vec![0, a2 - 1], 0.25));
    }
    for (t, set) in [(1, T1), (2, T2)] {
        for (a1, a2) in set {
            entries.push((vec![t, 0], vec![a1, a2 - 1], 0.25));
        }
    }
    let refs: Vec<(&[usize], &[usize], f64)> = entries
        .iter()
        .map(|(t, a, p)| (t.as_slice(), a.as_slice(), *p))
        .collect();
    let pi = table(&dims, &refs);
    let space = StrategySpace::for_game(&dims, usize::MAX).expect("small space");
    let mut probs = vec![0.0; space.size()];
    for (s1, s2) in [
        ([0, 4, 2], 1),
        ([0, 4, 3], 2),
        ([0, 1, 2], 3),
        ([0, 1, 3], 4),
    ] {
        probs[space.encode(&[s1.to_vec(), vec![s2 - 1]])] = 0.25;
    }
    let sigma = StrategyDistribution::new(space, probs).expect("prop sigma");
    (game, pi, sigma)
}

/// Perfectly correlated types; only player 1 has payoffs. σ mixes two strategy profiles that
/// agree at (θ_1, θ_2) and differ at (θ'_1, θ'_2).
pub fn coarse_split() -> (BayesianGame, StrategyDistribution) {
    const V: [[[f64; 2]; 2]; 2] = [[[0.0, 0.0], [0.5, 0.0]], [[0.0, 1.0], [1.0, 0.0]]];
    let prior = PriorSpec::Tabular {
        table: vec![0.5, 0.0, 0.0, 0.5],
    };
    let game = BayesianGame::from_oracle(
        &[2, 2],
        &[2, 2],
        prior,
        PayoffScope::OwnType,
        |i, theta, a| {
            if i == 0 {
                V[theta[0]][a[0]][a[1]]
            } else {
                0.0
            }
        },
    )
    .expect("table game");
    let game = relabel(
        game,
        &[&["t1", "t1'"], &["t2", "t2'"]],
        &[&["a1", "a1'"], &["a2", "a2'"]],
    );
    let space = StrategySpace::for_game(game.dims(), usize::MAX).expect("small space");
    let mut probs = vec![0.0; space.size()];
    probs[space.encode(&[vec![0, 1], vec![0, 0]])] = 0.5;
    probs[space.encode(&[vec![0, 0], vec![0, 1]])] = 0.5;
    let sigma = StrategyDistribution::new(space, probs).expect("table sigma");
    (game, sigma)
}

/// Two bidders, values {1, 2} uniform, bids {0, 1, 2}, highest bid wins with ties to the lower
/// index, winner pays the bid. Scaled into [0,1] as v⁺ = (1 + value·win)/3, v⁻ = bid·win/3.
pub fn first_price_auction() -> QuasilinearGame {
    let winner = |a: &[usize]| if a[1] > a[0] { 1 } else { 0 };
    let value = |i: usize, ti: usize, a: &[usize]| {
        (1.0 + if winner(a) == i { (ti + 1) as f64 } else { 0.0 }) / 3.0
    };
    let payment = |i: usize, a: &[usize]| {
        if winner(a) == i {
            a[i] as f64 / 3.0
        } else {
            0.0
        }
    };
    let game = BayesianGame::from_oracle(
        &[2, 2],
        &[3, 3],
        uniform_rows(&[2, 2]),
        PayoffScope::OwnType,
        |i, theta, a| value(i, theta[i], a) - payment(i, a),
    )
    .expect("auction");
    let game = relabel(
        game,
        &[&["v1", "v2"], &["v1", "v2"]],
        &[&["b0", "b1", "b2"], &["b0", "b1", "b2"]],
    );
    let d = game.dims().clone();
    let values = (0..2)
        .map(|i| {
            (0..2)
                .flat_map(|ti| (0..d.n_action_profiles()).map(move |a| (ti, a)))
                .map(|(ti, a)| value(i, ti, &d.action_radix.decode(a)))
                .collect()
        })
        .collect();
    let payments = (0..2)
        .map(|i| {
            (0..d.n_action_profiles())
                .map(|a| payment(i, &d.action_radix.decode(a)))
                .collect()
        })
        .collect();
    QuasilinearGame::new(game, values, payments).expect("auction decomposition")
}

/// Deviation "bid ⌊value/2⌋" with the given (λ, μ).
pub fn first_price_spec(q: &QuasilinearGame, lambda: f64, mu: f64) -> SmoothnessSpec {
    SmoothnessSpec::own_type(
        q.game(),
        lambda,
        mu,
        SmoothnessMode::Mechanism,
        |_, ti, _| (ti + 1) / 2,
    )
}

/// Type-dependent matching pennies: player 1 wants to match at type 0 and mismatch at type 1,
/// player 2 the reverse.
pub fn matching_game() -> BayesianGame {
    let game = BayesianGame::from_oracle(
        &[2, 2],
        &[2, 2],
        uniform_rows(&[2, 2]),
        PayoffScope::OwnType,
        |i, theta, a| {
            let same = a[0] == a[1];
            let wants_same = (theta[i] == 0) == (i == 0);
            if same == wants_same {
                1.0
            } else {
                0.0
            }
        },
    )
    .expect("matching game");
    relabel(
        game,
        &[&["x", "y"], &["x", "y"]],
        &[&["h", "t"], &["h", "t"]],
    )
}

/// File name and pretty JSON of every shipped fixture.
pub fn all_files() -> Result<Vec<(&'static str, String)>> {
    let (g_unrep, pi_unrep) = unrepresentable();
    let (g_comm, pi_comm, sigma_comm) = comm_not_sfce();
    let (g_split, sigma_split) = coarse_split();
    let auction = first_price_auction();
    let mut out: Vec<(&'static str, String)> = vec![
        ("unrepresentable.game.json", json(&g_unrep.to_file())),
        (
            "unrepresentable.dist.json",
            json(&DistributionFile::from(&pi_unrep)),
        ),
        ("comm_not_sfce.game.json", json(&g_comm.to_file())),
        (
            "comm_not_sfce.dist.json",
            json(&DistributionFile::from(&pi_comm)),
        ),
        (
            "comm_not_sfce.sigma.json",
            json(&DistributionFile::from(&sigma_comm)),
        ),
        ("coarse_split.game.json", json(&g_split.to_file())),
        (
            "coarse_split.sigma.json",
            json(&DistributionFile::from(&sigma_split)),
        ),
        ("first_price.game.json", json(&auction.game().to_file())),
        (
            "first_price.spec.json",
            json(&auction.to_file(first_price_spec(&auction, 0.5, 1.0))),
        ),
        ("matching.game.json", json(&matching_game().to_file())),
    ];
    for (_, text) in out.iter_mut() {
        text.push('\n');
    }
    Ok(out)
}

pub fn write_all(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in all_files()? {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("fixtures serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prop_sigma_pushes_forward_to_pi() {
        let (game, pi, sigma) = comm_not_sfce();
        let back = sigma.to_tabular(game.dims()).unwrap();
        assert_eq!(back, pi);
    }

    #[test]
    fn shipped_files_match_code() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        for (name, text) in all_files().unwrap() {
            let shipped = std::fs::read_to_string(dir.join(name)).unwrap_or_default();
            assert_eq!(
                shipped, text,
                "fixtures/{name} is stale; rerun the export_fixtures example"
            );
        }
    }

    #[test]
    fn auction_payoffs_nonnegative() {
        let q = first_price_auction();
        let d = q.game().dims();
        for i in 0..2 {
            for t in 0..d.n_type_profiles() {
                assert!(q.game().payoff_row(i, t).iter().all(|&v| v >= 0.0));
            }
        }
    }
}
