use commeq::fixtures;
use commeq::game::{BayesianGame, PayoffScope, PriorSpec, TabularDistribution, TypeWisePolicy};
use commeq::verifier::*;
use commeq::{Error, DEFAULT_CAP};

const TOL: f64 = 1e-9;

#[test]
fn comm_not_sfce_has_only_an_sfce_gap() {
    let (game, pi, sigma) = fixtures::comm_not_sfce();
    assert!((truthful_value(&game, 0, &pi) - 0.5).abs() < TOL);
    assert!((truthful_value(&game, 1, &pi) - 1.0).abs() < TOL);

    let comm = comm_eq_epsilon(&game, &pi).unwrap();
    assert!(comm.epsilon.abs() < TOL, "{comm:?}");
    let bs = anf_bs_epsilon(&game, &pi, DEFAULT_CAP).unwrap();
    assert!(bs.epsilon.abs() < TOL);
    assert_eq!(bs.representable, Representable::Yes);

    let sf = sfce_epsilon(&game, &sigma).unwrap();
    // Reading s_2(θ_2) off the other two type recommendations yields 2/3 against ½.
    assert!((sf.per_player[0].gain - 1.0 / 6.0).abs() < TOL, "{sf:?}");
    assert!((sf.epsilon - 1.0 / 6.0).abs() < TOL);
}

#[test]
fn comm_not_sfce_representability_witness_reproduces_marginals() {
    let (game, pi, _) = fixtures::comm_not_sfce();
    match strategy_representable(game.dims(), &pi, DEFAULT_CAP).unwrap() {
        Representability::Feasible { witness } => {
            let back = witness.to_tabular(game.dims()).unwrap();
            let err = back
                .as_slice()
                .iter()
                .zip(pi.as_slice())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(err <= 1e-7);
            for (s, _) in witness.support() {
                let decoded = witness.space().decode(s);
                assert_eq!(decoded[0][0], 0, "player 1 must play 0 at the first type");
            }
        }
        other => panic!("expected feasible, got {other:?}"),
    }
}

#[test]
fn coarse_split_sfcce_but_not_anfcce() {
    let (game, sigma) = fixtures::coarse_split();
    let sf = coarse_epsilon(&game, CoarseInput::Strategy(&sigma), EqClass::Sfcce).unwrap();
    assert!(sf.epsilon.abs() < TOL, "{sf:?}");
    let anf = coarse_epsilon(&game, CoarseInput::Strategy(&sigma), EqClass::Anfcce).unwrap();
    assert!((anf.epsilon - 0.25).abs() < TOL, "{anf:?}");
    assert_eq!(
        anf.per_player[0].witness,
        Witness::TypeAction { ty: 0, action: 1 }
    );
    assert!(anf.epsilon >= sf.epsilon);
}

#[test]
fn coarse_class_input_mismatch_is_rejected() {
    let (game, sigma) = fixtures::coarse_split();
    assert!(coarse_epsilon(&game, CoarseInput::Strategy(&sigma), EqClass::CoarseBs).is_err());
}

#[test]
fn unrepresentable_is_a_bayesian_solution() {
    let (game, pi) = fixtures::unrepresentable();
    let bs = anf_bs_epsilon(&game, &pi, DEFAULT_CAP).unwrap();
    assert_eq!(bs.epsilon, 0.0);
    assert_eq!(bs.representable, Representable::No);
    match strategy_representable(game.dims(), &pi, DEFAULT_CAP).unwrap() {
        Representability::Infeasible { farkas, violation } => {
            assert!(violation >= AMBIGUITY_BAND);
            assert_eq!(farkas.len(), pi.as_slice().len() + 1);
        }
        other => panic!("expected infeasible, got {other:?}"),
    }
    assert_eq!(conditional_independence(&game, &pi), CiOutcome::Holds);
}

#[test]
fn copying_a_correlated_type_breaks_conditional_independence() {
    let prior = PriorSpec::Tabular {
        table: vec![0.4, 0.1, 0.1, 0.4],
    };
    let game = BayesianGame::from_oracle(&[2, 2], &[2, 2], prior, PayoffScope::Full, |_, _, _| 0.5)
        .unwrap();
    let d = game.dims().clone();
    let mut data = vec![0.0; 16];
    for t in 0..4 {
        let theta = d.type_radix.decode(t);
        data[t * 4 + d.action_radix.encode(&[theta[1], 0])] = 1.0;
    }
    let pi = TabularDistribution::new(&d, data).unwrap();
    match conditional_independence(&game, &pi) {
        CiOutcome::Violated { player, .. } => assert_eq!(player, 0),
        CiOutcome::Holds => panic!("copying θ_2 must violate conditional independence"),
    }
}

#[test]
fn dominant_strategy_bne_has_zero_gap() {
    // Action 1 strictly dominates for both players at every type.
    let prior = PriorSpec::Product {
        rows: vec![vec![0.3, 0.7], vec![0.5, 0.5]],
    };
    let game = BayesianGame::from_oracle(
        &[2, 2],
        &[2, 2],
        prior,
        PayoffScope::OwnType,
        |i, theta, a| 0.2 * a[i] as f64 + 0.1 * theta[i] as f64 + 0.3 * a[1 - i] as f64,
    )
    .unwrap();
    let profile = vec![
        TypeWisePolicy::pure(2, &[1, 1]),
        TypeWisePolicy::pure(2, &[1, 1]),
    ];
    let cert = bne_epsilon(&game, &profile).unwrap();
    assert_eq!(cert.epsilon, 0.0);
    let bad = vec![
        TypeWisePolicy::pure(2, &[0, 1]),
        TypeWisePolicy::pure(2, &[1, 1]),
    ];
    let cert = bne_epsilon(&game, &bad).unwrap();
    assert!((cert.epsilon - 0.3 * 0.2).abs() < TOL);
    assert_eq!(
        cert.per_player[0].witness,
        Witness::Strategy {
            strategy: vec![1, 1]
        }
    );

    let pi = commeq::MixtureDistribution::uniform(vec![profile])
        .to_tabular(game.dims(), DEFAULT_CAP)
        .unwrap();
    assert!(anf_bs_epsilon(&game, &pi, DEFAULT_CAP).unwrap().epsilon < TOL);
}

#[test]
fn single_player_tensor_matches_definition() {
    let prior = PriorSpec::Product {
        rows: vec![vec![0.25, 0.75]],
    };
    let game = BayesianGame::from_oracle(&[2], &[3], prior, PayoffScope::OwnType, |_, t, a| {
        ((t[0] + 2 * a[0]) % 5) as f64 / 4.0
    })
    .unwrap();
    let pi = TabularDistribution::new(game.dims(), vec![0.2, 0.3, 0.5, 0.6, 0.4, 0.0]).unwrap();
    let g = deviation_tensor(&game, 0, &pi).unwrap();
    for t in 0..2 {
        for tp in 0..2 {
            for ap in 0..3 {
                for a in 0..3 {
                    let expect = pi.get(tp, ap) * game.payoff(0, t, a);
                    assert!((g.get(t, tp, ap, a) - expect).abs() < 1e-12);
                }
            }
        }
    }
    let v: f64 = (0..2)
        .map(|t| {
            [0.25, 0.75][t]
                * (0..3)
                    .map(|a| pi.get(t, a) * game.payoff(0, t, a))
                    .sum::<f64>()
        })
        .sum();
    assert!((g.truthful - v).abs() < 1e-12);
}

#[test]
fn oversized_strategy_space_reports_na() {
    let game = BayesianGame::from_oracle(
        &[3, 3],
        &[4, 4],
        PriorSpec::Product {
            rows: vec![vec![1.0 / 3.0; 3]; 2],
        },
        PayoffScope::OwnType,
        |_, _, _| 0.5,
    )
    .unwrap();
    let pi = commeq::MixtureDistribution::uniform(vec![vec![TypeWisePolicy::uniform(3, 4); 2]])
        .to_tabular(game.dims(), DEFAULT_CAP)
        .unwrap();
    let cert = anf_bs_epsilon(&game, &pi, 1000).unwrap();
    assert_eq!(cert.representable, Representable::NotApplicable);
    assert!(matches!(
        strategy_representable(game.dims(), &pi, 1000),
        Err(Error::SupportTooLarge { .. })
    ));
}
