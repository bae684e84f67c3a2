use commeq::dynamics::{
    exact_reward, regret_bound, run_dynamics, sample_count, sampled_reward, DynamicsConfig,
    LearnerKind, RewardMode,
};
use commeq::fixtures;
use commeq::learners::{StrategySwapLearner, TypewiseLearner, UntruthfulLearner};
use commeq::regret::RegretLedger;
use commeq::verifier::comm_eq_epsilon;
use commeq::{BayesianGame, Error, TypeWisePolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_policy(rng: &mut ChaCha8Rng, nt: usize, na: usize) -> TypeWisePolicy {
    let mut p = Vec::with_capacity(nt * na);
    for _ in 0..nt {
        let row: Vec<f64> = (0..na).map(|_| rng.gen::<f64>() + 0.01).collect();
        let s: f64 = row.iter().sum();
        p.extend(row.iter().map(|x| x / s));
    }
    TypeWisePolicy::from_derived(nt, na, p).unwrap()
}

/// u_i(θ_i, a_i) summed over full profiles with the joint prior, then divided by ρ_i(θ_i).
fn brute_reward(game: &BayesianGame, i: usize, profile: &[TypeWisePolicy]) -> Vec<f64> {
    let d = game.dims();
    let (nt, na) = (d.types[i], d.actions[i]);
    let mut num = vec![0.0; nt * na];
    let mut mass = vec![0.0; nt];
    for t in 0..d.n_type_profiles() {
        let theta = d.type_radix.decode(t);
        let rho = game.prior().joint(t);
        mass[theta[i]] += rho;
        for a in 0..d.n_action_profiles() {
            let acts = d.action_radix.decode(a);
            let others: f64 = (0..game.n_players())
                .filter(|&j| j != i)
                .map(|j| profile[j].get(theta[j], acts[j]))
                .product();
            num[theta[i] * na + acts[i]] += rho * others * game.payoff(i, t, a);
        }
    }
    (0..nt * na)
        .map(|k| {
            if mass[k / na] > 0.0 {
                num[k] / mass[k / na]
            } else {
                0.0
            }
        })
        .collect()
}

#[test]
fn exact_reward_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (g, _, _) = fixtures::comm_not_sfce();
    let (t2, _) = fixtures::coarse_split();
    for game in [g, t2, fixtures::first_price_auction().game().clone()] {
        let d = game.dims().clone();
        for _ in 0..5 {
            let profile: Vec<_> = (0..game.n_players())
                .map(|j| random_policy(&mut rng, d.types[j], d.actions[j]))
                .collect();
            for i in 0..game.n_players() {
                let got = exact_reward(&game, i, &profile, 1 << 20).unwrap();
                let want = brute_reward(&game, i, &profile);
                for (x, y) in got.iter().zip(&want) {
                    assert!((x - y).abs() < 1e-12, "{got:?} vs {want:?}");
                }
            }
        }
    }
}

#[test]
fn sampled_reward_is_within_eps() {
    let game = fixtures::first_price_auction().game().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let profile = vec![random_policy(&mut rng, 2, 3), random_policy(&mut rng, 2, 3)];
    let n = sample_count(2, 100, 6, 0.05, 0.01);
    let exact = exact_reward(&game, 0, &profile, 1 << 20).unwrap();
    let est = sampled_reward(&game, 0, &profile, n, &mut rng).unwrap();
    for (x, y) in exact.iter().zip(&est) {
        assert!((x - y).abs() <= 0.05, "{x} vs {y} with {n} samples");
    }
}

#[test]
fn certificate_equals_verifier() {
    let auction = fixtures::first_price_auction();
    let game = auction.game();
    for learners in [
        vec![LearnerKind::Untruthful, LearnerKind::Untruthful],
        vec![LearnerKind::Typewise, LearnerKind::Untruthful],
    ] {
        let mut cfg = DynamicsConfig::new(2, LearnerKind::Untruthful, 1500);
        cfg.learners = learners;
        cfg.curve_every = 500;
        let res = run_dynamics(game, &cfg).unwrap();
        let pi = res.mixture.to_tabular(game.dims(), 1 << 20).unwrap();
        let cert = comm_eq_epsilon(game, &pi).unwrap();
        assert!((cert.epsilon - res.certificate).abs() <= 1e-9);
        assert_eq!(res.curve.len(), 3 * 2);
        let last = &res.curve[res.curve.len() - 1];
        assert!(last.external <= last.typewise + 1e-9 && last.typewise <= last.untruthful + 1e-9);
    }
}

#[test]
fn thinning_keeps_total_weight() {
    let game = fixtures::first_price_auction().game().clone();
    let mut cfg = DynamicsConfig::new(2, LearnerKind::Untruthful, 103);
    cfg.thin = 10;
    cfg.curve_every = 0;
    let res = run_dynamics(&game, &cfg).unwrap();
    assert_eq!(res.mixture.components.len(), 11);
    let w: f64 = res.mixture.components.iter().map(|c| c.weight).sum();
    assert!((w - 1.0).abs() < 1e-12);
    assert!(res.curve.is_empty());
}

#[test]
fn strategy_swap_learner_has_its_ledger() {
    let (game, _) = fixtures::coarse_split();
    let mut cfg = DynamicsConfig::new(2, LearnerKind::StrategySwap, 400);
    cfg.curve_every = 0;
    let res = run_dynamics(&game, &cfg).unwrap();
    for sl in &res.strategy_ledgers {
        let sl = sl.as_ref().unwrap();
        assert_eq!(sl.rounds(), 400);
        assert!(sl.strategy_regret().unwrap() >= -1e-9);
    }
}

#[test]
fn bad_configs_are_rejected() {
    let game = fixtures::matching_game();
    let mut cfg = DynamicsConfig::new(2, LearnerKind::Untruthful, 0);
    assert!(matches!(
        run_dynamics(&game, &cfg),
        Err(Error::InvalidInput(_))
    ));
    cfg.horizon = 10;
    cfg.thin = 0;
    assert!(matches!(
        run_dynamics(&game, &cfg),
        Err(Error::InvalidInput(_))
    ));
    cfg.thin = 1;
    cfg.reward = RewardMode::Sampled {
        eps: 0.1,
        delta: 1.5,
    };
    assert!(matches!(
        run_dynamics(&game, &cfg),
        Err(Error::InvalidInput(_))
    ));
    cfg.reward = RewardMode::Exact;
    cfg.learners.pop();
    assert!(matches!(
        run_dynamics(&game, &cfg),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn emitted_policy_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rho = [0.2, 0.3, 0.5];
    let mut l = UntruthfulLearner::new(&rho, 3, 200);
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..200 {
        let x = l.step(prev.as_deref()).unwrap();
        let (q, last) = l.last().unwrap();
        assert_eq!(last, &x);
        let qx = q.apply(x.as_slice());
        let res = qx
            .iter()
            .zip(x.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(res <= 1e-9, "residual {res}");
        prev = Some((0..9).map(|_| rng.gen()).collect());
    }
}

#[test]
fn learners_stay_under_bound_on_alternating_stream() {
    let rho = [0.5, 0.5];
    let horizon = 4000;
    let mut ut = UntruthfulLearner::new(&rho, 2, horizon);
    let mut tw = TypewiseLearner::new(&rho, 2);
    let (mut lu, mut lt) = (RegretLedger::new(&rho, 2), RegretLedger::new(&rho, 2));
    let mut prev: Option<Vec<f64>> = None;
    for t in 0..horizon {
        let u = if (t / 50) % 2 == 0 {
            vec![1.0, 0.0, 0.0, 1.0]
        } else {
            vec![0.0, 1.0, 1.0, 0.0]
        };
        lu.accumulate(&ut.step(prev.as_deref()).unwrap(), &u);
        lt.accumulate(&tw.step(prev.as_deref()).unwrap(), &u);
        prev = Some(u);
    }
    let bound = regret_bound(horizon, 2, 2);
    assert!(lu.untruthful_regret().unwrap() <= bound);
    assert!(lt.typewise_regret().unwrap() <= bound);
}

#[test]
fn strategy_learner_caps_its_space() {
    assert!(StrategySwapLearner::new(12, 2, 1024).is_err());
    let l = StrategySwapLearner::new(3, 2, 1024).unwrap();
    assert_eq!(l.space().size(), 8);
}
