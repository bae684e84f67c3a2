//! Untruthful-swap-regret dynamics on the small first-price auction, then an exact audit.

use commeq::dynamics::{run_dynamics, DynamicsConfig, LearnerKind};
use commeq::fixtures;
use commeq::verifier::comm_eq_epsilon;

fn main() -> commeq::Result<()> {
    let auction = fixtures::first_price_auction();
    let game = auction.game();
    let mut cfg = DynamicsConfig::new(2, LearnerKind::Untruthful, 5_000);
    cfg.curve_every = 1_000;
    cfg.seed = 7;
    let res = run_dynamics(game, &cfg)?;
    for p in &res.curve {
        println!(
            "t={:>5} player {} untruthful regret {:>8.3} (bound {:.1})",
            p.t, p.player, p.untruthful, p.bound
        );
    }
    let pi = res.mixture.to_tabular(game.dims(), commeq::DEFAULT_CAP)?;
    let cert = comm_eq_epsilon(game, &pi)?;
    println!(
        "ledger certificate {:.3e}, verifier ε {:.3e}",
        res.certificate, cert.epsilon
    );
    Ok(())
}
