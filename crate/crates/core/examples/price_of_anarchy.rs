//! Smoothness of a small first-price auction and the welfare of learned play.

use commeq::dynamics::{run_dynamics, DynamicsConfig, LearnerKind};
use commeq::fixtures;
use commeq::poa::{check_smoothness, max_lambda_sweep, poa_report, Setting};

fn main() -> commeq::Result<()> {
    let auction = fixtures::first_price_auction();
    let setting = Setting::Mechanism(&auction);
    for (lambda, mu) in [(0.5, 1.0), (0.9, 1.0)] {
        let out = check_smoothness(setting, &fixtures::first_price_spec(&auction, lambda, mu))?;
        println!(
            "({lambda}, {mu}): passed {} min slack {:.4}",
            out.passed, out.min_slack
        );
    }
    let spec = fixtures::first_price_spec(&auction, 0.5, 1.0);
    for (mu, lambda) in max_lambda_sweep(setting, &spec.a_star, &[0.5, 1.0, 1.5, 2.0])? {
        println!("μ = {mu}: largest λ {lambda:.4}");
    }
    let mut cfg = DynamicsConfig::new(2, LearnerKind::Untruthful, 20_000);
    cfg.curve_every = 0;
    let res = run_dynamics(auction.game(), &cfg)?;
    let pi = res
        .mixture
        .to_tabular(auction.game().dims(), commeq::DEFAULT_CAP)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&poa_report(setting, &pi, &spec, 0.05)?)?
    );
    Ok(())
}
