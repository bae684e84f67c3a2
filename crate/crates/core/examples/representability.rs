//! Strategy representability: a Farkas certificate for a correlated table and a
//! reconstruction for the push-forward of a strategy distribution.

use commeq::fixtures;
use commeq::verifier::{conditional_independence, strategy_representable, Representability};

fn main() -> commeq::Result<()> {
    let (game, pi) = fixtures::unrepresentable();
    println!(
        "conditional independence: {:?}",
        conditional_independence(&game, &pi)
    );
    match strategy_representable(game.dims(), &pi, commeq::DEFAULT_CAP)? {
        Representability::Infeasible { farkas, violation } => {
            println!("not representable, yᵀb = {violation}, y = {farkas:?}")
        }
        Representability::Feasible { .. } => println!("representable"),
    }

    let (game, pi, _) = fixtures::comm_not_sfce();
    if let Representability::Feasible { witness } =
        strategy_representable(game.dims(), &pi, commeq::DEFAULT_CAP)?
    {
        for (s, p) in witness.support() {
            println!("σ({:?}) = {p:.4}", witness.space().decode(s));
        }
    }
    Ok(())
}
