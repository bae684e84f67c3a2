//! Audits one distribution against every equilibrium class that accepts it.

use commeq::fixtures;
use commeq::verifier::{
    anf_bs_epsilon, coarse_epsilon, comm_eq_epsilon, sfce_epsilon, CoarseInput, EqClass,
};

fn main() -> commeq::Result<()> {
    let (game, pi, sigma) = fixtures::comm_not_sfce();
    let cap = commeq::DEFAULT_CAP;
    let certs = [
        comm_eq_epsilon(&game, &pi)?,
        anf_bs_epsilon(&game, &pi, cap)?,
        coarse_epsilon(&game, CoarseInput::Tabular(&pi), EqClass::CoarseBs)?,
        sfce_epsilon(&game, &sigma)?,
        coarse_epsilon(&game, CoarseInput::Strategy(&sigma), EqClass::Sfcce)?,
        coarse_epsilon(&game, CoarseInput::Strategy(&sigma), EqClass::Anfcce)?,
    ];
    for c in &certs {
        println!(
            "{:<10} ε = {:.4}",
            serde_json::to_value(c.class)?.as_str().unwrap_or("?"),
            c.epsilon
        );
    }
    println!("{}", serde_json::to_string_pretty(&certs[3])?);
    Ok(())
}
