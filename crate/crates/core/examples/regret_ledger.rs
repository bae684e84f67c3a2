//! Exact regret accounting for a hand-written sequence of plays.

use commeq::regret::RegretLedger;
use commeq::TypeWisePolicy;

fn main() -> commeq::Result<()> {
    let mut ledger = RegretLedger::new(&[0.5, 0.5], 2);
    let plays = [
        ([0, 0], [1.0, 0.0, 0.0, 1.0]),
        ([0, 1], [0.0, 1.0, 1.0, 0.0]),
        ([1, 1], [0.0, 1.0, 0.0, 1.0]),
    ];
    for (acts, u) in plays {
        ledger.accumulate(&TypeWisePolicy::pure(2, &acts), &u);
    }
    println!("achieved {:.2}", ledger.achieved());
    println!("external {:.2}", ledger.external_regret()?);
    println!("type-wise {:.2}", ledger.typewise_regret()?);
    println!(
        "untruthful {:.2} via {:?}",
        ledger.untruthful_regret()?,
        ledger.untruthful_witness()
    );
    Ok(())
}
