//! Runs every learner against the same adversarial reward stream.

use commeq::adversary::{build_instance, run_experiment, AdversaryLearner};

fn main() -> commeq::Result<()> {
    let inst = build_instance(3, 3_000, 1)?;
    println!(
        "{} types, blocks of {} rounds",
        inst.n_types(),
        inst.block_len()
    );
    for learner in [
        AdversaryLearner::Untruthful,
        AdversaryLearner::Typewise,
        AdversaryLearner::Oracle,
        AdversaryLearner::TypeBlindUniform,
    ] {
        let r = run_experiment(&inst, learner)?;
        println!(
            "{learner:?}: untruthful {:.1} typewise {:.1} external {:.1} (bound {:.1}), floor holds: {}",
            r.untruthful_regret, r.typewise_regret, r.external_regret, r.bound, r.floor_holds
        );
    }
    Ok(())
}
