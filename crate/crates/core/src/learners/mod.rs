//! Online learners over one player's type-wise policies.

mod mwu;
mod strategy;
mod swap;
mod untruthful;

pub use mwu::{fixed_rate, DoublingMwuState, MwuState};
pub use strategy::{StrategySwapLearner, STRATEGY_LEARNER_CAP};
pub use swap::{SwapLearner, TypewiseLearner};
pub use untruthful::UntruthfulLearner;

use crate::error::{Error, Result};

/// Rejects reward vectors with entries outside [0,1] beyond the derived tolerance.
pub(crate) fn check_unit_rewards(u: &[f64], len: usize) -> Result<()> {
    if u.len() != len {
        return Err(Error::BadDims(format!(
            "reward vector of length {} expected {len}",
            u.len()
        )));
    }
    for (index, &value) in u.iter().enumerate() {
        if !(-crate::DERIVED_TOL..=1.0 + crate::DERIVED_TOL).contains(&value) {
            return Err(Error::RewardOutOfRange {
                index,
                value,
                range: 1.0,
            });
        }
    }
    Ok(())
}
