use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("type {ty} of player {player} has zero prior mass")]
    ZeroMassType { player: usize, ty: usize },
    #[error("set of size {size} exceeds cap {cap}")]
    SupportTooLarge { size: u128, cap: usize },
    #[error("enumeration of {size} profiles exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: usize },
    #[error("not a probability vector: {0}")]
    NotStochastic(String),
    #[error("fixed point did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("matrix does not map X into X: {0}")]
    NotValidOnX(String),
    #[error("row shift produced an entry outside [0,1]: {0}")]
    NotShiftable(String),
    #[error("reward {value} outside [0, {range}] at index {index}")]
    RewardOutOfRange {
        index: usize,
        value: f64,
        range: f64,
    },
    #[error("regret audit failed: {0}")]
    Audit(String),
    #[error("phase-1 objective {0:e} is inside the ambiguity band")]
    NumericallyAmbiguous(f64),
    #[error("bad dimensions: {0}")]
    BadDims(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("not an equilibrium: epsilon {epsilon} exceeds tolerance {tol}")]
    NotAnEquilibrium { epsilon: f64, tol: f64 },
    #[error("smoothness check failed: {0}")]
    SmoothnessFailed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 1 bad input, 2 cap exceeded, 3 internal invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SupportTooLarge { .. } | Error::EnumerationTooLarge { .. } => 2,
            Error::NoConvergence(_)
            | Error::NotShiftable(_)
            | Error::Audit(_)
            | Error::NumericallyAmbiguous(_) => 3,
            _ => 1,
        }
    }
}
