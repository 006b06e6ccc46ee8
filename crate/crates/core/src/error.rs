use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A loss multiplier of zero puts positive probability on total loss, so
    /// the expected log growth is minus infinity.
    #[error("certain eventual ruin: loss multiplier b = 0 makes the log growth rate -inf")]
    CertainRuin,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("no safe region: {0}")]
    NoSafeRegion(String),

    #[error("extinction: {replicas} replica(s) reached zero wealth")]
    Extinction { replicas: usize },

    #[error(
        "budget exhausted: sign not resolved on [{lo}, {hi}] with the given replicas ({detail})"
    )]
    BudgetExhausted { lo: f64, hi: f64, detail: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
