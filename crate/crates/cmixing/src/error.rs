use thiserror::Error;

/// Errors produced by simulators, bound evaluators and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("row {row} of the transition matrix sums to {sum}, expected 1")]
    NonStochasticRow { row: usize, sum: f64 },

    #[error("transition matrix entry ({row},{col}) is negative")]
    NegativeEntry { row: usize, col: usize },

    #[error("chain is reducible: state {0} is not reachable from state 0 (or vice versa)")]
    ReducibleChain(usize),

    #[error("chain is periodic with period {0}")]
    PeriodicChain(usize),

    #[error("grid violates log(N-hat) <= min n_k: log({n_hat}) = {log:.4} > {min_nk}")]
    GridAssumption { n_hat: u64, log: f64, min_nk: usize },

    #[error("response envelope sup|m| + sqrt(3) sup|sigma| = {envelope:.6} exceeds the y bound {bound}")]
    EnvelopeViolation { envelope: f64, bound: f64 },

    #[error("estimator undefined at every grid point")]
    AllUndefined,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("statistic `{statistic}` has no mean calibration for process `{process}`")]
    UncalibratedStatistic { statistic: String, process: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
