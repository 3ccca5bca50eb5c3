use thiserror::Error;

/// Errors raised by the arithmetic and the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("the valuation of zero is undefined")]
    ZeroValuation,
    #[error("constant coefficient is not a unit")]
    NotAUnit,
    #[error("leading coefficient lies in the maximal ideal (no good reduction)")]
    BadReduction,
    #[error("not a Drinfeld module: {0}")]
    NotADrinfeldModule(String),
    #[error("coefficient is not integral: {0}")]
    NonIntegral(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("the zero class has no j-invariant")]
    ZeroClass,
    #[error("rank inconsistent: {0}")]
    RankInconsistent(String),
    #[error("residual too large: {0}")]
    ResidualTooLarge(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("postcondition failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
