use thiserror::Error;

/// Coarse classification used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Precondition,
    Budget,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix has an odd diagonal entry at index {0}")]
    NotEven(usize),
    #[error("gram matrix is singular")]
    Singular,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("coset value mismatch: {0}")]
    CosetMismatch(String),
    #[error("bounded search inconclusive: {0}")]
    InconclusiveBoundedSearch(String),
    #[error("negative valuation: {0}")]
    NegativeValuation(String),
    #[error("iteration budget exceeded: {needed} > cap {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },
    #[error("precision {got} too low, need at least {need}")]
    PrecisionTooLow { got: u32, need: u32 },
    #[error("character-sum evaluation did not produce a non-negative integer: {0}")]
    NonIntegralResult(String),
    #[error("character is not primitive: {0}")]
    NonPrimitive(String),
    #[error("character parity does not match the exponent: {0}")]
    ParityMismatch(String),
    #[error("interval admits several rationals below the denominator bound")]
    AmbiguousInterval,
    #[error("incompatible discriminant forms")]
    IncompatibleDiscriminantForms,
    #[error("weight {0} is below 2")]
    KappaTooSmall(String),
    #[error("coefficient did not collapse to a rational: {0}")]
    NonRationalResidue(String),
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),
    #[error("positivity violation: {0}")]
    PositivityViolation(String),
    #[error("fixture truncation insufficient: need {need}, have {have}")]
    TruncationInsufficient { need: String, have: String },
    #[error("hypothesis not verified: {0}")]
    HypothesisNotVerified(String),
    #[error("candidate budget exhausted after {tried} candidates")]
    BudgetExhausted { tried: usize, report: Vec<String> },
    #[error("fixture is not a basis: {0}")]
    FixtureNotABasis(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            BudgetExceeded { .. } | BudgetExhausted { .. } | InconclusiveBoundedSearch(_) => {
                ErrorKind::Budget
            }
            NonIntegralResult(_) | NonRationalResidue(_) | PositivityViolation(_) | Internal(_)
            | Overflow(_) => ErrorKind::Internal,
            Parse(_) => ErrorKind::Io,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
