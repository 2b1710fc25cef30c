//! Error type shared by every module.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid points must be strictly increasing (violated at index {index})")]
    NonMonotonePoints { index: usize },
    #[error("a time scale needs at least two points, got {len}")]
    TooFewPoints { len: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("monomial order {k} exceeds table order {max}")]
    OrderTooHigh { k: usize, max: usize },
    #[error("derivative order is inadmissible along dimension {dim}")]
    InadmissibleLambda { dim: usize },
    #[error("axis {dim} has too few points for the requested operation")]
    AxisTooShort { dim: usize },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("argument {value} lies outside the radius {radius}")]
    OutsideRadius { value: f64, radius: f64 },
    #[error("energy {value} exceeds the radius {radius}")]
    RadiusExceeded { value: f64, radius: f64 },
    #[error("weight must be strictly positive ({0})")]
    NonpositiveWeight(String),
    #[error("constant {0} is not finite")]
    DivergentConstant(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid lower-order multi-index: {0}")]
    InvalidXi(String),
    #[error("zero denominator at lattice point {0:?}")]
    ZeroDenominator(Vec<usize>),
    #[error("operation requires r identically one")]
    RequiresUnitR,
    #[error("operation requires both axes to be uniform samplings of an interval")]
    RequiresContinuousAxes,
    #[error("invalid delay map: {0}")]
    InvalidDelayMap(String),
    #[error("growth bound blows up at lattice point {0:?}")]
    BlowUp(Vec<usize>),
    #[error("coefficient w2 must stay below one (violated at {0:?})")]
    W2NotBelowOne(Vec<usize>),
    #[error("split point {0:?} does not partition the domain")]
    InadmissibleSplit(Vec<usize>),
    #[error("fractional power of negative base {0}")]
    NegativeBase(f64),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl Error {
    /// True for failures that come from the numbers rather than from the configuration.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DivergentConstant(_)
                | Error::BlowUp(_)
                | Error::NegativeBase(_)
                | Error::NonFinite(_)
                | Error::ZeroDenominator(_)
        )
    }
}
