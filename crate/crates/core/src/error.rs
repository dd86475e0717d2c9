use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("order {0} is not finite")]
    NonFiniteOrder(f64),
    #[error("order {0} is a non-positive integer")]
    InadmissibleOrder(f64),
    #[error("row {n} is outside the exact-integer range (n <= {max})")]
    ExactRange { n: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("index {index} must be below the horizon {horizon}")]
    IndexBeyondHorizon { index: usize, horizon: usize },
    #[error("horizon must be at least {min}, got {got}")]
    HorizonTooSmall { got: usize, min: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("exponent p = {0} is not in [1, inf]")]
    InvalidExponent(f64),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DualError {
    #[error("subset enumeration over {columns} columns exceeds the budget of {max}")]
    SubsetBudget { columns: usize, max: usize },
    #[error("horizon {got} is too small, need at least {min}")]
    HorizonTooSmall { got: usize, min: usize },
    #[error("horizon {got} exceeds the matrix size {size}")]
    HorizonBeyondMatrix { got: usize, size: usize },
}
