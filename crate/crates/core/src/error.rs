use crate::rat::Rat;
use thiserror::Error;

/// Errors shared by all operations of the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A cylinder is deeper than the measure (or configured limit) allows.
    #[error("depth exceeded: {0}")]
    DepthExceeded(String),
    /// Two operands were expected to live at the same depth.
    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },
    /// The supplied table is not an isometry of the two measured algebras.
    #[error("not an isometry: {0}")]
    NotAnIsometry(String),
    /// The unit element belongs to the ideal.
    #[error("improper ideal: unit is a member")]
    ImproperIdeal,
    /// A range value of the source measure has no match in the target.
    #[error("range mismatch on value {0}")]
    RangeMismatch(Rat),
    /// Operation requires a strictly positive measure.
    #[error("measure is not strictly positive")]
    NotStrictlyPositive,
    /// A requested quantity lies outside its admissible open interval.
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// No exact block representation exists for the request.
    #[error("not representable: {0}")]
    NotRepresentable(String),
    /// The staged construction exceeded its configured block budget.
    #[error("stage budget exceeded: {0} blocks")]
    StageBudgetExceeded(usize),
    /// An enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {need} > {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
    /// An input object violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
