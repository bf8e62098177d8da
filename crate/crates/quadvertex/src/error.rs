//! Shared error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QvError {
    /// A numerator was expected to vanish at `t_axis = 1` but did not.
    /// Always indicates a formula-assembly bug, never bad user data.
    #[error("polynomial is not divisible by (1 - t{axis})")]
    NotDivisible { axis: usize },

    #[error("pole cancellation failed while assembling a {context} class")]
    PoleCancellation { context: &'static str },

    #[error("deformation part contains a fixed term with positive coefficient")]
    FixedTermInDeformation,

    #[error("zero weight in bracket denominator")]
    ZeroWeightDenominator,

    #[error("bracket factor with half-integer exponents cannot be evaluated")]
    HalfIntegerBracket,

    #[error("enumeration exceeded the node cap of {cap}")]
    BudgetExceeded { cap: usize },

    #[error("sign search exceeded the cap of 2^{cap_log2} vectors")]
    SearchCapExceeded { cap_log2: u32 },

    #[error("evaluation point is singular for this expression")]
    SingularPoint,

    #[error("ran out of evaluation points after {retries} singular retries")]
    RetriesExhausted { retries: usize },

    #[error("box configuration references a leg absent from the support curve")]
    IncompatibleLegs,

    #[error("plethystic exponential requires a vanishing constant term")]
    NonzeroConstantTerm,

    #[error("edge cross-sections disagree between charts: {detail}")]
    GluingViolation { detail: String },

    #[error("limit does not exist: m-degree {got} exceeds the q-power {expected}")]
    DivergentLimit { got: i64, expected: i64 },

    #[error("zero linear form in a denominator")]
    ZeroLinearForm,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
