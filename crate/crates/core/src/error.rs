use thiserror::Error;

/// Errors raised anywhere in the geometry engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {coords:?} lies outside the chart domain (margin {margin})")]
    OutOfChart { coords: Vec<f64>, margin: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::smooth_fields::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("jet derivative order exhausted: a derivative of order {needed} was requested from a jet of order {available}")]
    OrderExhausted { needed: u8, available: u8 },

    #[error("division by a jet whose value {value:e} is below 1e-12 in magnitude")]
    NearZeroDivisor { value: f64 },

    #[error("{op} is undefined at {value:e}")]
    NonPositiveArgument { op: &'static str, value: f64 },

    #[error("degenerate metric: smallest eigenvalue {min_eigenvalue:e}")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("frame construction failed: {0}")]
    Frame(String),

    #[error("form degree overflow: degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("codifferential of a 0-form is undefined")]
    ZeroDegree,

    #[error("form is not basic (defect {defect:e})")]
    NotBasic { defect: f64 },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expression parse error: {0}")]
    Parse(String),

    #[error("model `{model}` fails its own property table: {detail}")]
    ModelValidation { model: String, detail: String },

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("{skipped} of {total} points were skipped")]
    TooManySkips { skipped: usize, total: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
