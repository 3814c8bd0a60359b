use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("map is unphysical (minimum normalized eigenvalue {0:e})")]
    Unphysical(f64),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace must be 1 (got {0})")]
    InvalidTrace(f64),

    #[error("zero-intensity beam")]
    ZeroIntensity,

    #[error("map absorbs the input completely (output trace {0:e})")]
    TotalAbsorption(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("non-separable combination has no terms")]
    EmptyCombo,

    #[error("Mueller matrix must have M00 = 1 (got {0})")]
    NotNormalized(f64),

    #[error("Jones matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),

    #[error("spatial mode {0} is not declared")]
    UndeclaredMode(u8),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("{kind} expects a {expected} matrix, got {got}")]
    Shape {
        kind: &'static str,
        expected: &'static str,
        got: String,
    },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("imaginary part {0:e} on a real-valued quantity")]
    ImaginaryResidue(f64),

    #[error("malformed document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
