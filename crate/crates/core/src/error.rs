use thiserror::Error;

/// Errors raised across the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Cartan type {kind}{rank}: {reason}")]
    InvalidCartanType {
        kind: char,
        rank: usize,
        reason: String,
    },

    #[error("Weyl group order {order} exceeds the enumeration cap {cap}")]
    WeylCapExceeded { order: u128, cap: u128 },

    #[error("alcove folding did not terminate after {0} reflections")]
    FoldingCap(usize),

    #[error("multiplicity must be strictly positive (got long={long}, short={short})")]
    NonPositiveMultiplicity { long: f64, short: f64 },

    #[error("multiplicity values must be finite and nonnegative (got long={long}, short={short})")]
    InvalidMultiplicity { long: f64, short: f64 },

    #[error("weight has {got} coefficients, expected {expected}")]
    WeightDimension { expected: usize, got: usize },

    #[error("vector has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },

    #[error("covector is not an integral weight: pairing {pairing} with simple coroot {index}")]
    NotIntegral { index: usize, pairing: f64 },

    #[error("spectral parameter is singular (min |λ(α^∨)| = {margin:e})")]
    Singular { margin: f64 },

    #[error("spectral parameter is not purely imaginary (max |Re| = {0:e})")]
    NotImaginary(f64),

    #[error("λ/(2πi) is not in the weight lattice")]
    NotInWeightLattice,

    #[error("Newton iteration did not converge in {iterations} steps (gradient norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("point is within {distance:e} of a root hyperplane")]
    NearWall { distance: f64 },

    #[error("wall sample is not sub-regular (distance {distance:e} to another hyperplane)")]
    NotSubRegular { distance: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
