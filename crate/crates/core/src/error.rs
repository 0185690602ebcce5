use thiserror::Error;

/// Everything that can go wrong while building operators, measurements,
/// distributions or certificates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("operator is not Hermitian: ||A - A^dagger||_F = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("operator {index} is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPsd { index: usize, min_eigenvalue: f64 },

    #[error("trace is {trace}, expected {expected}")]
    InvalidTrace { trace: f64, expected: f64 },

    #[error("operator is not a projector: ||P^2 - P||_F = {deviation:e}")]
    NotProjector { deviation: f64 },

    #[error("basis is not orthonormal: ||G - 1||_F = {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("POVM elements do not sum to the identity: ||sum - 1||_F = {deviation:e}")]
    IncompleteSum { deviation: f64 },

    #[error("POVM element {index} is zero (||E||_F = {norm:e})")]
    ZeroElement { index: usize, norm: f64 },

    #[error("measurement has no elements")]
    EmptyMeasurement,

    #[error("Kraus operators of outcome {outcome} do not reproduce its POVM element: deviation {deviation:e}")]
    KrausMismatch { outcome: usize, deviation: f64 },

    #[error("measurement carries no Kraus operators")]
    MissingKraus,

    #[error("outcome {outcome} has probability {probability:e}, cannot update the state")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("outcome {outcome} has negative probability {probability:e}")]
    NegativeProbability { outcome: usize, probability: f64 },

    #[error("outcome index {index} out of range for {len} outcomes")]
    OutcomeOutOfRange { index: usize, len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("volume at index {index} must be positive, got {value}")]
    NonPositiveVolume { index: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not left stochastic: column {column} {reason}")]
    NotStochastic { column: usize, reason: String },

    #[error("simplex iteration limit reached after {iterations} iterations")]
    IterationLimit { iterations: usize },

    #[error("outcome set {which} is empty in the given subspace")]
    EmptyOutcomeSet { which: &'static str },

    #[error("element {index} of the coarse measurement is not a projector (deviation {deviation:e})")]
    NotProjective { index: usize, deviation: f64 },

    #[error("index error: {0}")]
    IndexError(String),

    #[error("restricted column {column} sums to {sum}, expected 1")]
    BrokenColumnSum { column: usize, sum: f64 },

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("random POVM draw produced a singular sum after {attempts} attempts")]
    SingularSum { attempts: usize },

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
