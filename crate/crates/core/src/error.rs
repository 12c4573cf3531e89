use thiserror::Error;

/// Errors produced by grid construction, state handling, correlation and
/// scattering computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid specification yields no modes")]
    EmptyGrid,
    #[error("mode {index} has a zero-norm wave vector")]
    ZeroWaveVector { index: usize },
    #[error("wave vector must have nonzero norm")]
    ZeroVector,
    #[error("modes {first} and {second} coincide")]
    DuplicateMode { first: usize, second: usize },
    #[error("mode {index} has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("detected mode index {index} out of range for a {modes}-mode grid")]
    DetectedOutOfRange { index: usize, modes: usize },
    #[error("mode index {index} out of range for a {modes}-mode grid")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("reference basis is not orthonormal (defect {defect:e})")]
    NonOrthonormalBasis { defect: f64 },
    #[error("polarization vector is zero")]
    ZeroPolarization,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("objects live on different mode grids")]
    GridMismatch,
    #[error("expected {expected} entries, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mixture weights must be non-negative with positive sum")]
    InvalidMixtureWeights,
    #[error("Stokes field violates conjugate symmetry (defect {defect:e})")]
    ConjugateSymmetry { defect: f64 },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },
    #[error("axis must be 1, 2 or 3, got {0}")]
    BadAxis(usize),
    #[error("no detected modes")]
    EmptyDetection,
    #[error("degenerate beam: no flux along e(3) (Tr J(3) = {trace:e})")]
    DegenerateBeam { trace: f64 },
    #[error("correlation matrix has zero trace ({trace:e})")]
    ZeroTrace { trace: f64 },
    #[error("scattering ensemble has no realizations")]
    EmptyEnsemble,
    #[error("invalid ensemble probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Mueller entry ({0}, {1}; {2}, {3}) was not computed")]
    MissingMuellerEntry(usize, usize, usize, usize),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
