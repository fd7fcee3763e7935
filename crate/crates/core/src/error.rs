use thiserror::Error;

/// Errors raised by the simulator and the analysis layers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude vector of length {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("non-finite amplitude or matrix entry")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid wire list {wires:?} for a {register}-wire register")]
    InvalidWires { wires: Vec<usize>, register: usize },
    #[error("tensor product of a ket and an operator is not defined")]
    MixedKinds,
    #[error("operator is not unitary within {0:e}")]
    NotUnitary(f64),
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),
    #[error("Kraus set is empty")]
    EmptyKrausSet,
    #[error("Kraus operators do not sum to the identity (residual {0:e})")]
    Incomplete(f64),
    #[error("forbidden pre/post-selection for this scheme: denominator {0:e}")]
    VanishingDenominator(f64),
    #[error("pre- and post-selected states are orthogonal (|overlap| = {0:e})")]
    Orthogonal(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("strength out of range: {0}")]
    InvalidStrength(f64),
    #[error("angle is not finite")]
    InvalidAngle,
    #[error("neither erasure branch survives post-selection")]
    Unpostselectable,
    #[error("degenerate branch: {0}")]
    DegenerateBranch(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
