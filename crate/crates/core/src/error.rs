use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("registry mismatch: {0}")]
    RegistryMismatch(String),

    #[error("registry too large: {0} modes (max 63)")]
    RegistryTooLarge(usize),

    #[error("duplicate mode label {0}")]
    DuplicateMode(String),

    #[error("mode {0} not present in registry")]
    UnknownMode(String),

    #[error("overlapping registries in join")]
    OverlappingRegistries,

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state is not normalized (norm {0:.12})")]
    NotNormalized(f64),

    #[error("sector violation on wire {wire}")]
    SectorViolation { wire: usize },

    #[error("impossible outcome {index} (probability {probability:.3e})")]
    ImpossibleOutcome { index: usize, probability: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("projection violates fixed parity at pattern {0:#b}")]
    ParityViolation(u64),

    #[error("mixed-parity operator where a fixed parity is required")]
    MixedParity,

    #[error("virtual mode {0} is not covered by a bond or the boundary")]
    UncoveredMode(String),

    #[error("null projection: contraction vanished")]
    NullProjection,

    #[error("too many modes for dense path: {0}")]
    TooManyModes(usize),

    #[error("singular gate restriction")]
    Singular,

    #[error("by-product is not a local Pauli (residual {0:.3e})")]
    NonPauliByproduct(f64),

    #[error("circuit error at {path}: {message}")]
    Circuit { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
