use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported number of atoms {0}: expected 1..=4")]
    UnsupportedAtoms(usize),

    #[error("site index {index} out of range for {n_atoms} atoms")]
    SiteOutOfRange { n_atoms: usize, index: usize },

    #[error("unsupported spin 2j = {0}: expected 0..=4")]
    UnsupportedSpin(u32),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("off-resonance parameters (delta = {delta}, omega = {omega}); the factorized propagator requires delta == omega")]
    OffResonance { delta: f64, omega: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coherent-state tail {tail:e} beyond nmax = {nmax} exceeds 1e-10")]
    TruncationTail { nmax: usize, tail: f64 },

    #[error("atomic bitstring {spec:?} does not describe {n_atoms} atoms")]
    BadBitstring { spec: String, n_atoms: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigendecomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
