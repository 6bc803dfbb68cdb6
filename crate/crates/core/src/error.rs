use thiserror::Error;

use crate::fock::ModeIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode sets overlap on {0}")]
    OverlappingModes(ModeIndex),
    #[error("mode {0} listed more than once")]
    DuplicateMode(ModeIndex),
    #[error("empty mode set")]
    EmptyModeSet,
    #[error("mode {0} is not part of the operator's mode set")]
    UnknownMode(ModeIndex),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operators act on different mode sets")]
    ModeSetMismatch,
    #[error("occupation vector {0:?} lies outside the truncated Fock space")]
    OutsideTruncation(Vec<u8>),
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("operator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("operator is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("density operator is not normalized (trace {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("non-finite parameter {0}")]
    NonFinite(f64),
    #[error("detector efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),
    #[error("click pattern does not match the declared detector arms")]
    PatternMismatch,
    #[error("unconditionable outcome: probability {0:e}")]
    Unconditionable(f64),
    #[error("outcome never occurs: probability {0:e}")]
    OutcomeNeverOccurs(f64),
    #[error("no coincidences")]
    NoCoincidences,
    #[error("invalid branch weights ({good}, {bad})")]
    InvalidWeights { good: f64, bad: f64 },
    #[error("invalid probability distribution {0:?}")]
    InvalidDistribution([f64; 2]),
    #[error("invalid zeta range [{min}, {max}] with {steps} steps")]
    InvalidRange { min: f64, max: f64, steps: usize },
    #[error("table was built in the wrong operating mode")]
    WrongMode,
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("no shots produced the conditioning pattern")]
    ZeroConditioningCounts,
    #[error("sample does not include signal-arm detectors")]
    MissingCoincidenceData,
    #[error("invalid circuit element: {0}")]
    InvalidElement(String),
}
