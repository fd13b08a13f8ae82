use thiserror::Error;

/// Errors raised by the computational routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no finite points")]
    NoFinitePoints,
    #[error("indices not strictly increasing")]
    IndicesNotIncreasing,
    #[error("no square root")]
    NoSquareRoot,
    #[error("modulus must be an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("S_l not invertible")]
    SNotInvertible,
    #[error("not in Σ⁺")]
    NotInMonoid,
    #[error("p ramified")]
    PRamified,
    #[error("outside catalog: {0}")]
    OutsideCatalog(String),
    #[error("coset reduction failed: expected {expected} classes, found {found}")]
    CosetReductionFailed { expected: usize, found: usize },
    #[error("insufficient precision for coefficient {index}; try N >= {suggested_n}, M >= {suggested_m}")]
    InsufficientPrecision {
        index: usize,
        suggested_n: usize,
        suggested_m: u32,
    },
    #[error("h on a slope boundary")]
    SlopeBoundary,
    #[error("slope factorization did not converge")]
    FactorNotConverging,
    #[error("undecidable without extension data")]
    UndecidableTheta,
    #[error("inconsistent pairing data")]
    InconsistentPairing,
    #[error("switch impossible")]
    SwitchImpossible,
    #[error("invalid packet: {0}")]
    InvalidPacket(String),
    #[error("depth overflow")]
    DepthOverflow,
    #[error("no finite ramification")]
    NoFiniteRamification,
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("refinement absent")]
    RefinementAbsent,
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("precision underflow; try N >= {suggested_n}, M >= {suggested_m}")]
    PrecisionUnderflow { suggested_n: usize, suggested_m: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
