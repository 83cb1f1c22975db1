use thiserror::Error;

/// Errors raised by every module of the workbench.
///
/// Variant names double as the machine-readable error name reported by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed matrix: {0}")]
    InvalidMatrix(String),
    #[error("inner series must have positive valuation")]
    InnerNotPositiveValuation,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("polynomial is not bi-homogeneous")]
    NotBiHomogeneous,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("expression mixes affine (z) and bi-homogeneous (X0', X1', X0) variables")]
    MixedVariables,
    #[error("coefficient recursion matrix is singular at step {step}")]
    SingularRecursion { step: usize },
    #[error("seed is not a fixed point of equation {index}")]
    SeedNotFixedPoint { index: usize },
    #[error("A0 vanishes at the initial point")]
    DegenerateA0,
    #[error("characteristic obstruction: division by {modulus} required at step {step}")]
    CharacteristicDivision { step: usize, modulus: u64 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("every kernel vector lies in the observed vanishing ideal")]
    AllInIdeal,
    #[error("oracle mismatch: rank method {rank}, enumeration {enumeration}")]
    OracleMismatch { rank: String, enumeration: String },
    #[error("zero coordinate vector")]
    ZeroVector,
    #[error("polynomial vanishes at a point of the cycle")]
    VanishesOnCycle,
    #[error("no bidegree up to cap {0} qualifies")]
    CapExceeded(usize),
    #[error("missing parameter: {0}")]
    MissingParam(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("value exceeds representable range: {0}")]
    Overflow(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::FieldMismatch(..) => "FieldMismatch",
            Error::NotPrime(_) => "NotPrime",
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::InnerNotPositiveValuation => "InnerNotPositiveValuation",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::NotBiHomogeneous => "NotBiHomogeneous",
            Error::Parse { .. } => "Parse",
            Error::MixedVariables => "MixedVariables",
            Error::SingularRecursion { .. } => "SingularRecursion",
            Error::SeedNotFixedPoint { .. } => "SeedNotFixedPoint",
            Error::DegenerateA0 => "DegenerateA0",
            Error::CharacteristicDivision { .. } => "CharacteristicDivision",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::AllInIdeal => "AllInIdeal",
            Error::OracleMismatch { .. } => "OracleMismatch",
            Error::ZeroVector => "ZeroVector",
            Error::VanishesOnCycle => "VanishesOnCycle",
            Error::CapExceeded(_) => "CapExceeded",
            Error::MissingParam(_) => "MissingParam",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Overflow(_) => "Overflow",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
