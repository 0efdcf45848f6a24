use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gate {gate} refers to itself")]
    Cycle { gate: usize },
    #[error("gate {gate} refers to gate {child}, which is not defined before it")]
    BadReference { gate: usize, child: usize },
    #[error("unknown mode `{0}`")]
    BadMode(String),
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: usize, bound: usize },
    #[error("enumeration would exceed cap {cap}")]
    CapExceeded { cap: u128 },
    #[error("invalid monomial code: {0}")]
    InvalidCode(String),
    #[error("expansion exceeds {cap} terms")]
    TermCapExceeded { cap: usize },
    #[error("sample set has {size} elements, need more than the degree bound {degree}")]
    SetTooSmall { size: usize, degree: usize },
    #[error("field of size {p} too small, need more than {required}")]
    FieldTooSmall { p: u64, required: u128 },
    #[error("{needed} items exceed the enumeration budget {budget}")]
    EnumerationCapExceeded { needed: u128, budget: u128 },
    #[error("weights overflow 128 bits")]
    WeightOverflow,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("bad monomial literal `{0}`")]
    BadLiteral(String),
}

impl Error {
    /// Input could not be read as a circuit.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Cycle { .. } | Error::BadReference { .. } | Error::BadMode(_)
        )
    }

    /// Parameters are outside what the implementation can handle.
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            Error::FieldTooSmall { .. }
                | Error::EnumerationCapExceeded { .. }
                | Error::TermCapExceeded { .. }
                | Error::CapExceeded { .. }
                | Error::SetTooSmall { .. }
                | Error::DegreeExceeded { .. }
                | Error::WeightOverflow
        )
    }
}
