use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error category, used for CLI exit codes and C status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Budget,
    Precondition,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid family spec `{spec}`: {reason}")]
    FamilySpec { spec: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("period overflow: lcm {lcm} exceeds cap {cap} and {subsets} subsets exceed budget {budget}")]
    PeriodOverflow {
        lcm: String,
        cap: u64,
        subsets: String,
        budget: u64,
    },

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("moduli {a} and {c} are not coprime (gcd {gcd})")]
    NotCoprime { a: u64, c: u64, gcd: u64 },

    #[error("truncation bound {bound} is smaller than requested cut-off {k}")]
    TruncationExceeded { k: u64, bound: u64 },

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::FamilySpec { .. } | Error::Parse(_) => ErrorKind::Parse,
            Error::PeriodOverflow { .. } | Error::Budget(_) | Error::SearchExhausted(_) => {
                ErrorKind::Budget
            }
            Error::NotCoprime { .. } | Error::TruncationExceeded { .. } | Error::Precondition(_) => {
                ErrorKind::Precondition
            }
            Error::Io(_) => ErrorKind::Io,
        }
    }

    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::FamilySpec { .. } => "family-spec",
            Error::Parse(_) => "parse",
            Error::PeriodOverflow { .. } => "period-overflow",
            Error::Budget(_) => "budget",
            Error::NotCoprime { .. } => "not-coprime",
            Error::TruncationExceeded { .. } => "truncation-exceeded",
            Error::SearchExhausted(_) => "search-exhausted",
            Error::Precondition(_) => "precondition",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
