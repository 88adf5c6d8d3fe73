use thiserror::Error;

use crate::geometry::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid tiling: {}", describe_violations(.0))]
    InvalidTiling(Vec<Violation>),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model already contains the {0} variant")]
    DuplicateVariant(&'static str),

    #[error("model has no y-link variables")]
    MissingYLink,

    #[error("assignment violates `{0}`")]
    InfeasibleAssignment(String),

    #[error("no feasible solution")]
    Infeasible,

    #[error("search limit reached before any solution was found")]
    LimitReached,

    #[error("linear system has a {dimension}-dimensional solution space, expected 1")]
    DegenerateSystem { dimension: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("no solved data for prime divisor {0}")]
    MissingDivisorData(usize),
}

impl Error {
    /// Stable identifier for the error kind, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidTiling(_) => "InvalidTiling",
            Error::Parse { .. } => "ParseError",
            Error::DuplicateVariant(_) => "DuplicateVariant",
            Error::MissingYLink => "MissingYLink",
            Error::InfeasibleAssignment(_) => "InfeasibleAssignment",
            Error::Infeasible => "Infeasible",
            Error::LimitReached => "LimitReached",
            Error::DegenerateSystem { .. } => "DegenerateSystem",
            Error::NotPrime(_) => "NotPrime",
            Error::MissingDivisorData(_) => "MissingDivisorData",
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

fn describe_violations(violations: &[Violation]) -> String {
    const SHOWN: usize = 4;
    let mut out = violations
        .iter()
        .take(SHOWN)
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    if violations.len() > SHOWN {
        out.push_str(&format!("; and {} more", violations.len() - SHOWN));
    }
    out
}
