use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("entries do not have the requested symmetry ({0} violations)")]
    Symmetry(usize),
    #[error("invalid unfolding spec: {0}")]
    InvalidSpec(String),
    #[error("non-finite entry")]
    NonFinite,
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    Indefinite(f64),
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("monomial {0:?} is outside the basis")]
    OutsideBasis(Vec<u8>),
    #[error("polynomial is not homogeneous of degree {0}")]
    Degree(usize),
    /// `line` is 1-based; 0 means the file as a whole.
    #[error("{}", if *line == 0 { format!("invalid input: {msg}") } else { format!("line {line}: {msg}") })]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
