use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operation needs a nonempty partition")]
    EmptyPartition,
    #[error("cell ({0},{1}) lies outside the partition")]
    CellOutOfShape(usize, usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("series use different variable tables")]
    VarTableMismatch,
    #[error("series is not a unit: {0}")]
    NotAUnit(String),
    #[error("product does not converge: {0}")]
    NonConvergent(String),
    #[error("honeycomb patch too small: {0}")]
    PatchTooSmall(String),
    #[error("membership verdict changed between patch sizes {0} and {1}")]
    Unstable(usize, usize),
    #[error("formula used outside its validity domain: {0}")]
    OutOfValidity(String),
    #[error("weight identity violated: {0}")]
    LemmaViolated(String),
    #[error("recurrence violated: {0}")]
    RecurrenceViolated(String),
    #[error("invalid web diagram: {}", .0.join("; "))]
    InvalidDiagram(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
