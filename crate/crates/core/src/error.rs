use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate target: b has no positive entry")]
    DegenerateTarget,
    #[error("infeasible support: every column was dropped during normalization")]
    InfeasibleSupport,
    #[error("negative entry {value} at row {row}")]
    NegativeEntry { row: usize, value: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty iterate: psi is zero")]
    EmptyIterate,
    #[error("no columns")]
    NoColumns,
    #[error("insufficient samples for partition: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("all mass light; decrease eps1 or increase n")]
    AllMassLight,
    #[error("no good candidates; adjust epsilon")]
    NoGoodCandidates,
    #[error("quadrature unsupported for d = {0}; use binned residual")]
    QuadratureUnsupported(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
