use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An entry of a partial Taylor sum left the representable range.
    #[error("numeric overflow at Taylor term {term}; use a smaller gamma")]
    Overflow { term: usize },

    #[error("singular iteration: |T_n M| = {norm:e}; increase the Taylor degree n")]
    SingularIteration { norm: f64 },

    #[error("initial matrix is numerically singular (rank {rank} < {dim})")]
    SingularInit { rank: usize, dim: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The probed vector was annihilated by (A - sI)^order, so beta_k has a zero denominator.
    #[error("degenerate ratio at k = {k}: vector annihilated at order {order}")]
    DegenerateRatio { k: usize, order: usize },

    #[error("gradient flow left the spectral interval at t = {t}, tau = {tau:e}; use a smaller gamma")]
    Divergence { t: f64, tau: f64 },

    #[error("cyclic order could not be determined; raise N or adjust the n grid")]
    CyclicOrderUnresolved,

    #[error("no column of the eigenspace matrix exceeds the rank tolerance; the shift is likely wrong")]
    EmptySpace,

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
