use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An exhaustive routine was asked for a size beyond its configured ceiling.
    #[error("{what}: scale exceeded (n = {n}, ceiling = {ceiling})")]
    ScaleExceeded {
        what: &'static str,
        n: usize,
        ceiling: usize,
    },

    #[error("rejection cap exceeded: no transitive pair after {attempts} draws at n = {n}")]
    RejectionCapExceeded { n: usize, attempts: usize },

    #[error("constant table missing: no Gabber constant covers degree {degree}")]
    ConstantTableMissing { degree: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
