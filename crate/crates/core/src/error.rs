use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("configuration space has {states} states, exact enumeration is capped at {cap}")]
    CapacityExceeded { states: f64, cap: usize },

    #[error("non-finite Gibbs weight encountered")]
    NonFiniteWeight,

    #[error("quadrature did not converge at order {order}: consecutive orders differ by {difference:e}")]
    QuadratureNonConvergence { order: usize, difference: f64 },

    #[error("MCMC did not converge: standard error {stderr:e} exceeds cap {cap:e}")]
    McmcNonConvergence { stderr: f64, cap: f64 },

    #[error("finite differences unstable for k={k}: step pair gave {coarse} vs {fine}")]
    FiniteDifferenceUnstable { k: usize, coarse: f64, fine: f64 },

    #[error("systems cannot be coupled: {0}")]
    MismatchedFamilies(String),

    #[error("{theorem}: missing parameter `{name}`")]
    MissingParameter { theorem: String, name: &'static str },

    #[error("{0}")]
    Unsupported(String),

    #[error("disorder replica {replica} failed: {source}")]
    Replica {
        replica: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
