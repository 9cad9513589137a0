use thiserror::Error;

/// Errors produced by set arithmetic, identification and propagation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{resolution} data matrix is rank deficient (rank {rank}, need {required})")]
    RankDeficient {
        resolution: String,
        rank: usize,
        required: usize,
    },

    #[error("data Gram matrix is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("continuous-time state matrix is singular")]
    SingularSystem,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("malformed document: {0}")]
    Document(String),

    #[error("predictor error: {0}")]
    Predictor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            op,
            expected,
            found,
        })
    }
}
