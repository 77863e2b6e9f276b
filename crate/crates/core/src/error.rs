use thiserror::Error;

/// Errors raised while building states, validating inputs, or sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("polar angle {0} outside [0, pi]")]
    PolarAngle(f64),

    #[error("pair state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("density matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("density matrix trace is {0}, expected 1")]
    Trace(f64),

    #[error("density matrix is not positive (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("sample count must be at least 1")]
    ZeroSamples,

    #[error("{0} distribution has no analytic average")]
    NoAnalyticAverage(&'static str),

    #[error("outcome probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of internal numerical consistency, as opposed to bad input.
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Probability(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
