use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the chart domain: {0}")]
    Domain(String),

    #[error("distribution is integrable here: |κ − λ| = {gap:.3e} is below tolerance")]
    Integrable { gap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("surface {0} is excluded: the profile with α = 0 is flat")]
    FlatProfile(String),

    #[error("surface {0} must have constant curvature here")]
    NotConstantCurvature(String),

    #[error("finite-difference step {step:.3e} is too small for point scale {scale:.3e}")]
    StepTooSmall { step: f64, scale: f64 },

    #[error(
        "rank is ill-conditioned: singular value ratio {ratio:.3e} is within a decade of threshold {threshold:.1e}"
    )]
    IllConditionedRank { ratio: f64, threshold: f64 },

    #[error("empty grid")]
    EmptyGrid,

    #[error("trajectory left the chart domain at t = {time}; last valid state {state:?}")]
    DomainExit { time: f64, state: [f64; 5] },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("line {line}: {message}")]
    ParseLine { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
