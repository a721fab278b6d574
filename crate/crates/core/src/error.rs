use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrwsError {
    #[error("parameter out of square: {0}")]
    ParamOutOfSquare(String),

    #[error("invalid rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative coefficient m_{index} = {value}")]
    NegativeCoefficient { index: usize, value: String },

    #[error("sequence term {index} is not an exact rational")]
    NotExact { index: usize },

    #[error("point is not on a special ray D = p^k N")]
    NotOnRay,

    #[error("point lies outside {0}")]
    OutsideSector(String),

    #[error("target outside square: {0}")]
    TargetOutsideSquare(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("tail bound unavailable: {0}")]
    TailBound(String),
}

impl GrwsError {
    /// Short machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            GrwsError::ParamOutOfSquare(_) => "parameter-out-of-square",
            GrwsError::ParseRational { .. } => "parse-rational",
            GrwsError::InvalidArgument(_) => "invalid-argument",
            GrwsError::NegativeCoefficient { .. } => "negative-coefficient",
            GrwsError::NotExact { .. } => "not-exact",
            GrwsError::NotOnRay => "not-on-ray",
            GrwsError::OutsideSector(_) => "outside-sector",
            GrwsError::TargetOutsideSquare(_) => "target-outside-square",
            GrwsError::NoSolution(_) => "no-solution",
            GrwsError::TailBound(_) => "tail-bound",
        }
    }
}

pub type Result<T> = std::result::Result<T, GrwsError>;
