use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("pursuer and evader positions coincide")]
    CoincidentPositions,
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("evader control has norm {0} > 1")]
    ControlOutOfRange(f64),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("state already satisfies interception orientation")]
    AlreadyOriented,
    #[error("KKT reconstruction failed")]
    KktReconstructionFailed,
}

pub type Result<T> = std::result::Result<T, GameError>;
