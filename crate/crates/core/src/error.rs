use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot shorten: address has length {len}, target is {target}")]
    CannotShorten { len: usize, target: usize },

    #[error("enumeration too large: level {level} exceeds cap {cap}")]
    EnumerationTooLarge { level: usize, cap: usize },

    #[error("oracle too large: level {level} exceeds {max}")]
    OracleTooLarge { level: usize, max: usize },

    #[error("not a 1-bounded metric: {0}")]
    NotOneBounded(String),

    #[error("not a tripointed morphism: {0}")]
    NotTripointed(String),

    #[error("not in carrier: {0}")]
    NotInCarrier(String),

    #[error("algebra structure is ill-defined on a glued pair: {0}")]
    IllDefinedAlgebra(String),

    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error("tolerance {0} is below the supported precision")]
    ToleranceTooSmall(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("depth {depth} exceeds cap {cap}")]
    DepthCap { depth: usize, cap: usize },

    #[error("j >= 4 required by the construction, got {0}")]
    InvalidJ(u32),

    #[error("invalid configuration: {0}")]
    Config(String),
}
