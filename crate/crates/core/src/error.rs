use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alpha[{index}] = {value} is outside [{min}, {max}]")]
    AlphaOutOfBounds {
        index: usize,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("point ({x}, {y}) is not inside the open unit square")]
    PointOutOfDomain { x: f64, y: f64 },

    #[error("quadrature did not converge after {levels} levels (last relative change {rel_change:e})")]
    QuadratureNotConverged { levels: usize, rel_change: f64 },

    #[error("density of point {point} under component {component} failed: {source}")]
    Density {
        point: usize,
        component: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("need at least as many points ({points}) as clusters ({clusters})")]
    TooFewPoints { points: usize, clusters: usize },

    #[error("label vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("column {column} is constant; cannot normalize")]
    ConstantColumn { column: usize },

    #[error("covariance has fewer than 2 positive eigenvalues")]
    RankDeficient,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("model document: {0}")]
    Document(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is neither `Clone` nor `PartialEq`; keep its rendering.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}
