use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate clustering: raster has {distinct} distinct intensities, need at least {k}")]
    DegenerateClustering { distinct: usize, k: usize },

    #[error("empty domain: {0}")]
    EmptyDomain(&'static str),

    #[error("invalid knot sequence: {0}")]
    InvalidKnots(String),

    #[error("spline order {order} needs at least {order} control points, got {points}")]
    Order { order: usize, points: usize },

    #[error("gene {index}: lower bound {lo} exceeds upper bound {hi}")]
    Bounds { index: usize, lo: f64, hi: f64 },

    #[error("population of {0} is too small, mutation needs at least 4 members")]
    InsufficientPopulation(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("PGM: {0}")]
    Pgm(String),

    #[error("scenario parse error: {0}")]
    ScenarioParse(String),

    #[error("invalid scenario field `{field}`: {reason}")]
    ScenarioInvalid { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ScenarioInvalid { field: field.into(), reason: reason.into() }
    }
}
