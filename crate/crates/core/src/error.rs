use crate::field::Domain;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected a {expected:?}-domain field, found {found:?}")]
    WrongDomain { expected: Domain, found: Domain },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent {0} out of range")]
    InvalidExponent(f64),

    #[error("boundary decay violated: boundary/peak ratio {ratio:.3e} exceeds {limit:.3e}")]
    BoundaryDecay { ratio: f64, limit: f64 },

    #[error("point {point:?} lies outside the sampled box")]
    OutsideBox { point: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph function is not convex: h'' = {value:.3e} at t = {at}")]
    NotConvex { at: f64, value: f64 },

    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),

    #[error("{count} charts cannot cover the surface with graph charts")]
    AtlasTooSmall { count: usize },

    #[error("extension tube leaves the chart or grid: {0}")]
    TubeTooWide(String),

    #[error("nothing to fit: all magnitudes below {0:e}")]
    NothingToFit(f64),

    #[error("point ({xi}, {eta}) lies outside the sumset")]
    OutsideSumset { xi: f64, eta: f64 },

    #[error("point ({xi}, {eta}) is on the degenerate diagonal boundary (|s - t| = {gap:.3e})")]
    Degenerate { xi: f64, eta: f64, gap: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("trace on the zero set does not vanish: max {max:.3e} > {limit:.3e}")]
    TraceNotVanishing { max: f64, limit: f64 },

    #[error("projection onto the zero set did not converge from {start:?}")]
    ProjectionDiverged { start: Vec<f64> },

    #[error("homogeneity condition violated (residual {residual:.3e})")]
    HomogeneityViolated { residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
