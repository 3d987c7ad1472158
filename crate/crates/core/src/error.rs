use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(&'static str),

    #[error("polygon is not convex")]
    NonConvex,

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("parameter {name} = {value} is outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("point ({x}, {y}) lies outside the map region")]
    OutsideRegion { x: f64, y: f64 },

    #[error("density region does not match map region")]
    RegionMismatch,

    #[error("negative density value {0} in an unsigned density")]
    NegativeDensity(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Ulam row {row} sums to {sum} (cell image leaves the region); refine the grid")]
    ResolutionTooLow { row: usize, sum: f64 },

    #[error("density has zero variation")]
    ZeroVariation,

    #[error("cell arrangement exceeded {limit} cells")]
    CellExplosion { limit: usize },

    #[error("orbit stayed on the critical set after {retries} perturbations")]
    OrbitHitsCriticalSet { retries: usize },

    #[error("certificate not satisfied (lambda = {lambda})")]
    Uncertified { lambda: f64 },

    #[error("nothing to draw: heatmap has no cells")]
    EmptyHeatmap,

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
