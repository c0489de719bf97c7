use thiserror::Error;

/// Errors raised by geometry queries, closed-form kernels, the asymptotic
/// engine and the collocation oracle.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the outer disk")]
    OutOfDomain { x: f64, y: f64 },

    #[error("singular evaluation: field and source points coincide")]
    Singular,

    #[error("evaluation at the image point of the source")]
    ImagePoint,

    #[error("source point lies on the outer boundary")]
    SourceOnBoundary,

    #[error("point is within {distance:e} of interface {} (limit {limit:e})", .inclusion + 1)]
    InterfaceProximity {
        inclusion: usize,
        distance: f64,
        limit: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ill-conditioned collocation system: column group `{group}` has pivot {pivot:e} below {tolerance:e}")]
    IllConditioned {
        group: String,
        pivot: f64,
        tolerance: f64,
    },

    #[error("scenario file: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
