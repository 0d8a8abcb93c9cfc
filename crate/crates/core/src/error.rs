use thiserror::Error;

/// Errors raised by the geometry, model, analytic and bounds layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geometry: victim and transmitter coincide")]
    DegenerateGeometry,

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no sign change of {what} on bracket [{lo:.6e}, {hi:.6e}]")]
    NoSignChange { what: &'static str, lo: f64, hi: f64 },

    #[error("degenerate case: {0}")]
    Degenerate(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
