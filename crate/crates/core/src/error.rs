use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("rate ratio undefined: replacement rate is zero")]
    RatioUndefined,

    #[error("bound indeterminate: both replacement and communication rates are zero")]
    Indeterminate,

    #[error("resolvent undefined for beta = {beta} (must be > 0)")]
    ResolventUndefined { beta: f64 },

    #[error(
        "quadrature did not reach relative tolerance {tolerance:e}: estimate {estimate}, error estimate {error:e}"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("ODE integration failed at s = {at}: {reason}")]
    Ode { at: f64, reason: String },

    #[error("no dynamics: total event rate is zero")]
    NoDynamics,

    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
