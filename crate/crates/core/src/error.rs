use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("numeric failure at s = {s}: {reason}")]
    NumericFailure { s: Complex64, reason: String },

    #[error("degenerate spectrum at s = {s}: {reason}")]
    DegenerateSpectrum { s: Complex64, reason: String },

    #[error("fundamental solution is undefined at the source point x = y = {0}")]
    UndefinedAtSource(f64),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    #[error("non-finite transform value at t = {t}, node j = {j}, s = {s}")]
    NonFiniteTransform { t: f64, j: i64, s: Complex64 },

    #[error("solver {solver} failed at x = {x}, t = {t}: {source}")]
    Profile {
        solver: &'static str,
        x: f64,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised by the numerics rather than by bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Profile { source, .. } => source.is_numeric(),
            Error::AccuracyLoss(_)
            | Error::NumericFailure { .. }
            | Error::DegenerateSpectrum { .. }
            | Error::Quadrature { .. }
            | Error::NonFiniteTransform { .. } => true,
            _ => false,
        }
    }
}
