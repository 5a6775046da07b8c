use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoewnerError {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator vanished (pole of the Herglotz function, Möbius factor, ...).
    #[error("singular point: {0}")]
    Singular(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The adaptive integrator could not make progress.
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    /// The trajectory left the closed unit disk and step splitting could not repair it.
    #[error("trajectory left the unit disk at t = {t} (|z| = {modulus})")]
    LeftDisk { t: f64, modulus: f64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Failure while mapping one point of a boundary polyline.
    #[error("boundary point {index}: {source}")]
    BoundaryPoint {
        index: usize,
        #[source]
        source: Box<LoewnerError>,
    },
}

pub type Result<T> = std::result::Result<T, LoewnerError>;
