use thiserror::Error;

/// Failures surfaced by evaluation, checks, lifting and export.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {re}{im:+}i lies outside the validity disk |z| < {r_max}")]
    Domain { re: f64, im: f64, r_max: f64 },

    #[error("denominator modulus {modulus:e} below pole guard at {re}{im:+}i")]
    Pole { re: f64, im: f64, modulus: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),

    #[error("dilatations differ by {max_gap:e} (tolerance {tolerance:e})")]
    DilatationMismatch { max_gap: f64, tolerance: f64 },

    #[error("boundary samples {index} and {next} coincide")]
    DegenerateCurve { index: usize, next: usize },

    #[error("non-finite value produced at {re}{im:+}i")]
    NonFinite { re: f64, im: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(z: num_complex::Complex64, r_max: f64) -> Self {
        Error::Domain { re: z.re, im: z.im, r_max }
    }
}
