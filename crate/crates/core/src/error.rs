use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A^H| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("antisymmetric matrix has odd order {0}")]
    OddOrder(usize),

    #[error("operator is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("density matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error(
        "{solver} did not converge after {iterations} iterations; best residuals {residuals:?}"
    )]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("step size underflow at t = {time}")]
    StepUnderflow { time: f64 },

    #[error("unsupported waveform: {0}")]
    UnsupportedWaveform(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
