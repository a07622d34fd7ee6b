use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed operator input (shape, Hermiticity, trace).
    #[error("invalid input: {0}")]
    Input(String),

    /// A log or fractional power was requested of a matrix with a non-positive eigenvalue.
    #[error("matrix function undefined: eigenvalue {eigenvalue:e} is not strictly positive")]
    Domain { eigenvalue: f64 },

    #[error("K_rho inverse is ill-conditioned: smallest logarithmic mean {smallest:e}")]
    Conditioning { smallest: f64 },

    #[error("map is not linear: spot-check residual {residual:e}")]
    Nonlinear { residual: f64 },

    #[error("spectral function violates KMS: relative residual {residual:e} at nu = {nu}")]
    Kms { residual: f64, nu: f64 },

    #[error("invalid spectral function: h({nu}) = {value:e} is not positive")]
    SpectralValue { nu: f64, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    /// All schema violations found while validating a scenario file.
    #[error("configuration has {} error(s):\n  {}", .0.len(), .0.join("\n  "))]
    Schema(Vec<String>),

    #[error("integration failed at t = {time}: {reason}")]
    Integration {
        time: f64,
        reason: String,
        last_state: Box<crate::linops::Operator>,
    },

    #[error("steady state did not converge: {reason} (residual history {history:?})")]
    SteadyState { reason: String, history: Vec<f64> },

    #[error("generator is ill-conditioned on the complement of its kernel: gap {gap:e}")]
    IllConditioned { gap: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Schema(_) | Error::Json(_) | Error::Kms { .. } => 2,
            Error::SpectralValue { .. } | Error::Input(_) => 2,
            _ => 3,
        }
    }
}
