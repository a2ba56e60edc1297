use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input operator or state (non-Hermitian, wrong shape, bad trace).
    #[error("validation error: {0}")]
    Validation(String),

    /// A parameter outside its mathematical domain (negative β, s ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration problem, reported with the offending field path.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// The SLD equation has no solution on the zero-eigenvalue support.
    #[error("singular support: {0}")]
    SingularSupport(String),

    /// Oscillator truncation too small for the requested temperature.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// The sample violates `⟨B⟩_B = 0`, so the second-order formulas do not apply.
    #[error("assumption violated: ⟨B⟩_B = {avg_b:.3e} ≠ 0; use p1_operator for the first-order term")]
    AssumptionII { avg_b: f64 },

    /// Second-order state is not positive: coupling outside the perturbative regime.
    #[error("out of perturbative regime: minimum eigenvalue {min_eig:.3e}")]
    PerturbativeRegime { min_eig: f64 },

    /// Quadrature, differencing or eigensolver failure.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("dimension limit exceeded: {dim} > {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Validation(_) | Error::Domain(_) | Error::Io(_) => 2,
            Error::PerturbativeRegime { .. } => 4,
            _ => 3,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
