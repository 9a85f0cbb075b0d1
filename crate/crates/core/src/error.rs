use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Bose occupation diverges: energy {eps} equals the chemical potential at finite beta")]
    OccupationDivergence { eps: f64 },

    #[error("Bogoliubov coefficients are singular at zero kinetic energy")]
    SingularCoefficients,

    #[error("no condensate: the condensate amplitude is zero")]
    NoCondensate,

    #[error("condensate density must be positive to normalize fluctuations")]
    ZeroCondensateDensity,

    #[error("mode {0:?} is not allowed here")]
    InvalidMode([i64; 3]),

    #[error("operator word has {len} tokens, above the cap of {cap}")]
    WordTooLong { len: usize, cap: usize },

    #[error("fluctuation specs disagree: {0}")]
    SpecMismatch(String),

    #[error("inadmissible fluctuation spec: {0}")]
    Inadmissible(String),

    #[error("quadrature did not converge: estimate {value:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature { value: f64, error: f64, evaluations: usize },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("inconsistent phase data: {0}")]
    Phase(String),

    #[error("Fock workspace dimension {dimension} exceeds the cap {cap}")]
    CapExceeded { dimension: usize, cap: usize },

    #[error("workspace is missing mode {0:?}")]
    MissingMode([i64; 3]),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
