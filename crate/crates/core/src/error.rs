use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the design and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("correlation {rho} is infeasible for these margins (admissible range [{lower}, {upper}])")]
    InfeasibleCorrelation { rho: f64, lower: f64, upper: f64 },

    #[error("invalid effect: {0}")]
    InvalidEffect(String),

    #[error("invalid rate: {0}")]
    InvalidRate(String),

    #[error("the composite effect vanishes ({effect}); no finite sample size detects it")]
    NullEffect { effect: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code used by the CLI and HTTP layers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InfeasibleCorrelation { .. } => "infeasible_correlation",
            Error::InvalidEffect(_) => "invalid_effect",
            Error::InvalidRate(_) => "invalid_rate",
            Error::NullEffect { .. } => "null_effect",
            Error::Domain(_) => "domain_error",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }

    /// True for errors where the inputs are well-formed but describe an
    /// impossible design (as opposed to malformed inputs).
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleCorrelation { .. } | Error::InvalidEffect(_) | Error::NullEffect { .. }
        )
    }
}
