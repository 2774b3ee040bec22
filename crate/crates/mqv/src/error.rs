use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate state: covariance determinant {det:e} is not positive")]
    DegenerateState { det: f64 },

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("spectrum is not factorizable: {0}")]
    NotFactorizable(String),

    #[error("causality violation: pole {re:e}{im:+e}i lies in the upper half plane")]
    CausalityViolation { re: f64, im: f64 },

    #[error("root finding failed for degree-{degree} polynomial")]
    RootFinding { degree: usize },

    #[error("Riccati iteration did not converge (residual {residual:e} after {iterations} steps)")]
    RiccatiNonConvergence { residual: f64, iterations: usize },

    #[error("filter grid too short: truncation error estimate {estimate:e}")]
    GridTooShort { estimate: f64 },

    #[error("grid step {step:e} is coarser than {limit:e} required by the filter")]
    Resolution { step: f64, limit: f64 },

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("degenerate quadrature system: {0}")]
    DegenerateQuadrature(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::GridTooShort { .. } | Error::Resolution { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
