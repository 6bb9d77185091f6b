use thiserror::Error;

/// Errors produced by chain construction, the analytic kernel, the
/// self-consistent solver, and the stochastic integrator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("site index {index} out of range for chain of {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },

    #[error("chain has no couplings; the steady-state system is undetermined")]
    DecoupledChain,

    #[error("self-consistency system is singular (rank defect {rank_defect})")]
    SingularSystem { rank_defect: usize },

    #[error("nondimensionalization requires uniform pinning (site {site} differs)")]
    NonUniformPinning { site: usize },

    #[error("trajectory diverged at step {step}, site {site}")]
    NumericalBlowup { step: usize, site: usize },

    #[error(
        "self-consistent iteration did not converge after {iterations} iterations \
         (last residual {last_residual:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        last_residual: f64,
        history: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::SiteOutOfRange { .. }
                | Error::NonUniformPinning { .. }
        )
    }
}
