use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected a {expected} user, got a {actual} user")]
    WrongTier {
        expected: crate::Tier,
        actual: crate::Tier,
    },

    #[error("inconsistent moments: E[X^2] = {second} is below E[X]^2 = {}", first * first)]
    InconsistentMoments { first: f64, second: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {tolerance:e}")]
    QuadratureNonConvergence { achieved: f64, tolerance: f64 },

    #[error("conditioning probability {probability:e} for the {tier} tier is degenerate")]
    DegenerateConditioning { tier: crate::Tier, probability: f64 },

    #[error("no DAP users: the probability of an empty microcell is 1")]
    NoDapUsers,

    #[error(
        "no throughput crossing in zeta [{lo:e}, {hi:e}]: E[tau_u] - E[tau_d] is {diff_lo} at the lower end and {diff_hi} at the upper end"
    )]
    NoCrossing {
        lo: f64,
        hi: f64,
        diff_lo: f64,
        diff_hi: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::DegenerateConditioning { .. }
                | Error::NoDapUsers
                | Error::NoCrossing { .. }
        )
    }
}
