use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("`{key}` must be positive and finite, got {value}")]
    Domain { key: &'static str, value: f64 },
}

impl ModelError {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        Self::Invalid {
            key,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(key: &'static str, value: f64) -> Self {
        Self::Domain { key, value }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error(
    "quadrature on [{lo}, {hi}] did not converge: estimate {estimate}, error {abs_error:e} \
     after {subintervals} subintervals ({evaluations} evaluations)"
)]
pub struct QuadratureError {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub abs_error: f64,
    pub subintervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("macro QoS unreachable: F(Γ_M) = 1 for N_Q = {n_q}")]
    UnreachableQos { n_q: usize },
    #[error("invalid analysis parameter `{key}`: {reason}")]
    Domain { key: &'static str, reason: String },
}

impl AnalyticsError {
    pub(crate) fn domain(key: &'static str, reason: impl Into<String>) -> Self {
        Self::Domain {
            key,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("configuration: {0}")]
    Config(#[from] ModelError),
    #[error("simulation plan: {0}")]
    Plan(String),
    #[error("analytics: {0}")]
    Analytics(#[from] AnalyticsError),
}
