use thiserror::Error;

/// Errors raised by the numerical and physical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge: estimated error {error:.3e} above tolerance {tolerance:.3e}")]
    NonConvergence { error: f64, tolerance: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("result overflows f64: {0}")]
    Overflow(String),
    #[error("momentum {p} outside the domain {domain}")]
    Domain { p: f64, domain: String },
    #[error("curvature of the massless dispersion is a distribution at p = 0")]
    CurvatureSingular,
    #[error("invalid packet parameters: {0}")]
    InvalidParams(String),
    #[error("lattice packet must have beta_r = 0 and beta_i/a integer (got beta_r = {beta_r}, beta_i/a = {sites})")]
    LatticePeriodicity { beta_r: f64, sites: f64 },
    #[error("unsatisfiable targets: {0}")]
    Unsatisfiable(String),
    #[error("operation not defined for {0}")]
    KindMismatch(String),
    #[error("point ({x}, {t}) lies on the light cone")]
    LightConeSingular { x: f64, t: f64 },
    #[error("lattice position {0} is not a site")]
    NonIntegerSite(f64),
    #[error("boost velocity |u| = {0} must be below 1")]
    InvalidBoost(f64),
    #[error("moment {0} has no closed form for this dispersion")]
    Absent(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
