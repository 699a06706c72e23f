use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the supported domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid curvature tensor: {identity} violated by {violation:.3e}")]
    InvalidCurvature { identity: &'static str, violation: f64 },

    /// The truncated metric lost positive definiteness somewhere on the ball.
    #[error("r = {r} too large: metric not positive definite at {point:?} (min eigenvalue {min_eig:.3e})")]
    RadiusTooLarge { r: f64, point: Vec<f64>, min_eig: f64 },

    #[error("metric error: {0}")]
    Metric(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("no sign change bracketing the eigenvalue: {0}")]
    Bracketing(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("center of mass not certified after {iterations} iterations (residual {residual:.3e})")]
    CenterNotCertified { iterations: usize, residual: f64 },

    #[error("test functions not admissible: center-of-mass residual {0:.3e}")]
    Admissibility(f64),

    #[error("fit error: {0}")]
    Fit(String),
}
