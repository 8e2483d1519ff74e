use thiserror::Error;

/// Failure modes of the library.
///
/// Input problems (`InvalidParameter`) are distinguished from numerical
/// diagnostics so the command line driver can map them to different exit codes.
#[derive(Debug, Clone, Error)]
pub enum EpError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("amplitude beyond existence range: eps = {eps} but eps_K = {eps_k}")]
    BeyondExistence { eps: f64, eps_k: f64 },
    #[error("point lies on a branch cut: {0}")]
    OnBranchCut(String),
    #[error("splitting condition fails: {0}")]
    Splitting(String),
    #[error("degenerate eigenvector normalisation: {0}")]
    Degenerate(String),
    #[error("ode integration failed: {0}")]
    Integration(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("contour unresolved: {0}")]
    UnresolvedContour(String),
    #[error("derivative estimate unstable: {0}")]
    Derivative(String),
}

impl EpError {
    /// True when the error stems from user input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, EpError::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, EpError>;
