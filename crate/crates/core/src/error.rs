use thiserror::Error;

/// Errors raised by graph, generator, solver, certificate and rounding routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subset: {0}")]
    Domain(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error(
        "expander generation failed on {side}: best gap {best_gap:.4} < target {target:.4} after {attempts} attempts"
    )]
    ExpanderTarget { side: String, best_gap: f64, target: f64, attempts: usize },

    #[error("degree balancing infeasible: vertex {vertex} stuck at degree {degree} (target {target})")]
    BalancingInfeasible { vertex: usize, degree: usize, target: usize },

    #[error("unknown adversary strategy: {0}")]
    UnknownStrategy(String),

    #[error("certificate construction failed: {0}")]
    Certificate(String),

    #[error("matrix is not positive semidefinite: min eigenvalue {0:e}")]
    NotPsd(f64),

    #[error("eigendecomposition failed")]
    Eigen,

    #[error("no dense cluster found")]
    NoDenseCluster,

    #[error("degenerate embedding: {0}")]
    DegenerateEmbedding(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
