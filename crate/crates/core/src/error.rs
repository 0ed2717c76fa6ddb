//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry, assembly, solver, and pipeline operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A domain or policy parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Mesh refinement would exceed the configured element budget.
    #[error("mesh budget exceeded: {elements} elements > budget {budget}")]
    MeshBudget { elements: usize, budget: usize },

    /// The generated mesh violates a structural invariant.
    #[error("mesh invariant violated: {0}")]
    MeshInvariant(String),

    /// A requested boundary tag is not present on the mesh.
    #[error("boundary tag {0} absent from mesh")]
    TagAbsent(&'static str),

    /// Dirichlet elimination removed every degree of freedom.
    #[error("all nodes constrained; no free degrees of freedom remain")]
    AllConstrained,

    /// The factorization or solve detected a singular or indefinite matrix.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// The eigensolver did not reach the requested residual tolerance.
    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    /// Two tracked eigenvalues are too close to certify simplicity.
    #[error("simplicity violated: {0}")]
    Degenerate(String),

    /// Branch matching by overlap failed.
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    /// A least-squares extrapolation produced an untrustworthy fit.
    #[error("fit unstable: {0}")]
    FitUnstable(String),

    /// The frequency median is not close to any integer order.
    #[error("order uncertain: {0}")]
    OrderUncertain(String),

    /// A point query left the mesh during interpolation.
    #[error("interpolation failed: {0}")]
    Interpolation(String),

    /// Mesh or report file I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A mesh file or other structured input did not parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
