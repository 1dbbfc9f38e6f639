//! Error type shared by all modules.
//!
//! Diagnostic payloads are carried as `f64` regardless of the scalar the
//! computation ran in; they are for display, not for further arithmetic.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid matrix entry at ({row}, {col}): {reason}")]
    InvalidEntry {
        row: usize,
        col: usize,
        reason: &'static str,
    },

    #[error(
        "power iteration did not converge in {iters} iterations \
         (estimate {best_lambda:.6e}, residual {residual:.3e})"
    )]
    PowerNoConvergence {
        iters: usize,
        best_lambda: f64,
        residual: f64,
    },

    #[error("jacobi sweep limit reached with off-diagonal norm {off_diagonal:.3e}")]
    JacobiNoConvergence { off_diagonal: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.6e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix trace {trace:.6e} is not positive")]
    DegenerateTrace { trace: f64 },

    #[error("pivot candidate coincides with the current iterate")]
    DegeneratePivot,

    #[error("separating hyperplane is undefined at zero gap")]
    ZeroGap,

    #[error("probe direction is zero")]
    ZeroDirection,

    #[error("system must have at least one variable and one equation")]
    EmptySystem,

    #[error("{context}: system has linear or constant terms; homogenize first")]
    Inhomogeneous { context: &'static str },

    #[error(
        "equation {index} has a zero quadratic form but right-hand side {rhs:.6e}; \
         no radius admits a solution"
    )]
    InfeasibleComponent { index: usize, rhs: f64 },

    #[error("right-hand side is zero; the trivial point x = 0 already solves the system")]
    ZeroRhs,

    #[error("certificate failed check `{check}`: {detail}")]
    InvalidCertificate { check: &'static str, detail: String },

    #[error("invalid radius: {0}")]
    InvalidRadius(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trust-region subproblem: {0}")]
    TrustRegion(String),

    #[error("equation {index} quadratic form is not positive semidefinite (eigenvalue {eigenvalue:.6e})")]
    NotConvex { index: usize, eigenvalue: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}
