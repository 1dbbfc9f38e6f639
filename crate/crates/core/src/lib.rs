//! Feasibility of systems of quadratic equations via a convex-hull relaxation.
//!
//! A homogeneous system `x^T A_k x = b_k` (k = 1..m) with a norm budget
//! `||x|| <= r` is relaxed to a membership question: does `b` lie in the
//! convex hull of the quadratic image `{Q(x) : ||x|| <= r}`, where
//! `Q(x) = (x^T A_1 x, ..., x^T A_m x)`? That hull is exactly the image of
//! the spectahedron `{X : X psd, tr X <= r^2}` under
//! `X -> (<A_1, X>, ..., <A_m, X>)`, so hull membership and SDP feasibility
//! are the same question, and each answer carries a checkable object:
//!
//! * feasible: a convex combination of rank-one points whose image matches
//!   `b` (equivalently a psd matrix `X` with `tr X <= r^2`),
//! * infeasible at radius `r`: a hyperplane separating `b` from the hull.
//!
//! Membership is decided by a pivot-stepping scheme over the hull (the
//! triangle algorithm for convex-hull membership). Its only subproblem is a
//! linear-functional maximization over the hull, which for quadratic images
//! reduces to an extremal eigenvalue of `sum_k c_k A_k`; the solver runs it
//! matrix-free with shifted power iteration and doubles the radius when a
//! certified failure of the pivot test proves infeasibility at the current
//! one.
//!
//! Inhomogeneous systems (linear or constant terms) are handled by
//! homogenization with one extra coordinate. On top of the feasibility
//! kernel sit small application layers: quadratic optimization by bisection
//! on the objective level, binary (+1/-1) feasibility with hyperplane
//! rounding, max-cut, and convex quadratic programs driven by a trust-region
//! pivot oracle.
//!
//! Everything is generic over the floating-point scalar through [`Scalar`];
//! `f64` aliases for the main types sit at the crate root.

// Guards are written `!(x > y)` on purpose: NaN must take the rejecting
// branch, which `x <= y` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod chr;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` symmetric matrix.
pub type SymMatrix64 = linalg::SymMatrix<f64>;
/// `f32` symmetric matrix.
pub type SymMatrix32 = linalg::SymMatrix<f32>;
/// `f64` eigenpair.
pub type EigPair64 = linalg::EigPair<f64>;
/// `f64` rank-one decomposition.
pub type RankOneDecomp64 = linalg::RankOneDecomp<f64>;
/// `f64` quadratic system.
pub type QuadraticSystem64 = chr::QuadraticSystem<f64>;
/// `f32` quadratic system.
pub type QuadraticSystem32 = chr::QuadraticSystem<f32>;
/// `f64` hull-membership certificate.
pub type ConvexCertificate64 = chr::ConvexCertificate<f64>;
/// `f64` spectahedron certificate.
pub type PsdCertificate64 = chr::PsdCertificate<f64>;
/// `f64` solver configuration.
pub type SolveConfig64 = solver::SolveConfig<f64>;
/// `f64` solve report.
pub type SolveReport64 = solver::SolveReport<f64>;
/// `f64` solve outcome.
pub type SolveOutcome64 = solver::SolveOutcome<f64>;
/// `f64` separating hyperplane.
pub type Hyperplane64 = geometry::Hyperplane<f64>;
/// `f64` non-membership witness.
pub type Witness64 = solver::Witness<f64>;
/// `f64` edge-weighted graph.
pub type Graph64 = apps::graph::Graph<f64>;
