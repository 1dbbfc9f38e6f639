//! Problem classes layered on the feasibility machinery: binary quadratic
//! feasibility with hyperplane rounding, max cut, trust-region
//! subproblems, and convex quadratic programs.

pub mod binary;
pub mod convex_qp;
pub mod graph;
pub mod trs;
