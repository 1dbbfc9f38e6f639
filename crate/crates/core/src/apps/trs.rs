//! Trust-region subproblem: minimize `x^T A x + c^T x` over `||x|| <= r`.
//!
//! Solved by eigendecomposition plus the secular equation in the
//! eigenbasis. With `A = U diag(lambda) U^T` and `c~ = U^T c`, the global
//! minimizer satisfies `(A + mu I) x = -c / 2` for a multiplier `mu >= 0`
//! with `A + mu I` positive semidefinite and `mu (||x|| - r) = 0`; the
//! boundary multiplier is the root of the monotone norm equation
//! `||x(mu)|| = r` on `(max(0, -lambda_min), inf)`. When the right-hand
//! side has no component in the bottom eigenspace the norm can stay below
//! `r` on the whole bracket (the hard case); the minimizer then adds a
//! bottom-eigenvector component sized to reach the boundary.

use crate::error::{Error, Result};
use crate::linalg::vec;
use crate::linalg::{jacobi_eigen, DenseSym, SymMatrix};
use crate::scalar::Scalar;

/// Global minimizer of a quadratic over a centered ball.
#[derive(Debug, Clone)]
pub struct TrsSolution<F> {
    pub x: Vec<F>,
    /// Objective value at `x`.
    pub value: F,
    /// Lagrange multiplier of the ball constraint.
    pub multiplier: F,
    /// Whether the constraint is active at the solution.
    pub boundary: bool,
    /// Whether the bottom-eigenspace completion was needed.
    pub hard_case: bool,
}

const JACOBI_SWEEPS: usize = 60;
const MAX_BRACKET_STEPS: usize = 500;

pub fn solve_trs<F: Scalar>(a: &SymMatrix<F>, c: &[F], radius: F) -> Result<TrsSolution<F>> {
    let n = a.order();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            context: "trust-region linear term",
            expected: n,
            got: c.len(),
        });
    }
    if !(radius > F::zero()) || !radius.is_finite() {
        return Err(Error::InvalidRadius(format!("trust-region radius {radius}")));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidEntry {
            row: 0,
            col: 0,
            reason: "non-finite linear term",
        });
    }

    let eig = jacobi_eigen(&DenseSym::from_sym(a), JACOBI_SWEEPS)?;
    let lambda = &eig.values; // descending
    let lambda_min = lambda[n - 1];
    let scale = a.gershgorin_bound() + vec::norm(c) + F::one();
    let c_tilde: Vec<F> = eig.vectors.iter().map(|u| vec::dot(u, c)).collect();

    let assemble = |coeffs: &[F]| -> Vec<F> {
        let mut x = vec![F::zero(); n];
        for (coef, u) in coeffs.iter().zip(&eig.vectors) {
            vec::axpy(*coef, u, &mut x);
        }
        x
    };
    let finish = |x: Vec<F>, multiplier: F, boundary: bool, hard_case: bool| -> Result<TrsSolution<F>> {
        let value = a.quad_form(&x)? + vec::dot(c, &x);
        Ok(TrsSolution {
            x,
            value,
            multiplier,
            boundary,
            hard_case,
        })
    };

    // Coefficients of the stationary point at a given multiplier, leaving
    // directions with a (numerically) singular shift at zero.
    let tol_rank = F::c(1e-12) * scale;
    let coeffs_at = |mu: F| -> Vec<F> {
        lambda
            .iter()
            .zip(&c_tilde)
            .map(|(&l, &ct)| {
                let shift = l + mu;
                if shift.abs() <= tol_rank && ct.abs() <= tol_rank {
                    F::zero()
                } else {
                    -ct / (F::c(2.0) * shift)
                }
            })
            .collect()
    };
    let norm_at = |mu: F| -> F {
        lambda
            .iter()
            .zip(&c_tilde)
            .map(|(&l, &ct)| {
                let shift = l + mu;
                let coef = ct / (F::c(2.0) * shift);
                coef * coef
            })
            .sum::<F>()
            .sqrt()
    };

    // Interior minimum exists only for positive semidefinite curvature
    // with the right-hand side in the range of A.
    let tol_psd = F::c(1e-12) * scale;
    if lambda_min >= -tol_psd {
        let mut in_range = true;
        let coeffs: Vec<F> = lambda
            .iter()
            .zip(&c_tilde)
            .map(|(&l, &ct)| {
                if l > tol_rank {
                    -ct / (F::c(2.0) * l)
                } else if ct.abs() <= tol_rank {
                    F::zero()
                } else {
                    in_range = false;
                    F::zero()
                }
            })
            .collect();
        if in_range {
            let norm_sq: F = coeffs.iter().map(|v| *v * *v).sum();
            if norm_sq.sqrt() <= radius {
                let x = assemble(&coeffs);
                return finish(x, F::zero(), false, false);
            }
        }
    }

    // Boundary solution. The bracket floor is where A + mu I loses
    // definiteness.
    let lo_base = (-lambda_min).max(F::zero());

    // Hard case: no right-hand-side weight in the bottom eigenspace and
    // the limiting stationary point already inside the ball.
    let tol_cluster = F::c(1e-10) * scale;
    let bottom: Vec<usize> = (0..n)
        .filter(|&i| lambda[i] <= lambda_min + tol_cluster)
        .collect();
    let proj: F = bottom
        .iter()
        .map(|&i| c_tilde[i] * c_tilde[i])
        .sum::<F>()
        .sqrt();
    if lambda_min < -tol_psd && proj <= F::c(1e-10) * scale {
        let limit_sq: F = (0..n)
            .filter(|i| !bottom.contains(i))
            .map(|i| {
                let coef = c_tilde[i] / (F::c(2.0) * (lambda[i] - lambda_min));
                coef * coef
            })
            .sum();
        if limit_sq.sqrt() <= radius {
            let mut coeffs = coeffs_at(lo_base);
            for &i in &bottom {
                coeffs[i] = F::zero();
            }
            let tau = (radius * radius - limit_sq).max(F::zero()).sqrt();
            coeffs[n - 1] += tau;
            let x = assemble(&coeffs);
            return finish(x, lo_base, true, true);
        }
    }

    // Regular boundary case: the norm decreases strictly in mu and blows
    // up toward the bracket floor, so bisection is safe.
    let mut lo = lo_base;
    let mut hi = lo_base + scale.max(F::one());
    let mut grow = 0;
    while norm_at(hi) > radius {
        hi = lo_base + (hi - lo_base) * F::c(2.0);
        grow += 1;
        if grow > MAX_BRACKET_STEPS {
            return Err(Error::TrustRegion(
                "could not bracket the boundary multiplier".into(),
            ));
        }
    }
    for _ in 0..MAX_BRACKET_STEPS {
        if hi - lo <= F::c(1e-15) * hi.max(F::one()) {
            break;
        }
        let mid = (lo + hi) / F::c(2.0);
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // The high side keeps the iterate feasible.
    let mu = hi;
    let x = assemble(&coeffs_at(mu));
    finish(x, mu, true, false)
}

/// Largest normalized violation among the optimality conditions:
/// stationarity, feasibility, complementary slackness, and shifted
/// positive semidefiniteness.
pub fn kkt_residual<F: Scalar>(
    a: &SymMatrix<F>,
    c: &[F],
    radius: F,
    sol: &TrsSolution<F>,
) -> Result<F> {
    let scale = a.gershgorin_bound() + vec::norm(c) + F::one();
    let mut grad = a.matvec(&sol.x)?;
    for (g, (ci, xi)) in grad.iter_mut().zip(c.iter().zip(&sol.x)) {
        *g = *g * F::c(2.0) + *ci + F::c(2.0) * sol.multiplier * *xi;
    }
    let stationarity = vec::norm(&grad) / scale;

    let norm_x = vec::norm(&sol.x);
    let feasibility = (norm_x - radius).max(F::zero()) / radius.max(F::one());
    let complementarity = (sol.multiplier * (radius - norm_x)).abs() / radius.max(F::one());

    let eig = jacobi_eigen(&DenseSym::from_sym(a), JACOBI_SWEEPS)?;
    let lambda_min = eig.values[a.order() - 1];
    let shifted = (-(lambda_min + sol.multiplier)).max(F::zero()) / scale;

    Ok(stationarity
        .max(feasibility)
        .max(complementarity)
        .max(shifted))
}
