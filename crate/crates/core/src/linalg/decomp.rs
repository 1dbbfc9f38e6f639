//! Rank-one decompositions of positive semidefinite matrices.
//!
//! A psd matrix `X` with positive trace splits as
//! `X = sum_i alpha_i x_i x_i^T` with convex weights `alpha_i` and points of
//! common norm `||x_i|| = sqrt(tr X)`. This normalization is what lets a
//! spectahedron element be read back as a convex combination of points on a
//! sphere of radius `sqrt(tr X)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dense::{jacobi_eigen, pivoted_cholesky, DenseSym};
use super::vec;
use super::SymMatrix;

/// Which factorization produces the rank-one terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompMode {
    /// Eigendecomposition: weights are `lambda_i / tr X`. Validates the psd
    /// precondition exactly (smallest eigenvalue above `-1e-8 ||X||`).
    Spectral,
    /// Diagonal-pivoted Cholesky: weights are `||l_j||^2 / tr X`. Cheaper;
    /// detects indefiniteness through pivot breakdown.
    Cholesky,
}

/// Convex rank-one decomposition `X ~= sum_i alpha_i x_i x_i^T`.
#[derive(Debug, Clone)]
pub struct RankOneDecomp<F> {
    /// `(alpha_i, x_i)` with `alpha_i > 0`, `sum alpha_i = 1`, and
    /// `||x_i|| = sqrt(tr X)`.
    pub terms: Vec<(F, Vec<F>)>,
}

impl<F: Scalar> RankOneDecomp<F> {
    /// Rebuilds `sum_i alpha_i x_i x_i^T` densely.
    pub fn reconstruct(&self, order: usize) -> DenseSym<F> {
        let mut d = DenseSym::zeros(order);
        for (alpha, x) in &self.terms {
            d.add_scaled_outer(*alpha, x);
        }
        d
    }

    pub fn weight_sum(&self) -> F {
        self.terms.iter().map(|t| t.0).sum()
    }
}

/// Decomposes a psd matrix with positive trace into convex rank-one terms.
///
/// Errors: [`Error::DegenerateTrace`] when `tr X <= 0` (the zero matrix has
/// no such decomposition), [`Error::NotPsd`] when an eigenvalue (or Cholesky
/// pivot) is negative beyond `1e-8` relative tolerance. Eigenvalues or
/// pivots at roundoff level are dropped and the weights renormalized, which
/// perturbs the reconstruction well below its `1e-8 ||X||` contract.
pub fn psd_rank_one_decomp<F: Scalar>(
    x: &SymMatrix<F>,
    mode: DecompMode,
) -> Result<RankOneDecomp<F>> {
    let t = x.trace();
    if !(t > F::zero()) {
        return Err(Error::DegenerateTrace { trace: t.as_f64() });
    }
    let root_t = t.sqrt();
    let dense = DenseSym::from_sym(x);

    let mut terms: Vec<(F, Vec<F>)> = Vec::new();
    match mode {
        DecompMode::Spectral => {
            let eig = jacobi_eigen(&dense, 40)?;
            let lambda_max = eig.values[0];
            let scale = eig
                .values
                .iter()
                .map(|v| v.abs())
                .fold(F::zero(), F::max)
                .max(F::min_positive_value());
            if let Some(min) = eig.values.last() {
                if *min < -F::c(1e-8) * scale {
                    return Err(Error::NotPsd {
                        eigenvalue: min.as_f64(),
                    });
                }
            }
            let drop_tol = F::c(1e-12) * lambda_max.max(F::min_positive_value());
            for (lambda, u) in eig.values.iter().zip(&eig.vectors) {
                if *lambda > drop_tol {
                    terms.push((*lambda / t, vec::scale(root_t, u)));
                }
            }
        }
        DecompMode::Cholesky => {
            let factors = pivoted_cholesky(&dense, F::c(1e-12))?;
            for col in &factors.cols {
                let nsq = vec::norm_sq(col);
                if nsq > F::zero() {
                    terms.push((nsq / t, vec::scale(root_t / nsq.sqrt(), col)));
                }
            }
        }
    }

    if terms.is_empty() {
        return Err(Error::DegenerateTrace { trace: t.as_f64() });
    }
    let sum: F = terms.iter().map(|t| t.0).sum();
    for term in &mut terms {
        term.0 /= sum;
    }
    Ok(RankOneDecomp { terms })
}
