//! Dense symmetric kernels: cyclic Jacobi eigendecomposition and pivoted
//! Cholesky.
//!
//! These back the exact small-scale paths (cross-checks, certificates,
//! rank-one decompositions) and are deliberately independent of the
//! matrix-free power iteration in [`super::power`], so each can serve as an
//! oracle for the other in tests.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::SymMatrix;

/// Dense symmetric matrix with full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym<F> {
    order: usize,
    data: Vec<F>,
}

impl<F: Scalar> DenseSym<F> {
    pub fn zeros(order: usize) -> Self {
        DenseSym {
            order,
            data: vec![F::zero(); order * order],
        }
    }

    pub fn from_sym(m: &SymMatrix<F>) -> Self {
        let mut d = DenseSym::zeros(m.order());
        d.add_scaled(m, F::one());
        d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self, i: usize, j: usize) -> F {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    /// `self += c * M`, expanding both triangles.
    pub fn add_scaled(&mut self, m: &SymMatrix<F>, c: F) {
        debug_assert_eq!(self.order, m.order());
        for &(i, j, v) in m.entries() {
            let cv = c * v;
            self.data[i * self.order + j] += cv;
            if i != j {
                self.data[j * self.order + i] += cv;
            }
        }
    }

    /// Adds `c * x x^T`.
    pub fn add_scaled_outer(&mut self, c: F, x: &[F]) {
        debug_assert_eq!(self.order, x.len());
        for (i, xi) in x.iter().enumerate() {
            let cxi = c * *xi;
            let row = &mut self.data[i * self.order..(i + 1) * self.order];
            for (cell, xj) in row.iter_mut().zip(x) {
                *cell += cxi * *xj;
            }
        }
    }

    pub fn matvec(&self, w: &[F]) -> Vec<F> {
        debug_assert_eq!(self.order, w.len());
        (0..self.order)
            .map(|i| {
                let row = &self.data[i * self.order..(i + 1) * self.order];
                row.iter().zip(w).map(|(a, b)| *a * *b).sum()
            })
            .collect()
    }

    pub fn trace(&self) -> F {
        (0..self.order).map(|i| self.at(i, i)).sum()
    }

    pub fn frob_norm(&self) -> F {
        self.data.iter().map(|v| *v * *v).sum::<F>().sqrt()
    }

    fn off_diag_norm(&self) -> F {
        let mut acc = F::zero();
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                let v = self.at(i, j);
                acc += v * v;
            }
        }
        (acc + acc).sqrt()
    }
}

/// Full eigendecomposition; `values` are sorted in descending order and
/// `vectors[k]` is the unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomp<F> {
    pub values: Vec<F>,
    pub vectors: Vec<Vec<F>>,
}

/// Cyclic Jacobi eigendecomposition.
///
/// Rotates away every off-diagonal entry per sweep; converges quadratically
/// for symmetric input. Deterministic: the sweep order is fixed. Errors if
/// the off-diagonal norm has not dropped below `n * eps * ||A||_F` after
/// `max_sweeps` sweeps (30 is far more than any symmetric matrix needs).
pub fn jacobi_eigen<F: Scalar>(a: &DenseSym<F>, max_sweeps: usize) -> Result<EigenDecomp<F>> {
    let n = a.order();
    if n == 0 {
        return Ok(EigenDecomp {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let mut m = a.clone();
    // Eigenvector accumulator, column k = eigenvector k.
    let mut v = DenseSym::zeros(n);
    for i in 0..n {
        v.data[i * n + i] = F::one();
    }
    let scale = a.frob_norm().max(F::min_positive_value());
    let tol = F::c(n as f64) * F::epsilon() * scale;

    let mut converged = false;
    for _ in 0..max_sweeps {
        if m.off_diag_norm() <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if apq.abs() <= F::epsilon() * scale {
                    continue;
                }
                let app = m.at(p, p);
                let aqq = m.at(q, q);
                let tau = (aqq - app) / (F::c(2.0) * apq);
                let t = {
                    let s = if tau >= F::zero() { F::one() } else { -F::one() };
                    s / (tau.abs() + (F::one() + tau * tau).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;

                // Rotate rows/columns p and q of m.
                for k in 0..n {
                    let mkp = m.at(k, p);
                    let mkq = m.at(k, q);
                    if k != p && k != q {
                        m.set(k, p, c * mkp - s * mkq);
                        m.set(k, q, s * mkp + c * mkq);
                    }
                }
                let new_pp = app - t * apq;
                let new_qq = aqq + t * apq;
                m.data[p * n + p] = new_pp;
                m.data[q * n + q] = new_qq;
                m.set(p, q, F::zero());

                // Rotate eigenvector columns p and q.
                for k in 0..n {
                    let vkp = v.data[k * n + p];
                    let vkq = v.data[k * n + q];
                    v.data[k * n + p] = c * vkp - s * vkq;
                    v.data[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && m.off_diag_norm() > tol {
        return Err(Error::JacobiNoConvergence {
            off_diagonal: m.off_diag_norm().as_f64(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.at(j, j)
            .partial_cmp(&m.at(i, i))
            .expect("eigenvalues are finite")
    });
    let values = order.iter().map(|&k| m.at(k, k)).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v.data[i * n + k]).collect())
        .collect();
    Ok(EigenDecomp { values, vectors })
}

/// Output of [`pivoted_cholesky`]: `X ~= sum_j col_j col_j^T` with
/// `rank = cols.len()` columns in original index space.
#[derive(Debug, Clone)]
pub struct CholeskyFactors<F> {
    pub cols: Vec<Vec<F>>,
}

impl<F: Scalar> CholeskyFactors<F> {
    pub fn rank(&self) -> usize {
        self.cols.len()
    }
}

/// Diagonal-pivoted Cholesky factorization of a positive semidefinite
/// matrix.
///
/// Pivots on the largest remaining diagonal entry and stops when it falls
/// below `breakdown_rel * max_initial_diagonal` (rank detection). Errors
/// with [`Error::NotPsd`] if a remaining diagonal entry is negative beyond
/// tolerance, which a psd matrix cannot produce.
pub fn pivoted_cholesky<F: Scalar>(
    a: &DenseSym<F>,
    breakdown_rel: F,
) -> Result<CholeskyFactors<F>> {
    let n = a.order();
    let mut r = a.clone();
    let max_diag0 = (0..n)
        .map(|i| r.at(i, i))
        .fold(F::zero(), F::max)
        .max(F::min_positive_value());
    let stop = breakdown_rel * max_diag0;
    let neg_tol = F::c(1e-8) * max_diag0;

    let mut active = vec![true; n];
    let mut cols = Vec::new();
    for _ in 0..n {
        let mut best = None;
        let mut best_val = F::neg_infinity();
        for (i, live) in active.iter().enumerate() {
            if *live && r.at(i, i) > best_val {
                best_val = r.at(i, i);
                best = Some(i);
            }
        }
        let j = match best {
            Some(j) => j,
            None => break,
        };
        if best_val <= stop {
            for (i, live) in active.iter().enumerate() {
                if *live && r.at(i, i) < -neg_tol {
                    return Err(Error::NotPsd {
                        eigenvalue: r.at(i, i).as_f64(),
                    });
                }
            }
            break;
        }
        let root = best_val.sqrt();
        let col: Vec<F> = (0..n)
            .map(|i| if active[i] { r.at(i, j) / root } else { F::zero() })
            .collect();
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for k in 0..n {
                if active[k] {
                    let upd = r.at(i, k) - col[i] * col[k];
                    r.data[i * n + k] = upd;
                }
            }
        }
        active[j] = false;
        for k in 0..n {
            r.data[j * n + k] = F::zero();
            r.data[k * n + j] = F::zero();
        }
        cols.push(col);
    }
    Ok(CholeskyFactors { cols })
}
