//! Sparse symmetric matrices and the eigenvalue/factorization kernels on
//! them.
//!
//! [`SymMatrix`] stores the upper triangle in coordinate form, sorted and
//! duplicate-free, so every traversal is in a fixed order and results are
//! reproducible. Dense counterparts live in [`dense`] and back the small
//! exact paths (Jacobi eigendecomposition, pivoted Cholesky); the
//! matrix-free extremal-eigenvalue path lives in [`power`].

pub mod decomp;
pub mod dense;
pub mod power;
pub mod vec;

pub use decomp::{psd_rank_one_decomp, DecompMode, RankOneDecomp};
pub use dense::{jacobi_eigen, pivoted_cholesky, CholeskyFactors, DenseSym, EigenDecomp};
pub use power::{max_eig_op, spectral_norm, EigPair, PowerConfig, PowerOutcome};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse symmetric matrix holding the upper triangle (`row <= col`) in
/// coordinate form.
///
/// Entries are sorted lexicographically by `(row, col)`, contain no
/// duplicates, and every stored value is finite. All traversals run in
/// storage order, so products and reductions are bitwise reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<F> {
    order: usize,
    entries: Vec<(usize, usize, F)>,
}

impl<F: Scalar> SymMatrix<F> {
    /// The zero matrix of the given order.
    pub fn zero(order: usize) -> Self {
        SymMatrix {
            order,
            entries: Vec::new(),
        }
    }

    /// The identity matrix of the given order.
    pub fn identity(order: usize) -> Self {
        SymMatrix {
            order,
            entries: (0..order).map(|i| (i, i, F::one())).collect(),
        }
    }

    /// Diagonal matrix from `d`; exact zeros are not stored.
    pub fn diagonal(d: &[F]) -> Self {
        SymMatrix {
            order: d.len(),
            entries: d
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != F::zero())
                .map(|(i, v)| (i, i, *v))
                .collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Lower-triangle coordinates are mirrored to the upper triangle.
    /// Errors on out-of-range indices, non-finite values, and coordinates
    /// that repeat after mirroring.
    pub fn from_triplets<I>(order: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, F)>,
    {
        let mut entries: Vec<(usize, usize, F)> = Vec::new();
        for (r, c, v) in triplets {
            let (i, j) = if r <= c { (r, c) } else { (c, r) };
            if j >= order {
                return Err(Error::InvalidEntry {
                    row: r,
                    col: c,
                    reason: "index out of range",
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidEntry {
                    row: r,
                    col: c,
                    reason: "value is not finite",
                });
            }
            entries.push((i, j, v));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidEntry {
                    row: w[1].0,
                    col: w[1].1,
                    reason: "duplicate coordinate",
                });
            }
        }
        Ok(SymMatrix { order, entries })
    }

    /// Reads the upper triangle of a dense symmetric matrix; exact zeros are
    /// not stored.
    pub fn from_dense(d: &dense::DenseSym<F>) -> Self {
        let n = d.order();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = d.at(i, j);
                if v != F::zero() {
                    entries.push((i, j, v));
                }
            }
        }
        SymMatrix { order: n, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored (upper-triangle) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Stored entries, sorted by `(row, col)` with `row <= col`.
    pub fn entries(&self) -> &[(usize, usize, F)] {
        &self.entries
    }

    /// True when no stored entry is nonzero.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.2 == F::zero())
    }

    /// Value at `(i, j)`, honoring symmetry.
    pub fn get(&self, i: usize, j: usize) -> F {
        let key = if i <= j { (i, j) } else { (j, i) };
        match self
            .entries
            .binary_search_by_key(&key, |e| (e.0, e.1))
        {
            Ok(pos) => self.entries[pos].2,
            Err(_) => F::zero(),
        }
    }

    pub fn trace(&self) -> F {
        self.entries
            .iter()
            .filter(|(i, j, _)| i == j)
            .map(|e| e.2)
            .sum()
    }

    /// Frobenius norm; off-diagonal entries count twice.
    pub fn frob_norm(&self) -> F {
        let two = F::c(2.0);
        self.entries
            .iter()
            .map(|(i, j, v)| {
                let w = if i == j { F::one() } else { two };
                w * *v * *v
            })
            .sum::<F>()
            .sqrt()
    }

    /// Frobenius inner product `<A, B> = sum_ij A_ij B_ij`.
    ///
    /// Both triangles contribute, so shared off-diagonal entries count
    /// twice. Runs as a merge over the two sorted entry lists.
    pub fn frob_inner(&self, other: &Self) -> Result<F> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch {
                context: "frob_inner",
                expected: self.order,
                got: other.order,
            });
        }
        let two = F::c(2.0);
        let (a, b) = (&self.entries, &other.entries);
        let mut acc = F::zero();
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            let ka = (a[i].0, a[i].1);
            let kb = (b[j].0, b[j].1);
            match ka.cmp(&kb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = if ka.0 == ka.1 { F::one() } else { two };
                    acc += w * a[i].2 * b[j].2;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    /// `A w` as a new vector.
    pub fn matvec(&self, w: &[F]) -> Result<Vec<F>> {
        if w.len() != self.order {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.order,
                got: w.len(),
            });
        }
        let mut out = vec![F::zero(); self.order];
        self.matvec_acc(F::one(), w, &mut out);
        Ok(out)
    }

    /// `out += coeff * A w`, accumulating in storage order.
    pub fn matvec_acc(&self, coeff: F, w: &[F], out: &mut [F]) {
        debug_assert_eq!(w.len(), self.order);
        debug_assert_eq!(out.len(), self.order);
        if coeff == F::zero() {
            return;
        }
        for &(i, j, v) in &self.entries {
            let cv = coeff * v;
            out[i] += cv * w[j];
            if i != j {
                out[j] += cv * w[i];
            }
        }
    }

    /// Quadratic form `x^T A x`.
    pub fn quad_form(&self, x: &[F]) -> Result<F> {
        if x.len() != self.order {
            return Err(Error::DimensionMismatch {
                context: "quad_form",
                expected: self.order,
                got: x.len(),
            });
        }
        let two = F::c(2.0);
        let mut acc = F::zero();
        for &(i, j, v) in &self.entries {
            if i == j {
                acc += v * x[i] * x[i];
            } else {
                acc += two * v * x[i] * x[j];
            }
        }
        Ok(acc)
    }

    /// Gershgorin bound `max_i sum_j |A_ij|`, an upper bound on the spectral
    /// radius. Zero for an empty matrix.
    pub fn gershgorin_bound(&self) -> F {
        let mut rows = vec![F::zero(); self.order];
        for &(i, j, v) in &self.entries {
            let a = v.abs();
            rows[i] += a;
            if i != j {
                rows[j] += a;
            }
        }
        rows.into_iter().fold(F::zero(), F::max)
    }

    /// Returns `c * A`.
    pub fn scaled(&self, c: F) -> Self {
        SymMatrix {
            order: self.order,
            entries: self
                .entries
                .iter()
                .map(|&(i, j, v)| (i, j, c * v))
                .collect(),
        }
    }

    /// Largest algebraic eigenvalue by shifted power iteration; convenience
    /// wrapper over [`power::max_eig_op`] with the Gershgorin shift. A
    /// budget-exhausted run is reported as an error carrying the best
    /// estimate; callers wanting the stalled eigenpair itself should use
    /// [`power::max_eig_op`] directly.
    pub fn max_eig(&self, tol: F, max_iters: usize, seed: u64) -> Result<PowerOutcome<F>> {
        let cfg = PowerConfig {
            tol,
            max_iters,
            shift: self.gershgorin_bound(),
            seed,
            warm_start: None,
        };
        let out = power::max_eig_op(
            |w, out| {
                out.fill(F::zero());
                self.matvec_acc(F::one(), w, out);
            },
            self.order,
            &cfg,
            power::no_early_stop::<F>(),
        )?;
        if let PowerOutcome::Stalled { pair, iterations } = &out {
            return Err(crate::error::Error::PowerNoConvergence {
                iters: *iterations,
                best_lambda: pair.lambda.as_f64(),
                residual: pair.residual_norm.as_f64(),
            });
        }
        Ok(out)
    }

    /// Spectral norm `max(|lambda_max|, |lambda_min|)` by power iteration on
    /// the matrix and its negation.
    pub fn spectral_norm(&self, tol: F, seed: u64) -> Result<F> {
        power::spectral_norm(self, tol, seed)
    }
}
