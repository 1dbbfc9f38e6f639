//! Largest-algebraic-eigenvalue computation by shifted power iteration.
//!
//! The operator is supplied as a closure, so composites like
//! `sum_k c_k A_k` never get materialized. Power iteration tracks the
//! dominant eigenvalue by magnitude; adding `shift * I` with a shift at
//! least the spectral radius makes the operator positive semidefinite, so
//! the dominant eigenvalue of the shifted operator is the largest algebraic
//! one of the original. Callers pass a Gershgorin bound as the shift.
//!
//! The iteration is deterministic: the start vector comes from a seeded
//! stream (optionally mixed with a warm-start direction) and every reduction
//! runs in a fixed order.

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

use super::vec;
use super::SymMatrix;

/// Approximate eigenpair. `residual_norm` is `||A v - lambda v||` for the
/// returned unit vector `v`, so `lambda` is within `residual_norm` of a true
/// eigenvalue.
#[derive(Debug, Clone)]
pub struct EigPair<F> {
    pub lambda: F,
    pub vector: Vec<F>,
    pub residual_norm: F,
}

/// How a power run ended.
#[derive(Debug, Clone)]
pub enum PowerOutcome<F> {
    /// Residual criterion `residual <= tol * max(1, |lambda|)` met.
    Converged { pair: EigPair<F>, iterations: usize },
    /// The caller's early-stop predicate fired before convergence; `lambda`
    /// is the current Rayleigh quotient, a lower bound up to the (possibly
    /// large) residual.
    EarlyStopped { pair: EigPair<F>, iterations: usize },
    /// The iteration budget ran out; `pair` is the lowest-residual estimate
    /// seen. Typical when the top eigenvalues cluster tighter than the
    /// tolerance: the vector is then a valid near-eigenvector of the whole
    /// cluster and `lambda` is within `residual_norm` of its edge, but
    /// nothing is certified to `tol`.
    Stalled { pair: EigPair<F>, iterations: usize },
}

impl<F> PowerOutcome<F> {
    pub fn pair(&self) -> &EigPair<F> {
        match self {
            PowerOutcome::Converged { pair, .. }
            | PowerOutcome::EarlyStopped { pair, .. }
            | PowerOutcome::Stalled { pair, .. } => pair,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            PowerOutcome::Converged { iterations, .. }
            | PowerOutcome::EarlyStopped { iterations, .. }
            | PowerOutcome::Stalled { iterations, .. } => *iterations,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, PowerOutcome::Converged { .. })
    }
}

/// Parameters for [`max_eig_op`].
#[derive(Debug, Clone)]
pub struct PowerConfig<F> {
    /// Relative residual tolerance: converged when
    /// `residual <= tol * max(1, |lambda|)`.
    pub tol: F,
    /// Iteration cap; exhausting it ends the run as `Stalled` with the best
    /// estimate.
    pub max_iters: usize,
    /// Spectral shift, at least the spectral radius of the operator.
    pub shift: F,
    /// Seed for the start vector.
    pub seed: u64,
    /// Optional previous eigenvector. It is mixed with a small seeded
    /// perturbation so a stale direction exactly orthogonal to the new top
    /// eigenspace cannot pin the iteration.
    pub warm_start: Option<Vec<F>>,
}

impl<F: Scalar> PowerConfig<F> {
    /// Defaults for an operator of the given order: `tol = 1e-8`,
    /// `max_iters = 10 n + 1000`.
    pub fn for_order(n: usize, shift: F) -> Self {
        PowerConfig {
            tol: F::c(1e-8),
            max_iters: 10 * n + 1000,
            shift,
            seed: 0,
            warm_start: None,
        }
    }
}

/// Type helper: the `None` early-stop argument for [`max_eig_op`].
pub fn no_early_stop<F>() -> Option<fn(F, F) -> bool> {
    None
}

/// Runs shifted power iteration on the operator `op` (which must overwrite
/// its output slice with `A w`).
///
/// The optional `early_stop` predicate sees `(rayleigh, residual)` once per
/// iteration and may end the run before the residual criterion is met;
/// membership pivoting uses this to stop as soon as the Rayleigh quotient
/// clears a threshold. Convergence is checked first, so a converged run is
/// always reported as such.
pub fn max_eig_op<F, Op, Stop>(
    op: Op,
    n: usize,
    cfg: &PowerConfig<F>,
    mut early_stop: Option<Stop>,
) -> Result<PowerOutcome<F>>
where
    F: Scalar,
    Op: Fn(&[F], &mut [F]),
    Stop: FnMut(F, F) -> bool,
{
    if n == 0 {
        return Err(Error::InvalidConfig(
            "power iteration needs an operator of positive order".into(),
        ));
    }
    if !(cfg.tol > F::zero()) || !cfg.shift.is_finite() || cfg.shift < F::zero() {
        return Err(Error::InvalidConfig(
            "power iteration needs tol > 0 and a finite nonnegative shift".into(),
        ));
    }
    if cfg.max_iters == 0 {
        return Err(Error::InvalidConfig(
            "power iteration needs max_iters >= 1".into(),
        ));
    }

    let mut u = start_vector(n, cfg);
    let mut au = vec![F::zero(); n];
    let mut best: Option<EigPair<F>> = None;

    for it in 1..=cfg.max_iters {
        op(&u, &mut au);
        let lambda = vec::dot(&u, &au);
        let mut res_sq = F::zero();
        for i in 0..n {
            let d = au[i] - lambda * u[i];
            res_sq += d * d;
        }
        let residual = res_sq.sqrt();
        if best.as_ref().map_or(true, |p| residual < p.residual_norm) {
            best = Some(EigPair {
                lambda,
                vector: u.clone(),
                residual_norm: residual,
            });
        }
        let pair = |u: &Vec<F>| EigPair {
            lambda,
            vector: u.clone(),
            residual_norm: residual,
        };
        if residual <= cfg.tol * F::one().max(lambda.abs()) {
            return Ok(PowerOutcome::Converged {
                pair: pair(&u),
                iterations: it,
            });
        }
        if let Some(stop) = early_stop.as_mut() {
            if stop(lambda, residual) {
                return Ok(PowerOutcome::EarlyStopped {
                    pair: pair(&u),
                    iterations: it,
                });
            }
        }
        // Advance: u <- normalize((A + shift I) u).
        for i in 0..n {
            au[i] += cfg.shift * u[i];
        }
        let nw = vec::norm(&au);
        if nw <= F::min_positive_value() {
            // u is (numerically) in the kernel of the shifted operator, an
            // exact eigenvector; the residual check above would have caught
            // it unless cancellation dominates, in which case the estimate
            // cannot improve.
            return Ok(PowerOutcome::Converged {
                pair: pair(&u),
                iterations: it,
            });
        }
        for i in 0..n {
            u[i] = au[i] / nw;
        }
    }

    let pair = best.expect("max_iters >= 1 guarantees at least one estimate");
    Ok(PowerOutcome::Stalled {
        pair,
        iterations: cfg.max_iters,
    })
}

fn start_vector<F: Scalar>(n: usize, cfg: &PowerConfig<F>) -> Vec<F> {
    let random: Vec<F> = rng::unit_vector(n, cfg.seed);
    if let Some(warm) = &cfg.warm_start {
        if warm.len() == n {
            let wn = vec::norm(warm);
            if wn > F::c(1e-12) && wn.is_finite() {
                let mut mixed: Vec<F> = warm
                    .iter()
                    .zip(&random)
                    .map(|(w, r)| F::c(0.95) * *w / wn + F::c(0.05) * *r)
                    .collect();
                if vec::normalize(&mut mixed) > F::c(1e-6) {
                    return mixed;
                }
            }
        }
    }
    random
}

/// Best-effort spectral norm estimate `max(lambda_max(A), lambda_max(-A))`
/// via two power runs, each reporting its Rayleigh estimate plus residual.
///
/// The iteration needs about `ln(1/tol) / gap` steps for a relative gap
/// between the top two shifted eigenvalues, so the budget scales with the
/// requested accuracy. When the extreme eigenvalues cluster tighter than
/// any budget can separate, the run stalls with its residual at the cluster
/// width; the estimate plus that residual still tracks the norm, so a stall
/// degrades accuracy instead of failing. Callers needing a certified bound
/// should use the Gershgorin bound instead.
pub fn spectral_norm<F: Scalar>(m: &SymMatrix<F>, tol: F, seed: u64) -> Result<F> {
    if m.order() == 0 || m.is_zero() {
        return Ok(F::zero());
    }
    let shift = m.gershgorin_bound();
    let digits = -(tol.as_f64().log10().clamp(-16.0, 0.0));
    let max_iters = 10 * m.order() + 2_000 * (digits.ceil() as usize + 1);
    let run = |negate: bool, seed: u64| -> Result<F> {
        let cfg = PowerConfig {
            tol,
            max_iters,
            shift,
            seed,
            warm_start: None,
        };
        let out = max_eig_op(
            |w, out| {
                out.fill(F::zero());
                let c = if negate { -F::one() } else { F::one() };
                m.matvec_acc(c, w, out);
            },
            m.order(),
            &cfg,
            no_early_stop::<F>(),
        )?;
        let p = out.pair();
        Ok(p.lambda + p.residual_norm)
    };
    let up = run(false, seed)?;
    let down = run(true, seed.wrapping_add(1))?;
    Ok(up.max(down))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{jacobi_eigen, DenseSym};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn power(m: &SymMatrix<f64>, seed: u64) -> PowerOutcome<f64> {
        m.max_eig(1e-10, 100_000, seed).unwrap()
    }

    #[test]
    fn finds_largest_eigenvalue_of_analytic_2x2() {
        // [[2,1],[1,2]]: eigenvalues 3 and 1.
        let m = SymMatrix::from_triplets(2, vec![(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        let out = power(&m, 7);
        assert!(out.is_converged());
        assert_abs_diff_eq!(out.pair().lambda, 3.0, epsilon = 1e-8);
        let v = &out.pair().vector;
        assert_abs_diff_eq!(v[0].abs(), v[1].abs(), epsilon = 1e-6);
    }

    #[test]
    fn tracks_algebraic_not_magnitude_order() {
        // diag(-5, -1): the magnitude-dominant eigenvalue is -5, the
        // algebraically largest is -1. The shift must pick -1.
        let m = SymMatrix::diagonal(&[-5.0, -1.0]);
        let out = power(&m, 3);
        assert_abs_diff_eq!(out.pair().lambda, -1.0, epsilon = 1e-8);
    }

    #[test]
    fn residual_is_honest() {
        let m =
            SymMatrix::from_triplets(3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, -1.0), (2, 2, 0.5)])
                .unwrap();
        let out = power(&m, 11);
        let pair = out.pair();
        let av = m.matvec(&pair.vector).unwrap();
        let mut res = 0.0;
        for i in 0..3 {
            let d = av[i] - pair.lambda * pair.vector[i];
            res += d * d;
        }
        assert_abs_diff_eq!(res.sqrt(), pair.residual_norm, epsilon = 1e-12);
        assert!(pair.residual_norm <= 1e-10 * pair.lambda.abs().max(1.0));
    }

    #[test]
    fn early_stop_fires_before_convergence() {
        let m = SymMatrix::from_triplets(2, vec![(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        let cfg = PowerConfig {
            tol: 1e-14,
            ..PowerConfig::for_order(2, m.gershgorin_bound())
        };
        let out = max_eig_op(
            |w, out| {
                out.fill(0.0);
                m.matvec_acc(1.0, w, out);
            },
            2,
            &cfg,
            Some(|lambda: f64, _res: f64| lambda >= 1.5),
        )
        .unwrap();
        match out {
            PowerOutcome::EarlyStopped { pair, .. } => assert!(pair.lambda >= 1.5),
            PowerOutcome::Converged { pair, .. } => {
                // Permitted only if convergence genuinely beat the predicate.
                assert!(pair.residual_norm <= 1e-14 * pair.lambda.abs().max(1.0));
            }
            PowerOutcome::Stalled { .. } => {
                panic!("predicate at 1.5 < lambda_max = 3 must fire before the budget")
            }
        }
    }

    #[test]
    fn warm_start_cuts_iterations() {
        let m = SymMatrix::from_triplets(
            4,
            vec![(0, 0, 3.0), (0, 1, 1.0), (1, 1, 2.5), (2, 2, 1.0), (2, 3, 0.3), (3, 3, 0.5)],
        )
        .unwrap();
        let cold = power(&m, 5);
        let cfg = PowerConfig {
            tol: 1e-10,
            warm_start: Some(cold.pair().vector.clone()),
            ..PowerConfig::for_order(4, m.gershgorin_bound())
        };
        let warm = max_eig_op(
            |w, out| {
                out.fill(0.0);
                m.matvec_acc(1.0, w, out);
            },
            4,
            &cfg,
            no_early_stop::<f64>(),
        )
        .unwrap();
        assert!(warm.iterations() < cold.iterations());
        assert_abs_diff_eq!(warm.pair().lambda, cold.pair().lambda, epsilon = 1e-8);
    }

    #[test]
    fn iteration_cap_errors_with_best_estimate() {
        let m = SymMatrix::from_triplets(2, vec![(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        let err = m.max_eig(1e-12, 1, 99).unwrap_err();
        match err {
            Error::PowerNoConvergence { iters, best_lambda, .. } => {
                assert_eq!(iters, 1);
                assert!(best_lambda.is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn spectral_norm_of_negative_definite() {
        let m = SymMatrix::diagonal(&[-4.0, -1.0]);
        assert_abs_diff_eq!(m.spectral_norm(1e-10, 0).unwrap(), 4.0, epsilon = 1e-7);
    }

    #[test]
    fn spectral_norm_of_zero_matrix() {
        let m = SymMatrix::<f64>::zero(3);
        assert_eq!(m.spectral_norm(1e-10, 0).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_across_runs() {
        let m = SymMatrix::from_triplets(3, vec![(0, 1, 1.0), (1, 2, -2.0), (0, 0, 0.5)]).unwrap();
        let a = power(&m, 17);
        let b = power(&m, 17);
        assert_eq!(a.pair().lambda, b.pair().lambda);
        assert_eq!(a.pair().vector, b.pair().vector);
        assert_eq!(a.iterations(), b.iterations());
    }

    proptest! {
        #[test]
        fn agrees_with_jacobi(vals in proptest::collection::vec(-3.0f64..3.0, 15), seed in 0u64..50) {
            // Random symmetric 5x5.
            let mut trip = Vec::new();
            let mut k = 0;
            for i in 0..5 {
                for j in i..5 {
                    trip.push((i, j, vals[k]));
                    k += 1;
                }
            }
            let m = SymMatrix::from_triplets(5, trip).unwrap();
            // A stalled run means the top eigenvalues cluster at the
            // residual's width, which widens the agreement bound.
            let (lambda, resid) = match m.max_eig(1e-9, 200_000, seed) {
                Ok(out) => {
                    let p = out.pair();
                    (p.lambda, p.residual_norm)
                }
                Err(Error::PowerNoConvergence { best_lambda, residual, .. }) => {
                    (best_lambda, residual)
                }
                Err(e) => panic!("unexpected eigensolver error: {e}"),
            };
            let dense = jacobi_eigen(&DenseSym::from_sym(&m), 40).unwrap();
            prop_assert!((lambda - dense.values[0]).abs() < 1e-6 + 2.0 * resid);
        }

        #[test]
        fn spectral_norm_bounds_rayleigh(vals in proptest::collection::vec(-3.0f64..3.0, 10), seed in 0u64..50) {
            let mut trip = Vec::new();
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    trip.push((i, j, vals[k]));
                    k += 1;
                }
            }
            let m = SymMatrix::from_triplets(4, trip).unwrap();
            let norm = m.spectral_norm(1e-9, 1).unwrap();
            let x: Vec<f64> = crate::rng::unit_vector(4, seed);
            prop_assert!(m.quad_form(&x).unwrap().abs() <= norm + 1e-6);
        }
    }
}
