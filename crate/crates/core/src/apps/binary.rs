//! Binary quadratic feasibility and hyperplane rounding.
//!
//! Whether some spin vector `x` in `{-1, +1}^n` attains `x^T A x = alpha`
//! relaxes to hull membership: the spin constraints become `x_i^2 = 1`, the
//! value becomes one more equation, and the ball radius is `sqrt(n)`. A
//! separating witness for the relaxation refutes every spin vector; a hull
//! certificate is a moment matrix with unit diagonal, which hyperplane
//! rounding turns into candidate spin vectors.

use crate::chr::{ConvexCertificate, QuadraticSystem};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::rng;
use crate::scalar::Scalar;
use crate::solver::{solve_feasibility, SolveConfig, SolveOutcome, SolveReport};

/// The spin constraints alone: `x_i^2 = 1` for every coordinate.
pub fn spin_system<F: Scalar>(n: usize) -> Result<QuadraticSystem<F>> {
    let quad = (0..n)
        .map(|i| SymMatrix::from_triplets(n, vec![(i, i, F::one())]))
        .collect::<Result<_>>()?;
    QuadraticSystem::homogeneous(quad, vec![F::one(); n])
}

/// The relaxation of `x^T A x = alpha, x in {-1, +1}^n`: the value
/// equation first, then one unit equation per spin.
pub fn binary_feas_system<F: Scalar>(a: &SymMatrix<F>, alpha: F) -> Result<QuadraticSystem<F>> {
    let n = a.order();
    if !alpha.is_finite() {
        return Err(Error::InvalidConfig("target value must be finite".into()));
    }
    let mut quad = Vec::with_capacity(n + 1);
    quad.push(a.clone());
    let mut rhs = Vec::with_capacity(n + 1);
    rhs.push(alpha);
    for i in 0..n {
        quad.push(SymMatrix::from_triplets(n, vec![(i, i, F::one())])?);
        rhs.push(F::one());
    }
    QuadraticSystem::homogeneous(quad, rhs)
}

/// Ball radius used for spin relaxations.
///
/// Every spin vector has norm `sqrt(n)`, and the unit equations pin the
/// relaxation trace at `n`, so any radius at or above `sqrt(n)` decides the
/// same problem. The padding moves relaxation targets off the hull's trace
/// facet, where convergence would degrade to a sublinear rate, into the
/// interior, where it is linear.
pub fn spin_radius<F: Scalar>(n: usize) -> F {
    F::c(1.25 * n as f64 + 1.0).sqrt()
}

/// Best spin vector found by random hyperplane rounding.
#[derive(Debug, Clone)]
pub struct GwRounding<F> {
    /// Entries are `+1` or `-1`.
    pub assignment: Vec<i8>,
    /// Score of the best trial under the caller's objective.
    pub score: F,
    /// Index of the winning trial (lowest index on ties).
    pub trial: usize,
    pub trials: usize,
}

/// Rounds a hull certificate to spin vectors by random hyperplanes and
/// keeps the best under `score`.
///
/// The certificate's weighted points factor the moment matrix: vertex `i`
/// gets the vector of its coordinates across points, scaled by the square
/// roots of the weights. Each trial draws a Gaussian direction, assigns
/// every vertex the sign of its inner product (zero rounds to `+1`), and
/// scores the assignment. Trials are seeded per index, so results are
/// reproducible and independent of trial order.
pub fn gw_round<F: Scalar, S: Fn(&[i8]) -> F>(
    cert: &ConvexCertificate<F>,
    n: usize,
    trials: usize,
    seed: u64,
    score: S,
) -> Result<GwRounding<F>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("rounding needs at least one trial".into()));
    }
    if cert.is_empty() || cert.points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            context: "rounding certificate",
            expected: n,
            got: cert.points.first().map_or(0, |p| p.len()),
        });
    }
    let t = cert.len();
    // vertex_vectors[i][j] = sqrt(w_j) * p_j[i]
    let mut vertex_vectors = vec![vec![F::zero(); t]; n];
    for (j, (w, p)) in cert.weights.iter().zip(&cert.points).enumerate() {
        let root = w.max(F::zero()).sqrt();
        for i in 0..n {
            vertex_vectors[i][j] = root * p[i];
        }
    }

    let mut best: Option<GwRounding<F>> = None;
    for trial in 0..trials {
        let g: Vec<F> = rng::normal_vector(t, rng::child_seed(seed, trial as u64));
        let assignment: Vec<i8> = vertex_vectors
            .iter()
            .map(|v| {
                let dot = crate::linalg::vec::dot(v, &g);
                if dot < F::zero() {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let s = score(&assignment);
        let better = best.as_ref().map_or(true, |b| s > b.score);
        if better {
            best = Some(GwRounding {
                assignment,
                score: s,
                trial,
                trials,
            });
        }
    }
    Ok(best.expect("at least one trial ran"))
}

/// Outcome of the spin-feasibility relaxation, plus rounded candidates
/// when the relaxation holds.
#[derive(Debug, Clone)]
pub struct BinaryReport<F> {
    pub solve: SolveReport<F>,
    /// Present on a feasible relaxation: the rounding closest to the
    /// target value (score is minus the absolute value error).
    pub rounded: Option<GwRounding<F>>,
}

/// Decides the spin relaxation of `x^T A x = alpha` and rounds on success.
///
/// An infeasible relaxation certifies that no spin vector attains `alpha`;
/// a feasible one is necessary but not sufficient, so the report carries
/// the best rounded candidate for the caller to inspect.
pub fn binary_feasibility<F: Scalar>(
    a: &SymMatrix<F>,
    alpha: F,
    trials: usize,
    cfg: &SolveConfig<F>,
) -> Result<BinaryReport<F>> {
    let n = a.order();
    let sys = binary_feas_system(a, alpha)?;
    let cfg = SolveConfig {
        schedule: crate::solver::RadiusSchedule::Fixed(spin_radius::<F>(n)),
        ..cfg.clone()
    };
    let solve = solve_feasibility(&sys, &cfg)?;
    let rounded = match &solve.outcome {
        SolveOutcome::Feasible { cert, .. } => Some(gw_round(
            cert,
            n,
            trials,
            cfg.seed ^ 0x62_69_6e,
            |assignment| {
                let mut x = vec![F::zero(); n];
                for (xi, s) in x.iter_mut().zip(assignment) {
                    *xi = F::c(*s as f64);
                }
                let value = a.quad_form(&x).unwrap_or(F::nan());
                -(value - alpha).abs()
            },
        )?),
        _ => None,
    };
    Ok(BinaryReport { solve, rounded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveOutcome;
    use approx::assert_abs_diff_eq;

    /// 2x2 with x^T A x = 2 x_1 x_2 on spins: attainable values {-2, 2}.
    fn pair_coupling() -> SymMatrix<f64> {
        SymMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn relaxation_system_has_value_then_spin_equations() {
        let sys = binary_feas_system(&pair_coupling(), 2.0).unwrap();
        assert_eq!(sys.m(), 3);
        assert_eq!(sys.rhs(), &[2.0, 1.0, 1.0]);
        assert!(sys.is_homogeneous());
        // The planted assignment (1, 1) satisfies every equation.
        assert_eq!(sys.eval_q(&[1.0, 1.0]).unwrap(), vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn attainable_value_rounds_to_an_exact_spin_vector() {
        let report =
            binary_feasibility(&pair_coupling(), 2.0, 16, &SolveConfig::default()).unwrap();
        assert!(matches!(report.solve.outcome, SolveOutcome::Feasible { .. }));
        let rounded = report.rounded.expect("feasible relaxation rounds");
        // Score is minus the value error; 2 is attainable exactly.
        assert_abs_diff_eq!(rounded.score, 0.0, epsilon = 1e-9);
        assert_eq!(rounded.assignment[0], rounded.assignment[1]);
    }

    #[test]
    fn unattainable_value_is_refuted_by_witness() {
        // On spins, 2 x_1 x_2 never reaches 3; the relaxation cap is
        // x_1 x_2 <= 1 from the unit diagonal, so a witness exists.
        let report =
            binary_feasibility(&pair_coupling(), 3.0, 4, &SolveConfig::default()).unwrap();
        match &report.solve.outcome {
            SolveOutcome::Infeasible { witness } => {
                let sys = binary_feas_system(&pair_coupling(), 3.0).unwrap();
                crate::solver::verify_witness(&sys, witness, 1e-10, 5, 128).unwrap();
            }
            other => panic!("expected a refutation, got {other:?}"),
        }
        assert!(report.rounded.is_none());
    }

    #[test]
    fn rounding_prefers_better_scores_and_low_trial_indices() {
        // A rank-one certificate at the planted spin vector: every trial
        // rounds to (+1,+1) or (-1,-1); scores tie at zero, so the first
        // trial wins.
        let cert = ConvexCertificate {
            radius: 2.0f64.sqrt(),
            weights: vec![1.0],
            points: vec![vec![1.0, 1.0]],
        };
        let a = pair_coupling();
        let rounding = gw_round(&cert, 2, 8, 3, |assignment| {
            let x: Vec<f64> = assignment.iter().map(|s| *s as f64).collect();
            -(a.quad_form(&x).unwrap() - 2.0).abs()
        })
        .unwrap();
        assert_eq!(rounding.trial, 0);
        assert_eq!(rounding.score, 0.0);
        assert_eq!(rounding.trials, 8);
    }

    #[test]
    fn rounding_rejects_mismatched_certificates() {
        let cert = ConvexCertificate {
            radius: 1.0,
            weights: vec![1.0],
            points: vec![vec![1.0, 1.0]],
        };
        assert!(gw_round(&cert, 3, 4, 0, |_: &[i8]| 0.0f64).is_err());
        assert!(gw_round(&cert, 2, 0, 0, |_: &[i8]| 0.0f64).is_err());
    }
}
