//! Convex quadratically constrained quadratic programs.
//!
//! A convex objective with convex quadratic inequality constraints over an
//! explicit ball turns into an equality system by one slack variable per
//! constraint (`q_i(x) + s_i^2 = bound_i`, plus a slack for the ball
//! itself). Slack magnitudes are bounded a priori by trust-region minima
//! of each constraint, which sets the lifted ball radius; the objective is
//! then minimized (or maximized) over the lifted hull by level bisection.
//!
//! The certified level is a bound on the true optimum (the hull relaxes
//! the feasible set). A candidate solution is extracted from the
//! optimizing combination and reported only when it verifies as feasible.

use crate::apps::trs::solve_trs;
use crate::chr::QuadraticSystem;
use crate::error::{Error, Result};
use crate::linalg::vec;
use crate::linalg::{jacobi_eigen, DenseSym, SymMatrix};
use crate::scalar::Scalar;
use crate::solver::{
    solve_optimization, OptConfig, OptOutcome, OptReport, OptSense, QuadObjective, SolveOutcome,
};

/// One inequality `x^T quad x + linear^T x <= bound` with `quad` positive
/// semidefinite.
#[derive(Debug, Clone)]
pub struct QpConstraint<F> {
    pub quad: SymMatrix<F>,
    pub linear: Option<Vec<F>>,
    pub bound: F,
}

/// Convex program: minimize or maximize a convex quadratic subject to
/// convex quadratic inequalities on the ball `||x|| <= ball_radius`.
#[derive(Debug, Clone)]
pub struct ConvexQp<F> {
    pub objective: QuadObjective<F>,
    pub constraints: Vec<QpConstraint<F>>,
    pub ball_radius: F,
}

#[derive(Debug, Clone)]
pub enum QpOutcome<F> {
    Optimal {
        /// Certified bound on the true optimum (lower for minimize, upper
        /// for maximize), from the relaxation bracket.
        bound: F,
        /// Achieved relaxation level (within the bisection tolerance of
        /// the bound).
        level: F,
        /// A verified-feasible point, when one could be extracted from
        /// the optimizing combination, with its objective value.
        point: Option<Vec<F>>,
        point_value: Option<F>,
        opt: OptReport<F>,
    },
    /// Constraint `constraint` is unsatisfiable on the ball: its certified
    /// minimum already exceeds the bound.
    Infeasible {
        constraint: usize,
        min_value: F,
        bound: F,
    },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone)]
pub struct QpReport<F> {
    pub outcome: QpOutcome<F>,
    /// The slack-lifted equality system and objective the optimizer ran
    /// on, for independent re-verification of the embedded certificate.
    /// Absent when the program was refuted before lifting.
    pub lifted: Option<LiftedQp<F>>,
}

/// The equality form a convex program is solved in: one slack coordinate
/// per inequality plus one for the ball, objective mapped to the lifted
/// coordinates.
#[derive(Debug, Clone)]
pub struct LiftedQp<F> {
    pub system: QuadraticSystem<F>,
    pub objective: QuadObjective<F>,
}

/// Positive semidefiniteness check for the convexity contract; `index` 0
/// names the objective and `i + 1` names constraint `i`.
fn require_psd<F: Scalar>(m: &SymMatrix<F>, index: usize) -> Result<()> {
    if m.is_zero() {
        return Ok(());
    }
    let eig = jacobi_eigen(&DenseSym::from_sym(m), 60)?;
    let lambda_min = eig.values[m.order() - 1];
    let tol = F::c(1e-8) * (m.gershgorin_bound() + F::one());
    if lambda_min < -tol {
        return Err(Error::NotConvex {
            index,
            eigenvalue: lambda_min.as_f64(),
        });
    }
    Ok(())
}

pub fn solve_convex_qp<F: Scalar>(
    qp: &ConvexQp<F>,
    sense: OptSense,
    cfg: &OptConfig<F>,
) -> Result<QpReport<F>> {
    let n = qp.objective.quad.order();
    if !(qp.ball_radius > F::zero()) || !qp.ball_radius.is_finite() {
        return Err(Error::InvalidRadius(format!("ball radius {}", qp.ball_radius)));
    }
    // Convexity as stated: a maximized objective must be concave.
    match sense {
        OptSense::Minimize => require_psd(&qp.objective.quad, 0)?,
        OptSense::Maximize => require_psd(&qp.objective.quad.scaled(-F::one()), 0)?,
    }
    for (i, con) in qp.constraints.iter().enumerate() {
        if con.quad.order() != n {
            return Err(Error::DimensionMismatch {
                context: "constraint order",
                expected: n,
                got: con.quad.order(),
            });
        }
        if let Some(lin) = &con.linear {
            if lin.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "constraint linear term",
                    expected: n,
                    got: lin.len(),
                });
            }
        }
        require_psd(&con.quad, i + 1)?;
    }

    // Slack bounds from certified constraint minima over the ball.
    let k = qp.constraints.len();
    let mut slack_sq = Vec::with_capacity(k);
    for (i, con) in qp.constraints.iter().enumerate() {
        let lin = con
            .linear
            .clone()
            .unwrap_or_else(|| vec![F::zero(); n]);
        let trs = solve_trs(&con.quad, &lin, qp.ball_radius)?;
        let room = con.bound - trs.value;
        if room < -F::c(1e-10) * (F::one() + con.bound.abs()) {
            return Ok(QpReport {
                outcome: QpOutcome::Infeasible {
                    constraint: i,
                    min_value: trs.value,
                    bound: con.bound,
                },
                lifted: None,
            });
        }
        slack_sq.push(room.max(F::zero()));
    }

    // Lifted variables: x (0..n), the ball slack (n), one slack per
    // constraint (n + 1 + i).
    let big_n = n + 1 + k;
    let mut quads = Vec::with_capacity(k + 1);
    let mut linears = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);

    let ball_triplets: Vec<(usize, usize, F)> =
        (0..=n).map(|j| (j, j, F::one())).collect();
    quads.push(SymMatrix::from_triplets(big_n, ball_triplets)?);
    linears.push(vec![F::zero(); big_n]);
    rhs.push(qp.ball_radius * qp.ball_radius);

    for (i, con) in qp.constraints.iter().enumerate() {
        let mut triplets: Vec<(usize, usize, F)> = con.quad.entries().to_vec();
        triplets.push((n + 1 + i, n + 1 + i, F::one()));
        quads.push(SymMatrix::from_triplets(big_n, triplets)?);
        let mut lin = vec![F::zero(); big_n];
        if let Some(l) = &con.linear {
            lin[..n].copy_from_slice(l);
        }
        linears.push(lin);
        rhs.push(con.bound);
    }

    let any_linear = linears.iter().any(|l| l.iter().any(|v| *v != F::zero()));
    let lifted = QuadraticSystem::new(
        quads,
        if any_linear { Some(linears) } else { None },
        None,
        rhs,
    )?;

    let mut obj_lin = vec![F::zero(); big_n];
    if let Some(l) = &qp.objective.linear {
        if l.len() != n {
            return Err(Error::DimensionMismatch {
                context: "objective linear term",
                expected: n,
                got: l.len(),
            });
        }
        obj_lin[..n].copy_from_slice(l);
    }
    let lifted_obj = QuadObjective {
        quad: SymMatrix::from_triplets(big_n, qp.objective.quad.entries().to_vec())?,
        linear: if obj_lin.iter().any(|v| *v != F::zero()) {
            Some(obj_lin)
        } else {
            None
        },
        constant: qp.objective.constant,
    };

    // The ball equation pins the x-block trace at r^2 and the slack bounds
    // pin each slack diagonal, so every admissible relaxation point has the
    // same total trace regardless of the radius we pass in. Padding the
    // radius therefore cannot change any answer, but it moves the targets
    // off the trace facet of the hull, where convergence degrades from
    // linear to sublinear.
    let pinned_sq = qp.ball_radius * qp.ball_radius
        + slack_sq.iter().copied().fold(F::zero(), |a, b| a + b);
    let lifted_radius = (pinned_sq + (pinned_sq * F::c(0.25)).max(F::one())).sqrt();

    let opt = solve_optimization(&lifted_obj, &lifted, lifted_radius, sense, cfg)?;
    let lifted_out = LiftedQp {
        system: lifted,
        objective: lifted_obj,
    };
    let (level, bracket, solve) = match &opt.outcome {
        OptOutcome::Optimal {
            value,
            bracket,
            solve,
            ..
        } => (*value, *bracket, solve),
        OptOutcome::BaseInfeasible { .. } => {
            return Ok(QpReport {
                outcome: QpOutcome::Inconclusive {
                    reason: "lifted constraint system did not certify feasible; the slack \
                             bounds may be too tight numerically"
                        .into(),
                },
                lifted: Some(lifted_out),
            });
        }
        OptOutcome::Inconclusive { reason } => {
            return Ok(QpReport {
                outcome: QpOutcome::Inconclusive {
                    reason: reason.clone(),
                },
                lifted: Some(lifted_out),
            });
        }
    };

    // Candidate points: the moment matrix's unit-coordinate column and
    // each combination point, de-homogenized when needed.
    let mut candidates: Vec<Vec<F>> = Vec::new();
    if let SolveOutcome::Feasible { cert, .. } = &solve.outcome {
        // The lifted system gains one more variable when the optimizer
        // homogenizes linear terms away; the point dimension says whether
        // that happened, the report's own flag only covers its direct
        // input.
        let dim = cert.points.first().map_or(0, |p| p.len());
        if dim == big_n + 1 {
            let mut column = vec![F::zero(); n];
            for (w, p) in cert.weights.iter().zip(&cert.points) {
                let z = p[big_n];
                for (ci, pi) in column.iter_mut().zip(&p[..n]) {
                    *ci += *w * *pi * z;
                }
            }
            candidates.push(column);
            for p in &cert.points {
                let z = p[big_n];
                if z.abs() > F::c(1e-6) {
                    candidates.push(p[..n].iter().map(|v| *v / z).collect());
                }
            }
        } else if dim == big_n {
            let mut column = vec![F::zero(); n];
            for (w, p) in cert.weights.iter().zip(&cert.points) {
                for (ci, pi) in column.iter_mut().zip(&p[..n]) {
                    *ci += *w * *pi;
                }
            }
            candidates.push(column);
            for p in &cert.points {
                candidates.push(p[..n].to_vec());
            }
        }
    }

    // A certificate accurate to the probe tolerance can push a candidate a
    // whisker outside the ball; its radial projection is a legitimate extra
    // candidate. Projection only repairs, never asserts: every candidate
    // still has to pass the constraint checks below.
    let mut repairs: Vec<Vec<F>> = Vec::new();
    for cand in &candidates {
        let norm = vec::norm(cand);
        if norm.is_finite() && norm > qp.ball_radius {
            repairs.push(vec::scale(qp.ball_radius / norm, cand));
        }
    }
    candidates.extend(repairs);

    let feas_tol = F::c(1e-6) * (F::one() + qp.ball_radius);
    let objective_value = |x: &[F]| -> Result<F> {
        let mut v = qp.objective.quad.quad_form(x)? + qp.objective.constant;
        if let Some(l) = &qp.objective.linear {
            v += vec::dot(l, x);
        }
        Ok(v)
    };
    let mut point: Option<Vec<F>> = None;
    let mut point_value: Option<F> = None;
    for cand in candidates {
        if vec::norm(&cand) > qp.ball_radius + feas_tol {
            continue;
        }
        let mut feasible = true;
        for con in &qp.constraints {
            let mut q = con.quad.quad_form(&cand)?;
            if let Some(l) = &con.linear {
                q += vec::dot(l, &cand);
            }
            if q > con.bound + feas_tol * (F::one() + con.bound.abs()) {
                feasible = false;
                break;
            }
        }
        if !feasible {
            continue;
        }
        let v = objective_value(&cand)?;
        let better = match (sense, point_value) {
            (_, None) => true,
            (OptSense::Minimize, Some(best)) => v < best,
            (OptSense::Maximize, Some(best)) => v > best,
        };
        if better {
            point_value = Some(v);
            point = Some(cand);
        }
    }

    let bound = match sense {
        OptSense::Minimize => bracket.0,
        OptSense::Maximize => bracket.1,
    };
    Ok(QpReport {
        outcome: QpOutcome::Optimal {
            bound,
            level,
            point,
            point_value,
            opt,
        },
        lifted: Some(lifted_out),
    })
}
