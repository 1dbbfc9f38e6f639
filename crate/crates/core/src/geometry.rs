//! Convex-hull membership by pivot stepping.
//!
//! To decide whether a target `p` lies in a convex set `C` (given only
//! through a linear-maximization oracle), keep an iterate `p'` in `C` and
//! repeat: ask the oracle for a point `v` maximizing `(p - p')^T v` over
//! `C`.
//!
//! * If `v` passes the pivot test, move `p'` toward the segment `[p', v]`
//!   point closest to `p`; the distance to `p` strictly decreases.
//! * If even the maximizer fails the weak pivot test, no pivot exists, `p`
//!   is provably outside `C`, and the orthogonal bisector of `[p, p']`
//!   separates; the gap at that moment is within a factor two of the true
//!   distance.
//!
//! Two pivot tests appear. The *strict* test (threshold
//! `||p||^2 - p'^T p`) characterizes membership: if `p` is in `C`, every
//! iterate admits a strict pivot, so one certified strict failure already
//! proves `p` is outside. The *weak* test (threshold
//! `(||p||^2 - ||p'||^2)/2`) is what the separating bisector needs: the
//! engine keeps stepping (weak pivots still make progress) until the
//! maximum drops below the weak threshold, and only then emits a witness.
//! Emitting at the first strict failure would be unsound: the bisector there
//! can cut the set, and the gap can exceed twice the distance.

use crate::error::{Error, Result};
use crate::linalg::vec;
use crate::scalar::Scalar;
use crate::trace::ThinnedTrace;

/// Engine state: target, current in-hull iterate, and their distance.
#[derive(Debug, Clone)]
pub struct ChmState<F> {
    pub target: Vec<F>,
    pub iterate: Vec<F>,
    pub gap: F,
    pub iteration: usize,
}

/// A point of the set together with its score `direction^T point`.
#[derive(Debug, Clone)]
pub struct PivotCandidate<F> {
    pub point: Vec<F>,
    pub score: F,
}

/// Affine hyperplane `{ y : normal^T y = offset }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<F> {
    pub normal: Vec<F>,
    pub offset: F,
}

impl<F: Scalar> Hyperplane<F> {
    /// Signed side of `point`: positive on the set side.
    pub fn side(&self, point: &[F]) -> F {
        vec::dot(&self.normal, point) - self.offset
    }
}

/// Oracle answer for one probe direction.
#[derive(Debug, Clone)]
pub enum OracleReply<F> {
    /// A point whose score clears the threshold passed to the probe (within
    /// the strict-test slack). The oracle may return early without having
    /// certified a global maximum.
    Pivot(PivotCandidate<F>),
    /// The oracle's best point along with a certified upper bound on the
    /// true maximum of `direction^T v` over the set.
    Maximum {
        candidate: PivotCandidate<F>,
        upper_bound: F,
    },
}

/// Linear-maximization oracle over the convex set.
pub trait PivotOracle<F: Scalar> {
    /// Maximizes `direction^T v` over the set. `threshold` is the engine's
    /// current strict-pivot threshold: the oracle may stop early and reply
    /// [`OracleReply::Pivot`] as soon as a point clears it; otherwise it
    /// replies [`OracleReply::Maximum`] with a certified upper bound.
    fn best_point(&mut self, direction: &[F], threshold: F) -> Result<OracleReply<F>>;
}

/// Strict-pivot threshold `||target||^2 - iterate^T target`.
pub fn strict_threshold<F: Scalar>(target: &[F], iterate: &[F]) -> F {
    vec::norm_sq(target) - vec::dot(iterate, target)
}

/// Weak-pivot threshold `(||target||^2 - ||iterate||^2) / 2`.
pub fn weak_threshold<F: Scalar>(target: &[F], iterate: &[F]) -> F {
    (vec::norm_sq(target) - vec::norm_sq(iterate)) / F::c(2.0)
}

/// Slack applied to pivot tests: `1e-12 * (1 + |threshold|)`.
pub fn pivot_slack<F: Scalar>(threshold: F) -> F {
    F::c(1e-12) * (F::one() + threshold.abs())
}

/// Weak pivot test: does `v` satisfy `||iterate - v|| >= ||target - v||`,
/// written as `(target - iterate)^T v >= (||target||^2 - ||iterate||^2)/2`?
pub fn is_pivot<F: Scalar>(target: &[F], iterate: &[F], v: &[F]) -> Result<bool> {
    check_dims("is_pivot", target, iterate, v)?;
    let threshold = weak_threshold(target, iterate);
    let score = vec::dot(target, v) - vec::dot(iterate, v);
    Ok(score >= threshold - pivot_slack(threshold))
}

/// Strict pivot test: `(target - iterate)^T v >= ||target||^2 - iterate^T
/// target`, with slack. Strict pivots give the distance decrease a fixed
/// geometric rate for interior targets.
pub fn is_strict_pivot<F: Scalar>(target: &[F], iterate: &[F], v: &[F]) -> Result<bool> {
    check_dims("is_strict_pivot", target, iterate, v)?;
    let threshold = strict_threshold(target, iterate);
    let score = vec::dot(target, v) - vec::dot(iterate, v);
    Ok(score >= threshold - pivot_slack(threshold))
}

/// One pivot step: moves the iterate to the point of the segment
/// `[iterate, v]` closest to the target. Returns the clamped step length
/// and the new iterate. Errors if `v` coincides with the iterate.
pub fn step<F: Scalar>(target: &[F], iterate: &[F], v: &[F]) -> Result<(F, Vec<F>)> {
    check_dims("step", target, iterate, v)?;
    let seg = vec::sub(v, iterate);
    let seg_sq = vec::norm_sq(&seg);
    if seg_sq <= F::zero() {
        return Err(Error::DegeneratePivot);
    }
    let c = vec::sub(target, iterate);
    let alpha = (vec::dot(&c, &seg) / seg_sq).max(F::zero()).min(F::one());
    let mut next = iterate.to_vec();
    vec::axpy(alpha, &seg, &mut next);
    Ok((alpha, next))
}

/// Orthogonal bisector of the segment `[target, iterate]`, oriented so the
/// set side is positive. Valid as a separator exactly when the iterate
/// admits no weak pivot. Errors at zero gap.
pub fn witness_hyperplane<F: Scalar>(target: &[F], iterate: &[F]) -> Result<Hyperplane<F>> {
    if target.len() != iterate.len() {
        return Err(Error::DimensionMismatch {
            context: "witness_hyperplane",
            expected: target.len(),
            got: iterate.len(),
        });
    }
    let normal = vec::sub(iterate, target);
    if vec::norm_sq(&normal) <= F::zero() {
        return Err(Error::ZeroGap);
    }
    let offset = (vec::norm_sq(iterate) - vec::norm_sq(target)) / F::c(2.0);
    Ok(Hyperplane { normal, offset })
}

fn check_dims<F: Scalar>(context: &'static str, target: &[F], iterate: &[F], v: &[F]) -> Result<()> {
    if iterate.len() != target.len() {
        return Err(Error::DimensionMismatch {
            context,
            expected: target.len(),
            got: iterate.len(),
        });
    }
    if v.len() != target.len() {
        return Err(Error::DimensionMismatch {
            context,
            expected: target.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Engine parameters.
#[derive(Debug, Clone)]
pub struct ChmOptions<F> {
    /// Declare membership when the gap falls to this value.
    pub epsilon: F,
    pub max_iters: usize,
    /// Trace capacity; older entries are thinned by stride doubling.
    pub trace_cap: usize,
}

impl<F: Scalar> ChmOptions<F> {
    pub fn new(epsilon: F) -> Self {
        ChmOptions {
            epsilon,
            max_iters: 100_000,
            trace_cap: 100_000,
        }
    }
}

/// How a membership run ended.
#[derive(Debug, Clone)]
pub enum ChmOutcome<F> {
    /// Gap reached epsilon: the target is within epsilon of the hull.
    Converged { state: ChmState<F> },
    /// No weak pivot exists at the final iterate: the target is provably
    /// outside, and the bisector separates it from the set.
    WitnessFound {
        state: ChmState<F>,
        hyperplane: Hyperplane<F>,
    },
    /// Iteration budget exhausted (or the oracle could not produce a
    /// progressing step) with the question still open.
    IterationsExhausted { state: ChmState<F> },
}

/// A finished run: outcome plus the thinned gap trace.
#[derive(Debug, Clone)]
pub struct ChmRun<F> {
    pub outcome: ChmOutcome<F>,
    /// `(iteration, gap)` samples.
    pub trace: ThinnedTrace<F>,
    pub oracle_calls: usize,
}

/// Runs pivot stepping from `start` (a point of the set) toward `target`.
///
/// The gap is nonincreasing across iterations. A witness is only emitted
/// once the certified maximum falls below the weak threshold, so its
/// bisector genuinely separates and its gap is within a factor two of the
/// distance to the set.
pub fn run_chm<F: Scalar, O: PivotOracle<F>>(
    oracle: &mut O,
    target: &[F],
    start: &[F],
    opts: &ChmOptions<F>,
) -> Result<ChmRun<F>> {
    if target.is_empty() {
        return Err(Error::EmptySystem);
    }
    if start.len() != target.len() {
        return Err(Error::DimensionMismatch {
            context: "run_chm",
            expected: target.len(),
            got: start.len(),
        });
    }
    if !(opts.epsilon > F::zero()) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if target.iter().chain(start).any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig(
            "target and start must be finite".into(),
        ));
    }

    let mut iterate = start.to_vec();
    let mut gap = vec::dist(target, &iterate);
    let mut trace = ThinnedTrace::new(opts.trace_cap);
    trace.push(0, gap);
    let mut oracle_calls = 0usize;

    let state = |iterate: &Vec<F>, gap: F, iteration: usize| ChmState {
        target: target.to_vec(),
        iterate: iterate.clone(),
        gap,
        iteration,
    };

    for it in 1..=opts.max_iters {
        if gap <= opts.epsilon {
            return Ok(ChmRun {
                outcome: ChmOutcome::Converged {
                    state: state(&iterate, gap, it - 1),
                },
                trace,
                oracle_calls,
            });
        }
        let direction = vec::sub(target, &iterate);
        let th_strict = strict_threshold(target, &iterate);
        let th_weak = weak_threshold(target, &iterate);
        oracle_calls += 1;
        let candidate = match oracle.best_point(&direction, th_strict)? {
            OracleReply::Pivot(c) => c,
            OracleReply::Maximum {
                candidate,
                upper_bound,
            } => {
                if upper_bound < th_weak - pivot_slack(th_weak) {
                    let hyperplane = witness_hyperplane(target, &iterate)?;
                    return Ok(ChmRun {
                        outcome: ChmOutcome::WitnessFound {
                            state: state(&iterate, gap, it - 1),
                            hyperplane,
                        },
                        trace,
                        oracle_calls,
                    });
                }
                candidate
            }
        };
        let (alpha, next) = step(target, &iterate, &candidate.point)?;
        if alpha <= F::zero() {
            log::warn!(
                "membership engine stalled at iteration {it}: candidate makes no progress \
                 (gap {:.3e})",
                gap.as_f64()
            );
            return Ok(ChmRun {
                outcome: ChmOutcome::IterationsExhausted {
                    state: state(&iterate, gap, it - 1),
                },
                trace,
                oracle_calls,
            });
        }
        iterate = next;
        let new_gap = vec::dist(target, &iterate);
        debug_assert!(
            new_gap <= gap * (F::one() + F::c(1e-12)) + F::c(1e-300),
            "gap increased"
        );
        gap = new_gap;
        trace.push(it, gap);
    }

    Ok(ChmRun {
        outcome: ChmOutcome::IterationsExhausted {
            state: state(&iterate, gap, opts.max_iters),
        },
        trace,
        oracle_calls,
    })
}
