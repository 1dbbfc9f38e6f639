//! Feasibility and optimization driver.
//!
//! [`solve_feasibility`] decides whether the right-hand side of a quadratic
//! system lies in the convex hull of ball images, by pivot stepping against
//! the eigenvalue oracle. Inhomogeneous systems are embedded into
//! homogeneous form first. On a certified failure of the strict pivot test
//! the target is provably outside the current hull; depending on the radius
//! schedule the solver then either reports the separating witness (fixed
//! radius) or doubles the radius and continues (growing hulls keep every
//! point and iterate valid).
//!
//! A membership certificate is emitted only after an exact recomputation of
//! its residual: the iterate is rebuilt from the maintained convex
//! combination, pruned to at most `m + 1` terms, optionally polished, and
//! re-checked against the tolerance before the solver declares success.

use crate::chr::{
    caratheodory_prune, cert_to_psd, refine_cert, ConvexCertificate, EigPivotOracle,
    PsdCertificate, QuadraticSystem,
};
use crate::error::{Error, Result};
use crate::geometry::{self, witness_hyperplane, Hyperplane};
use crate::linalg::vec;
use crate::rng;
use crate::scalar::Scalar;
use crate::trace::ThinnedTrace;

/// How the trace-bound radius evolves across the solve.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusSchedule<F> {
    /// Solve at exactly this radius; a certified witness means infeasible.
    Fixed(F),
    /// Start at `r0` (or the computed lower bound when `None`) and double on
    /// every certified witness, clamping at `r_max`.
    Doubling { r0: Option<F>, r_max: F },
}

/// Solver parameters.
#[derive(Debug, Clone)]
pub struct SolveConfig<F> {
    /// Image-space gap at which membership is declared (after an exact
    /// residual recomputation).
    pub epsilon: F,
    pub schedule: RadiusSchedule<F>,
    /// Total pivot-step budget across all radius stages.
    pub max_iters: usize,
    /// Baseline eigensolver tolerance. Probes sharpen it adaptively near
    /// convergence and relax it while the gap is large.
    pub eig_tol: F,
    pub seed: u64,
    /// Prune the maintained combination whenever it reaches this many
    /// terms; `None` picks `max(4 (m + 1), 2 n)`. Emission always prunes.
    pub prune_cap: Option<usize>,
    /// Certify witness decisions with a dense eigendecomposition when the
    /// order is at most 200.
    pub exact_eig: bool,
    /// Polish certificates per term before emission (kept only when the
    /// aggregate residual does not grow).
    pub refine: bool,
    pub trace_cap: usize,
}

impl<F: Scalar> Default for SolveConfig<F> {
    fn default() -> Self {
        SolveConfig {
            epsilon: F::c(1e-6),
            schedule: RadiusSchedule::Doubling {
                r0: None,
                r_max: F::c(1e6),
            },
            max_iters: 200_000,
            eig_tol: F::c(1e-8),
            seed: 0,
            prune_cap: None,
            exact_eig: true,
            refine: true,
            trace_cap: 100_000,
        }
    }
}

impl<F: Scalar> SolveConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > F::zero()) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        if !(self.eig_tol > F::zero()) {
            return Err(Error::InvalidConfig("eig_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.trace_cap < 4 {
            return Err(Error::InvalidConfig("trace_cap must be at least 4".into()));
        }
        match &self.schedule {
            RadiusSchedule::Fixed(r) => {
                if !(*r > F::zero()) || !r.is_finite() {
                    return Err(Error::InvalidRadius(format!("fixed radius {r}")));
                }
            }
            RadiusSchedule::Doubling { r0, r_max } => {
                if !(*r_max > F::zero()) || !r_max.is_finite() {
                    return Err(Error::InvalidRadius(format!("r_max {r_max}")));
                }
                if let Some(r0) = r0 {
                    if !(*r0 > F::zero()) || !r0.is_finite() {
                        return Err(Error::InvalidRadius(format!("r0 {r0}")));
                    }
                    if r0 > r_max {
                        return Err(Error::InvalidRadius(format!(
                            "r0 {r0} exceeds r_max {r_max}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Certified non-membership: the bisector of target and final iterate
/// separates the target from the hull at `radius`.
#[derive(Debug, Clone)]
pub struct Witness<F> {
    pub hyperplane: Hyperplane<F>,
    /// Final iterate (image space); the hyperplane is the orthogonal
    /// bisector of the segment from the target to this point.
    pub iterate: Vec<F>,
    /// Distance from target to iterate, within a factor two of the true
    /// distance to the hull.
    pub gap: F,
    /// Hull radius the certificate refers to.
    pub radius: F,
}

/// Final verdict of a feasibility solve.
#[derive(Debug, Clone)]
pub enum SolveOutcome<F> {
    /// The target lies in the hull: an explicit convex combination within
    /// `epsilon`, plus its psd form.
    Feasible {
        cert: ConvexCertificate<F>,
        psd: PsdCertificate<F>,
        residual: F,
    },
    /// Certified outside the hull at the caller's fixed radius.
    Infeasible { witness: Witness<F> },
    /// The doubling schedule hit `r_max` still certified-outside; feasible
    /// at a larger radius remains possible.
    RadiusExceeded {
        last_witness: Option<Witness<F>>,
        best_gap: F,
    },
    /// Budgets or numeric precision ran out before a certificate either
    /// way.
    Inconclusive { reason: String, best_gap: F },
}

/// A finished solve: outcome plus run diagnostics.
#[derive(Debug, Clone)]
pub struct SolveReport<F> {
    pub outcome: SolveOutcome<F>,
    /// Pivot steps taken.
    pub iterations: usize,
    /// Eigenvalue probes issued by the oracle.
    pub oracle_probes: u64,
    /// Radii visited, in order. For a homogenized solve these live in the
    /// embedded space (`sqrt(r^2 + 1)` for a caller radius `r`).
    pub radius_history: Vec<F>,
    /// `(step, gap)` samples, thinned by stride doubling.
    pub trace: ThinnedTrace<F>,
    /// True when the system was embedded into homogeneous form first; the
    /// certificate and witness then refer to the embedded system.
    pub homogenized: bool,
}

/// Decides whether `b` lies in the hull of ball images of the system.
///
/// Inhomogeneous systems are homogenized first (certificates then refer to
/// the embedded system, flagged in the report, with caller radii converted
/// as `sqrt(r^2 + 1)` for the appended unit coordinate).
pub fn solve_feasibility<F: Scalar>(
    sys: &QuadraticSystem<F>,
    cfg: &SolveConfig<F>,
) -> Result<SolveReport<F>> {
    cfg.validate()?;

    let homogenized = !sys.is_homogeneous();
    let embedded = if homogenized {
        Some(sys.homogenize())
    } else {
        None
    };
    let work: &QuadraticSystem<F> = embedded.as_ref().map_or(sys, |h| &h.system);
    let embed_radius = |r: F| {
        if homogenized {
            (r * r + F::one()).sqrt()
        } else {
            r
        }
    };

    let b = work.rhs().to_vec();
    let m = work.m();

    // Trivial target: the origin's image certifies membership at once.
    if b.iter().all(|v| *v == F::zero()) {
        let radius = match &cfg.schedule {
            RadiusSchedule::Fixed(r) => embed_radius(*r),
            RadiusSchedule::Doubling { r0, .. } => embed_radius(r0.unwrap_or(F::one())),
        };
        let cert = ConvexCertificate {
            radius,
            weights: vec![F::one()],
            points: vec![vec![F::zero(); work.n()]],
        };
        let psd = cert_to_psd(&cert, work.n())?;
        return Ok(SolveReport {
            outcome: SolveOutcome::Feasible {
                cert,
                psd,
                residual: F::zero(),
            },
            iterations: 0,
            oracle_probes: 0,
            radius_history: vec![radius],
            trace: ThinnedTrace::new(cfg.trace_cap),
            homogenized,
        });
    }

    // A zero quadratic form with a nonzero right-hand side is outside every
    // hull; the bisector against the component-zeroed target separates.
    for (k, a) in work.quad_matrices().iter().enumerate() {
        if a.is_zero() && b[k] != F::zero() {
            let radius = match &cfg.schedule {
                RadiusSchedule::Fixed(r) => embed_radius(*r),
                RadiusSchedule::Doubling { r_max, .. } => embed_radius(*r_max),
            };
            let mut iterate = b.clone();
            iterate[k] = F::zero();
            let witness = Witness {
                hyperplane: witness_hyperplane(&b, &iterate)?,
                gap: b[k].abs(),
                iterate,
                radius,
            };
            return Ok(SolveReport {
                outcome: SolveOutcome::Infeasible { witness },
                iterations: 0,
                oracle_probes: 0,
                radius_history: vec![radius],
                trace: ThinnedTrace::new(cfg.trace_cap),
                homogenized,
            });
        }
    }

    let (radius, r_max) = match &cfg.schedule {
        RadiusSchedule::Fixed(r) => (embed_radius(*r), None),
        RadiusSchedule::Doubling { r0, r_max } => {
            let r_max = embed_radius(*r_max);
            let r0 = match r0 {
                Some(r0) => embed_radius(*r0),
                None => work
                    .radius_lower_bound(cfg.eig_tol, rng::child_seed(cfg.seed, 0x52_30))?
                    .min(r_max),
            };
            (r0, Some(r_max))
        }
    };

    let mut oracle = EigPivotOracle::new(work, radius, cfg.eig_tol, rng::child_seed(cfg.seed, 1))?;
    oracle.exact_certify = cfg.exact_eig;
    let gersh_total: F = work.gershgorin_bounds().into_iter().sum();
    let prune_cap = cfg
        .prune_cap
        .unwrap_or_else(|| (4 * (m + 1)).max(2 * work.n()))
        .max(m + 2);

    let mut engine = Engine {
        sys: work,
        cfg,
        oracle,
        b,
        radius,
        r_max,
        weights: Vec::new(),
        points: Vec::new(),
        iterate: Vec::new(),
        gap: F::infinity(),
        best_gap: F::infinity(),
        iterations: 0,
        trace: ThinnedTrace::new(cfg.trace_cap),
        radius_history: vec![radius],
        cache: Vec::new(),
        gersh_total,
        prune_cap,
        emit_attempts: 0,
        window_iter: 0,
        window_gap: F::infinity(),
        strike_corrective_iter: None,
    };
    let outcome = engine.run()?;

    Ok(SolveReport {
        outcome,
        iterations: engine.iterations,
        oracle_probes: engine.oracle.probe_count(),
        radius_history: engine.radius_history,
        trace: engine.trace,
        homogenized,
    })
}

/// Pivot-loop state for one solve.
struct Engine<'s, F: Scalar> {
    sys: &'s QuadraticSystem<F>,
    cfg: &'s SolveConfig<F>,
    oracle: EigPivotOracle<'s, F>,
    b: Vec<F>,
    radius: F,
    r_max: Option<F>,
    weights: Vec<F>,
    points: Vec<Vec<F>>,
    iterate: Vec<F>,
    gap: F,
    best_gap: F,
    iterations: usize,
    trace: ThinnedTrace<F>,
    radius_history: Vec<F>,
    /// Recent `(x, Q(x))` pairs; rescoring them often spares a probe.
    cache: Vec<(Vec<F>, Vec<F>)>,
    gersh_total: F,
    prune_cap: usize,
    emit_attempts: usize,
    /// Rolling stall window: iteration count and gap at the last check.
    window_iter: usize,
    window_gap: F,
    /// Iteration count of the last stall-triggered corrective pass.
    strike_corrective_iter: Option<usize>,
}

enum Decision<F> {
    Step { x: Vec<F>, image: Vec<F> },
    Witness,
    Stuck,
}

const CACHE_CAP: usize = 32;
const MAX_EMIT_ATTEMPTS: usize = 8;

impl<'s, F: Scalar> Engine<'s, F> {
    fn run(&mut self) -> Result<SolveOutcome<F>> {
        // Seed the combination with the maximizer along the target
        // direction (or the origin when nothing scores positive).
        let b = self.b.clone();
        let first = match self.oracle.probe(&b, None, None) {
            Ok(p) => p,
            Err(Error::PowerNoConvergence { .. }) => {
                return Ok(self.inconclusive("initial eigenvalue probe did not converge"))
            }
            Err(e) => return Err(e),
        };
        self.cache_push(first.x.clone(), first.image.clone());
        self.weights = vec![F::one()];
        self.points = vec![first.x];
        self.iterate = first.image;
        self.gap = vec::dist(&self.b, &self.iterate);
        self.best_gap = self.gap;
        self.trace.push(0, self.gap);
        self.window_gap = self.gap;

        let mut strikes = 0usize;
        loop {
            if self.gap <= self.cfg.epsilon {
                match self.attempt_emit()? {
                    Some(done) => return Ok(done),
                    None => {
                        if self.emit_attempts >= MAX_EMIT_ATTEMPTS {
                            return Ok(self.inconclusive(
                                "certificate residual kept exceeding the tolerance after pruning",
                            ));
                        }
                        continue;
                    }
                }
            }
            if self.iterations >= self.cfg.max_iters {
                return Ok(self.inconclusive("pivot iteration budget exhausted"));
            }

            // Pivot steps that stop halving the gap within a window are
            // zig-zagging on a face; reshuffle the mass they have already
            // placed.
            if self.iterations >= self.window_iter + 32 {
                if self.gap > self.window_gap / F::c(2.0) {
                    self.corrective_resync()?;
                }
                self.window_iter = self.iterations;
                self.window_gap = self.gap;
                if self.gap <= self.cfg.epsilon {
                    continue;
                }
            }

            let decision = self.decide(strikes > 0)?;
            match decision {
                Decision::Step { x, image } => {
                    match geometry::step(&self.b, &self.iterate, &image) {
                        Ok((alpha, next)) if alpha > F::zero() => {
                            strikes = 0;
                            let keep = F::one() - alpha;
                            for w in &mut self.weights {
                                *w *= keep;
                            }
                            self.weights.push(alpha);
                            self.points.push(x);
                            self.iterate = next;
                            self.gap = vec::dist(&self.b, &self.iterate);
                            self.best_gap = self.best_gap.min(self.gap);
                            self.iterations += 1;
                            self.trace.push(self.iterations, self.gap);
                            if self.points.len() >= self.prune_cap {
                                self.prune_resync()?;
                            }
                        }
                        Ok(_) | Err(Error::DegeneratePivot) => {
                            if self.strike_corrective()? {
                                strikes = 0;
                                continue;
                            }
                            strikes += 1;
                            if strikes > 2 {
                                return Ok(self.inconclusive(
                                    "no progressing pivot at the numeric floor",
                                ));
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                Decision::Witness => {
                    let witness = self.witness_now()?;
                    match self.r_max {
                        None => return Ok(SolveOutcome::Infeasible { witness }),
                        Some(r_max) => {
                            let at_cap = self.radius >= r_max * (F::one() - F::c(1e-12));
                            if at_cap {
                                return Ok(SolveOutcome::RadiusExceeded {
                                    last_witness: Some(witness),
                                    best_gap: self.best_gap,
                                });
                            }
                            self.radius = (self.radius * F::c(2.0)).min(r_max);
                            self.radius_history.push(self.radius);
                            self.oracle.set_radius(self.radius);
                            strikes = 0;
                            // The hull only grew: combination and iterate
                            // stay valid, so the stage continues in place.
                        }
                    }
                }
                Decision::Stuck => {
                    if self.strike_corrective()? {
                        strikes = 0;
                        continue;
                    }
                    strikes += 1;
                    if strikes > 2 {
                        return Ok(
                            self.inconclusive("pivot decision sits at the numeric floor")
                        );
                    }
                }
            }
        }
    }

    /// Chooses between stepping, certifying a witness, and giving up, for
    /// the current iterate. `skip_cache` forces a fresh certified probe
    /// (used after a failed step).
    fn decide(&mut self, skip_cache: bool) -> Result<Decision<F>> {
        let c = vec::sub(&self.b, &self.iterate);
        let th_strict = geometry::strict_threshold(&self.b, &self.iterate);
        let th_weak = geometry::weak_threshold(&self.b, &self.iterate);
        let slack_s = geometry::pivot_slack(th_strict);
        let slack_w = geometry::pivot_slack(th_weak);

        if !skip_cache {
            let mut best: Option<(usize, F)> = None;
            for (i, (_, q)) in self.cache.iter().enumerate() {
                let score = vec::dot(&c, q);
                if best.map_or(true, |(_, s)| score > s) {
                    best = Some((i, score));
                }
            }
            if let Some((i, score)) = best {
                if score >= th_strict - slack_s {
                    let (x, q) = &self.cache[i];
                    return Ok(Decision::Step {
                        x: x.clone(),
                        image: q.clone(),
                    });
                }
            }
        }

        if !skip_cache {
            let tol = self.adaptive_tol();
            let probe = match self.oracle.probe(&c, Some(th_strict), Some(tol)) {
                Ok(p) => p,
                Err(Error::PowerNoConvergence { .. }) => return Ok(Decision::Stuck),
                Err(e) => return Err(e),
            };
            self.cache_push(probe.x.clone(), probe.image.clone());
            if probe.score >= th_weak - slack_w {
                return Ok(Decision::Step {
                    x: probe.x,
                    image: probe.image,
                });
            }
            // Otherwise the probe's bound either certifies a failure or
            // straddles the threshold; both need the certified pass below.
        }

        // Certified pass: dense when permitted, else a tight power run.
        // This is the only path allowed to declare a witness.
        let tight = (F::c(100.0) * F::epsilon()).max(self.cfg.eig_tol.min(F::c(1e-12)));
        let cp = match self.oracle.certify(&c, tight) {
            Ok(p) => p,
            Err(Error::PowerNoConvergence { .. }) => return Ok(Decision::Stuck),
            Err(e) => return Err(e),
        };
        self.cache_push(cp.x.clone(), cp.image.clone());
        match cp.upper_bound {
            Some(upper) if upper < th_weak - slack_w => Ok(Decision::Witness),
            _ if cp.score >= th_weak - slack_w => Ok(Decision::Step {
                x: cp.x,
                image: cp.image,
            }),
            _ => Ok(Decision::Stuck),
        }
    }

    /// Probe tolerance that keeps the candidate's score deficit below a
    /// quarter of the squared gap (so accepted pivots provably progress),
    /// while allowing loose fast probes when the gap is still large.
    fn adaptive_tol(&self) -> F {
        let r_sq = self.radius * self.radius;
        let scale = (self.gap * self.gersh_total).max(F::one());
        let t = self.gap * self.gap / (F::c(4.0) * r_sq * scale);
        t.max(F::c(100.0) * F::epsilon()).min(F::c(1e-2))
    }

    fn cache_push(&mut self, x: Vec<F>, q: Vec<F>) {
        if self.cache.len() == CACHE_CAP {
            self.cache.remove(0);
        }
        self.cache.push((x, q));
    }

    fn witness_now(&self) -> Result<Witness<F>> {
        Ok(Witness {
            hyperplane: witness_hyperplane(&self.b, &self.iterate)?,
            iterate: self.iterate.clone(),
            gap: self.gap,
            radius: self.radius,
        })
    }

    fn inconclusive(&self, reason: &str) -> SolveOutcome<F> {
        SolveOutcome::Inconclusive {
            reason: reason.to_string(),
            best_gap: self.best_gap,
        }
    }

    fn current_cert(&self) -> ConvexCertificate<F> {
        let mut cert = ConvexCertificate {
            radius: self.radius,
            weights: self.weights.clone(),
            points: self.points.clone(),
        };
        let sum: F = cert.weights.iter().copied().sum();
        if sum > F::zero() {
            for w in &mut cert.weights {
                *w /= sum;
            }
        }
        cert
    }

    /// Prunes the maintained combination and resynchronizes the iterate
    /// with the exact image of what remains.
    fn prune_resync(&mut self) -> Result<()> {
        let cert = self.current_cert();
        let (pruned, _complete) = caratheodory_prune(&cert, self.sys)?;
        self.adopt(pruned)
    }

    fn adopt(&mut self, cert: ConvexCertificate<F>) -> Result<()> {
        self.iterate = cert.image(self.sys)?;
        self.weights = cert.weights;
        self.points = cert.points;
        self.gap = vec::dist(&self.b, &self.iterate);
        self.best_gap = self.best_gap.min(self.gap);
        Ok(())
    }

    /// Reoptimizes the weights over the points already in the combination,
    /// by pairwise mass transfers between their images.
    ///
    /// A pivot step can only pour mass onto one new point, so when the
    /// target sits near a low-dimensional face of the hull the iterate
    /// zig-zags between the face's generators and the gap crawls. Moving
    /// mass between existing points directly (donor: worst active image,
    /// receiver: best image, exact line search per transfer) collapses that
    /// tail; the points themselves are untouched, so the iterate stays a
    /// convex combination and the gap never increases.
    ///
    /// Skipped when the combination is too large for the quadratic sweep
    /// cost to pay for itself; the big-system paths converge through plain
    /// pivots, and the small systems optimization bisection builds are the
    /// ones that stall on faces.
    fn corrective_resync(&mut self) -> Result<()> {
        let t = self.points.len();
        let m = self.b.len();
        if t < 2 || t * t * m > 1 << 22 {
            return Ok(());
        }
        let images: Vec<Vec<F>> = self
            .points
            .iter()
            .map(|p| self.sys.eval_q(p))
            .collect::<Result<_>>()?;
        let mut w = self.weights.clone();
        let sum: F = w.iter().copied().sum();
        if sum <= F::zero() {
            return Ok(());
        }
        for wi in &mut w {
            *wi /= sum;
        }
        let combine = |w: &[F]| -> Vec<F> {
            let mut p = vec![F::zero(); m];
            for (wi, q) in w.iter().zip(&images) {
                for (pj, qj) in p.iter_mut().zip(q) {
                    *pj += *wi * *qj;
                }
            }
            p
        };
        let mut p = combine(&w);
        for _ in 0..8 * t.max(8) {
            // Gradient of the squared residual along each image.
            let resid = vec::sub(&p, &self.b);
            let mut donor: Option<(usize, F)> = None;
            let mut recv: Option<(usize, F)> = None;
            for (i, q) in images.iter().enumerate() {
                let g = vec::dot(&resid, q);
                if w[i] > F::zero() && donor.map_or(true, |(_, gd)| g > gd) {
                    donor = Some((i, g));
                }
                if recv.map_or(true, |(_, gr)| g < gr) {
                    recv = Some((i, g));
                }
            }
            let ((di, gd), (ri, gr)) = match (donor, recv) {
                (Some(d), Some(r)) => (d, r),
                _ => break,
            };
            if di == ri || gd - gr <= F::c(1e-13) * (F::one() + gd.abs()) {
                break;
            }
            let d = vec::sub(&images[ri], &images[di]);
            let dd = vec::norm_sq(&d);
            if dd <= F::zero() {
                break;
            }
            let theta = (-vec::dot(&resid, &d) / dd).min(w[di]).max(F::zero());
            if theta <= F::zero() {
                break;
            }
            w[di] -= theta;
            w[ri] += theta;
            for (pj, dj) in p.iter_mut().zip(&d) {
                *pj += theta * *dj;
            }
        }
        let gap = vec::dist(&self.b, &p);
        if gap < self.gap {
            // Drop emptied points so the combination stays small.
            let floor = F::c(1e-15);
            let mut weights = Vec::with_capacity(t);
            let mut points = Vec::with_capacity(t);
            for (wi, x) in w.into_iter().zip(std::mem::take(&mut self.points)) {
                if wi > floor {
                    weights.push(wi);
                    points.push(x);
                }
            }
            self.weights = weights;
            self.points = points;
            self.iterate = p;
            self.gap = gap;
            self.best_gap = self.best_gap.min(gap);
        }
        Ok(())
    }

    /// Corrective pass for a stalled pivot, reporting whether it moved the
    /// gap enough to count as progress. Runs at most once per stall site:
    /// a repeat at the same iteration count declines immediately, so the
    /// strike escalation still terminates.
    fn strike_corrective(&mut self) -> Result<bool> {
        if self.strike_corrective_iter == Some(self.iterations) {
            return Ok(false);
        }
        self.strike_corrective_iter = Some(self.iterations);
        let before = self.gap;
        self.corrective_resync()?;
        Ok(self.gap < before * (F::one() - F::c(1e-9)))
    }

    /// Tries to emit a membership certificate. Pruning and polishing can
    /// jitter the image, so the residual is recomputed exactly and the
    /// attempt abandoned (state resynchronized) when it exceeds epsilon.
    fn attempt_emit(&mut self) -> Result<Option<SolveOutcome<F>>> {
        self.emit_attempts += 1;
        let cert = self.current_cert();
        let (mut cert, _complete) = caratheodory_prune(&cert, self.sys)?;
        if self.cfg.refine {
            let refined = refine_cert(&cert, self.sys)?;
            if refined.residual(self.sys)? <= cert.residual(self.sys)? {
                cert = refined;
            }
        }
        let residual = cert.residual(self.sys)?;
        if residual <= self.cfg.epsilon {
            let psd = cert_to_psd(&cert, self.sys.n())?;
            return Ok(Some(SolveOutcome::Feasible {
                cert,
                psd,
                residual,
            }));
        }
        log::debug!(
            "emission attempt {} drifted: residual {:.3e} > epsilon",
            self.emit_attempts,
            residual.as_f64()
        );
        self.adopt(cert)?;
        Ok(None)
    }
}

/// Re-derives every claim a witness makes, from scratch.
///
/// Checks, in order: shapes and finiteness (`dims`, `finite`), the
/// hyperplane being the exact bisector (`hyperplane_matches_bisector`), the
/// recorded gap (`gap_matches`), the target on the strictly negative side
/// (`target_side`), a certified no-weak-pivot bound at the iterate
/// (`no_weak_pivot`), and seeded sample images all on the nonnegative side
/// (`separation_probes`). The system must be homogeneous (verify against
/// the embedded system for homogenized solves).
pub fn verify_witness<F: Scalar>(
    sys: &QuadraticSystem<F>,
    witness: &Witness<F>,
    eig_tol: F,
    seed: u64,
    n_probes: usize,
) -> Result<()> {
    let m = sys.m();
    let b = sys.rhs();
    if witness.iterate.len() != m || witness.hyperplane.normal.len() != m {
        return Err(Error::InvalidCertificate {
            check: "dims",
            detail: format!(
                "iterate {} / normal {} vs m = {m}",
                witness.iterate.len(),
                witness.hyperplane.normal.len()
            ),
        });
    }
    let finite = witness.iterate.iter().all(|v| v.is_finite())
        && witness.hyperplane.normal.iter().all(|v| v.is_finite())
        && witness.hyperplane.offset.is_finite()
        && witness.gap.is_finite()
        && witness.radius.is_finite()
        && witness.radius > F::zero();
    if !finite {
        return Err(Error::InvalidCertificate {
            check: "finite",
            detail: "witness has a non-finite or nonpositive field".into(),
        });
    }

    let expected = witness_hyperplane(b, &witness.iterate)?;
    let normal_scale = vec::norm(&expected.normal).max(F::one());
    let normal_err = vec::dist(&expected.normal, &witness.hyperplane.normal);
    let offset_err = (expected.offset - witness.hyperplane.offset).abs();
    if normal_err > F::c(1e-8) * normal_scale
        || offset_err > F::c(1e-8) * (F::one() + expected.offset.abs())
    {
        return Err(Error::InvalidCertificate {
            check: "hyperplane_matches_bisector",
            detail: format!("normal error {normal_err}, offset error {offset_err}"),
        });
    }

    let gap = vec::dist(b, &witness.iterate);
    if (gap - witness.gap).abs() > F::c(1e-8) * (F::one() + gap) {
        return Err(Error::InvalidCertificate {
            check: "gap_matches",
            detail: format!("recorded {} vs recomputed {gap}", witness.gap),
        });
    }

    let side_b = witness.hyperplane.side(b);
    if !(side_b < F::zero()) {
        return Err(Error::InvalidCertificate {
            check: "target_side",
            detail: format!("side(target) = {side_b}"),
        });
    }

    // No weak pivot: the certified hull maximum along the probe direction
    // stays below the weak threshold.
    let c = vec::sub(b, &witness.iterate);
    let th_weak = geometry::weak_threshold(b, &witness.iterate);
    let mut oracle = EigPivotOracle::new(sys, witness.radius, eig_tol, seed)?;
    oracle.exact_certify = sys.n() <= 200;
    let probe = oracle.certify(&c, eig_tol)?;
    let upper = probe.upper_bound.ok_or(Error::InvalidCertificate {
        check: "no_weak_pivot",
        detail: "oracle could not certify an upper bound".into(),
    })?;
    let margin = F::c(1e-8) * (F::one() + th_weak.abs());
    if upper >= th_weak + margin {
        return Err(Error::InvalidCertificate {
            check: "no_weak_pivot",
            detail: format!("hull maximum {upper} reaches weak threshold {th_weak}"),
        });
    }

    // Sampled images (plus the origin's) must sit on the nonnegative side.
    let tol = F::c(1e-8) * (F::one() + vec::norm(b));
    let origin_side = witness.hyperplane.side(&vec![F::zero(); m]);
    if origin_side < -tol {
        return Err(Error::InvalidCertificate {
            check: "separation_probes",
            detail: format!("origin image crossed: side {origin_side}"),
        });
    }
    for i in 0..n_probes {
        let u: Vec<F> = rng::unit_vector(sys.n(), rng::child_seed(seed, 0x5E_00 + i as u64));
        let shrink = F::c(((i % 5) as f64 + 1.0) / 5.0);
        let x = vec::scale(witness.radius * shrink, &u);
        let q = sys.eval_q(&x)?;
        let side = witness.hyperplane.side(&q);
        if side < -tol {
            return Err(Error::InvalidCertificate {
                check: "separation_probes",
                detail: format!("sample {i} crossed: side {side}"),
            });
        }
    }
    Ok(())
}

/// Quadratic objective `x^T A x + c^T x + d` for [`solve_optimization`].
#[derive(Debug, Clone)]
pub struct QuadObjective<F> {
    pub quad: crate::linalg::SymMatrix<F>,
    pub linear: Option<Vec<F>>,
    pub constant: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptSense {
    Minimize,
    Maximize,
}

/// Parameters for the bisection on the objective level.
#[derive(Debug, Clone)]
pub struct OptConfig<F> {
    /// Feasibility-solver parameters for the probes (its radius schedule is
    /// ignored; the optimization radius is fixed).
    pub feas: SolveConfig<F>,
    /// Bracket width at which the bisection stops.
    pub level_tol: F,
    /// Gap tolerance for the bisection probes (loose, fast).
    pub probe_epsilon: F,
    /// Gap tolerance for the final certificate at the backed-off level.
    pub final_epsilon: F,
    pub max_bisections: usize,
}

impl<F: Scalar> Default for OptConfig<F> {
    fn default() -> Self {
        OptConfig {
            feas: SolveConfig::default(),
            level_tol: F::c(1e-3),
            probe_epsilon: F::c(1e-3),
            final_epsilon: F::c(1e-6),
            max_bisections: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub enum OptOutcome<F> {
    /// A bracket on the optimal level and a certificate at the reported
    /// value.
    ///
    /// `tight` records whether a high-accuracy solve succeeded at the
    /// reported value (otherwise the certificate is at probe accuracy and
    /// the value may overshoot the true optimum by about the probe
    /// tolerance). The bracket's bound-side end is always sound: it is the
    /// innermost witness-refuted level, or the a-priori spectral range
    /// bound when no probe refuted. `bound_certified` records whether that
    /// end coincides with the bisection's working interval; when false, an
    /// unresolved probe narrowed the working interval past the last
    /// witness, so the reported bracket is wider than the bisection
    /// tolerance.
    Optimal {
        value: F,
        bracket: (F, F),
        tight: bool,
        bound_certified: bool,
        solve: SolveReport<F>,
    },
    /// The constraint system itself is not solvable in the ball.
    BaseInfeasible { solve: SolveReport<F> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone)]
pub struct OptReport<F> {
    pub sense: OptSense,
    pub outcome: OptOutcome<F>,
    /// Feasibility probes spent (bisection plus the final solve).
    pub probes: usize,
    /// Probes that came back inconclusive and were treated as infeasible.
    pub inconclusive_probes: usize,
}

/// Optimizes a quadratic objective over the solutions of `sys` in the ball
/// of `radius`, through bisection on the achievable objective level.
///
/// The achievable levels form an interval (a linear slice of a convex
/// hull), so feasibility probes at candidate levels bracket the optimum.
/// Probes run at `probe_epsilon`; the reported level is backed off into the
/// bracket's feasible side and re-certified at `final_epsilon`, walking
/// further into the bracket when the bisection's probe-accurate endpoint
/// turns out to sit a hair outside the hull.
///
/// When the constraints pin the admissible trace (norm-type equations such
/// as `x'x = r^2` force every solution onto the ball's boundary), pass a
/// radius strictly larger than that pinned norm: probe targets then sit in
/// the hull's interior instead of on its trace facet, where convergence
/// degrades from linear to sublinear. Enlarging the radius past a pinned
/// norm cannot change any answer, because the constraints still hold every
/// admissible point to the pinned sphere.
pub fn solve_optimization<F: Scalar>(
    objective: &QuadObjective<F>,
    sys: &QuadraticSystem<F>,
    radius: F,
    sense: OptSense,
    cfg: &OptConfig<F>,
) -> Result<OptReport<F>> {
    if !(radius > F::zero()) || !radius.is_finite() {
        return Err(Error::InvalidRadius(format!("radius {radius}")));
    }
    if !(cfg.level_tol > F::zero()) || cfg.max_bisections == 0 {
        return Err(Error::InvalidConfig(
            "level_tol must be positive and max_bisections at least 1".into(),
        ));
    }

    // Augment the system with the objective as equation zero, then
    // homogenize once; bisection happens on the embedded level
    // `lambda = value - constant`.
    let aug = augmented_system(objective, sys)?;
    let homogenized = !aug.is_homogeneous();
    let level_shift = objective.constant;
    let (work, r_hom) = if homogenized {
        (aug.homogenize().system, (radius * radius + F::one()).sqrt())
    } else {
        (aug, radius)
    };

    let mut probes = 0usize;
    let mut inconclusive_probes = 0usize;
    let probe_cfg = |epsilon: F, seed: u64| SolveConfig {
        epsilon,
        schedule: RadiusSchedule::Fixed(r_hom),
        seed,
        ..cfg.feas.clone()
    };

    // Base solve (constraints only) supplies a starting feasible level.
    let base = QuadraticSystem::homogeneous(
        work.quad_matrices()[1..].to_vec(),
        work.rhs()[1..].to_vec(),
    )?;
    let base_report = solve_feasibility(&base, &probe_cfg(cfg.probe_epsilon, cfg.feas.seed))?;
    probes += 1;
    enum BaseInit<F> {
        Cert(ConvexCertificate<F>),
        Infeasible,
        Inconclusive(String),
    }
    let init = match &base_report.outcome {
        SolveOutcome::Feasible { cert, .. } => BaseInit::Cert(cert.clone()),
        SolveOutcome::Inconclusive { reason, .. } => BaseInit::Inconclusive(reason.clone()),
        _ => BaseInit::Infeasible,
    };
    let base_cert = match init {
        BaseInit::Cert(cert) => cert,
        BaseInit::Infeasible => {
            return Ok(OptReport {
                sense,
                outcome: OptOutcome::BaseInfeasible { solve: base_report },
                probes,
                inconclusive_probes,
            });
        }
        BaseInit::Inconclusive(reason) => {
            return Ok(OptReport {
                sense,
                outcome: OptOutcome::Inconclusive {
                    reason: format!("base feasibility probe inconclusive: {reason}"),
                },
                probes,
                inconclusive_probes,
            });
        }
    };

    // The base certificate's objective image is an achievable level.
    let b0 = work.quad_matrices()[0].clone();
    let mut level_hat = F::zero();
    for (w, p) in base_cert.weights.iter().zip(&base_cert.points) {
        level_hat += *w * b0.quad_form(p)?;
    }

    // Level range bound: |y^T B0 y| <= gersh(B0) r^2 on the ball.
    let span = b0.gershgorin_bound() * r_hom * r_hom + F::one();

    enum Probe<F> {
        Feasible(SolveReport<F>),
        Refuted,
        Unresolved,
    }
    let mut probe_at = |level: F, tag: u64, epsilon: F| -> Result<Probe<F>> {
        let mut rhs = work.rhs().to_vec();
        rhs[0] = level;
        let probe_sys = QuadraticSystem::homogeneous(work.quad_matrices().to_vec(), rhs)?;
        let report = solve_feasibility(
            &probe_sys,
            &probe_cfg(epsilon, rng::child_seed(cfg.feas.seed, tag)),
        )?;
        probes += 1;
        match report.outcome {
            SolveOutcome::Feasible { .. } => Ok(Probe::Feasible(report)),
            SolveOutcome::Infeasible { .. } => Ok(Probe::Refuted),
            _ => {
                inconclusive_probes += 1;
                Ok(Probe::Unresolved)
            }
        }
    };

    // Establish the certified endpoint at the base level.
    let mut best = match probe_at(level_hat, 0x10_00, cfg.probe_epsilon)? {
        Probe::Feasible(report) => (level_hat, report),
        _ => {
            return Ok(OptReport {
                sense,
                outcome: OptOutcome::Inconclusive {
                    reason: "the base certificate's own level failed its feasibility probe"
                        .into(),
                },
                probes,
                inconclusive_probes,
            });
        }
    };

    // Bisect toward the requested end of the feasible interval. The
    // working interval treats an unresolved probe as infeasible (the
    // efficient guess), but only witness-refuted levels advance the
    // certified outer end that the reported bracket uses; `span` itself is
    // certified a priori by the Gershgorin range bound.
    let (mut lo, mut hi) = match sense {
        OptSense::Minimize => (-span, level_hat),
        OptSense::Maximize => (level_hat, span),
    };
    let mut outer_cert = match sense {
        OptSense::Minimize => lo,
        OptSense::Maximize => hi,
    };
    for k in 0..cfg.max_bisections {
        if (hi - lo).abs() <= cfg.level_tol {
            break;
        }
        let mid = (lo + hi) / F::c(2.0);
        let feasible = match probe_at(mid, 0x20_00 + k as u64, cfg.probe_epsilon)? {
            Probe::Feasible(report) => Some(report),
            Probe::Refuted => {
                outer_cert = mid;
                None
            }
            Probe::Unresolved => None,
        };
        match (sense, feasible) {
            (OptSense::Minimize, Some(report)) => {
                hi = mid;
                best = (mid, report);
            }
            (OptSense::Minimize, None) => lo = mid,
            (OptSense::Maximize, Some(report)) => {
                lo = mid;
                best = (mid, report);
            }
            (OptSense::Maximize, None) => hi = mid,
        }
    }

    // Back the reported level off into the feasible side of the bracket
    // and certify it tightly. The bisection endpoints are only accurate to
    // the probe tolerance, so the first backed-off level can still sit a
    // hair outside the hull; each failed attempt walks further inward
    // before falling back to the probe-accuracy certificate.
    let step = cfg.level_tol.max(cfg.probe_epsilon);
    let toward_hat = |level: F, delta: F| match sense {
        OptSense::Minimize => (level + delta).min(level_hat),
        OptSense::Maximize => (level - delta).max(level_hat),
    };
    let mut target = toward_hat(best.0, cfg.level_tol / F::c(2.0));
    let mut tightened: Option<(F, SolveReport<F>)> = None;
    for attempt in 0..4u64 {
        if let Probe::Feasible(report) = probe_at(target, 0x30_00 + attempt, cfg.final_epsilon)? {
            tightened = Some((target, report));
            break;
        }
        if target == level_hat {
            break;
        }
        target = toward_hat(target, step);
    }
    let (value, tight, solve) = match tightened {
        Some((level, report)) => (level, true, report),
        None => (best.0, false, best.1),
    };

    // The reported bound is certified when the working interval's outer end
    // is itself the last witness-refuted level (or the a-priori span); an
    // unresolved probe that later gets out-flanked by a refutation leaves no
    // gap between the two.
    let bound_certified = match sense {
        OptSense::Minimize => outer_cert == lo,
        OptSense::Maximize => outer_cert == hi,
    };
    let bracket = match sense {
        OptSense::Minimize => (outer_cert + level_shift, hi + level_shift),
        OptSense::Maximize => (lo + level_shift, outer_cert + level_shift),
    };
    Ok(OptReport {
        sense,
        outcome: OptOutcome::Optimal {
            value: value + level_shift,
            bracket,
            tight,
            bound_certified,
            solve,
        },
        probes,
        inconclusive_probes,
    })
}

/// The homogeneous system whose hull certificate an optimization report's
/// `value` refers to: the objective stacked as equation zero with
/// right-hand side `value` minus the objective constant, homogenized when
/// the inputs carry linear or constant terms.
///
/// Lets callers re-verify an optimization certificate independently: the
/// report's `solve` outcome is a plain feasibility result for this system.
pub fn optimization_probe_system<F: Scalar>(
    objective: &QuadObjective<F>,
    sys: &QuadraticSystem<F>,
    value: F,
) -> Result<QuadraticSystem<F>> {
    let aug = augmented_system(objective, sys)?;
    let work = if aug.is_homogeneous() {
        aug
    } else {
        aug.homogenize().system
    };
    let mut rhs = work.rhs().to_vec();
    rhs[0] = value - objective.constant;
    QuadraticSystem::homogeneous(work.quad_matrices().to_vec(), rhs)
}

/// Stacks the objective on top of the constraints as equation zero (with a
/// placeholder right-hand side).
fn augmented_system<F: Scalar>(
    objective: &QuadObjective<F>,
    sys: &QuadraticSystem<F>,
) -> Result<QuadraticSystem<F>> {
    let n = sys.n();
    if objective.quad.order() != n {
        return Err(Error::DimensionMismatch {
            context: "objective order",
            expected: n,
            got: objective.quad.order(),
        });
    }
    let mut quad = Vec::with_capacity(sys.m() + 1);
    quad.push(objective.quad.clone());
    quad.extend(sys.quad_matrices().iter().cloned());

    let any_linear = objective.linear.is_some() || sys.linear_terms().is_some();
    let linear = if any_linear {
        let mut lin = Vec::with_capacity(sys.m() + 1);
        lin.push(objective.linear.clone().unwrap_or_else(|| vec![F::zero(); n]));
        match sys.linear_terms() {
            Some(ls) => lin.extend(ls.iter().cloned()),
            None => lin.extend(std::iter::repeat(vec![F::zero(); n]).take(sys.m())),
        }
        Some(lin)
    } else {
        None
    };

    let any_constant = objective.constant != F::zero() || sys.constant_terms().is_some();
    let constant = if any_constant {
        let mut con = Vec::with_capacity(sys.m() + 1);
        // The objective's constant shifts the level, not the embedded
        // equation; level bookkeeping happens in the caller.
        con.push(F::zero());
        match sys.constant_terms() {
            Some(ds) => con.extend(ds.iter().copied()),
            None => con.extend(std::iter::repeat(F::zero()).take(sys.m())),
        }
        Some(con)
    } else {
        None
    };

    let mut rhs = Vec::with_capacity(sys.m() + 1);
    rhs.push(F::zero());
    rhs.extend_from_slice(sys.rhs());

    QuadraticSystem::new(quad, linear, constant, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use approx::assert_abs_diff_eq;

    /// Q(x, y) = (x^2 - y^2, 2xy): over the ball of radius r the image
    /// hull is the disk of radius r^2.
    fn disk_quads() -> Vec<SymMatrix<f64>> {
        vec![
            SymMatrix::diagonal(&[1.0, -1.0]),
            SymMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap(),
        ]
    }

    fn disk_system(b: [f64; 2]) -> QuadraticSystem<f64> {
        QuadraticSystem::homogeneous(disk_quads(), b.to_vec()).unwrap()
    }

    fn fixed_cfg(radius: f64) -> SolveConfig<f64> {
        SolveConfig {
            schedule: RadiusSchedule::Fixed(radius),
            ..SolveConfig::default()
        }
    }

    fn expect_feasible(report: &SolveReport<f64>) -> (&ConvexCertificate<f64>, f64) {
        match &report.outcome {
            SolveOutcome::Feasible { cert, residual, .. } => (cert, *residual),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn interior_target_is_feasible_with_valid_certificate() {
        let sys = disk_system([0.3, 0.1]);
        let report = solve_feasibility(&sys, &fixed_cfg(1.0)).unwrap();
        let (cert, residual) = expect_feasible(&report);
        assert!(residual <= 1e-6, "residual {residual}");
        cert.validate(2).unwrap();
        assert!(cert.len() <= sys.m() + 1, "{} terms", cert.len());
        // The psd form maps to the same target.
        match &report.outcome {
            SolveOutcome::Feasible { psd, .. } => {
                let image = sys.apply_a(&psd.matrix).unwrap();
                assert_abs_diff_eq!(image[0], 0.3, epsilon = 1e-5);
                assert_abs_diff_eq!(image[1], 0.1, epsilon = 1e-5);
                assert!(psd.trace() <= 1.0 + 1e-8);
            }
            _ => unreachable!(),
        }
        assert!(!report.homogenized);
        assert_eq!(report.radius_history, vec![1.0]);
    }

    #[test]
    fn boundaryish_target_is_feasible() {
        // Norm 0.9 target in the unit-disk image.
        let sys = disk_system([0.54, 0.72]);
        let report = solve_feasibility(&sys, &fixed_cfg(1.0)).unwrap();
        let (_, residual) = expect_feasible(&report);
        assert!(residual <= 1e-6);
    }

    #[test]
    fn outside_target_yields_verified_witness() {
        let sys = disk_system([2.0, 0.0]);
        let report = solve_feasibility(&sys, &fixed_cfg(1.0)).unwrap();
        let witness = match &report.outcome {
            SolveOutcome::Infeasible { witness } => witness,
            other => panic!("expected infeasible, got {other:?}"),
        };
        // True distance is 1; the certified gap is within a factor two.
        assert!(witness.gap >= 1.0 - 1e-6, "gap {}", witness.gap);
        assert!(witness.gap <= 2.0 + 1e-6, "gap {}", witness.gap);
        assert_eq!(witness.radius, 1.0);
        verify_witness(&sys, witness, 1e-10, 7, 128).unwrap();
    }

    #[test]
    fn doubling_schedule_grows_until_feasible() {
        // b = (3, 0) needs radius sqrt(3); starting at 1 the schedule
        // doubles once.
        let sys = disk_system([3.0, 0.0]);
        let cfg = SolveConfig {
            schedule: RadiusSchedule::Doubling {
                r0: Some(1.0),
                r_max: 64.0,
            },
            ..SolveConfig::default()
        };
        let report = solve_feasibility(&sys, &cfg).unwrap();
        let (cert, residual) = expect_feasible(&report);
        assert!(residual <= 1e-6);
        assert_eq!(report.radius_history, vec![1.0, 2.0]);
        assert_eq!(cert.radius, 2.0);
    }

    #[test]
    fn doubling_uses_computed_lower_bound() {
        // ||A_1|| = ||A_2|| = 1 and b = (0.5, 0): the lower bound is
        // sqrt(0.5), already enough (disk radius 0.5 contains b).
        let sys = disk_system([0.5, 0.0]);
        let cfg = SolveConfig {
            schedule: RadiusSchedule::Doubling {
                r0: None,
                r_max: 16.0,
            },
            ..SolveConfig::default()
        };
        let report = solve_feasibility(&sys, &cfg).unwrap();
        expect_feasible(&report);
        assert_eq!(report.radius_history.len(), 1);
        assert_abs_diff_eq!(report.radius_history[0], 0.5f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn radius_cap_reports_exceeded_with_witness() {
        let sys = disk_system([3.0, 0.0]);
        let cfg = SolveConfig {
            schedule: RadiusSchedule::Doubling {
                r0: Some(0.5),
                r_max: 1.0,
            },
            ..SolveConfig::default()
        };
        let report = solve_feasibility(&sys, &cfg).unwrap();
        match &report.outcome {
            SolveOutcome::RadiusExceeded {
                last_witness,
                best_gap,
            } => {
                let witness = last_witness.as_ref().expect("witness at the cap");
                assert_eq!(witness.radius, 1.0);
                verify_witness(&sys, witness, 1e-10, 3, 128).unwrap();
                // Distance from (3,0) to the unit disk is 2.
                assert!(*best_gap >= 2.0 - 1e-6);
            }
            other => panic!("expected radius exceeded, got {other:?}"),
        }
        assert_eq!(report.radius_history, vec![0.5, 1.0]);
    }

    #[test]
    fn zero_rhs_is_trivially_feasible() {
        let sys = disk_system([0.0, 0.0]);
        let report = solve_feasibility(&sys, &fixed_cfg(2.0)).unwrap();
        let (cert, residual) = expect_feasible(&report);
        assert_eq!(residual, 0.0);
        assert_eq!(cert.points, vec![vec![0.0, 0.0]]);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn zero_matrix_with_nonzero_rhs_is_infeasible() {
        let sys = QuadraticSystem::homogeneous(
            vec![SymMatrix::identity(2), SymMatrix::zero(2)],
            vec![1.0, 0.5],
        )
        .unwrap();
        let report = solve_feasibility(&sys, &fixed_cfg(1.0)).unwrap();
        match &report.outcome {
            SolveOutcome::Infeasible { witness } => {
                verify_witness(&sys, witness, 1e-10, 11, 128).unwrap();
                assert_abs_diff_eq!(witness.gap, 0.5, epsilon = 1e-12);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn inhomogeneous_systems_are_embedded() {
        // x^2 + 2x = 3 has the solution x = 1.
        let sys = QuadraticSystem::new(
            vec![SymMatrix::identity(1)],
            Some(vec![vec![2.0]]),
            None,
            vec![3.0],
        )
        .unwrap();
        let report = solve_feasibility(&sys, &fixed_cfg(2.0)).unwrap();
        assert!(report.homogenized);
        let (cert, residual) = expect_feasible(&report);
        assert!(residual <= 1e-6);
        // Certificates live in the embedded space with the converted
        // radius sqrt(2^2 + 1).
        assert_eq!(cert.points[0].len(), 2);
        assert_abs_diff_eq!(cert.radius, 5.0f64.sqrt(), epsilon = 1e-12);
        // The embedded certificate still validates.
        cert.validate(2).unwrap();
    }

    #[test]
    fn iteration_budget_reports_inconclusive() {
        // A near-boundary target off the axes needs several pivots, so a
        // one-iteration budget cannot reach the 1e-12 gap.
        let b = [0.999 * 0.7f64.cos(), 0.999 * 0.7f64.sin()];
        let sys = disk_system(b);
        let cfg = SolveConfig {
            max_iters: 1,
            epsilon: 1e-12,
            ..fixed_cfg(1.0)
        };
        let report = solve_feasibility(&sys, &cfg).unwrap();
        match report.outcome {
            SolveOutcome::Inconclusive { ref reason, best_gap } => {
                assert!(reason.contains("budget"), "reason: {reason}");
                assert!(best_gap.is_finite());
            }
            ref other => panic!("expected inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn solves_are_deterministic() {
        let sys = disk_system([0.4, -0.3]);
        let cfg = SolveConfig {
            seed: 42,
            ..fixed_cfg(1.0)
        };
        let a = solve_feasibility(&sys, &cfg).unwrap();
        let b = solve_feasibility(&sys, &cfg).unwrap();
        match (&a.outcome, &b.outcome) {
            (
                SolveOutcome::Feasible {
                    cert: ca,
                    residual: ra,
                    ..
                },
                SolveOutcome::Feasible {
                    cert: cb,
                    residual: rb,
                    ..
                },
            ) => {
                assert_eq!(ra, rb);
                assert_eq!(ca.weights, cb.weights);
                assert_eq!(ca.points, cb.points);
            }
            other => panic!("expected two feasible outcomes, got {other:?}"),
        }
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.oracle_probes, b.oracle_probes);
    }

    #[test]
    fn witness_verifier_rejects_corruptions() {
        let sys = disk_system([2.0, 0.0]);
        let report = solve_feasibility(&sys, &fixed_cfg(1.0)).unwrap();
        let witness = match report.outcome {
            SolveOutcome::Infeasible { witness } => witness,
            other => panic!("expected infeasible, got {other:?}"),
        };

        let mut bad = witness.clone();
        bad.hyperplane.offset += 0.1;
        match verify_witness(&sys, &bad, 1e-10, 0, 64) {
            Err(Error::InvalidCertificate { check, .. }) => {
                assert_eq!(check, "hyperplane_matches_bisector")
            }
            other => panic!("expected bisector failure, got {other:?}"),
        }

        let mut bad = witness.clone();
        bad.gap *= 2.0;
        match verify_witness(&sys, &bad, 1e-10, 0, 64) {
            Err(Error::InvalidCertificate { check, .. }) => assert_eq!(check, "gap_matches"),
            other => panic!("expected gap failure, got {other:?}"),
        }

        // An iterate on the wrong side of the target flips the separation.
        let mut bad = witness.clone();
        bad.iterate = vec![3.0, 0.0];
        bad.gap = 1.0;
        bad.hyperplane = witness_hyperplane(&[2.0, 0.0], &bad.iterate).unwrap();
        let err = verify_witness(&sys, &bad, 1e-10, 0, 64).unwrap_err();
        match err {
            Error::InvalidCertificate { check, .. } => {
                assert!(
                    check == "no_weak_pivot" || check == "separation_probes",
                    "unexpected check {check}"
                );
            }
            other => panic!("expected certificate failure, got {other:?}"),
        }
    }

    #[test]
    fn optimization_finds_both_ends_of_the_slice() {
        // On the slice x^2 + y^2 = 1 the objective x^2 - y^2 spans [-1, 1].
        // The constraint pins the point norm at 1, so any radius >= 1
        // decides the same levels; 1.5 keeps the probe targets off the
        // hull's trace facet (see the solve_optimization docs).
        let constraint =
            QuadraticSystem::homogeneous(vec![SymMatrix::identity(2)], vec![1.0]).unwrap();
        let objective = QuadObjective {
            quad: SymMatrix::diagonal(&[1.0, -1.0]),
            linear: None,
            constant: 0.0,
        };
        let cfg = OptConfig::<f64>::default();

        let min = solve_optimization(&objective, &constraint, 1.5, OptSense::Minimize, &cfg)
            .unwrap();
        match min.outcome {
            OptOutcome::Optimal {
                value,
                bracket,
                tight,
                bound_certified,
                ref solve,
            } => {
                assert!(value >= -1.0 - 1e-4, "value {value}");
                assert!(value <= -1.0 + 5e-3, "value {value}");
                // The reported level walks back into the feasible side, so it
                // may sit a little above the bracket's top.
                assert!(value >= bracket.0 && value <= bracket.1 + 5e-3);
                assert!(bracket.1 - bracket.0 <= 1e-3 + 1e-12);
                assert!(tight);
                assert!(bound_certified);
                expect_feasible(solve);
            }
            ref other => panic!("expected optimal, got {other:?}"),
        }

        let max = solve_optimization(&objective, &constraint, 1.5, OptSense::Maximize, &cfg)
            .unwrap();
        match max.outcome {
            OptOutcome::Optimal { value, .. } => {
                assert!(value <= 1.0 + 1e-4, "value {value}");
                assert!(value >= 1.0 - 5e-3, "value {value}");
            }
            ref other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn probe_system_reconstructs_the_certified_instance() {
        // Homogeneous case: the certificate inside an optimal report must
        // satisfy the reconstructed probe system at the reported value.
        let constraint =
            QuadraticSystem::homogeneous(vec![SymMatrix::<f64>::identity(2)], vec![1.0]).unwrap();
        let objective = QuadObjective {
            quad: SymMatrix::diagonal(&[1.0, -1.0]),
            linear: None,
            constant: 0.0,
        };
        let cfg = OptConfig::<f64>::default();
        let report =
            solve_optimization(&objective, &constraint, 1.5, OptSense::Minimize, &cfg).unwrap();
        let (value, solve) = match &report.outcome {
            OptOutcome::Optimal { value, solve, .. } => (*value, solve),
            other => panic!("expected optimal, got {other:?}"),
        };
        let probe = optimization_probe_system(&objective, &constraint, value).unwrap();
        assert!(probe.is_homogeneous());
        match &solve.outcome {
            SolveOutcome::Feasible { cert, .. } => {
                assert!(cert.residual(&probe).unwrap() <= 2.0 * cfg.final_epsilon);
            }
            other => panic!("expected feasible solve, got {other:?}"),
        }

        // Inhomogeneous case: linear terms force the embedded form, and
        // the certificate lives in the embedded coordinates.
        let objective = QuadObjective {
            quad: SymMatrix::zero(2),
            linear: Some(vec![1.0, 0.0]),
            constant: 0.0,
        };
        let report =
            solve_optimization(&objective, &constraint, 1.5, OptSense::Maximize, &cfg).unwrap();
        let (value, solve) = match &report.outcome {
            OptOutcome::Optimal { value, solve, .. } => (*value, solve),
            other => panic!("expected optimal, got {other:?}"),
        };
        let probe = optimization_probe_system(&objective, &constraint, value).unwrap();
        assert!(probe.is_homogeneous());
        assert_eq!(probe.n(), 3);
        match &solve.outcome {
            SolveOutcome::Feasible { cert, .. } => {
                assert_eq!(cert.points[0].len(), 3);
                assert!(cert.residual(&probe).unwrap() <= 2.0 * cfg.final_epsilon);
            }
            other => panic!("expected feasible solve, got {other:?}"),
        }
    }

    #[test]
    fn optimization_reports_base_infeasibility() {
        let constraint = disk_system([5.0, 0.0]);
        let objective = QuadObjective {
            quad: SymMatrix::identity(2),
            linear: None,
            constant: 0.0,
        };
        let report = solve_optimization(
            &objective,
            &constraint,
            1.0,
            OptSense::Minimize,
            &OptConfig::default(),
        )
        .unwrap();
        assert!(matches!(report.outcome, OptOutcome::BaseInfeasible { .. }));
    }

    #[test]
    fn optimization_handles_constant_shift() {
        // Same instance as above with objective shifted by 10.
        let constraint =
            QuadraticSystem::homogeneous(vec![SymMatrix::<f64>::identity(2)], vec![1.0]).unwrap();
        let objective = QuadObjective {
            quad: SymMatrix::diagonal(&[1.0, -1.0]),
            linear: None,
            constant: 10.0,
        };
        let report = solve_optimization(
            &objective,
            &constraint,
            1.5,
            OptSense::Minimize,
            &OptConfig::default(),
        )
        .unwrap();
        match report.outcome {
            OptOutcome::Optimal { value, .. } => {
                assert!((value - 9.0).abs() <= 5e-3, "value {value}");
            }
            ref other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_rejects_bad_radii() {
        let cfg = SolveConfig::<f64> {
            schedule: RadiusSchedule::Fixed(-1.0),
            ..SolveConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolveConfig::<f64> {
            schedule: RadiusSchedule::Doubling {
                r0: Some(4.0),
                r_max: 1.0,
            },
            ..SolveConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
