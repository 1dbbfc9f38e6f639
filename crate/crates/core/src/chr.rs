//! Quadratic systems and their convex-hull relaxation.
//!
//! A system is `q_k(x) = x^T A_k x + c_k^T x + d_k = b_k` for `k = 1..m`.
//! Its quadratic image map is `Q(x) = (q_1(x), ..., q_m(x))`; the hull of
//! `{Q(x) : ||x|| <= r}` is the relaxation the solver works in. For
//! homogeneous systems that hull coincides with the image of the
//! spectahedron `{X psd, tr X <= r^2}` under `X -> (<A_k, X>)_k`, which is
//! what lets hull certificates convert to psd certificates and back
//! ([`cert_to_psd`], [`psd_to_cert`]).
//!
//! The linear-maximization subproblem over the hull has a closed form for
//! homogeneous systems: `max { c^T Q(x) : ||x|| <= r }` equals
//! `r^2 max(lambda_max(sum_k c_k A_k), 0)` (the zero point is always in the
//! hull, hence the clamp). [`EigPivotOracle`] exploits this matrix-free.

use crate::error::{Error, Result};
use crate::geometry::{self, OracleReply, PivotCandidate, PivotOracle};
use crate::linalg::dense::DenseSym;
use crate::linalg::power::{max_eig_op, PowerConfig};
use crate::linalg::vec;
use crate::linalg::{jacobi_eigen, psd_rank_one_decomp, DecompMode, SymMatrix};
use crate::rng;
use crate::scalar::Scalar;

/// System of quadratic equations `x^T A_k x + c_k^T x + d_k = b_k`.
#[derive(Debug, Clone)]
pub struct QuadraticSystem<F> {
    quad: Vec<SymMatrix<F>>,
    linear: Option<Vec<Vec<F>>>,
    constant: Option<Vec<F>>,
    rhs: Vec<F>,
    n: usize,
}

impl<F: Scalar> QuadraticSystem<F> {
    /// Homogeneous system `x^T A_k x = b_k`.
    pub fn homogeneous(quad: Vec<SymMatrix<F>>, rhs: Vec<F>) -> Result<Self> {
        Self::new(quad, None, None, rhs)
    }

    /// General system with optional linear (`c_k`) and constant (`d_k`)
    /// parts.
    pub fn new(
        quad: Vec<SymMatrix<F>>,
        linear: Option<Vec<Vec<F>>>,
        constant: Option<Vec<F>>,
        rhs: Vec<F>,
    ) -> Result<Self> {
        let m = quad.len();
        if m == 0 {
            return Err(Error::EmptySystem);
        }
        let n = quad[0].order();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        for a in &quad {
            if a.order() != n {
                return Err(Error::DimensionMismatch {
                    context: "quadratic matrix order",
                    expected: n,
                    got: a.order(),
                });
            }
        }
        if rhs.len() != m {
            return Err(Error::DimensionMismatch {
                context: "right-hand side length",
                expected: m,
                got: rhs.len(),
            });
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("right-hand side must be finite".into()));
        }
        if let Some(lin) = &linear {
            if lin.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "linear term count",
                    expected: m,
                    got: lin.len(),
                });
            }
            for c in lin {
                if c.len() != n {
                    return Err(Error::DimensionMismatch {
                        context: "linear term length",
                        expected: n,
                        got: c.len(),
                    });
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidConfig("linear terms must be finite".into()));
                }
            }
        }
        if let Some(d) = &constant {
            if d.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "constant term count",
                    expected: m,
                    got: d.len(),
                });
            }
            if d.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("constant terms must be finite".into()));
            }
        }
        Ok(QuadraticSystem {
            quad,
            linear,
            constant,
            rhs,
            n,
        })
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of equations.
    pub fn m(&self) -> usize {
        self.quad.len()
    }

    pub fn rhs(&self) -> &[F] {
        &self.rhs
    }

    pub fn quad_matrices(&self) -> &[SymMatrix<F>] {
        &self.quad
    }

    pub fn linear_terms(&self) -> Option<&[Vec<F>]> {
        self.linear.as_deref()
    }

    pub fn constant_terms(&self) -> Option<&[F]> {
        self.constant.as_deref()
    }

    /// True when every linear and constant part is absent or zero.
    pub fn is_homogeneous(&self) -> bool {
        let lin_zero = self
            .linear
            .as_ref()
            .map_or(true, |l| l.iter().all(|c| c.iter().all(|v| *v == F::zero())));
        let con_zero = self
            .constant
            .as_ref()
            .map_or(true, |d| d.iter().all(|v| *v == F::zero()));
        lin_zero && con_zero
    }

    /// Image map `Q(x) = (q_1(x), ..., q_m(x))`.
    pub fn eval_q(&self, x: &[F]) -> Result<Vec<F>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "eval_q",
                expected: self.n,
                got: x.len(),
            });
        }
        let mut out = Vec::with_capacity(self.m());
        for k in 0..self.m() {
            let mut v = self.quad[k].quad_form(x)?;
            if let Some(lin) = &self.linear {
                v += vec::dot(&lin[k], x);
            }
            if let Some(d) = &self.constant {
                v += d[k];
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Spectahedron image `(<A_1, X>, ..., <A_m, X>)`. Defined for
    /// homogeneous systems only.
    pub fn apply_a(&self, x: &SymMatrix<F>) -> Result<Vec<F>> {
        if !self.is_homogeneous() {
            return Err(Error::Inhomogeneous { context: "apply_a" });
        }
        self.quad.iter().map(|a| a.frob_inner(x)).collect()
    }

    /// Per-equation Gershgorin bounds on the spectral radius of `A_k`.
    pub fn gershgorin_bounds(&self) -> Vec<F> {
        self.quad.iter().map(|a| a.gershgorin_bound()).collect()
    }

    /// Embeds the system into homogeneous form on `n + 1` variables.
    ///
    /// Each equation becomes `y^T B_k y = b_k - d_k` with
    /// `B_k = [[A_k, c_k/2], [c_k^T/2, 0]]` for `y = (x, z)`, and one
    /// equation `z^2 = 1` is appended. A solution `y` of the homogeneous
    /// system with `z = -1` maps back by negating the whole vector, so the
    /// back-map fixes signs to `z >= 0`.
    ///
    /// An already homogeneous system is returned unchanged (flagged, with a
    /// warning logged) rather than being embedded.
    pub fn homogenize(&self) -> Homogenized<F> {
        if self.is_homogeneous() {
            log::warn!("homogenize called on an already homogeneous system");
            return Homogenized {
                system: self.clone(),
                source_n: self.n,
                already_homogeneous: true,
            };
        }
        let n = self.n;
        let m = self.m();
        let half = F::c(0.5);
        let mut quad = Vec::with_capacity(m + 1);
        for k in 0..m {
            let mut trip: Vec<(usize, usize, F)> = self.quad[k].entries().to_vec();
            if let Some(lin) = &self.linear {
                for (i, c) in lin[k].iter().enumerate() {
                    if *c != F::zero() {
                        trip.push((i, n, half * *c));
                    }
                }
            }
            quad.push(
                SymMatrix::from_triplets(n + 1, trip)
                    .expect("border matrix built from validated entries"),
            );
        }
        quad.push(
            SymMatrix::from_triplets(n + 1, vec![(n, n, F::one())])
                .expect("unit corner entry is valid"),
        );
        let mut rhs: Vec<F> = self.rhs.clone();
        if let Some(d) = &self.constant {
            for (r, dk) in rhs.iter_mut().zip(d) {
                *r -= *dk;
            }
        }
        rhs.push(F::one());
        Homogenized {
            system: QuadraticSystem {
                quad,
                linear: None,
                constant: None,
                rhs,
                n: n + 1,
            },
            source_n: n,
            already_homogeneous: false,
        }
    }

    /// Starting radius for the doubling schedule:
    /// `min_k sqrt(|b_k| / ||A_k||_2)` over equations with `b_k != 0`.
    ///
    /// Any solution must satisfy `|b_k| <= ||A_k||_2 ||x||^2` equation by
    /// equation, so this radius is a sound lower bound on the norm of every
    /// solution. Errors when some `A_k` is zero with `b_k != 0` (no radius
    /// admits a solution) and when `b = 0` (the trivial point already
    /// solves the system). Defined for homogeneous systems.
    pub fn radius_lower_bound(&self, eig_tol: F, seed: u64) -> Result<F> {
        if !self.is_homogeneous() {
            return Err(Error::Inhomogeneous {
                context: "radius_lower_bound",
            });
        }
        let mut best: Option<F> = None;
        for (k, (a, b)) in self.quad.iter().zip(&self.rhs).enumerate() {
            if *b == F::zero() {
                continue;
            }
            if a.is_zero() {
                return Err(Error::InfeasibleComponent {
                    index: k,
                    rhs: b.as_f64(),
                });
            }
            let norm = a.spectral_norm(eig_tol, rng::child_seed(seed, k as u64))?;
            if norm <= F::zero() {
                return Err(Error::InfeasibleComponent {
                    index: k,
                    rhs: b.as_f64(),
                });
            }
            let r = (b.abs() / norm).sqrt();
            best = Some(match best {
                Some(cur) => cur.min(r),
                None => r,
            });
        }
        best.ok_or(Error::ZeroRhs)
    }
}

/// Result of [`QuadraticSystem::homogenize`].
#[derive(Debug, Clone)]
pub struct Homogenized<F> {
    pub system: QuadraticSystem<F>,
    /// Variable count of the source system.
    pub source_n: usize,
    /// True when the source was already homogeneous and returned unchanged.
    pub already_homogeneous: bool,
}

impl<F: Scalar> Homogenized<F> {
    /// Maps a homogenized-space point back toward source coordinates: the
    /// sign is fixed so the auxiliary coordinate is nonnegative, and when it
    /// is safely nonzero the point is rescaled to put it at exactly one
    /// before truncation.
    pub fn back_map(&self, y: &[F]) -> Vec<F> {
        if self.already_homogeneous {
            return y.to_vec();
        }
        debug_assert_eq!(y.len(), self.source_n + 1);
        let z = y[self.source_n];
        let sign = if z < F::zero() { -F::one() } else { F::one() };
        let z = z * sign;
        let scale = if z > F::c(1e-8) { sign / z } else { sign };
        y[..self.source_n].iter().map(|v| *v * scale).collect()
    }
}

/// Convex-combination certificate of hull membership:
/// `sum_i weights[i] * Q(points[i]) ~= b` with `||points[i]|| <= radius`.
#[derive(Debug, Clone)]
pub struct ConvexCertificate<F> {
    pub radius: F,
    pub weights: Vec<F>,
    pub points: Vec<Vec<F>>,
}

impl<F: Scalar> ConvexCertificate<F> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `sum_i weights[i] * Q(points[i])`.
    pub fn image(&self, sys: &QuadraticSystem<F>) -> Result<Vec<F>> {
        let mut acc = vec![F::zero(); sys.m()];
        for (w, p) in self.weights.iter().zip(&self.points) {
            let q = sys.eval_q(p)?;
            vec::axpy(*w, &q, &mut acc);
        }
        Ok(acc)
    }

    /// `|| image - b ||`.
    pub fn residual(&self, sys: &QuadraticSystem<F>) -> Result<F> {
        Ok(vec::dist(&self.image(sys)?, sys.rhs()))
    }

    /// Structural validity: matching lengths, finite values, nonnegative
    /// weights summing to one, and every point inside the radius ball.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.weights.len() != self.points.len() {
            return Err(Error::InvalidCertificate {
                check: "lengths",
                detail: format!(
                    "{} weights vs {} points",
                    self.weights.len(),
                    self.points.len()
                ),
            });
        }
        if self.weights.is_empty() {
            return Err(Error::InvalidCertificate {
                check: "nonempty",
                detail: "certificate has no terms".into(),
            });
        }
        if !(self.radius > F::zero()) || !self.radius.is_finite() {
            return Err(Error::InvalidCertificate {
                check: "radius",
                detail: format!("radius {}", self.radius),
            });
        }
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_finite() || *w < -F::c(1e-10) {
                return Err(Error::InvalidCertificate {
                    check: "weights_nonneg",
                    detail: format!("weight {i} = {w}"),
                });
            }
        }
        let sum: F = self.weights.iter().copied().sum();
        if (sum - F::one()).abs() > F::c(1e-10) {
            return Err(Error::InvalidCertificate {
                check: "weights_sum",
                detail: format!("sum = {sum}"),
            });
        }
        let bound = self.radius * (F::one() + F::c(1e-8));
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::InvalidCertificate {
                    check: "point_dim",
                    detail: format!("point {i} has {} coordinates, expected {n}", p.len()),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidCertificate {
                    check: "point_finite",
                    detail: format!("point {i} has a non-finite coordinate"),
                });
            }
            let norm = vec::norm(p);
            if norm > bound {
                return Err(Error::InvalidCertificate {
                    check: "point_norm",
                    detail: format!("||point {i}|| = {norm} exceeds radius {}", self.radius),
                });
            }
        }
        Ok(())
    }
}

/// Spectahedron certificate: a psd matrix with `tr X <= radius^2` whose
/// image under the system's constraint map matches `b`.
#[derive(Debug, Clone)]
pub struct PsdCertificate<F> {
    pub matrix: SymMatrix<F>,
    pub radius: F,
}

impl<F: Scalar> PsdCertificate<F> {
    pub fn trace(&self) -> F {
        self.matrix.trace()
    }
}

/// Converts a hull certificate into the psd matrix
/// `X = sum_i weights[i] points[i] points[i]^T`.
///
/// `tr X = sum_i w_i ||x_i||^2 <= radius^2` holds automatically for a valid
/// input certificate and is re-checked here.
pub fn cert_to_psd<F: Scalar>(cert: &ConvexCertificate<F>, n: usize) -> Result<PsdCertificate<F>> {
    cert.validate(n)?;
    let mut dense = DenseSym::zeros(n);
    for (w, p) in cert.weights.iter().zip(&cert.points) {
        dense.add_scaled_outer(*w, p);
    }
    let matrix = SymMatrix::from_dense(&dense);
    let trace = matrix.trace();
    let budget = cert.radius * cert.radius * (F::one() + F::c(1e-8));
    if trace > budget {
        return Err(Error::InvalidCertificate {
            check: "trace_bound",
            detail: format!("tr X = {trace} exceeds radius^2 = {}", cert.radius * cert.radius),
        });
    }
    Ok(PsdCertificate {
        matrix,
        radius: cert.radius,
    })
}

/// Converts a psd certificate back into a hull certificate via rank-one
/// decomposition; every emitted point has norm `sqrt(tr X) <= radius`.
pub fn psd_to_cert<F: Scalar>(
    psd: &PsdCertificate<F>,
    mode: DecompMode,
) -> Result<ConvexCertificate<F>> {
    let trace = psd.trace();
    let budget = psd.radius * psd.radius * (F::one() + F::c(1e-8));
    if trace > budget {
        return Err(Error::InvalidCertificate {
            check: "trace_bound",
            detail: format!("tr X = {trace} exceeds radius^2 = {}", psd.radius * psd.radius),
        });
    }
    let decomp = psd_rank_one_decomp(&psd.matrix, mode)?;
    let (weights, points) = decomp.terms.into_iter().unzip();
    Ok(ConvexCertificate {
        radius: psd.radius,
        weights,
        points,
    })
}

/// Per-term least-squares polish: each point is rescaled by
/// `sqrt(gamma_i)` with `gamma_i = b^T Q(x_i) / ||Q(x_i)||^2`, which for a
/// homogeneous system scales its image to the best multiple of `Q(x_i)`
/// along `b` (never worse per term). Terms whose rescale would leave the
/// radius ball, with a nonpositive `gamma_i`, or with zero image are kept
/// as they are. Weights are unchanged.
///
/// The aggregate residual of a multi-term certificate can still grow;
/// callers that care compare before and after. Inhomogeneous systems are
/// returned unchanged (rescaling `x` does not rescale `Q(x)` there).
pub fn refine_cert<F: Scalar>(
    cert: &ConvexCertificate<F>,
    sys: &QuadraticSystem<F>,
) -> Result<ConvexCertificate<F>> {
    if !sys.is_homogeneous() {
        return Ok(cert.clone());
    }
    let b = sys.rhs();
    let mut out = cert.clone();
    let bound = cert.radius * (F::one() + F::c(1e-10));
    for p in &mut out.points {
        let q = sys.eval_q(p)?;
        let qq = vec::norm_sq(&q);
        if qq <= F::zero() {
            continue;
        }
        let gamma = vec::dot(b, &q) / qq;
        if gamma <= F::zero() {
            continue;
        }
        let scale = gamma.sqrt();
        if scale * vec::norm(p) > bound {
            continue;
        }
        for v in p.iter_mut() {
            *v *= scale;
        }
    }
    Ok(out)
}

/// Reduces a certificate to at most `m + 1` terms without changing its
/// image.
///
/// Two stages. For homogeneous systems with more terms than variables, the
/// certificate first takes a psd round trip (rebuild
/// `X = sum w_i x_i x_i^T`, re-decompose spectrally), which preserves the
/// image exactly and caps the term count at `n`. Then affine dependencies
/// among the image vectors are eliminated one at a time: a nonzero
/// `gamma` with `sum gamma_i Q(x_i) = 0` and `sum gamma_i = 0` lets weights
/// shift along `gamma` until one hits zero. Returns the reduced certificate
/// and `true`, or — if the dependency solve fails numerically — the best
/// certificate so far and `false` (with a warning logged).
pub fn caratheodory_prune<F: Scalar>(
    cert: &ConvexCertificate<F>,
    sys: &QuadraticSystem<F>,
) -> Result<(ConvexCertificate<F>, bool)> {
    let m = sys.m();
    let target = m + 1;
    let mut cert = cert.clone();
    if cert.len() <= target {
        return Ok((cert, true));
    }

    if sys.is_homogeneous() && cert.len() > sys.n() {
        let psd = cert_to_psd(&cert, sys.n())?;
        match psd_to_cert(&psd, DecompMode::Spectral) {
            Ok(compressed) => cert = compressed,
            Err(err) => {
                log::warn!("prune: spectral compression failed ({err}); continuing without it");
            }
        }
    }

    while cert.len() > target {
        let images: Vec<Vec<F>> = cert
            .points
            .iter()
            .map(|p| sys.eval_q(p))
            .collect::<Result<_>>()?;
        match eliminate_one(&mut cert, &images) {
            Ok(()) => {}
            Err(err) => {
                log::warn!("prune: affine elimination stopped early ({err})");
                return Ok((cert, false));
            }
        }
    }
    let sum: F = cert.weights.iter().copied().sum();
    if sum > F::zero() {
        for w in &mut cert.weights {
            *w /= sum;
        }
    }
    Ok((cert, true))
}

/// Removes one term from `cert` by shifting weights along an affine
/// dependency of the images.
fn eliminate_one<F: Scalar>(cert: &mut ConvexCertificate<F>, images: &[Vec<F>]) -> Result<()> {
    let t = cert.len();
    let m = images[0].len();
    let rows = m + 1;

    // System matrix: image vectors stacked over the all-ones row.
    let mut a: Vec<Vec<F>> = (0..rows)
        .map(|r| {
            (0..t)
                .map(|c| if r < m { images[c][r] } else { F::one() })
                .collect()
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(F::zero(), |acc, v| acc.max(v.abs()))
        .max(F::one());
    let tol = F::c(1e-12) * scale;

    // Row-echelon reduction with partial pivoting, tracking pivot columns.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..t {
        if row >= rows {
            break;
        }
        let (best_row, best_val) = (row..rows)
            .map(|r| (r, a[r][col].abs()))
            .fold((row, F::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        a.swap(row, best_row);
        let (done, below) = a.split_at_mut(row + 1);
        let pivot_row = &done[row];
        for target in below.iter_mut() {
            let factor = target[col] / pivot_row[col];
            if factor != F::zero() {
                for (tc, pc) in target[col..t].iter_mut().zip(&pivot_row[col..t]) {
                    *tc -= factor * *pc;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    let free_col = (0..t)
        .find(|c| !pivot_cols.contains(c))
        .ok_or_else(|| Error::InvalidCertificate {
            check: "prune_rank",
            detail: "no affine dependency found".into(),
        })?;

    // Null vector: gamma[free_col] = 1, back-substitute the pivots.
    let mut gamma = vec![F::zero(); t];
    gamma[free_col] = F::one();
    for &(r, pc) in pivots.iter().rev() {
        let mut acc = F::zero();
        for c in 0..t {
            if c != pc {
                acc += a[r][c] * gamma[c];
            }
        }
        gamma[pc] = -acc / a[r][pc];
    }

    // Verify the dependency before trusting it.
    let gamma_norm = vec::norm(&gamma);
    for r in 0..rows {
        let mut acc = F::zero();
        for (img, g) in images.iter().zip(&gamma) {
            acc += if r < m { img[r] } else { F::one() } * *g;
        }
        if acc.abs() > F::c(1e-8) * scale * gamma_norm {
            return Err(Error::InvalidCertificate {
                check: "prune_dependency",
                detail: format!("dependency residual {} at row {r}", acc.abs()),
            });
        }
    }

    // Shift weights along gamma until the first one reaches zero.
    let tiny = F::c(1e-14) * gamma.iter().fold(F::zero(), |acc, g| acc.max(g.abs()));
    let mut theta: Option<(F, usize)> = None;
    for (i, g) in gamma.iter().enumerate() {
        if *g > tiny {
            let ratio = cert.weights[i] / *g;
            if theta.map_or(true, |(best, _)| ratio < best) {
                theta = Some((ratio, i));
            }
        }
    }
    let (theta, drop_idx) = theta.ok_or_else(|| Error::InvalidCertificate {
        check: "prune_direction",
        detail: "dependency has no positive component".into(),
    })?;
    for (w, g) in cert.weights.iter_mut().zip(&gamma) {
        *w -= theta * *g;
        if *w < F::zero() {
            if *w < -F::c(1e-10) {
                return Err(Error::InvalidCertificate {
                    check: "prune_negative_weight",
                    detail: format!("weight fell to {w}"),
                });
            }
            *w = F::zero();
        }
    }
    cert.weights[drop_idx] = F::zero();

    let keep: Vec<bool> = cert.weights.iter().map(|w| *w > F::c(1e-15)).collect();
    let mut weights = Vec::new();
    let mut points = Vec::new();
    for (i, k) in keep.iter().enumerate() {
        if *k {
            weights.push(cert.weights[i]);
            points.push(std::mem::take(&mut cert.points[i]));
        }
    }
    if weights.is_empty() {
        return Err(Error::InvalidCertificate {
            check: "prune_empty",
            detail: "all weights eliminated".into(),
        });
    }
    cert.weights = weights;
    cert.points = points;
    Ok(())
}

/// One probe of the ball-constrained linear maximization
/// `max { c^T Q(x) : ||x|| <= r }`.
#[derive(Debug, Clone)]
pub struct BallProbe<F> {
    /// Argmax candidate (preimage), `||x|| <= r`.
    pub x: Vec<F>,
    /// `Q(x)`.
    pub image: Vec<F>,
    /// `c^T Q(x)`, recomputed from the image.
    pub score: F,
    /// Certified upper bound on the true maximum; `None` after an early
    /// stop.
    pub upper_bound: Option<F>,
    /// Eigenvalue estimate behind the candidate (diagnostics).
    pub lambda: F,
    /// Power/dense iterations spent.
    pub eig_iterations: usize,
}

/// Matrix-free pivot oracle for homogeneous systems.
///
/// For direction `c`, the hull maximum is
/// `max(r^2 lambda_max(sum_k c_k A_k), 0)`; the zero alternative is the
/// image of `x = 0`, which the eigenvalue identity alone would miss when
/// the composite matrix is negative definite. The oracle runs shifted power
/// iteration with a per-probe seed, warm-starts from the previous
/// eigenvector, and can stop early as soon as the Rayleigh quotient clears
/// the engine's pivot threshold.
pub struct EigPivotOracle<'a, F: Scalar> {
    sys: &'a QuadraticSystem<F>,
    radius: F,
    pub eig_tol: F,
    pub max_eig_iters: usize,
    seed: u64,
    probes: u64,
    warm: Option<Vec<F>>,
    gersh: Vec<F>,
    /// Certify no-pivot claims with a dense eigendecomposition when the
    /// system is small enough (n <= 200).
    pub exact_certify: bool,
}

impl<'a, F: Scalar> EigPivotOracle<'a, F> {
    pub fn new(sys: &'a QuadraticSystem<F>, radius: F, eig_tol: F, seed: u64) -> Result<Self> {
        if !sys.is_homogeneous() {
            return Err(Error::Inhomogeneous {
                context: "eig_pivot_oracle",
            });
        }
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(Error::InvalidRadius(format!("radius {radius}")));
        }
        if !(eig_tol > F::zero()) {
            return Err(Error::InvalidConfig("eig_tol must be positive".into()));
        }
        Ok(EigPivotOracle {
            sys,
            radius,
            eig_tol,
            max_eig_iters: 10 * sys.n() + 1000,
            seed,
            probes: 0,
            warm: None,
            gersh: sys.gershgorin_bounds(),
            exact_certify: false,
        })
    }

    pub fn radius(&self) -> F {
        self.radius
    }

    pub fn set_radius(&mut self, radius: F) {
        debug_assert!(radius > F::zero());
        self.radius = radius;
    }

    /// Number of eigen-probes issued so far.
    pub fn probe_count(&self) -> u64 {
        self.probes
    }

    fn zero_probe(&self) -> BallProbe<F> {
        BallProbe {
            x: vec![F::zero(); self.sys.n()],
            image: vec![F::zero(); self.sys.m()],
            score: F::zero(),
            upper_bound: Some(F::zero()),
            lambda: F::zero(),
            eig_iterations: 0,
        }
    }

    fn candidate_from_direction(&self, c: &[F], u: &[F]) -> (Vec<F>, Vec<F>, F) {
        let x = vec::scale(self.radius, u);
        let image = self.sys.eval_q(&x).expect("dimensions fixed at construction");
        let score = vec::dot(c, &image);
        (x, image, score)
    }

    /// Probes direction `c`. With `early_threshold` set, the power run may
    /// stop as soon as `r^2 * rayleigh` clears it (minus slack); the probe
    /// then has `upper_bound = None`. `tol` overrides the oracle's default
    /// eigenvalue tolerance for this probe.
    pub fn probe(
        &mut self,
        c: &[F],
        early_threshold: Option<F>,
        tol: Option<F>,
    ) -> Result<BallProbe<F>> {
        if c.len() != self.sys.m() {
            return Err(Error::DimensionMismatch {
                context: "oracle direction",
                expected: self.sys.m(),
                got: c.len(),
            });
        }
        if c.iter().all(|v| *v == F::zero()) {
            return Err(Error::ZeroDirection);
        }

        // The zero point scores 0; if that already clears the threshold
        // there is nothing to compute.
        if let Some(th) = early_threshold {
            if F::zero() >= th - geometry::pivot_slack(th) {
                let mut probe = self.zero_probe();
                probe.upper_bound = None;
                return Ok(probe);
            }
        }

        let shift: F = c
            .iter()
            .zip(&self.gersh)
            .map(|(ck, g)| ck.abs() * *g)
            .sum();
        if shift <= F::zero() {
            // Composite matrix is exactly zero: the maximum over the ball
            // is 0, attained at the origin.
            return Ok(self.zero_probe());
        }

        let cfg = PowerConfig {
            tol: tol.unwrap_or(self.eig_tol).max(F::c(100.0) * F::epsilon()),
            max_iters: self.max_eig_iters,
            shift,
            seed: rng::child_seed(self.seed, self.probes),
            warm_start: self.warm.clone(),
        };
        self.probes += 1;

        let r_sq = self.radius * self.radius;
        let early = early_threshold.map(|th| {
            let gate = th - geometry::pivot_slack(th);
            move |lambda: F, _res: F| r_sq * lambda >= gate
        });
        let quad = self.sys.quad_matrices();
        let op = |w: &[F], out: &mut [F]| {
            out.fill(F::zero());
            for (ck, a) in c.iter().zip(quad) {
                a.matvec_acc(*ck, w, out);
            }
        };
        let outcome = max_eig_op(op, self.sys.n(), &cfg, early)?;
        let pair = outcome.pair();
        self.warm = Some(pair.vector.clone());

        let (x, image, score) = self.candidate_from_direction(c, &pair.vector);
        let mut probe = BallProbe {
            x,
            image,
            score,
            upper_bound: None,
            lambda: pair.lambda,
            eig_iterations: outcome.iterations(),
        };
        if outcome.is_converged() {
            let upper = r_sq * (pair.lambda + pair.residual_norm);
            probe.upper_bound = Some(upper.max(F::zero()));
        }
        if probe.score < F::zero() {
            // The origin beats the eigen candidate.
            let zero = self.zero_probe();
            probe.x = zero.x;
            probe.image = zero.image;
            probe.score = F::zero();
        }
        Ok(probe)
    }

    /// Probes with a certified upper bound, using the dense eigensolver
    /// when `exact_certify` is set and the order permits, otherwise a fully
    /// converged power run at tolerance `tol`.
    pub fn certify(&mut self, c: &[F], tol: F) -> Result<BallProbe<F>> {
        if self.exact_certify && self.sys.n() <= 200 {
            if c.len() != self.sys.m() {
                return Err(Error::DimensionMismatch {
                    context: "oracle direction",
                    expected: self.sys.m(),
                    got: c.len(),
                });
            }
            if c.iter().all(|v| *v == F::zero()) {
                return Err(Error::ZeroDirection);
            }
            let n = self.sys.n();
            let mut dense = DenseSym::zeros(n);
            for (ck, a) in c.iter().zip(self.sys.quad_matrices()) {
                if *ck != F::zero() {
                    dense.add_scaled(a, *ck);
                }
            }
            let eig = jacobi_eigen(&dense, 40)?;
            let lambda = eig.values[0];
            self.warm = Some(eig.vectors[0].clone());
            let (x, image, score) = self.candidate_from_direction(c, &eig.vectors[0]);
            let r_sq = self.radius * self.radius;
            let margin = F::c(1e-10) * (F::one() + lambda.abs());
            let upper = (r_sq * (lambda + margin)).max(F::zero());
            let mut probe = BallProbe {
                x,
                image,
                score,
                upper_bound: Some(upper),
                lambda,
                eig_iterations: n,
            };
            if probe.score < F::zero() {
                let zero = self.zero_probe();
                probe.x = zero.x;
                probe.image = zero.image;
                probe.score = F::zero();
            }
            return Ok(probe);
        }
        self.probe(c, None, Some(tol))
    }
}

impl<'a, F: Scalar> PivotOracle<F> for EigPivotOracle<'a, F> {
    fn best_point(&mut self, direction: &[F], threshold: F) -> Result<OracleReply<F>> {
        let probe = self.probe(direction, Some(threshold), None)?;
        let candidate = PivotCandidate {
            point: probe.image,
            score: probe.score,
        };
        match probe.upper_bound {
            Some(upper)
                if candidate.score < threshold - geometry::pivot_slack(threshold) =>
            {
                Ok(OracleReply::Maximum {
                    candidate,
                    upper_bound: upper,
                })
            }
            _ => Ok(OracleReply::Pivot(candidate)),
        }
    }
}

/// Convenience constructor matching the module-level naming.
pub fn eig_pivot_oracle<'a, F: Scalar>(
    sys: &'a QuadraticSystem<F>,
    radius: F,
    eig_tol: F,
    seed: u64,
) -> Result<EigPivotOracle<'a, F>> {
    EigPivotOracle::new(sys, radius, eig_tol, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{run_chm, ChmOptions, ChmOutcome};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Q(x, y) = (x^2 - y^2, 2xy): the image of the unit ball is exactly
    /// the unit disk, which makes hull geometry analytic.
    fn disk_system() -> QuadraticSystem<f64> {
        let a1 = SymMatrix::diagonal(&[1.0, -1.0]);
        let a2 = SymMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap();
        QuadraticSystem::homogeneous(vec![a1, a2], vec![0.3, 0.1]).unwrap()
    }

    #[test]
    fn eval_q_hand_checked() {
        let sys = disk_system();
        // (1, 2): x^2 - y^2 = -3, 2xy = 4.
        assert_eq!(sys.eval_q(&[1.0, 2.0]).unwrap(), vec![-3.0, 4.0]);
    }

    #[test]
    fn eval_q_with_affine_parts() {
        // q(x) = x^2 + 2x + 3 at x = 2: 4 + 4 + 3 = 11.
        let sys = QuadraticSystem::new(
            vec![SymMatrix::identity(1)],
            Some(vec![vec![2.0]]),
            Some(vec![3.0]),
            vec![7.0],
        )
        .unwrap();
        assert_eq!(sys.eval_q(&[2.0]).unwrap(), vec![11.0]);
        assert!(!sys.is_homogeneous());
    }

    #[test]
    fn apply_a_hand_checked() {
        let sys = disk_system();
        // X = e1 e1^T: (<A_1, X>, <A_2, X>) = (1, 0).
        let x = SymMatrix::from_triplets(2, vec![(0, 0, 1.0)]).unwrap();
        assert_eq!(sys.apply_a(&x).unwrap(), vec![1.0, 0.0]);
        // X = I: traces are (0, 0).
        assert_eq!(sys.apply_a(&SymMatrix::identity(2)).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn apply_a_rejects_inhomogeneous() {
        let sys = QuadraticSystem::new(
            vec![SymMatrix::identity(1)],
            Some(vec![vec![1.0]]),
            None,
            vec![1.0],
        )
        .unwrap();
        assert!(matches!(
            sys.apply_a(&SymMatrix::identity(1)),
            Err(Error::Inhomogeneous { .. })
        ));
    }

    #[test]
    fn quadratic_image_scales_quadratically() {
        let sys = disk_system();
        let x = [0.4, -0.7];
        let q1 = sys.eval_q(&x).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let q9 = sys.eval_q(&x2).unwrap();
        for (a, b) in q1.iter().zip(&q9) {
            assert_abs_diff_eq!(9.0 * a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn homogenize_matches_source_on_unit_slice() {
        // q(x) = x^2 + 2x + 3 = 7 homogenizes to y^T B y = 4 with
        // B = [[1, 1], [1, 0]], plus z^2 = 1.
        let sys = QuadraticSystem::new(
            vec![SymMatrix::identity(1)],
            Some(vec![vec![2.0]]),
            Some(vec![3.0]),
            vec![7.0],
        )
        .unwrap();
        let hom = sys.homogenize();
        assert!(!hom.already_homogeneous);
        let hsys = &hom.system;
        assert_eq!(hsys.m(), 2);
        assert_eq!(hsys.n(), 2);
        assert_eq!(hsys.rhs(), &[4.0, 1.0]);
        assert!(hsys.is_homogeneous());
        // On the slice z = 1, images agree with the source minus constants.
        for x in [-2.0, 0.5, 3.0] {
            let src = sys.eval_q(&[x]).unwrap();
            let hom_img = hsys.eval_q(&[x, 1.0]).unwrap();
            assert_abs_diff_eq!(hom_img[0], src[0] - 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(hom_img[1], 1.0, epsilon = 1e-12);
            // Sign flip leaves the image unchanged.
            let flipped = hsys.eval_q(&[-x, -1.0]).unwrap();
            assert_eq!(hom_img, flipped);
        }
        // x = 2 solves the source, (2, 1) solves the embedding.
        assert_eq!(hsys.eval_q(&[2.0, 1.0]).unwrap(), vec![8.0, 1.0]);
        assert_eq!(sys.eval_q(&[2.0]).unwrap(), vec![11.0]);
    }

    #[test]
    fn homogenize_on_homogeneous_is_identity() {
        let sys = disk_system();
        let hom = sys.homogenize();
        assert!(hom.already_homogeneous);
        assert_eq!(hom.system.m(), sys.m());
        assert_eq!(hom.system.n(), sys.n());
        assert_eq!(hom.back_map(&[1.0, 2.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn back_map_fixes_sign_and_scale() {
        let sys = QuadraticSystem::new(
            vec![SymMatrix::identity(2)],
            Some(vec![vec![1.0, 0.0]]),
            None,
            vec![2.0],
        )
        .unwrap();
        let hom = sys.homogenize();
        assert_eq!(hom.back_map(&[3.0, -1.0, 1.0]), vec![3.0, -1.0]);
        // z = -1 negates, z = -0.5 negates then rescales to the unit slice.
        assert_eq!(hom.back_map(&[3.0, -1.0, -1.0]), vec![-3.0, 1.0]);
        assert_eq!(hom.back_map(&[1.0, 2.0, -0.5]), vec![-2.0, -4.0]);
    }

    #[test]
    fn radius_lower_bound_hand_checked() {
        // ||I|| = 1 with b = 4 gives 2; the off-diagonal matrix has norm 1
        // with b = 0.25 giving 0.5; the minimum wins.
        let sys = QuadraticSystem::homogeneous(
            vec![
                SymMatrix::identity(2),
                SymMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap(),
            ],
            vec![4.0, 0.25],
        )
        .unwrap();
        let r = sys.radius_lower_bound(1e-10, 0).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn radius_lower_bound_skips_zero_rhs_rows() {
        let sys = QuadraticSystem::homogeneous(
            vec![SymMatrix::identity(2), SymMatrix::zero(2)],
            vec![9.0, 0.0],
        )
        .unwrap();
        assert_abs_diff_eq!(sys.radius_lower_bound(1e-10, 0).unwrap(), 3.0, epsilon = 1e-6);
    }

    #[test]
    fn radius_lower_bound_rejects_impossible_component() {
        let sys = QuadraticSystem::homogeneous(
            vec![SymMatrix::identity(2), SymMatrix::zero(2)],
            vec![1.0, 5.0],
        )
        .unwrap();
        assert!(matches!(
            sys.radius_lower_bound(1e-10, 0),
            Err(Error::InfeasibleComponent { index: 1, .. })
        ));
    }

    #[test]
    fn radius_lower_bound_rejects_zero_rhs() {
        let sys =
            QuadraticSystem::homogeneous(vec![SymMatrix::identity(2)], vec![0.0]).unwrap();
        assert!(matches!(
            sys.radius_lower_bound(1e-10, 0),
            Err(Error::ZeroRhs)
        ));
    }

    #[test]
    fn cert_psd_round_trip_preserves_image() {
        let sys = disk_system();
        let cert = ConvexCertificate {
            radius: 1.0,
            weights: vec![0.5, 0.3, 0.2],
            points: vec![vec![1.0, 0.0], vec![0.0, 0.8], vec![0.6, 0.6]],
        };
        let image = cert.image(&sys).unwrap();
        let psd = cert_to_psd(&cert, 2).unwrap();
        // The spectahedron image equals the hull image.
        let via_a = sys.apply_a(&psd.matrix).unwrap();
        for (a, b) in image.iter().zip(&via_a) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // And decomposing back preserves it again, in both modes.
        for mode in [DecompMode::Spectral, DecompMode::Cholesky] {
            let back = psd_to_cert(&psd, mode).unwrap();
            back.validate(2).unwrap();
            assert!(back.len() <= 2);
            let back_image = back.image(&sys).unwrap();
            for (a, b) in image.iter().zip(&back_image) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn cert_validate_catches_defects() {
        let good = ConvexCertificate {
            radius: 1.0,
            weights: vec![0.5, 0.5],
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        good.validate(2).unwrap();

        let mut bad = good.clone();
        bad.weights[0] = -0.1;
        assert!(matches!(
            bad.validate(2),
            Err(Error::InvalidCertificate { check: "weights_nonneg", .. })
        ));

        let mut bad = good.clone();
        bad.weights[0] = 0.7;
        assert!(matches!(
            bad.validate(2),
            Err(Error::InvalidCertificate { check: "weights_sum", .. })
        ));

        let mut bad = good.clone();
        bad.points[1] = vec![2.0, 0.0];
        assert!(matches!(
            bad.validate(2),
            Err(Error::InvalidCertificate { check: "point_norm", .. })
        ));
    }

    #[test]
    fn refine_repairs_single_scaled_term() {
        // A = I, b = 1: the point sqrt(2) e1 has image 2; the least-squares
        // rescale brings it exactly to 1.
        let sys = QuadraticSystem::homogeneous(vec![SymMatrix::identity(1)], vec![1.0]).unwrap();
        let cert = ConvexCertificate {
            radius: 2.0,
            weights: vec![1.0],
            points: vec![vec![2.0f64.sqrt()]],
        };
        let before = cert.residual(&sys).unwrap();
        let refined = refine_cert(&cert, &sys).unwrap();
        let after = refined.residual(&sys).unwrap();
        assert_abs_diff_eq!(before, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(after, 0.0, epsilon = 1e-12);
        assert_eq!(refined.weights, cert.weights);
    }

    #[test]
    fn refine_respects_radius_and_inhomogeneity() {
        // Rescale would need ||x|| = sqrt(2) > radius 1.2: kept unchanged.
        let sys = QuadraticSystem::homogeneous(vec![SymMatrix::identity(1)], vec![2.0]).unwrap();
        let cert = ConvexCertificate {
            radius: 1.2,
            weights: vec![1.0],
            points: vec![vec![1.0]],
        };
        let refined = refine_cert(&cert, &sys).unwrap();
        assert_eq!(refined.points, cert.points);

        let inhom = QuadraticSystem::new(
            vec![SymMatrix::identity(1)],
            Some(vec![vec![1.0]]),
            None,
            vec![2.0],
        )
        .unwrap();
        let refined = refine_cert(&cert, &inhom).unwrap();
        assert_eq!(refined.points, cert.points);
    }

    #[test]
    fn prune_reduces_to_m_plus_one_terms() {
        let sys = disk_system();
        // Nine points on the unit circle with equal weights.
        let t = 9;
        let weights = vec![1.0 / t as f64; t];
        let points: Vec<Vec<f64>> = (0..t)
            .map(|i| {
                let phi = i as f64 * 0.61;
                vec![phi.cos(), phi.sin()]
            })
            .collect();
        let cert = ConvexCertificate {
            radius: 1.0,
            weights,
            points,
        };
        let image = cert.image(&sys).unwrap();
        let (pruned, complete) = caratheodory_prune(&cert, &sys).unwrap();
        assert!(complete);
        assert!(pruned.len() <= sys.m() + 1, "still {} terms", pruned.len());
        pruned.validate(2).unwrap();
        let pruned_image = pruned.image(&sys).unwrap();
        for (a, b) in image.iter().zip(&pruned_image) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn prune_keeps_small_certificates() {
        let sys = disk_system();
        let cert = ConvexCertificate {
            radius: 1.0,
            weights: vec![0.5, 0.5],
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let (pruned, complete) = caratheodory_prune(&cert, &sys).unwrap();
        assert!(complete);
        assert_eq!(pruned.len(), 2);
    }

    #[test]
    fn oracle_maximum_on_disk_is_analytic() {
        // Over the unit ball the image hull is the unit disk, so the
        // maximum of c^T v is ||c||.
        let sys = disk_system();
        let mut oracle = eig_pivot_oracle(&sys, 1.0, 1e-10, 0).unwrap();
        let probe = oracle.probe(&[1.0, 0.0], None, None).unwrap();
        assert_abs_diff_eq!(probe.score, 1.0, epsilon = 1e-7);
        let upper = probe.upper_bound.expect("converged probe");
        assert!(upper >= probe.score);
        assert!(upper <= 1.0 + 1e-6);
        // The maximizer's image is (1, 0).
        assert_abs_diff_eq!(probe.image[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(probe.image[1], 0.0, epsilon = 1e-6);

        let probe = oracle.probe(&[0.6, 0.8], None, None).unwrap();
        assert_abs_diff_eq!(probe.score, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn oracle_returns_origin_for_negative_definite_composite() {
        // A = -I: c = (1) makes the composite negative definite; the true
        // ball maximum of c^T Q is 0 at x = 0, not r^2 lambda_max = -r^2.
        let sys = QuadraticSystem::homogeneous(
            vec![SymMatrix::diagonal(&[-1.0, -1.0])],
            vec![-0.5],
        )
        .unwrap();
        let mut oracle = eig_pivot_oracle(&sys, 1.0, 1e-10, 0).unwrap();
        let probe = oracle.probe(&[1.0], None, None).unwrap();
        assert_eq!(probe.score, 0.0);
        assert_eq!(probe.upper_bound, Some(0.0));
        assert!(probe.x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn oracle_rejects_zero_direction_and_bad_dims() {
        let sys = disk_system();
        let mut oracle = eig_pivot_oracle(&sys, 1.0, 1e-8, 0).unwrap();
        assert!(matches!(
            oracle.probe(&[0.0, 0.0], None, None),
            Err(Error::ZeroDirection)
        ));
        assert!(oracle.probe(&[1.0], None, None).is_err());
    }

    #[test]
    fn oracle_drives_membership_to_convergence() {
        let sys = disk_system();
        let mut oracle = eig_pivot_oracle(&sys, 1.0, 1e-9, 7).unwrap();
        let start = sys.eval_q(&[1.0, 0.0]).unwrap();
        let run = run_chm(&mut oracle, &[0.3, 0.1], &start, &ChmOptions::new(1e-6)).unwrap();
        match run.outcome {
            ChmOutcome::Converged { state } => assert!(state.gap <= 1e-6),
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn oracle_drives_membership_to_witness() {
        // Target (2, 0) is at distance 1 from the unit disk.
        let sys = QuadraticSystem::homogeneous(
            disk_system().quad_matrices().to_vec(),
            vec![2.0, 0.0],
        )
        .unwrap();
        let mut oracle = eig_pivot_oracle(&sys, 1.0, 1e-10, 3).unwrap();
        let start = sys.eval_q(&[0.0, 1.0]).unwrap();
        let run = run_chm(&mut oracle, &[2.0, 0.0], &start, &ChmOptions::new(1e-6)).unwrap();
        match run.outcome {
            ChmOutcome::WitnessFound { state, hyperplane } => {
                assert!(state.gap >= 1.0 - 1e-6);
                assert!(state.gap <= 2.0 + 1e-6);
                // The hyperplane separates sampled disk points from the target.
                for i in 0..16 {
                    let phi = i as f64 * std::f64::consts::PI / 8.0;
                    let v = [phi.cos(), phi.sin()];
                    assert!(hyperplane.side(&v) >= -1e-7);
                }
                assert!(hyperplane.side(&[2.0, 0.0]) < 0.0);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn radius_bound_is_sound(
            coords in proptest::collection::vec(-2.0f64..2.0, 3),
        ) {
            // For b = Q(x̂) the bound can never exceed ||x̂||.
            let sys_base = QuadraticSystem::homogeneous(
                vec![
                    SymMatrix::diagonal(&[1.0, -1.0, 0.5]),
                    SymMatrix::from_triplets(3, vec![(0, 1, 1.0), (2, 2, 1.0)]).unwrap(),
                ],
                vec![1.0, 1.0],
            )
            .unwrap();
            let b = sys_base.eval_q(&coords).unwrap();
            prop_assume!(b.iter().any(|v| v.abs() > 1e-6));
            let sys = QuadraticSystem::homogeneous(
                sys_base.quad_matrices().to_vec(),
                b,
            ).unwrap();
            let r0 = sys.radius_lower_bound(1e-9, 0).unwrap();
            let norm = vec::norm(&coords);
            prop_assert!(r0 <= norm * (1.0 + 1e-6) + 1e-9);
        }

        #[test]
        fn theorem_round_trip_on_random_certificates(
            raw_w in proptest::collection::vec(0.01f64..1.0, 4),
            flat in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let sys = disk_system();
            let total: f64 = raw_w.iter().sum();
            let weights: Vec<f64> = raw_w.iter().map(|w| w / total).collect();
            let points: Vec<Vec<f64>> = flat.chunks(2).map(|c| c.to_vec()).collect();
            let radius = points.iter().map(|p| vec::norm(p)).fold(0.0, f64::max).max(0.1);
            let cert = ConvexCertificate { radius, weights, points };
            let image = cert.image(&sys).unwrap();

            let psd = cert_to_psd(&cert, 2).unwrap();
            prop_assert!(psd.trace() <= radius * radius * (1.0 + 1e-9));
            let via_a = sys.apply_a(&psd.matrix).unwrap();
            for (a, b) in image.iter().zip(&via_a) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
            for mode in [DecompMode::Spectral, DecompMode::Cholesky] {
                let back = psd_to_cert(&psd, mode).unwrap();
                back.validate(2).unwrap();
                let back_image = back.image(&sys).unwrap();
                for (a, b) in image.iter().zip(&back_image) {
                    prop_assert!((a - b).abs() <= 1e-8);
                }
            }
        }

        #[test]
        fn prune_preserves_image_on_random_certificates(
            raw_w in proptest::collection::vec(0.01f64..1.0, 10),
            flat in proptest::collection::vec(-1.0f64..1.0, 20),
        ) {
            let sys = disk_system();
            let total: f64 = raw_w.iter().sum();
            let weights: Vec<f64> = raw_w.iter().map(|w| w / total).collect();
            let points: Vec<Vec<f64>> = flat.chunks(2).map(|c| c.to_vec()).collect();
            let radius = points.iter().map(|p| vec::norm(p)).fold(0.0, f64::max).max(0.1);
            let cert = ConvexCertificate { radius, weights, points };
            let image = cert.image(&sys).unwrap();
            let (pruned, complete) = caratheodory_prune(&cert, &sys).unwrap();
            if complete {
                prop_assert!(pruned.len() <= sys.m() + 1);
            }
            pruned.validate(2).unwrap();
            let pruned_image = pruned.image(&sys).unwrap();
            for (a, b) in image.iter().zip(&pruned_image) {
                prop_assert!((a - b).abs() <= 1e-7, "image drifted: {} vs {}", a, b);
            }
        }

        #[test]
        fn oracle_upper_bound_dominates_samples(
            c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, seed in 0u64..25,
        ) {
            prop_assume!(c0.abs() + c1.abs() > 1e-3);
            let sys = disk_system();
            let mut oracle = eig_pivot_oracle(&sys, 1.0, 1e-9, seed).unwrap();
            let probe = oracle.probe(&[c0, c1], None, None).unwrap();
            let upper = probe.upper_bound.expect("converged");
            // Sampled ball points never beat the certified bound.
            for k in 0..20 {
                let x: Vec<f64> = crate::rng::unit_vector(2, seed.wrapping_add(k));
                let img = sys.eval_q(&x).unwrap();
                let score = c0 * img[0] + c1 * img[1];
                prop_assert!(score <= upper + 1e-7);
            }
        }
    }
}
