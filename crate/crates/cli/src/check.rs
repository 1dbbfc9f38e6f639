//! Independent validation of solver output against the original instance.
//!
//! Every check re-derives its quantity from the instance and the claimed
//! certificate or witness; nothing is taken from the result file beyond
//! the objects under test and the solve tolerance they were produced at.

use crate::formats::{ResultFile, Status};
use crate::{CliResult, DataError};
use chrsolve_core::chr::QuadraticSystem;
use chrsolve_core::linalg::{DenseSym, SymMatrix};
use chrsolve_core::solver::verify_witness;
use chrsolve_core::Error;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("check report serializes");
        s.push('\n');
        s
    }
}

fn item(items: &mut Vec<CheckItem>, name: &'static str, pass: bool, detail: String) -> bool {
    items.push(CheckItem { name, pass, detail });
    pass
}

/// Validates `result` against `sys`. Feasible results get their convex
/// certificate re-verified arithmetically; witness results get the full
/// separation check. Returns a data error (not a failed report) when the
/// result carries nothing checkable.
pub fn check_certificate(
    sys: &QuadraticSystem<f64>,
    result: &ResultFile,
    tol: f64,
) -> CliResult<CheckReport> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(DataError("check tolerance must be positive and finite".into()));
    }
    let work = if result.homogenized {
        sys.homogenize().system
    } else {
        sys.clone()
    };
    match result.status {
        Status::Feasible => {
            let cert = result.certificate.as_ref().ok_or_else(|| {
                DataError("feasible result carries no certificate".into())
            })?;
            Ok(check_feasible(&work, result, cert, tol))
        }
        Status::Witness => {
            if let Some(w) = &result.witness {
                Ok(check_witness(&work, &w.to_witness()))
            } else if result
                .qp
                .as_ref()
                .is_some_and(|q| q.infeasible_constraint.is_some())
            {
                Err(DataError(
                    "constraint-refutation results carry their own sub-solve; \
                     check that solve's result file instead"
                        .into(),
                ))
            } else {
                Err(DataError("witness result carries no witness".into()))
            }
        }
        Status::RadiusExceeded | Status::Inconclusive => Err(DataError(format!(
            "status `{}` carries no certificate to check",
            result.status.as_str()
        ))),
    }
}

fn check_feasible(
    work: &QuadraticSystem<f64>,
    result: &ResultFile,
    cert: &crate::formats::CertificateDto,
    tol: f64,
) -> CheckReport {
    let mut items = Vec::new();
    let n = work.n();
    let r = cert.radius;

    let dims_ok = !cert.weights.is_empty()
        && cert.points.len() == cert.weights.len()
        && cert.points.iter().all(|p| p.len() == n)
        && r > 0.0;
    if !item(
        &mut items,
        "dims",
        dims_ok,
        format!(
            "{} weights, {} points, system n = {n}, radius {r}",
            cert.weights.len(),
            cert.points.len()
        ),
    ) {
        return CheckReport { items };
    }

    let finite_ok = r.is_finite()
        && cert.weights.iter().all(|w| w.is_finite())
        && cert.points.iter().flatten().all(|v| v.is_finite());
    if !item(
        &mut items,
        "finite",
        finite_ok,
        if finite_ok { "all entries finite" } else { "non-finite entry" }.into(),
    ) {
        return CheckReport { items };
    }

    let min_w = cert.weights.iter().copied().fold(f64::INFINITY, f64::min);
    item(
        &mut items,
        "weights_nonneg",
        min_w >= -tol,
        format!("min weight {min_w:.3e}"),
    );

    let sum_w: f64 = cert.weights.iter().sum();
    item(
        &mut items,
        "weights_sum",
        (sum_w - 1.0).abs() <= tol,
        format!("sum {sum_w:.12}"),
    );

    let max_norm = cert
        .points
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    item(
        &mut items,
        "point_norm_bound",
        max_norm <= r * (1.0 + tol) + tol,
        format!("max point norm {max_norm:.12} against radius {r}"),
    );

    // Recompute the image of the combination and its distance to b.
    let m = work.m();
    let mut image = vec![0.0f64; m];
    let mut trace = 0.0f64;
    let mut eval_failed = false;
    for (w, p) in cert.weights.iter().zip(&cert.points) {
        match work.eval_q(p) {
            Ok(q) => {
                for (acc, qi) in image.iter_mut().zip(&q) {
                    *acc += w * qi;
                }
            }
            Err(_) => eval_failed = true,
        }
        trace += w * p.iter().map(|v| v * v).sum::<f64>();
    }
    if eval_failed {
        item(&mut items, "image_residual", false, "point evaluation failed".into());
        return CheckReport { items };
    }
    let recomputed: f64 = image
        .iter()
        .zip(work.rhs())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let eps = result.config.epsilon;
    item(
        &mut items,
        "image_residual",
        recomputed <= eps + tol,
        format!("recomputed residual {recomputed:.3e} against epsilon {eps:.3e}"),
    );

    match result.residual {
        Some(claimed) => item(
            &mut items,
            "residual_claim",
            (recomputed - claimed).abs() <= tol,
            format!("claimed {claimed:.3e}, recomputed {recomputed:.3e}"),
        ),
        None => item(&mut items, "residual_claim", false, "no residual claimed".into()),
    };

    item(
        &mut items,
        "trace_bound",
        trace <= r * r * (1.0 + tol) + tol,
        format!("weighted squared norms {trace:.12} against r^2 = {:.12}", r * r),
    );

    // The psd side of the certificate: X = sum w x x^T must reproduce the
    // image under the linear map of the system.
    let mut x = DenseSym::zeros(n);
    for (w, p) in cert.weights.iter().zip(&cert.points) {
        x.add_scaled_outer(*w, p);
    }
    let sparse = SymMatrix::from_dense(&x);
    match work.apply_a(&sparse) {
        Ok(applied) => {
            let mut worst = 0.0f64;
            let mut ok = true;
            for ((a, img), b) in applied.iter().zip(&image).zip(work.rhs()) {
                let err = (a - img).abs();
                let scale = 1.0 + b.abs();
                worst = worst.max(err / scale);
                if err > tol * scale {
                    ok = false;
                }
            }
            item(
                &mut items,
                "apply_a_matches",
                ok,
                format!("worst relative mismatch {worst:.3e}"),
            );
        }
        Err(e) => {
            item(&mut items, "apply_a_matches", false, e.to_string());
        }
    }

    CheckReport { items }
}

/// All witness checks run inside the solver's verifier; each failure is
/// mapped back to its named check.
fn check_witness(work: &QuadraticSystem<f64>, witness: &chrsolve_core::solver::Witness<f64>) -> CheckReport {
    let mut items = Vec::new();
    match verify_witness(work, witness, 1e-10, 7, 128) {
        Ok(()) => {
            for name in [
                "dims",
                "finite",
                "hyperplane_matches_bisector",
                "gap_matches",
                "target_side",
                "no_weak_pivot",
                "separation_probes",
            ] {
                item(&mut items, name, true, "ok".into());
            }
        }
        Err(Error::InvalidCertificate { check, detail }) => {
            item(&mut items, check, false, detail);
        }
        Err(e) => {
            item(&mut items, "separation_probes", false, e.to_string());
        }
    }
    CheckReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{ConfigEcho, ResultFile};
    use chrsolve_core::solver::{solve_feasibility, RadiusSchedule, SolveConfig};

    fn solve_disk() -> (QuadraticSystem<f64>, ResultFile) {
        let sys = QuadraticSystem::homogeneous(
            vec![SymMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap()],
            vec![1.0],
        )
        .unwrap();
        let cfg = SolveConfig {
            schedule: RadiusSchedule::Fixed(2.0),
            ..SolveConfig::default()
        };
        let report = solve_feasibility(&sys, &cfg).unwrap();
        let echo = ConfigEcho {
            epsilon: cfg.epsilon,
            seed: cfg.seed,
            r0: Some(2.0),
            r_max: None,
            max_iters: cfg.max_iters as u64,
            exact_eig: cfg.exact_eig,
        };
        let file = ResultFile::from_solve("solve-feas", &report, echo, sys.n(), sys.m());
        (sys, file)
    }

    #[test]
    fn accepts_a_real_certificate() {
        let (sys, file) = solve_disk();
        let report = check_certificate(&sys, &file, 1e-6).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn catches_tampered_certificates_by_name() {
        let (sys, file) = solve_disk();

        let mut bad = file.clone();
        let cert = bad.certificate.as_mut().unwrap();
        cert.weights[0] += 0.25;
        let report = check_certificate(&sys, &bad, 1e-6).unwrap();
        assert!(!report.passed());
        assert!(report
            .items
            .iter()
            .any(|i| i.name == "weights_sum" && !i.pass));

        let mut bad = file.clone();
        let cert = bad.certificate.as_mut().unwrap();
        for p in &mut cert.points {
            for v in p.iter_mut() {
                *v *= 3.0;
            }
        }
        let report = check_certificate(&sys, &bad, 1e-6).unwrap();
        assert!(report
            .items
            .iter()
            .any(|i| i.name == "point_norm_bound" && !i.pass));

        let mut bad = file.clone();
        bad.certificate.as_mut().unwrap().points[0] = vec![1.0; 3];
        let report = check_certificate(&sys, &bad, 1e-6).unwrap();
        assert!(report.items.iter().any(|i| i.name == "dims" && !i.pass));
    }

    #[test]
    fn accepts_and_rejects_witnesses() {
        // x^2 + y^2 = -1 has no solution at any radius.
        let sys = QuadraticSystem::homogeneous(
            vec![SymMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap()],
            vec![-1.0],
        )
        .unwrap();
        let cfg = SolveConfig {
            schedule: RadiusSchedule::Fixed(1.0),
            ..SolveConfig::default()
        };
        let report = solve_feasibility(&sys, &cfg).unwrap();
        let echo = ConfigEcho {
            epsilon: cfg.epsilon,
            seed: cfg.seed,
            r0: Some(1.0),
            r_max: None,
            max_iters: cfg.max_iters as u64,
            exact_eig: cfg.exact_eig,
        };
        let file = ResultFile::from_solve("solve-feas", &report, echo, sys.n(), sys.m());
        assert_eq!(file.status, Status::Witness);
        let check = check_certificate(&sys, &file, 1e-6).unwrap();
        assert!(check.passed(), "{}", check.to_json());

        let mut bad = file.clone();
        bad.witness.as_mut().unwrap().gap *= 2.0;
        let check = check_certificate(&sys, &bad, 1e-6).unwrap();
        assert!(!check.passed());
        assert!(check.items.iter().all(|i| !i.name.is_empty()));
    }

    #[test]
    fn uncheckable_results_are_data_errors() {
        let (sys, mut file) = solve_disk();
        file.status = Status::Inconclusive;
        file.reason = Some("budget".into());
        assert!(check_certificate(&sys, &file, 1e-6).is_err());
    }
}
