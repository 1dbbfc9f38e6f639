//! On-disk JSON formats: instance files and result files.
//!
//! Both formats are schema-versioned and canonical: triplets are sorted
//! upper-triangle entries, optional sections are omitted when absent, and
//! floats print in shortest round-trip form, so re-serializing a parsed
//! file reproduces it byte for byte.

use crate::{CliResult, DataError};
use chrsolve_core::chr::{ConvexCertificate, QuadraticSystem};
use chrsolve_core::geometry::Hyperplane;
use chrsolve_core::linalg::SymMatrix;
use chrsolve_core::solver::{SolveOutcome, SolveReport, Witness};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// A system of quadratic equations `x^T A_k x + c_k^T x + d_k = b_k`.
///
/// Matrices are stored as upper-triangle triplets `[i, j, value]` with
/// `i <= j`, 0-based, sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub matrices: Vec<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl InstanceFile {
    pub fn from_system(sys: &QuadraticSystem<f64>) -> Self {
        let matrices = sys
            .quad_matrices()
            .iter()
            .map(|a| {
                let mut t: Vec<(usize, usize, f64)> = a
                    .entries()
                    .iter()
                    .map(|&(i, j, v)| (i.min(j), i.max(j), v))
                    .collect();
                t.sort_by_key(|&(i, j, _)| (i, j));
                t
            })
            .collect();
        InstanceFile {
            schema: SCHEMA_VERSION,
            n: sys.n(),
            m: sys.m(),
            matrices,
            linear: sys.linear_terms().map(|ls| ls.to_vec()),
            constants: sys.constant_terms().map(|ds| ds.to_vec()),
            rhs: sys.rhs().to_vec(),
        }
    }

    /// Validates every field and builds the solver-side system.
    pub fn to_system(&self) -> CliResult<QuadraticSystem<f64>> {
        if self.schema != SCHEMA_VERSION {
            return Err(DataError(format!(
                "field `schema`: unsupported version {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.n == 0 || self.m == 0 {
            return Err(DataError(
                "fields `n`/`m`: the system needs at least one variable and one equation".into(),
            ));
        }
        if self.matrices.len() != self.m {
            return Err(DataError(format!(
                "field `matrices`: {} entries for m = {}",
                self.matrices.len(),
                self.m
            )));
        }
        if self.rhs.len() != self.m {
            return Err(DataError(format!(
                "field `rhs`: {} entries for m = {}",
                self.rhs.len(),
                self.m
            )));
        }
        let mut quads = Vec::with_capacity(self.m);
        for (k, triplets) in self.matrices.iter().enumerate() {
            let mut seen: Vec<(usize, usize)> = Vec::with_capacity(triplets.len());
            for &(i, j, v) in triplets {
                if i > j {
                    return Err(DataError(format!(
                        "field `matrices[{k}]`: lower-triangle entry ({i}, {j}); store i <= j"
                    )));
                }
                if j >= self.n {
                    return Err(DataError(format!(
                        "field `matrices[{k}]`: index ({i}, {j}) out of range for n = {}",
                        self.n
                    )));
                }
                if !v.is_finite() {
                    return Err(DataError(format!(
                        "field `matrices[{k}]`: non-finite value at ({i}, {j})"
                    )));
                }
                if seen.contains(&(i, j)) {
                    return Err(DataError(format!(
                        "field `matrices[{k}]`: duplicate triplet at ({i}, {j})"
                    )));
                }
                seen.push((i, j));
            }
            quads.push(
                SymMatrix::from_triplets(self.n, triplets.iter().copied())
                    .map_err(|e| DataError(format!("field `matrices[{k}]`: {e}")))?,
            );
        }
        if let Some(ls) = &self.linear {
            if ls.len() != self.m {
                return Err(DataError(format!(
                    "field `linear`: {} vectors for m = {}",
                    ls.len(),
                    self.m
                )));
            }
            for (k, l) in ls.iter().enumerate() {
                if l.len() != self.n {
                    return Err(DataError(format!(
                        "field `linear[{k}]`: length {} for n = {}",
                        l.len(),
                        self.n
                    )));
                }
                if l.iter().any(|v| !v.is_finite()) {
                    return Err(DataError(format!("field `linear[{k}]`: non-finite value")));
                }
            }
        }
        if let Some(ds) = &self.constants {
            if ds.len() != self.m {
                return Err(DataError(format!(
                    "field `constants`: {} entries for m = {}",
                    ds.len(),
                    self.m
                )));
            }
            if ds.iter().any(|v| !v.is_finite()) {
                return Err(DataError("field `constants`: non-finite value".into()));
            }
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(DataError("field `rhs`: non-finite value".into()));
        }
        QuadraticSystem::new(
            quads,
            self.linear.clone(),
            self.constants.clone(),
            self.rhs.clone(),
        )
        .map_err(|e| DataError(e.to_string()))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            DataError(format!("instance line {} column {}: {e}", e.line(), e.column()))
        })?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance DTO serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Feasible,
    Witness,
    RadiusExceeded,
    Inconclusive,
}

impl Status {
    /// 0 feasible, 1 witness/infeasible, 2 radius exceeded/inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Feasible => 0,
            Status::Witness => 1,
            Status::RadiusExceeded | Status::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Feasible => "feasible",
            Status::Witness => "witness",
            Status::RadiusExceeded => "radius_exceeded",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDto {
    pub radius: f64,
    pub weights: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl CertificateDto {
    pub fn from_cert(cert: &ConvexCertificate<f64>) -> Self {
        CertificateDto {
            radius: cert.radius,
            weights: cert.weights.clone(),
            points: cert.points.clone(),
        }
    }

    pub fn to_cert(&self) -> ConvexCertificate<f64> {
        ConvexCertificate {
            radius: self.radius,
            weights: self.weights.clone(),
            points: self.points.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDto {
    pub radius: f64,
    pub gap: f64,
    /// The final iterate `b'` in image space.
    pub iterate: Vec<f64>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl WitnessDto {
    pub fn from_witness(w: &Witness<f64>) -> Self {
        WitnessDto {
            radius: w.radius,
            gap: w.gap,
            iterate: w.iterate.clone(),
            normal: w.hyperplane.normal.clone(),
            offset: w.hyperplane.offset,
        }
    }

    pub fn to_witness(&self) -> Witness<f64> {
        Witness {
            hyperplane: Hyperplane {
                normal: self.normal.clone(),
                offset: self.offset,
            },
            iterate: self.iterate.clone(),
            gap: self.gap,
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    pub max_iters: u64,
    pub exact_eig: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationDto {
    /// "minimize" or "maximize".
    pub sense: String,
    pub value: f64,
    pub bracket: (f64, f64),
    pub tight: bool,
    pub bound_certified: bool,
    pub probes: u64,
    pub inconclusive_probes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxCutDto {
    /// Certified upper bound on every cut of the graph.
    pub sdp_bound: f64,
    pub best_cut: f64,
    pub assignment: Vec<i8>,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryDto {
    pub alpha: f64,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_assignment: Option<Vec<i8>>,
    /// `x^T A x` at the best rounded assignment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpDto {
    /// "minimize" or "maximize".
    pub sense: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_value: Option<f64>,
    /// Set when a single constraint was refuted outright: its index and
    /// its certified minimum against its bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasible_constraint: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchDto {
    pub n: usize,
    pub density: f64,
    pub alpha: f64,
}

/// Result of one solve: status, diagnostics, and the checkable object
/// (certificate or witness). Extension blocks carry per-command data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub schema: u32,
    pub command: String,
    pub status: Status,
    /// Dimensions of the solved system before any homogenization.
    pub n: usize,
    pub m: usize,
    /// True when the solve embedded the system into homogeneous form; the
    /// certificate or witness then lives in the embedded space.
    pub homogenized: bool,
    pub iterations: u64,
    pub oracle_probes: u64,
    pub radius_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
    /// Diagnostic only: the last refuted-radius witness of a doubling run
    /// that hit its cap. Not validated by the checker.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_witness: Option<WitnessDto>,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxcut: Option<MaxCutDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinaryDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qp: Option<QpDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchDto>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl ResultFile {
    /// Assembles a result from a finished feasibility solve. `n` and `m`
    /// are the dimensions of the system handed to the solver.
    pub fn from_solve(
        command: &str,
        report: &SolveReport<f64>,
        config: ConfigEcho,
        n: usize,
        m: usize,
    ) -> Self {
        let mut out = ResultFile {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            status: Status::Inconclusive,
            n,
            m,
            homogenized: report.homogenized,
            iterations: report.iterations as u64,
            oracle_probes: report.oracle_probes,
            radius_history: report.radius_history.clone(),
            residual: None,
            best_gap: None,
            reason: None,
            certificate: None,
            witness: None,
            last_witness: None,
            config,
            optimization: None,
            maxcut: None,
            binary: None,
            qp: None,
            bench: None,
        };
        match &report.outcome {
            SolveOutcome::Feasible { cert, residual, .. } => {
                out.status = Status::Feasible;
                out.residual = finite(*residual);
                out.certificate = Some(CertificateDto::from_cert(cert));
            }
            SolveOutcome::Infeasible { witness } => {
                out.status = Status::Witness;
                out.witness = Some(WitnessDto::from_witness(witness));
            }
            SolveOutcome::RadiusExceeded {
                last_witness,
                best_gap,
            } => {
                out.status = Status::RadiusExceeded;
                out.best_gap = finite(*best_gap);
                out.last_witness = last_witness.as_ref().map(WitnessDto::from_witness);
            }
            SolveOutcome::Inconclusive { reason, best_gap } => {
                out.status = Status::Inconclusive;
                out.best_gap = finite(*best_gap);
                out.reason = Some(reason.clone());
            }
        }
        out
    }

    /// Checks the status-dependent required fields.
    pub fn validate(&self) -> CliResult<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(DataError(format!(
                "field `schema`: unsupported version {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        match self.status {
            Status::Feasible => {
                if self.certificate.is_none() {
                    return Err(DataError(
                        "status `feasible` requires a `certificate`".into(),
                    ));
                }
                if self.residual.is_none() {
                    return Err(DataError("status `feasible` requires a `residual`".into()));
                }
            }
            Status::Witness => {
                let qp_refuted = self
                    .qp
                    .as_ref()
                    .is_some_and(|q| q.infeasible_constraint.is_some());
                if self.witness.is_none() && !qp_refuted {
                    return Err(DataError("status `witness` requires a `witness`".into()));
                }
            }
            Status::RadiusExceeded => {}
            Status::Inconclusive => {
                if self.reason.is_none() {
                    return Err(DataError(
                        "status `inconclusive` requires a `reason`".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: ResultFile = serde_json::from_str(text).map_err(|e| {
            DataError(format!("result line {} column {}: {e}", e.line(), e.column()))
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result DTO serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_instance() -> InstanceFile {
        InstanceFile {
            schema: SCHEMA_VERSION,
            n: 2,
            m: 1,
            matrices: vec![vec![(0, 0, 1.0), (1, 1, 1.0)]],
            linear: None,
            constants: None,
            rhs: vec![4.0],
        }
    }

    #[test]
    fn instance_round_trip_is_identity_on_canonical_form() {
        let file = disk_instance();
        let sys = file.to_system().unwrap();
        assert_eq!(sys.n(), 2);
        assert_eq!(sys.m(), 1);
        assert_eq!(sys.rhs(), &[4.0]);
        let back = InstanceFile::from_system(&sys);
        assert_eq!(back, file);
        let reparsed = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(reparsed, file);
        assert_eq!(reparsed.to_json(), file.to_json());
    }

    #[test]
    fn instance_validation_names_the_field() {
        let mut file = disk_instance();
        file.matrices[0].push((0, 2, 1.0));
        let err = file.to_system().unwrap_err().to_string();
        assert!(err.contains("matrices[0]") && err.contains("out of range"), "{err}");

        let mut file = disk_instance();
        file.matrices[0].push((1, 0, 1.0));
        let err = file.to_system().unwrap_err().to_string();
        assert!(err.contains("lower-triangle"), "{err}");

        let mut file = disk_instance();
        file.matrices[0].push((0, 0, 2.0));
        let err = file.to_system().unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");

        let mut file = disk_instance();
        file.schema = 9;
        let err = file.to_system().unwrap_err().to_string();
        assert!(err.contains("schema"), "{err}");
    }

    #[test]
    fn parse_reports_position_for_malformed_json() {
        let err = InstanceFile::parse("{ \"schema\": 1,,, }").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn result_status_invariants_are_enforced() {
        let echo = ConfigEcho {
            epsilon: 1e-6,
            seed: 0,
            r0: Some(1.0),
            r_max: Some(1.0),
            max_iters: 100,
            exact_eig: false,
        };
        let mut file = ResultFile {
            schema: SCHEMA_VERSION,
            command: "solve-feas".into(),
            status: Status::Feasible,
            n: 1,
            m: 1,
            homogenized: false,
            iterations: 1,
            oracle_probes: 1,
            radius_history: vec![1.0],
            residual: None,
            best_gap: None,
            reason: None,
            certificate: None,
            witness: None,
            last_witness: None,
            config: echo,
            optimization: None,
            maxcut: None,
            binary: None,
            qp: None,
            bench: None,
        };
        assert!(file.validate().is_err());
        file.certificate = Some(CertificateDto {
            radius: 1.0,
            weights: vec![1.0],
            points: vec![vec![1.0]],
        });
        file.residual = Some(0.0);
        assert!(file.validate().is_ok());
        let round = ResultFile::parse(&file.to_json()).unwrap();
        assert_eq!(round, file);

        file.status = Status::Inconclusive;
        assert!(file.validate().is_err());
        file.reason = Some("budget".into());
        assert!(file.validate().is_ok());
    }

    #[test]
    fn exit_codes_follow_status() {
        assert_eq!(Status::Feasible.exit_code(), 0);
        assert_eq!(Status::Witness.exit_code(), 1);
        assert_eq!(Status::RadiusExceeded.exit_code(), 2);
        assert_eq!(Status::Inconclusive.exit_code(), 2);
    }
}
