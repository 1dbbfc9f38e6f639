//! Command-line interface: argument parsing, dispatch, exit codes.
//!
//! Every solve subcommand writes a `ResultFile` to `--out` (stdout by
//! default) and a human summary to stderr. Result files carry no paths or
//! timings, so the same command line and seed reproduce them byte for
//! byte. Exit codes: 0 feasible or all checks passed, 1 witness or
//! infeasible, 2 radius exceeded or inconclusive, 64 usage, 65 bad data.

use crate::bench::planted_spin;
use crate::check::check_certificate;
use crate::formats::{
    BenchDto, BinaryDto, ConfigEcho, InstanceFile, MaxCutDto, OptimizationDto, QpDto, ResultFile,
    Status, SCHEMA_VERSION,
};
use crate::graphs::parse_graph;
use crate::sdpa::{parse_sdpa, SdpaProblem};
use crate::{CliResult, DataError};
use chrsolve_core::apps::binary::{binary_feas_system, binary_feasibility, spin_radius};
use chrsolve_core::apps::convex_qp::{solve_convex_qp, ConvexQp, QpConstraint, QpOutcome};
use chrsolve_core::apps::graph::{max_cut, MaxCutResolution};
use chrsolve_core::chr::QuadraticSystem;
use chrsolve_core::solver::{
    optimization_probe_system, solve_feasibility, solve_optimization, OptConfig, OptOutcome,
    OptReport, OptSense, QuadObjective, RadiusSchedule, SolveConfig,
};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "chrsolve",
    version,
    about = "Feasibility and optimization over quadratic systems via hull relaxation"
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Decide whether a quadratic system is solvable over a ball.
    SolveFeas(SolveFeasArgs),
    /// Optimize a quadratic objective over the hull relaxation.
    SolveOpt(SolveOptArgs),
    /// Decide whether any spin vector attains a target quadratic value.
    BinaryFeas(BinaryFeasArgs),
    /// Bound and round max cut on a weighted graph.
    Maxcut(MaxcutArgs),
    /// Solve a convex quadratic program over a ball.
    ConvexQp(ConvexQpArgs),
    /// Re-verify a result file against its instance.
    CheckCert(CheckCertArgs),
    /// Run a reproducible generated benchmark.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Image-space gap at which feasibility is declared.
    #[arg(long = "eps", default_value_t = 1e-6)]
    eps: f64,
    /// Total pivot-step budget.
    #[arg(long = "max-iters", default_value_t = 200_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Certify witness decisions with a dense eigensolve (order <= 200).
    #[arg(long = "exact-eig")]
    exact_eig: bool,
    /// Write the result file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveFeasArgs {
    /// Instance: native JSON, or sparse SDPA when the path ends in .dat-s.
    instance: PathBuf,
    /// Fixed solve radius; with --rmax, the doubling start instead.
    #[arg(long)]
    r0: Option<f64>,
    /// Radius cap for the doubling schedule.
    #[arg(long = "rmax")]
    rmax: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SolveOptArgs {
    /// Instance: native JSON with the objective as equation 0 (its
    /// right-hand side is ignored), or sparse SDPA.
    instance: PathBuf,
    /// Hull radius of the relaxation.
    #[arg(long)]
    r: f64,
    #[arg(long, value_parser = ["min", "max"], default_value = "max")]
    sense: String,
    /// Bracket width at which the level bisection stops.
    #[arg(long = "level-tol", default_value_t = 1e-3)]
    level_tol: f64,
    /// Write the exact system the reported certificate refers to.
    #[arg(long = "emit-instance")]
    emit_instance: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct BinaryFeasArgs {
    /// Native JSON instance with a single matrix (its right-hand side is
    /// ignored; the target comes from --alpha).
    instance: PathBuf,
    /// Target value for `x^T A x` over spin vectors.
    #[arg(long)]
    alpha: f64,
    /// Hyperplane rounding trials on a feasible relaxation.
    #[arg(long, default_value_t = 64)]
    trials: usize,
    /// Write the spin-relaxation system that was solved.
    #[arg(long = "emit-instance")]
    emit_instance: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct MaxcutArgs {
    /// Edge-list graph file: `u v [w]` per line, optional `n m` header.
    graph: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long = "level-tol", default_value_t = 1e-3)]
    level_tol: f64,
    /// Write the exact system the reported certificate refers to.
    #[arg(long = "emit-instance")]
    emit_instance: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ConvexQpArgs {
    /// Native JSON instance: equation 0 is the objective (right-hand side
    /// ignored), equations 1.. are constraints `q_i(x) <= rhs_i`.
    instance: PathBuf,
    /// Ball radius of the program.
    #[arg(long)]
    r: f64,
    #[arg(long, value_parser = ["min", "max"], default_value = "min")]
    sense: String,
    #[arg(long = "level-tol", default_value_t = 1e-3)]
    level_tol: f64,
    /// Write the lifted system the reported certificate refers to.
    #[arg(long = "emit-instance")]
    emit_instance: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CheckCertArgs {
    /// The instance the result claims to solve.
    instance: PathBuf,
    /// The result file to verify.
    result: PathBuf,
    /// Arithmetic slack for the certificate checks.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Write the check report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Benchmark family.
    #[arg(value_parser = ["binary-feas"])]
    task: String,
    /// Spin count of the generated instance.
    #[arg(long)]
    n: usize,
    /// Probability of each off-diagonal entry.
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 64)]
    trials: usize,
    /// Write the generated relaxation system.
    #[arg(long = "emit-instance")]
    emit_instance: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Parses arguments, runs the command, and maps every failure mode to its
/// exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            65
        }
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.cmd {
        Cmd::SolveFeas(args) => cmd_solve_feas(args),
        Cmd::SolveOpt(args) => cmd_solve_opt(args),
        Cmd::BinaryFeas(args) => cmd_binary_feas(args),
        Cmd::Maxcut(args) => cmd_maxcut(args),
        Cmd::ConvexQp(args) => cmd_convex_qp(args),
        Cmd::CheckCert(args) => cmd_check_cert(args),
        Cmd::Bench(args) => cmd_bench(args),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn is_sdpa(path: &Path) -> bool {
    path.to_string_lossy().ends_with(".dat-s")
}

/// Loads a feasibility system from either on-disk format.
fn load_system(path: &Path) -> CliResult<QuadraticSystem<f64>> {
    let text = read_file(path)?;
    if is_sdpa(path) {
        let prob = parse_sdpa(&text)?;
        if !prob.objective.is_zero() {
            eprintln!("note: the SDPA objective is ignored for a feasibility solve");
        }
        Ok(prob.system)
    } else {
        InstanceFile::parse(&text)?.to_system()
    }
}

/// Loads an optimization problem: objective plus constraint system. For
/// native instances equation 0 is the objective.
fn load_objective_problem(path: &Path) -> CliResult<(QuadObjective<f64>, QuadraticSystem<f64>)> {
    let text = read_file(path)?;
    if is_sdpa(path) {
        let SdpaProblem { objective, system } = parse_sdpa(&text)?;
        let objective = QuadObjective {
            quad: objective,
            linear: None,
            constant: 0.0,
        };
        return Ok((objective, system));
    }
    let sys = InstanceFile::parse(&text)?.to_system()?;
    split_objective(&sys)
}

/// Splits equation 0 off as the objective; the rest become the system.
fn split_objective(
    sys: &QuadraticSystem<f64>,
) -> CliResult<(QuadObjective<f64>, QuadraticSystem<f64>)> {
    if sys.m() < 2 {
        return Err(DataError(
            "an optimization instance needs the objective (equation 0) plus at least \
             one constraint equation"
                .into(),
        ));
    }
    let quads = sys.quad_matrices();
    let objective = QuadObjective {
        quad: quads[0].clone(),
        linear: sys.linear_terms().map(|l| l[0].clone()),
        constant: sys.constant_terms().map_or(0.0, |d| d[0]),
    };
    let constraints = QuadraticSystem::new(
        quads[1..].to_vec(),
        sys.linear_terms().map(|l| l[1..].to_vec()),
        sys.constant_terms().map(|d| d[1..].to_vec()),
        sys.rhs()[1..].to_vec(),
    )?;
    Ok((objective, constraints))
}

fn solve_config(common: &CommonArgs, schedule: RadiusSchedule<f64>) -> SolveConfig<f64> {
    SolveConfig {
        epsilon: common.eps,
        schedule,
        max_iters: common.max_iters,
        seed: common.seed,
        exact_eig: common.exact_eig,
        ..SolveConfig::default()
    }
}

fn opt_config(common: &CommonArgs, level_tol: f64) -> OptConfig<f64> {
    OptConfig {
        // The optimizer fixes its own radius; the schedule is unused.
        feas: solve_config(common, RadiusSchedule::Fixed(1.0)),
        level_tol,
        probe_epsilon: common.eps.max(1e-3),
        final_epsilon: common.eps,
        ..OptConfig::default()
    }
}

fn config_echo(common: &CommonArgs, r0: Option<f64>, r_max: Option<f64>) -> ConfigEcho {
    ConfigEcho {
        epsilon: common.eps,
        seed: common.seed,
        r0,
        r_max,
        max_iters: common.max_iters as u64,
        exact_eig: common.exact_eig,
    }
}

fn parse_sense(s: &str) -> OptSense {
    if s == "min" {
        OptSense::Minimize
    } else {
        OptSense::Maximize
    }
}

fn sense_name(sense: OptSense) -> &'static str {
    match sense {
        OptSense::Minimize => "minimize",
        OptSense::Maximize => "maximize",
    }
}

fn opt_dto(report: &OptReport<f64>) -> Option<OptimizationDto> {
    match &report.outcome {
        OptOutcome::Optimal {
            value,
            bracket,
            tight,
            bound_certified,
            ..
        } => Some(OptimizationDto {
            sense: sense_name(report.sense).into(),
            value: *value,
            bracket: *bracket,
            tight: *tight,
            bound_certified: *bound_certified,
            probes: report.probes as u64,
            inconclusive_probes: report.inconclusive_probes as u64,
        }),
        _ => None,
    }
}

/// A result for verdicts that never entered the hull solver.
fn bare_result(command: &str, status: Status, n: usize, m: usize, echo: ConfigEcho) -> ResultFile {
    ResultFile {
        schema: SCHEMA_VERSION,
        command: command.into(),
        status,
        n,
        m,
        homogenized: false,
        iterations: 0,
        oracle_probes: 0,
        radius_history: Vec::new(),
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
    }
}

fn write_result(file: &ResultFile, out: Option<&Path>) -> CliResult<()> {
    file.validate()?;
    let json = file.to_json();
    match out {
        Some(path) => std::fs::write(path, json)
            .map_err(|e| DataError(format!("{}: {e}", path.display()))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn write_instance(sys: &QuadraticSystem<f64>, path: &Path) -> CliResult<()> {
    std::fs::write(path, InstanceFile::from_system(sys).to_json())
        .map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn summarize(file: &ResultFile, started: Instant) {
    let secs = started.elapsed().as_secs_f64();
    let tail = format!(
        "{} pivots, {} oracle probes, {:.2}s",
        file.iterations, file.oracle_probes, secs
    );
    match file.status {
        Status::Feasible => eprintln!(
            "feasible: residual {:.3e}, {tail}",
            file.residual.unwrap_or(f64::NAN)
        ),
        Status::Witness => match (&file.witness, &file.qp) {
            (Some(w), _) => eprintln!(
                "infeasible: witness gap {:.3e} at radius {:.6}, {tail}",
                w.gap, w.radius
            ),
            (None, Some(q)) => eprintln!(
                "infeasible: constraint {} has minimum {:.6} above its bound {:.6}",
                q.infeasible_constraint.unwrap_or(usize::MAX),
                q.constraint_min.unwrap_or(f64::NAN),
                q.constraint_bound.unwrap_or(f64::NAN),
            ),
            (None, None) => eprintln!("infeasible, {tail}"),
        },
        Status::RadiusExceeded => eprintln!(
            "radius cap reached while still certified infeasible (best gap {:.3e}), {tail}",
            file.best_gap.unwrap_or(f64::NAN)
        ),
        Status::Inconclusive => eprintln!(
            "inconclusive: {}, {tail}",
            file.reason.as_deref().unwrap_or("no reason recorded")
        ),
    }
}

fn cmd_solve_feas(args: SolveFeasArgs) -> CliResult<i32> {
    let started = Instant::now();
    let sys = load_system(&args.instance)?;
    let schedule = match (args.r0, args.rmax) {
        (Some(r), None) => RadiusSchedule::Fixed(r),
        (r0, Some(r_max)) => RadiusSchedule::Doubling { r0, r_max },
        (None, None) => RadiusSchedule::Doubling {
            r0: None,
            r_max: 1e6,
        },
    };
    let (echo_r0, echo_rmax) = match &schedule {
        RadiusSchedule::Fixed(r) => (Some(*r), None),
        RadiusSchedule::Doubling { r0, r_max } => (*r0, Some(*r_max)),
    };
    let cfg = solve_config(&args.common, schedule);
    let report = solve_feasibility(&sys, &cfg)?;
    let echo = config_echo(&args.common, echo_r0, echo_rmax);
    let file = ResultFile::from_solve("solve-feas", &report, echo, sys.n(), sys.m());
    write_result(&file, args.common.out.as_deref())?;
    summarize(&file, started);
    Ok(file.status.exit_code())
}

fn cmd_solve_opt(args: SolveOptArgs) -> CliResult<i32> {
    let started = Instant::now();
    let (objective, constraints) = load_objective_problem(&args.instance)?;
    let sense = parse_sense(&args.sense);
    let ocfg = opt_config(&args.common, args.level_tol);
    let report = solve_optimization(&objective, &constraints, args.r, sense, &ocfg)?;
    let mut echo = config_echo(&args.common, Some(args.r), None);

    let file = match &report.outcome {
        OptOutcome::Optimal {
            value,
            tight,
            solve,
            ..
        } => {
            // The certificate was produced at probe accuracy when the
            // high-accuracy walk failed; the echoed epsilon is what the
            // checker verifies the residual against.
            if !*tight {
                echo.epsilon = ocfg.probe_epsilon;
            }
            let mut f = ResultFile::from_solve(
                "solve-opt",
                solve,
                echo,
                constraints.n(),
                constraints.m() + 1,
            );
            f.optimization = opt_dto(&report);
            if let Some(path) = &args.emit_instance {
                let probe = optimization_probe_system(&objective, &constraints, *value)?;
                write_instance(&probe, path)?;
            }
            f
        }
        OptOutcome::BaseInfeasible { solve } => {
            let f = ResultFile::from_solve(
                "solve-opt",
                solve,
                echo,
                constraints.n(),
                constraints.m(),
            );
            if let Some(path) = &args.emit_instance {
                write_instance(&constraints, path)?;
            }
            f
        }
        OptOutcome::Inconclusive { reason } => {
            let mut f = bare_result(
                "solve-opt",
                Status::Inconclusive,
                constraints.n(),
                constraints.m() + 1,
                echo,
            );
            f.reason = Some(reason.clone());
            if let Some(path) = &args.emit_instance {
                write_instance(&constraints, path)?;
            }
            f
        }
    };
    write_result(&file, args.common.out.as_deref())?;
    if let Some(opt) = &file.optimization {
        eprintln!(
            "{} level {:.9} in [{:.9}, {:.9}]{}",
            opt.sense,
            opt.value,
            opt.bracket.0,
            opt.bracket.1,
            if opt.tight { "" } else { " (probe accuracy)" }
        );
    }
    summarize(&file, started);
    Ok(file.status.exit_code())
}

/// Shared solve of `binary-feas` and `bench binary-feas`: builds the
/// result file without writing it, so callers can attach their blocks.
fn run_binary(
    command: &str,
    a: &chrsolve_core::linalg::SymMatrix<f64>,
    alpha: f64,
    trials: usize,
    common: &CommonArgs,
    emit: Option<&Path>,
) -> CliResult<ResultFile> {
    let n = a.order();
    let cfg = solve_config(common, RadiusSchedule::Fixed(spin_radius(n)));
    let report = binary_feasibility(a, alpha, trials, &cfg)?;
    let relaxation = binary_feas_system(a, alpha)?;
    let echo = config_echo(common, Some(spin_radius::<f64>(n)), None);
    let mut file =
        ResultFile::from_solve(command, &report.solve, echo, relaxation.n(), relaxation.m());
    let (best_assignment, best_value) = match &report.rounded {
        Some(r) => {
            let spins: Vec<f64> = r.assignment.iter().map(|&s| s as f64).collect();
            let value = a.quad_form(&spins)?;
            (Some(r.assignment.clone()), Some(value))
        }
        None => (None, None),
    };
    file.binary = Some(BinaryDto {
        alpha,
        trials: trials as u64,
        best_assignment,
        best_value,
    });
    if let Some(path) = emit {
        write_instance(&relaxation, path)?;
    }
    Ok(file)
}

fn finish_binary(file: &ResultFile, common: &CommonArgs, started: Instant) -> CliResult<i32> {
    write_result(file, common.out.as_deref())?;
    if let Some(b) = &file.binary {
        match b.best_value {
            Some(v) => eprintln!(
                "relaxation feasible; best rounded value {:.6} against target {:.6}",
                v, b.alpha
            ),
            None => eprintln!(
                "no spin vector attains {}: relaxation certified infeasible",
                b.alpha
            ),
        }
    }
    summarize(file, started);
    Ok(file.status.exit_code())
}

fn cmd_binary_feas(args: BinaryFeasArgs) -> CliResult<i32> {
    let started = Instant::now();
    if is_sdpa(&args.instance) {
        return Err(DataError(
            "binary-feas takes a native JSON instance with a single matrix".into(),
        ));
    }
    let sys = InstanceFile::parse(&read_file(&args.instance)?)?.to_system()?;
    if sys.m() != 1 || sys.linear_terms().is_some() || sys.constant_terms().is_some() {
        return Err(DataError(
            "binary-feas expects exactly one matrix and no linear or constant terms; \
             the target comes from --alpha"
                .into(),
        ));
    }
    let a = sys.quad_matrices()[0].clone();
    let file = run_binary(
        "binary-feas",
        &a,
        args.alpha,
        args.trials,
        &args.common,
        args.emit_instance.as_deref(),
    )?;
    finish_binary(&file, &args.common, started)
}

fn cmd_maxcut(args: MaxcutArgs) -> CliResult<i32> {
    let started = Instant::now();
    let graph = parse_graph(&read_file(&args.graph)?)?;
    let n = graph.n();
    let ocfg = opt_config(&args.common, args.level_tol);
    let radius = spin_radius::<f64>(n);
    let mut echo = config_echo(&args.common, Some(radius), None);

    let file = match max_cut(&graph, args.trials, &ocfg)? {
        MaxCutResolution::Solved(report) => {
            let (value, tight, solve) = match &report.opt.outcome {
                OptOutcome::Optimal {
                    value,
                    tight,
                    solve,
                    ..
                } => (*value, *tight, solve),
                _ => unreachable!("a solved max cut carries an optimal outcome"),
            };
            if !tight {
                echo.epsilon = ocfg.probe_epsilon;
            }
            let mut f = ResultFile::from_solve("maxcut", solve, echo, n, n + 1);
            f.optimization = opt_dto(&report.opt);
            f.maxcut = Some(MaxCutDto {
                sdp_bound: report.sdp_bound,
                best_cut: report.best_cut,
                assignment: report.assignment.clone(),
                trials: report.rounding_trials as u64,
            });
            if let Some(path) = &args.emit_instance {
                let objective = QuadObjective {
                    quad: graph.adjacency().scaled(0.25),
                    linear: None,
                    constant: 0.0,
                };
                let spins = chrsolve_core::apps::binary::spin_system::<f64>(n)
                    .map_err(DataError::from)?;
                let probe = optimization_probe_system(&objective, &spins, value)?;
                write_instance(&probe, path)?;
            }
            f
        }
        MaxCutResolution::Unresolved { reason, .. } => {
            let mut f = bare_result("maxcut", Status::Inconclusive, n, n + 1, echo);
            f.reason = Some(reason);
            f
        }
    };
    write_result(&file, args.common.out.as_deref())?;
    if let Some(mc) = &file.maxcut {
        eprintln!(
            "cut bound {:.6}, best rounded cut {:.6} over {} trials",
            mc.sdp_bound, mc.best_cut, mc.trials
        );
    }
    summarize(&file, started);
    Ok(file.status.exit_code())
}

fn cmd_convex_qp(args: ConvexQpArgs) -> CliResult<i32> {
    let started = Instant::now();
    if is_sdpa(&args.instance) {
        return Err(DataError(
            "convex-qp takes a native JSON instance (objective plus inequality rows)".into(),
        ));
    }
    let sys = InstanceFile::parse(&read_file(&args.instance)?)?.to_system()?;
    if sys.m() < 2 {
        return Err(DataError(
            "a program needs the objective (equation 0) plus at least one constraint".into(),
        ));
    }
    let quads = sys.quad_matrices();
    let objective = QuadObjective {
        quad: quads[0].clone(),
        linear: sys.linear_terms().map(|l| l[0].clone()),
        constant: sys.constant_terms().map_or(0.0, |d| d[0]),
    };
    let constraints: Vec<QpConstraint<f64>> = (1..sys.m())
        .map(|i| QpConstraint {
            quad: quads[i].clone(),
            linear: sys.linear_terms().map(|l| l[i].clone()),
            bound: sys.rhs()[i] - sys.constant_terms().map_or(0.0, |d| d[i]),
        })
        .collect();
    let qp = ConvexQp {
        objective,
        constraints,
        ball_radius: args.r,
    };
    let sense = parse_sense(&args.sense);
    let ocfg = opt_config(&args.common, args.level_tol);
    let report = solve_convex_qp(&qp, sense, &ocfg)?;
    let mut echo = config_echo(&args.common, Some(args.r), None);

    let file = match &report.outcome {
        QpOutcome::Optimal {
            bound,
            level,
            point,
            point_value,
            opt,
        } => {
            let lifted = report
                .lifted
                .as_ref()
                .expect("an optimal program keeps its lifting");
            let (tight, solve) = match &opt.outcome {
                OptOutcome::Optimal { tight, solve, .. } => (*tight, solve),
                _ => unreachable!("an optimal program carries an optimal outcome"),
            };
            if !tight {
                echo.epsilon = ocfg.probe_epsilon;
            }
            let mut f = ResultFile::from_solve(
                "convex-qp",
                solve,
                echo,
                lifted.system.n(),
                lifted.system.m(),
            );
            f.optimization = opt_dto(opt);
            f.qp = Some(QpDto {
                sense: sense_name(sense).into(),
                bound: Some(*bound),
                level: Some(*level),
                point: point.clone(),
                point_value: *point_value,
                infeasible_constraint: None,
                constraint_min: None,
                constraint_bound: None,
            });
            if let Some(path) = &args.emit_instance {
                let probe =
                    optimization_probe_system(&lifted.objective, &lifted.system, *level)?;
                write_instance(&probe, path)?;
            }
            f
        }
        QpOutcome::Infeasible {
            constraint,
            min_value,
            bound,
        } => {
            let mut f = bare_result("convex-qp", Status::Witness, sys.n(), sys.m(), echo);
            f.qp = Some(QpDto {
                sense: sense_name(sense).into(),
                bound: None,
                level: None,
                point: None,
                point_value: None,
                infeasible_constraint: Some(*constraint),
                constraint_min: Some(*min_value),
                constraint_bound: Some(*bound),
            });
            if args.emit_instance.is_some() {
                eprintln!(
                    "note: nothing to emit; the program was refuted before the hull solve"
                );
            }
            f
        }
        QpOutcome::Inconclusive { reason } => {
            let mut f = bare_result("convex-qp", Status::Inconclusive, sys.n(), sys.m(), echo);
            f.reason = Some(reason.clone());
            if args.emit_instance.is_some() {
                eprintln!("note: nothing to emit; the program did not resolve");
            }
            f
        }
    };
    write_result(&file, args.common.out.as_deref())?;
    if let Some(q) = &file.qp {
        if let (Some(bound), Some(level)) = (q.bound, q.level) {
            let point_part = match q.point_value {
                Some(v) => format!(", extracted point value {v:.9}"),
                None => ", no feasible point extracted".into(),
            };
            eprintln!("{} bound {:.9}, level {:.9}{point_part}", q.sense, bound, level);
        }
    }
    summarize(&file, started);
    Ok(file.status.exit_code())
}

fn cmd_check_cert(args: CheckCertArgs) -> CliResult<i32> {
    let sys = load_system(&args.instance)?;
    let result = ResultFile::parse(&read_file(&args.result)?)?;
    let report = check_certificate(&sys, &result, args.tol)?;
    let json = report.to_json();
    match args.out.as_deref() {
        Some(path) => std::fs::write(path, json)
            .map_err(|e| DataError(format!("{}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    for item in &report.items {
        eprintln!(
            "check {}: {} ({})",
            item.name,
            if item.pass { "ok" } else { "FAIL" },
            item.detail
        );
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_bench(args: BenchArgs) -> CliResult<i32> {
    let started = Instant::now();
    let planted = planted_spin(args.n, args.density, args.common.seed)?;
    eprintln!(
        "generated spin instance: n = {}, {} nonzeros, planted value {:.6}",
        args.n,
        planted.a.nnz(),
        planted.alpha
    );
    let mut file = run_binary(
        "bench",
        &planted.a,
        planted.alpha,
        args.trials,
        &args.common,
        args.emit_instance.as_deref(),
    )?;
    file.bench = Some(BenchDto {
        n: args.n,
        density: args.density,
        alpha: planted.alpha,
    });
    finish_binary(&file, &args.common, started)
}
