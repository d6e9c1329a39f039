//! `hardy`: command-line driver for hardy-core.
//!
//! Exit codes: 0 ok (and simply invariant), 1 other errors, 2 parse
//! failure, 3 norm axiom failure, 4 vanishing modulus, 5 unbounded inverse,
//! 6 degenerate generator, 7 IO failure, 10 doubly invariant,
//! 11 inconsistent cross-check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use hardy_core::corpus::{write_corpus, DEFAULT_SEED};
use hardy_core::format::{read_function, write_function, FileKind, NormConfig};
use hardy_core::gauge::{
    dual_ascent, dual_norm, extend_to_measurable, probe_continuity, validate_axioms, DualMethod,
    Distribution, ExtendedValue, GaugeNorm, GaugeNormSpec, DEFAULT_CAP,
};
use hardy_core::hardy::{
    factorize_inverse_bounded, inner_outer_factorize, log_integrability, outer_at_origin,
    outer_from_modulus, FactorizationResult, LogIntegrability, MembershipReport,
    ANALYTIC_TOLERANCE, DIVISION_GUARD,
};
use hardy_core::spectral::{Grid, LOG_FLOOR, MAX_VANISHING_FRACTION, VANISHING_THRESHOLD};
use hardy_core::subspace::{
    bounded_approximation, classify, verify_certificate, ClassifyParams, Verdict,
    DEFAULT_M_TRUNC, DEFAULT_N_BASIS, DEFAULT_TAU_DOUBLY, DROP_TOLERANCE, E_MASK_THRESHOLD,
    FORWARD_TOLERANCE, UNIMODULAR_TOLERANCE,
};
use hardy_core::Error;

const EXIT_DOUBLY: u8 = 10;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Hardy-space toolkit for gauge norms on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm (or its dual) on a function file.
    Norm(NormCmd),
    /// Outer function with a given boundary modulus.
    Outer(OuterCmd),
    /// Inner-outer factorization, or `k = w h` with `1/h` in the norm space.
    Factorize(FactorizeCmd),
    /// Classify the shift-invariant subspace generated by a function.
    Classify(ClassifyCmd),
    /// Bounded approximants of a function inside its invariant subspace.
    Approx(ApproxCmd),
    /// Write the reference corpus and its manifest.
    Corpus(CorpusCmd),
    /// Randomized check of the gauge-norm axioms.
    Validate(ValidateCmd),
}

#[derive(Args)]
struct NormArgs {
    /// Norm shorthand: lp:P, linf, mix, mix:N, lorentz:P:Q, orlicz:llogl.
    #[arg(long, default_value = "lp:2")]
    norm: String,
    /// TOML norm configuration; overrides --norm.
    #[arg(long)]
    norm_config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct NormCmd {
    file: PathBuf,
    #[command(flatten)]
    norm: NormArgs,
    /// Evaluate the dual norm instead.
    #[arg(long)]
    dual: bool,
    /// Dual-norm method: closed_form, ascent or brute_small.
    #[arg(long, default_value = "ascent")]
    method: String,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct OuterCmd {
    /// File holding the modulus (real, nonnegative).
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct FactorizeCmd {
    file: PathBuf,
    #[command(flatten)]
    norm: NormArgs,
    /// Factor `k = w h` with `h` bounded outer and `1/h` of finite norm.
    #[arg(long)]
    inverse_bounded: bool,
    #[arg(long)]
    unimodular_out: Option<PathBuf>,
    #[arg(long)]
    outer_out: Option<PathBuf>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct ClassifyCmd {
    file: PathBuf,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long, default_value_t = DEFAULT_N_BASIS)]
    n_basis: usize,
    #[arg(long, default_value_t = DEFAULT_M_TRUNC)]
    m_trunc: usize,
    #[arg(long, default_value_t = DEFAULT_TAU_DOUBLY)]
    tau: f64,
    /// Where to write φ for a simply invariant verdict.
    #[arg(long)]
    phi_out: Option<PathBuf>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct ApproxCmd {
    file: PathBuf,
    #[arg(long, default_value = "lp:1")]
    norm: String,
    #[arg(long)]
    norm_config: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    stages: usize,
    /// Directory for the approximants `stage_J.txt`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct CorpusCmd {
    dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct ValidateCmd {
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Grid for the continuity probe.
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[command(flatten)]
    report: ReportArgs,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::AxiomValidation(_) => 3,
        Error::VanishingModulus(_) | Error::NotLogIntegrable { .. } => 4,
        Error::InverseUnbounded(_) => 5,
        Error::DegenerateGenerator(_) => 6,
        Error::Io(_) => 7,
        Error::InconsistentCrossCheck(_) => 11,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidGrid(_) => "invalid_grid",
        Error::NumericInput { .. } => "numeric_input",
        Error::Resolution(_) => "resolution",
        Error::Domain(_) => "domain",
        Error::NearBoundary { .. } => "near_boundary",
        Error::NotLogIntegrable { .. } | Error::VanishingModulus(_) => "vanishing_modulus",
        Error::NormEvaluation(_) => "norm_evaluation",
        Error::OptimizationFailure { .. } => "optimization_failure",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::UnsupportedNorm(_) => "unsupported_norm",
        Error::NotHardy(_) => "not_hardy",
        Error::InverseUnbounded(_) => "inverse_unbounded",
        Error::DegenerateGenerator(_) => "degenerate_generator",
        Error::InconsistentCrossCheck(_) => "inconsistent_cross_check",
        Error::InvalidSpec(_) => "invalid_spec",
        Error::AxiomValidation(_) => "axiom_validation",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

/// JSON report; keys come out sorted.
struct Report {
    root: Map<String, Value>,
    started: Instant,
    timing: bool,
    path: Option<PathBuf>,
}

impl Report {
    fn new(command: &str, args: &ReportArgs) -> Self {
        let mut root = Map::new();
        root.insert("command".into(), json!(command));
        Self {
            root,
            started: Instant::now(),
            timing: args.timing,
            path: args.report.clone(),
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.root.insert(key.into(), value);
    }

    fn finish(mut self, outcome: &Result<u8, Error>) -> u8 {
        let code = match outcome {
            Ok(code) => {
                self.set("status", json!("ok"));
                *code
            }
            Err(e) => {
                self.set("status", json!("error"));
                self.set("error", json!({ "kind": error_kind(e), "message": e.to_string() }));
                eprintln!("error: {e}");
                exit_code(e)
            }
        };
        self.set("exit_code", json!(code));
        if self.timing {
            self.set("runtime_seconds", json!(self.started.elapsed().as_secs_f64()));
        }
        if let Some(path) = &self.path {
            let mut text = serde_json::to_string_pretty(&Value::Object(self.root)).expect("report serializes");
            text.push('\n');
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write report {}: {e}", path.display());
                return if code == 0 { 7 } else { code };
            }
        }
        code
    }
}

fn load_norm(args: &NormArgs, report: &mut Report) -> Result<GaugeNormSpec, Error> {
    load_norm_from(&args.norm, args.norm_config.as_deref(), report)
}

fn load_norm_from(shorthand: &str, config: Option<&Path>, report: &mut Report) -> Result<GaugeNormSpec, Error> {
    let config = match config {
        Some(path) => NormConfig::read(path)?,
        None => shorthand.parse()?,
    };
    report.set("norm_config", serde_json::to_value(&config).expect("config serializes"));
    let spec = config.build()?;
    report.set("norm", json!(spec.to_string()));
    Ok(spec)
}

fn input(path: &Path, report: &mut Report) -> Result<hardy_core::spectral::CircleFunction, Error> {
    report.set("input", json!(path.display().to_string()));
    let f = read_function(path)?;
    report.set("grid_size", json!(f.len()));
    Ok(f)
}

fn log_report(r: &LogIntegrability) -> Value {
    json!({
        "mean_log": r.mean_log,
        "floored_mean_log": r.floored_mean_log,
        "vanishing_fraction": r.vanishing_fraction,
        "boundary_zeros": r.boundary_zeros,
        "passed": r.passed,
    })
}

fn membership_report(m: &MembershipReport) -> Value {
    json!({
        "negative_energy": m.negative_energy,
        "energy": m.energy,
        "analytic": m.analytic,
        "norm_value": m.norm_value,
        "member": m.member,
    })
}

fn log_tolerances() -> Value {
    json!({
        "log_floor": LOG_FLOOR,
        "vanishing_threshold": VANISHING_THRESHOLD,
        "max_vanishing_fraction": MAX_VANISHING_FRACTION,
        "division_guard": DIVISION_GUARD,
    })
}

fn run_norm(cmd: &NormCmd, report: &mut Report) -> Result<u8, Error> {
    report.set("options", json!({ "dual": cmd.dual, "method": cmd.method }));
    let f = input(&cmd.file, report)?;
    let spec = load_norm(&cmd.norm, report)?;
    let value = if cmd.dual {
        let method: DualMethod = cmd.method.parse()?;
        f.ensure_finite()?;
        if method == DualMethod::Ascent {
            let outcome = dual_ascent(&spec, &Distribution::from_function(&f)?)?;
            report.set(
                "ascent",
                json!({
                    "iterations": outcome.iterations,
                    "relative_gap": outcome.relative_gap,
                    "converged": outcome.converged,
                }),
            );
            outcome.value
        } else {
            dual_norm(&spec, &f, method)?
        }
    } else if f.first_non_finite().is_some() {
        match extend_to_measurable(&spec, &f, DEFAULT_CAP)? {
            ExtendedValue::Finite { value, truncation, doublings } => {
                report.set("extension", json!({ "truncation": truncation, "doublings": doublings, "cap": DEFAULT_CAP }));
                value
            }
            ExtendedValue::Infinite { last_value, truncation, reason } => {
                report.set(
                    "extension",
                    json!({ "truncation": truncation, "last_value": last_value, "reason": reason, "cap": DEFAULT_CAP }),
                );
                f64::INFINITY
            }
        }
    } else {
        spec.evaluate(&f)?
    };
    report.set("value", json!(value));
    println!("{value:?}");
    Ok(0)
}

fn run_outer(cmd: &OuterCmd, report: &mut Report) -> Result<u8, Error> {
    report.set("tolerances", log_tolerances());
    let phi = input(&cmd.file, report)?;
    let log = log_integrability(&phi)?;
    report.set("log_integrability", log_report(&log));
    let g = outer_from_modulus(&phi)?;
    let modulus_error = g
        .samples()
        .iter()
        .zip(phi.samples())
        .fold(0.0_f64, |m, (a, b)| m.max((a.norm() - b.norm()).abs()));
    let g0 = outer_at_origin(&phi)?;
    report.set(
        "residuals",
        json!({
            "modulus": modulus_error,
            "negative_energy": g.spectrum()?.negative_energy(),
            "value_at_origin": g0,
            "geometric_mean": log.mean_log.exp(),
        }),
    );
    if let Some(out) = &cmd.out {
        write_function(out, &g, FileKind::Samples)?;
        report.set("outputs", json!({ "outer": out.display().to_string() }));
    }
    println!("{g0:?}");
    Ok(0)
}

fn factorization_report(r: &FactorizationResult) -> Value {
    json!({
        "reconstruction": r.residual_reconstruction,
        "unimodularity": r.residual_unimodularity,
        "outer_negative_energy": r.outer_negative_energy,
    })
}

fn run_factorize(cmd: &FactorizeCmd, report: &mut Report) -> Result<u8, Error> {
    report.set("options", json!({ "inverse_bounded": cmd.inverse_bounded }));
    report.set("tolerances", log_tolerances());
    let f = input(&cmd.file, report)?;
    let result = if cmd.inverse_bounded {
        let spec = load_norm(&cmd.norm, report)?;
        factorize_inverse_bounded(&f, &spec)?
    } else {
        report.set("analytic_tolerance", json!(ANALYTIC_TOLERANCE));
        inner_outer_factorize(&f)?
    };
    report.set("residuals", factorization_report(&result));
    if let Some(m) = &result.inverse_membership {
        report.set("inverse_membership", membership_report(m));
    }
    let mut outputs = Map::new();
    if let Some(out) = &cmd.unimodular_out {
        write_function(out, &result.unimodular, FileKind::Samples)?;
        outputs.insert("unimodular".into(), json!(out.display().to_string()));
    }
    if let Some(out) = &cmd.outer_out {
        write_function(out, &result.outer, FileKind::Samples)?;
        outputs.insert("outer".into(), json!(out.display().to_string()));
    }
    report.set("outputs", Value::Object(outputs));
    println!("{:?}", result.residual_reconstruction);
    Ok(0)
}

/// Runs of `true` as half-open node intervals.
fn mask_runs(mask: &[bool]) -> Vec<[usize; 2]> {
    let mut runs = Vec::new();
    let mut start = None;
    for (j, &m) in mask.iter().chain(std::iter::once(&false)).enumerate() {
        match (m, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                runs.push([s, j]);
                start = None;
            }
            _ => {}
        }
    }
    runs
}

fn run_classify(cmd: &ClassifyCmd, report: &mut Report) -> Result<u8, Error> {
    let params = ClassifyParams {
        n_basis: cmd.n_basis,
        m_trunc: cmd.m_trunc,
        tau_doubly: cmd.tau,
    };
    report.set("options", json!({ "n_basis": params.n_basis, "m_trunc": params.m_trunc, "tau": params.tau_doubly }));
    report.set(
        "tolerances",
        json!({
            "tau_doubly": params.tau_doubly,
            "strict_inclusion": 10.0 * params.tau_doubly,
            "drop": DROP_TOLERANCE,
            "e_mask": E_MASK_THRESHOLD,
            "forward": FORWARD_TOLERANCE,
            "unimodular": UNIMODULAR_TOLERANCE,
            "analytic": ANALYTIC_TOLERANCE,
            "vanishing_threshold": VANISHING_THRESHOLD,
            "max_vanishing_fraction": MAX_VANISHING_FRACTION,
        }),
    );
    let f = input(&cmd.file, report)?;
    let spec = load_norm(&cmd.norm, report)?;
    let c = classify(&f, &spec, params)?;
    let cert = &c.certificate;
    report.set("verdict", json!(c.verdict.name()));
    report.set(
        "certificate",
        json!({
            "dist_backward": cert.dist_backward,
            "dist_forward": cert.dist_forward,
            "phi_unimodularity": cert.phi_unimodularity,
            "regeneration_residual": cert.regeneration_residual,
            "log_integrability": log_report(&cert.log_integrability),
            "model_dimension": cert.model_dimension,
            "conditioning": cert.conditioning,
        }),
    );
    report.set("margin", json!(cert.dist_backward / params.tau_doubly));
    let verification = verify_certificate(&c, &f, &spec)?;
    let checks: Map<String, Value> = verification
        .checks
        .iter()
        .map(|k| {
            (
                k.name.to_string(),
                json!({ "value": k.value, "tolerance": k.tolerance, "passed": k.passed }),
            )
        })
        .collect();
    report.set("verification", json!({ "passed": verification.passed(), "checks": checks }));
    println!("{}", c.verdict.name());
    match &c.verdict {
        Verdict::DoublyInvariant { e_mask } => {
            let count = e_mask.iter().filter(|m| **m).count();
            report.set("e_mask", json!({ "nodes": count, "runs": mask_runs(e_mask) }));
            Ok(EXIT_DOUBLY)
        }
        Verdict::SimplyInvariant { phi } => {
            if let Some(out) = &cmd.phi_out {
                write_function(out, phi, FileKind::Samples)?;
                report.set("outputs", json!({ "phi": out.display().to_string() }));
            }
            Ok(0)
        }
    }
}

fn run_approx(cmd: &ApproxCmd, report: &mut Report) -> Result<u8, Error> {
    report.set("options", json!({ "stages": cmd.stages }));
    let f = input(&cmd.file, report)?;
    let spec = load_norm_from(&cmd.norm, cmd.norm_config.as_deref(), report)?;
    let stages = bounded_approximation(&f, &spec, cmd.stages)?;
    if let Some(dir) = &cmd.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for (j, s) in stages.iter().enumerate() {
            write_function(&dir.join(format!("stage_{j}.txt")), &s.function, FileKind::Samples)?;
        }
    }
    let rows: Vec<Value> = stages
        .iter()
        .map(|s| json!({ "degree": s.degree, "error": s.error, "sup": s.function.max_abs() }))
        .collect();
    let monotone = stages.windows(2).all(|w| w[1].error <= w[0].error + 1e-10);
    report.set("stages", Value::Array(rows));
    report.set("non_increasing", json!(monotone));
    report.set("monotone_slack", json!(1e-10));
    for s in &stages {
        println!("{} {:?}", s.degree, s.error);
    }
    Ok(0)
}

fn run_corpus(cmd: &CorpusCmd, report: &mut Report) -> Result<u8, Error> {
    report.set("options", json!({ "seed": cmd.seed, "grid": cmd.grid }));
    let grid = Grid::new(cmd.grid)?;
    let items = write_corpus(&cmd.dir, grid, cmd.seed)?;
    report.set("items", json!(items.len()));
    report.set("directory", json!(cmd.dir.display().to_string()));
    println!("{}", items.len());
    Ok(0)
}

fn run_validate(cmd: &ValidateCmd, report: &mut Report) -> Result<u8, Error> {
    report.set("options", json!({ "trials": cmd.trials, "seed": cmd.seed, "grid": cmd.grid }));
    let spec = load_norm(&cmd.norm, report)?;
    let v = validate_axioms(&spec, cmd.trials, cmd.seed);
    let checks: Map<String, Value> = v
        .checks
        .iter()
        .map(|c| {
            (
                c.name.to_string(),
                json!({
                    "evaluated": c.evaluated,
                    "failures": c.failures,
                    "worst_excess": c.worst_excess,
                    "witness": c.witness.as_ref().map(|w| json!({
                        "trial": w.trial,
                        "description": w.description,
                        "lhs": w.lhs,
                        "rhs": w.rhs,
                    })),
                }),
            )
        })
        .collect();
    report.set("axioms", json!({ "passed": v.passed(), "tolerance": v.tolerance, "checks": checks }));
    let probe = probe_continuity(&spec, Grid::new(cmd.grid)?)?;
    report.set(
        "continuity",
        json!({ "continuous": probe.continuous, "points": probe.points, "declared": spec.is_continuous() }),
    );
    println!("{}", v.summary());
    println!("continuous: {}", probe.continuous);
    Ok(if v.passed() { 0 } else { 3 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Norm(c) => ("norm", &c.report),
        Command::Outer(c) => ("outer", &c.report),
        Command::Factorize(c) => ("factorize", &c.report),
        Command::Classify(c) => ("classify", &c.report),
        Command::Approx(c) => ("approx", &c.report),
        Command::Corpus(c) => ("corpus", &c.report),
        Command::Validate(c) => ("validate", &c.report),
    };
    let mut report = Report::new(name, args);
    let outcome = match &cli.command {
        Command::Norm(c) => run_norm(c, &mut report),
        Command::Outer(c) => run_outer(c, &mut report),
        Command::Factorize(c) => run_factorize(c, &mut report),
        Command::Classify(c) => run_classify(c, &mut report),
        Command::Approx(c) => run_approx(c, &mut report),
        Command::Corpus(c) => run_corpus(c, &mut report),
        Command::Validate(c) => run_validate(c, &mut report),
    };
    ExitCode::from(report.finish(&outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_of_mask() {
        assert_eq!(mask_runs(&[true, true, false, true]), vec![[0, 2], [3, 4]]);
        assert!(mask_runs(&[false, false]).is_empty());
    }
}
