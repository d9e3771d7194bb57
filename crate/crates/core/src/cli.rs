//! Command-line experiment runner.
//!
//! Every command prints its record to stdout. With `--output` (or the
//! `NMECUT_OUT_DIR` environment variable) the record is also written to a file.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a
//! verification fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::entangle::{overhead_nme, robustness_pure, SchmidtVector};
use crate::error::{Error, Result};
use crate::estimator::{empirical_overhead, estimate, EstimatorConfig, Mode};
use crate::mub::{audit, MAX_AUDIT_QUBITS};
use crate::qcore::{expectation, Observable, PureState};
use crate::qpd::{qpd_baseline, qpd_nme, qpd_streamlined, verify_identity, Qpd, MAX_CUT_WIRES};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NMECUT_OUT_DIR";

pub const MAX_SWEEP_POINTS: usize = 64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nmecut",
    version,
    about = "Joint wire cutting with non-maximally entangled resources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Also write the record to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal sampling overhead of a parallel cut.
    Overhead(OverheadArgs),
    /// Check that a decomposition reconstructs the identity channel.
    Verify(VerifyArgs),
    /// Audit the mutually unbiased bases for n qubits.
    MubCheck(MubCheckArgs),
    /// Monte Carlo estimate of an expectation value through a cut.
    Estimate(EstimateArgs),
    /// Overhead and estimate over a grid of robustness values.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct OverheadArgs {
    #[arg(long, required_unless_present = "table")]
    pub n: Option<usize>,
    #[arg(long, conflicts_with_all = ["schmidt", "table"])]
    pub robustness: Option<f64>,
    /// Comma-separated Schmidt coefficients, or `maximal` / `separable`.
    #[arg(long, conflicts_with = "table")]
    pub schmidt: Option<String>,
    /// Tabulate overheads with and without entanglement.
    #[arg(long)]
    pub table: bool,
    /// Largest n in the table.
    #[arg(long, default_value_t = 3, requires = "table")]
    pub max_n: usize,
}

#[derive(Debug, Args, Clone)]
pub struct DecompositionArgs {
    /// Comma-separated Schmidt coefficients, or `maximal` / `separable`.
    #[arg(long)]
    pub schmidt: Option<String>,
    /// Use the decomposition without entanglement.
    #[arg(long, conflicts_with_all = ["schmidt", "streamlined"])]
    pub baseline: bool,
    /// Entangle only this many wires; `--schmidt` then describes those.
    #[arg(long)]
    pub streamlined: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub qpd: DecompositionArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MubCheckArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args, Clone)]
pub struct SamplingArgs {
    /// `plus`, `zero`, `plus^n`, `zero^n`, `random:<seed>` or a comma-separated
    /// amplitude list such as `1,0,0,1i` (renormalized).
    #[arg(long, default_value = "plus")]
    pub input: String,
    /// Pauli string such as `XZ`.
    #[arg(long)]
    pub observable: String,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "trajectory")]
    pub mode: String,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub qpd: DecompositionArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of evenly spaced robustness values from 0 to 2^n − 1.
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

/// Parses `maximal`, `separable` or a coefficient list for `n` qubits per side.
pub fn parse_schmidt(s: &str, n: usize) -> Result<SchmidtVector> {
    match s.trim().to_ascii_lowercase().as_str() {
        "maximal" => SchmidtVector::maximal(n),
        "separable" => SchmidtVector::separable(n),
        list => {
            let values = list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("'{t}': {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != 1usize << n {
                return Err(Error::InvalidSchmidt(format!(
                    "expected {} coefficients for n = {n}, got {}",
                    1usize << n,
                    values.len()
                )));
            }
            SchmidtVector::from_unnormalized(values)
        }
    }
}

/// Parses an input state for `n` qubits.
pub fn parse_state(s: &str, n: usize) -> Result<PureState> {
    let spec = s.trim().to_ascii_lowercase();
    let (name, power) = match spec.split_once('^') {
        Some((name, p)) => {
            let p: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?;
            (name.to_string(), Some(p))
        }
        None => (spec.clone(), None),
    };
    if let Some(p) = power {
        if p != n {
            return Err(Error::Parse(format!("'{s}' has {p} qubits, expected {n}")));
        }
    }
    match name.as_str() {
        "plus" => Ok(PureState::plus(n)),
        "zero" => Ok(PureState::zero(n)),
        _ => {
            if let Some(seed) = spec.strip_prefix("random:") {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed in '{s}'")))?;
                return Ok(PureState::random(n, &mut ChaCha8Rng::seed_from_u64(seed)));
            }
            let amps = spec
                .split(',')
                .map(|t| {
                    Complex64::from_str(t.trim())
                        .map_err(|_| Error::Parse(format!("bad amplitude '{t}'")))
                })
                .collect::<Result<Vec<Complex64>>>()?;
            if amps.len() != 1usize << n {
                return Err(Error::Parse(format!(
                    "expected {} amplitudes, got {}",
                    1usize << n,
                    amps.len()
                )));
            }
            PureState::normalized(amps)
        }
    }
}

pub fn parse_observable(s: &str, n: usize) -> Result<Observable> {
    let o = Observable::pauli(s)?;
    if o.n_qubits() != n {
        return Err(Error::Parse(format!(
            "observable '{s}' acts on {} qubits, expected {n}",
            o.n_qubits()
        )));
    }
    Ok(o)
}

/// The decomposition selected by the flags, with its resolved description.
fn build_qpd(n: usize, args: &DecompositionArgs) -> Result<(Qpd, serde_json::Value)> {
    if !(1..=MAX_CUT_WIRES).contains(&n) {
        return Err(Error::Config(format!("--n must be in 1..={MAX_CUT_WIRES}")));
    }
    if args.baseline {
        return Ok((qpd_baseline(n)?, json!({"builder": "baseline"})));
    }
    if let Some(n_e) = args.streamlined {
        let alpha = match (&args.schmidt, n_e) {
            (_, 0) => SchmidtVector::separable(0)?,
            (Some(s), _) => parse_schmidt(s, n_e)?,
            (None, _) => {
                return Err(Error::Config(
                    "--streamlined needs --schmidt for the entangled wires".into(),
                ))
            }
        };
        let q = qpd_streamlined(n, n_e, &alpha)?;
        let desc = json!({
            "builder": "streamlined",
            "n_e": n_e,
            "schmidt": alpha.values(),
            "robustness": robustness_pure(&alpha),
        });
        return Ok((q, desc));
    }
    let s = args.schmidt.as_deref().ok_or_else(|| {
        Error::Config("one of --schmidt, --baseline or --streamlined is required".into())
    })?;
    let alpha = parse_schmidt(s, n)?;
    let q = qpd_nme(n, &alpha)?;
    let desc = json!({
        "builder": "nme",
        "schmidt": alpha.values(),
        "robustness": robustness_pure(&alpha),
        "maximally_entangled": alpha.is_maximal(),
    });
    Ok((q, desc))
}

fn sampling_config(args: &SamplingArgs) -> Result<EstimatorConfig> {
    let mode: Mode = args.mode.parse()?;
    Ok(EstimatorConfig {
        shots: args.shots,
        seed: args.seed,
        mode,
        workers: args.workers,
    })
}

/// A finished record and whether it represents a verification failure.
struct Outcome {
    body: String,
    format: Format,
    name: &'static str,
    failed: bool,
}

fn json_body(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_body(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn envelope(
    command: &str,
    spec: serde_json::Value,
    result: serde_json::Value,
) -> serde_json::Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "spec": spec,
        "result": result,
    })
}

fn run_overhead(args: &OverheadArgs, format: Option<Format>) -> Result<Outcome> {
    if args.table {
        if !(1..=16).contains(&args.max_n) {
            return Err(Error::Config("--max-n must be in 1..=16".into()));
        }
        let mut rows = Vec::new();
        for n in 1..=args.max_n {
            let max = (1u64 << n) as f64 - 1.0;
            for i in 0..=4 {
                let r = max * i as f64 / 4.0;
                rows.push(vec![
                    n.to_string(),
                    r.to_string(),
                    overhead_nme(n, 0.0)?.to_string(),
                    overhead_nme(n, r)?.to_string(),
                ]);
            }
        }
        let format = format.unwrap_or(Format::Csv);
        let body = match format {
            Format::Csv => csv_body(
                &["n", "robustness", "gamma_without_nme", "gamma_with_nme"],
                &rows,
            )?,
            Format::Json => {
                let table: Vec<_> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "n": r[0].parse::<usize>().unwrap_or_default(),
                            "robustness": r[1].parse::<f64>().unwrap_or_default(),
                            "gamma_without_nme": r[2].parse::<f64>().unwrap_or_default(),
                            "gamma_with_nme": r[3].parse::<f64>().unwrap_or_default(),
                        })
                    })
                    .collect();
                json_body(&envelope(
                    "overhead",
                    json!({"table": true, "max_n": args.max_n}),
                    json!(table),
                ))
            }
        };
        return Ok(Outcome {
            body,
            format,
            name: "overhead_table",
            failed: false,
        });
    }

    let n = args
        .n
        .ok_or_else(|| Error::Config("--n is required".into()))?;
    let (r, schmidt) = match (&args.robustness, &args.schmidt) {
        (Some(r), _) => (*r, None),
        (None, Some(s)) => {
            let a = parse_schmidt(s, n)?;
            (robustness_pure(&a), Some(a.values().to_vec()))
        }
        (None, None) => (0.0, None),
    };
    let gamma = overhead_nme(n, r)?;
    let format = format.unwrap_or(Format::Json);
    let body = match format {
        Format::Json => json_body(&envelope(
            "overhead",
            json!({"n": n, "robustness": r, "schmidt": schmidt}),
            json!({"gamma": gamma, "gamma_without_nme": overhead_nme(n, 0.0)?}),
        )),
        Format::Csv => csv_body(
            &["n", "robustness", "gamma_without_nme", "gamma_with_nme"],
            &[vec![
                n.to_string(),
                r.to_string(),
                overhead_nme(n, 0.0)?.to_string(),
                gamma.to_string(),
            ]],
        )?,
    };
    Ok(Outcome {
        body,
        format,
        name: "overhead",
        failed: false,
    })
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome> {
    if !(args.tol >= 0.0) {
        return Err(Error::Config("--tol must be nonnegative".into()));
    }
    let (qpd, desc) = build_qpd(args.n, &args.qpd)?;
    let report = verify_identity(&qpd)?;
    let failed = !(report.max_abs_error <= args.tol);
    let spec = json!({"n": args.n, "decomposition": desc, "tol": args.tol});
    let mut result = serde_json::to_value(&report).expect("report serializes");
    result["status"] = json!(if failed { "failed" } else { "ok" });
    // flat fields first for quick inspection
    let record = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "n": report.n,
        "kappa": report.kappa,
        "terms": report.terms,
        "max_abs_error": report.max_abs_error,
        "status": result["status"],
        "spec": spec,
        "result": result,
    });
    Ok(Outcome {
        body: json_body(&record),
        format: Format::Json,
        name: "verify",
        failed,
    })
}

fn run_mub_check(args: &MubCheckArgs) -> Result<Outcome> {
    if !(1..=MAX_AUDIT_QUBITS).contains(&args.n) {
        return Err(Error::Config(format!(
            "--n must be in 1..={MAX_AUDIT_QUBITS}"
        )));
    }
    let a = audit(args.n, args.tol)?;
    let failed = !a.passed();
    let mut result = serde_json::to_value(&a).expect("audit serializes");
    result["status"] = json!(if failed { "failed" } else { "ok" });
    let record = envelope("mub-check", json!({"n": args.n, "tol": args.tol}), result);
    Ok(Outcome {
        body: json_body(&record),
        format: Format::Json,
        name: "mub_check",
        failed,
    })
}

fn sampling_spec(args: &SamplingArgs, cfg: &EstimatorConfig) -> serde_json::Value {
    json!({
        "input": args.input,
        "observable": args.observable.to_ascii_uppercase(),
        "shots": cfg.shots,
        "seed": cfg.seed,
        "mode": cfg.mode,
        "workers": cfg.workers,
    })
}

fn run_estimate(args: &EstimateArgs) -> Result<Outcome> {
    let (qpd, desc) = build_qpd(args.n, &args.qpd)?;
    let cfg = sampling_config(&args.sampling)?;
    let input = parse_state(&args.sampling.input, args.n)?;
    let o = parse_observable(&args.sampling.observable, args.n)?;
    let res = estimate(&qpd, &input, &o, &cfg)?;
    let exact = expectation(&o, &input.to_density())?;
    let mut result = serde_json::to_value(&res).expect("result serializes");
    result["exact"] = json!(exact);
    result["abs_error"] = json!((res.estimate - exact).abs());
    result["kappa_squared"] = json!(qpd.kappa() * qpd.kappa());
    let mut spec = sampling_spec(&args.sampling, &cfg);
    spec["n"] = json!(args.n);
    spec["decomposition"] = desc;
    let record = envelope("estimate", spec, result);
    Ok(Outcome {
        body: json_body(&record),
        format: Format::Json,
        name: "estimate",
        failed: false,
    })
}

fn run_sweep(args: &SweepArgs, format: Option<Format>) -> Result<Outcome> {
    if !(1..=MAX_CUT_WIRES).contains(&args.n) {
        return Err(Error::Config(format!("--n must be in 1..={MAX_CUT_WIRES}")));
    }
    if !(2..=MAX_SWEEP_POINTS).contains(&args.points) {
        return Err(Error::Config(format!(
            "--points must be in 2..={MAX_SWEEP_POINTS}"
        )));
    }
    let cfg = sampling_config(&args.sampling)?;
    let input = parse_state(&args.sampling.input, args.n)?;
    let o = parse_observable(&args.sampling.observable, args.n)?;
    let exact = expectation(&o, &input.to_density())?;
    let max = (1u64 << args.n) as f64 - 1.0;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for i in 0..args.points {
        let r = max * i as f64 / (args.points - 1) as f64;
        let alpha = SchmidtVector::with_robustness(args.n, r)?;
        let qpd = qpd_nme(args.n, &alpha)?;
        let kappa_theory = overhead_nme(args.n, r)?;
        let over = empirical_overhead(&qpd, &input, &o, &cfg, cfg.shots)?;
        let res = estimate(&qpd, &input, &o, &cfg)?;
        let kappa_empirical = over.ratio.sqrt();
        let abs_error = (res.estimate - exact).abs();
        rows.push(vec![
            r.to_string(),
            kappa_theory.to_string(),
            kappa_empirical.to_string(),
            res.estimate.to_string(),
            exact.to_string(),
            abs_error.to_string(),
        ]);
        records.push(json!({
            "robustness": r,
            "kappa_theory": kappa_theory,
            "kappa_empirical": kappa_empirical,
            "estimate": res.estimate,
            "std_error": res.std_error,
            "true_value": exact,
            "abs_error": abs_error,
        }));
    }
    let format = format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Csv => csv_body(
            &[
                "robustness",
                "kappa_theory",
                "kappa_empirical",
                "estimate",
                "true_value",
                "abs_error",
            ],
            &rows,
        )?,
        Format::Json => {
            let mut spec = sampling_spec(&args.sampling, &cfg);
            spec["n"] = json!(args.n);
            spec["points"] = json!(args.points);
            json_body(&envelope("sweep", spec, json!(records)))
        }
    };
    Ok(Outcome {
        body,
        format,
        name: "sweep",
        failed: false,
    })
}

fn output_path(cli: &Cli, outcome: &Outcome) -> Option<PathBuf> {
    if let Some(p) = &cli.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    Some(PathBuf::from(dir).join(format!("{}.{}", outcome.name, outcome.format.extension())))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Overhead(a) => run_overhead(a, cli.format),
        Command::Verify(a) => run_verify(a),
        Command::MubCheck(a) => run_mub_check(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Sweep(a) => run_sweep(a, cli.format),
    }
}

/// Runs a parsed command, writing the record to `out` and errors to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match dispatch(cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if out.write_all(outcome.body.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    if let Some(path) = output_path(cli, &outcome) {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            if let Err(e) = fs::create_dir_all(parent) {
                let _ = writeln!(err, "error: cannot create {}: {e}", parent.display());
                return EXIT_USAGE;
            }
        }
        if let Err(e) = fs::write(&path, &outcome.body) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if outcome.failed {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    }
}

/// Parses arguments and runs. Help and version requests exit with 0, other
/// parse failures with [`EXIT_USAGE`].
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["nmecut"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn schmidt_parsing() {
        let a = parse_schmidt("0.8,0.4,0.4,0.2", 2).unwrap();
        assert!((a.values().iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(
            parse_schmidt("maximal", 1).unwrap(),
            SchmidtVector::maximal(1).unwrap()
        );
        assert_eq!(
            parse_schmidt("Separable", 2).unwrap(),
            SchmidtVector::separable(2).unwrap()
        );
        assert!(parse_schmidt("0.8,0.4", 2).is_err());
        assert!(parse_schmidt("0.8,-0.4", 1).is_err());
        assert!(parse_schmidt("0,0", 1).is_err());
        assert!(parse_schmidt("a,b", 1).is_err());
    }

    #[test]
    fn state_parsing() {
        assert_eq!(parse_state("plus", 2).unwrap(), PureState::plus(2));
        assert_eq!(parse_state("zero^2", 2).unwrap(), PureState::zero(2));
        assert!(parse_state("zero^3", 2).is_err());
        let a = parse_state("random:5", 2).unwrap();
        assert_eq!(a, parse_state("random:5", 2).unwrap());
        let b = parse_state("1,1i", 1).unwrap();
        assert!((b.amplitudes()[1].im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(parse_state("1,0,0", 2).is_err());
        assert!(parse_state("0,0", 1).is_err());
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run_args(&["verify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--n", "2"]).0, EXIT_USAGE);
        assert_eq!(
            run_args(&["overhead", "--n", "1", "--robustness", "2"]).0,
            EXIT_USAGE
        );
        let (code, out, err) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("Usage") && err.is_empty());
    }

    #[test]
    fn verify_reports_json() {
        let (code, out, _) = run_args(&["verify", "--n", "2", "--schmidt", "0.8,0.4,0.4,0.2"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["n"], 2);
        assert_eq!(v["terms"], 5);
        assert!(v["max_abs_error"].as_f64().unwrap() <= 1e-10);
        assert!(v["spec"]["decomposition"]["schmidt"].is_array());
    }

    #[test]
    fn verify_fails_with_impossible_tolerance() {
        let (code, out, _) = run_args(&[
            "verify",
            "--n",
            "2",
            "--schmidt",
            "0.8,0.4,0.4,0.2",
            "--tol",
            "0",
        ]);
        assert_eq!(code, EXIT_VERIFY_FAILED);
        assert!(out.contains("\"failed\""));
    }
}
