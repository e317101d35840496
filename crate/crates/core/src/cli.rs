//! Command-line front end.
//!
//! Every command computes one result value and renders it either as text or
//! as a single JSON document with a top-level `schema_version`. Exit codes:
//! 0 success (a `NotDerivable` finding included), 1 internal or check
//! failure, 2 invalid configuration.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::counterfactuals::{
    detect_context_mixing, evaluate_proposition, narrate_proposition, narrate_verdict, ContextMixingReport,
    Derivability, Frame, Narration, PropositionEvaluation, PropositionSchema, VerdictKind,
};
use crate::hardy::{
    build_hardy_state, constraint_report, hardy_implications, optimize_hardy_fraction, validate_implications,
    ConstraintReport, HardyOptimum, HardyState, MeasurementFamily, Tolerances, ValidatedImplication,
    MIN_GRID_RESOLUTION,
};
use crate::lhv::{nogo_certificate_for, recheck, NoGoCertificate, RecheckSummary};
use crate::sim::{empirical_report, sample_runs, EmpiricalReport, Tally};

/// Version of the structured output documents; see `schema/output-v1.json`.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits for floating-point values in structured output.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Hardy-state constraints, local no-go and counterfactual grounding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the three zero probabilities and the positive Hardy fraction.
    Verify,
    /// Maximize p(11-+) over real measurement families.
    Optimize,
    /// Enumerate local deterministic strategies and emit the no-go certificate.
    Lhv,
    /// Evaluate proposition I or II under grounded counterfactual semantics.
    Argue {
        #[arg(value_enum)]
        proposition: PropositionArg,
    },
    /// Sample experiment runs and compare frequencies with Born probabilities.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropositionArg {
    #[value(name = "I", alias = "i", alias = "1")]
    One,
    #[value(name = "II", alias = "ii", alias = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Left rotation angle in radians, or degrees with a `deg` suffix [default: π/4]
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_left: Option<f64>,
    /// Right rotation angle in radians, or degrees with a `deg` suffix [default: π/4]
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_right: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi_left: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi_right: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub runs: u64,
    /// Grid points per axis for `optimize`
    #[arg(long, global = true, default_value_t = 64)]
    pub grid: usize,
    /// Golden-section refinement sweeps for `optimize`
    #[arg(long, global = true, default_value_t = 4)]
    pub refine: usize,
    /// Add tense-structured narration to `argue`
    #[arg(long, global = true, value_enum)]
    pub frame: Option<Frame>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Re-verify the `lhv` certificate with the independent checker
    #[arg(long, global = true)]
    pub recheck: bool,
    /// Probability at or below which an event counts as impossible
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub zero_tol: Option<f64>,
    /// Threshold p(11-+) must exceed
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub positivity_tol: Option<f64>,
}

/// Accepts radians (`0.785`) or degrees with a `deg` or `°` suffix (`45deg`).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (number, degrees) = if let Some(n) = s.strip_suffix("deg") {
        (n, true)
    } else if let Some(n) = s.strip_suffix('°') {
        (n, true)
    } else {
        (s, false)
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|e| format!("invalid angle {s:?}: {e}"))?;
    Ok(if degrees { value.to_radians() } else { value })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub family: MeasurementFamily,
    pub seed: u64,
    pub runs: u64,
    pub grid: usize,
    pub refine: usize,
    pub frame: Option<Frame>,
    pub format: OutputFormat,
    pub recheck: bool,
    pub tolerances: Tolerances,
}

impl Config {
    pub fn from_options(o: &Options) -> Result<Self, String> {
        let d = MeasurementFamily::reference();
        let family = MeasurementFamily::with_phases(
            o.theta_left.unwrap_or(d.theta_left),
            o.theta_right.unwrap_or(d.theta_right),
            o.phi_left.unwrap_or(0.0),
            o.phi_right.unwrap_or(0.0),
        );
        if !family.is_finite() {
            return Err("angles must be finite".into());
        }
        if o.runs < 1 {
            return Err("--runs must be at least 1".into());
        }
        if o.grid < MIN_GRID_RESOLUTION {
            return Err(format!("--grid must be at least {MIN_GRID_RESOLUTION}"));
        }
        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            zero: o.zero_tol.unwrap_or(defaults.zero),
            positivity: o.positivity_tol.unwrap_or(defaults.positivity),
        };
        for (name, v) in [("--zero-tol", tolerances.zero), ("--positivity-tol", tolerances.positivity)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be a finite non-negative number"));
            }
        }
        Ok(Config {
            family,
            seed: o.seed,
            runs: o.runs,
            grid: o.grid,
            refine: o.refine,
            frame: o.frame,
            format: o.format,
            recheck: o.recheck,
            tolerances,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    InvalidConfig(String),
    Internal(String),
}

struct Outcome {
    passed: bool,
    result: Value,
    text: String,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify => "verify",
        Command::Optimize => "optimize",
        Command::Lhv => "lhv",
        Command::Argue { .. } => "argue",
        Command::Sample => "sample",
    }
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                CliOutput {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> CliOutput {
    let name = command_name(&cli.command);
    let structured = cli.options.format == OutputFormat::Structured;
    let outcome = Config::from_options(&cli.options)
        .map_err(Failure::InvalidConfig)
        .and_then(|config| dispatch(&cli.command, &config).map(|o| (config, o)));

    match outcome {
        Ok((config, o)) => {
            let code = if o.passed { EXIT_OK } else { EXIT_FAILURE };
            let stdout = if structured {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "status": if o.passed { "ok" } else { "failed" },
                    "config": to_value(&config),
                    "result": o.result,
                });
                render_document(doc)
            } else {
                o.text
            };
            CliOutput {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(failure) => {
            let (code, kind, message) = match failure {
                Failure::InvalidConfig(m) => (EXIT_INVALID_CONFIG, "invalid_configuration", m),
                Failure::Internal(m) => (EXIT_FAILURE, "internal", m),
            };
            let stdout = if structured {
                render_document(json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "status": "error",
                    "error": { "kind": kind, "message": message },
                }))
            } else {
                String::new()
            };
            CliOutput {
                code,
                stdout,
                stderr: format!("error: {message}\n"),
            }
        }
    }
}

fn dispatch(command: &Command, config: &Config) -> Result<Outcome, Failure> {
    match command {
        Command::Verify => cmd_verify(config),
        Command::Optimize => cmd_optimize(config),
        Command::Lhv => cmd_lhv(config),
        Command::Argue { proposition } => cmd_argue(config, *proposition),
        Command::Sample => cmd_sample(config),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize to JSON")
}

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_significant).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn render_document(mut doc: Value) -> String {
    round_numbers(&mut doc);
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON value renders");
    s.push('\n');
    s
}

fn state_for(config: &Config) -> Result<HardyState, Failure> {
    build_hardy_state(config.family).map_err(|e| Failure::InvalidConfig(e.to_string()))
}

fn fmt_family(f: &MeasurementFamily) -> String {
    let mut s = format!("theta_left = {:.6}, theta_right = {:.6}", f.theta_left, f.theta_right);
    if f.phi_left != 0.0 || f.phi_right != 0.0 {
        let _ = write!(s, ", phi_left = {:.6}, phi_right = {:.6}", f.phi_left, f.phi_right);
    }
    s
}

#[derive(Serialize)]
struct VerifyResult {
    raw_norm_sqr: f64,
    report: ConstraintReport,
    implications: Vec<ValidatedImplication>,
}

pub fn verify_result_json(config: &Config) -> Option<Value> {
    cmd_verify(config).ok().map(|o| o.result)
}

fn cmd_verify(config: &Config) -> Result<Outcome, Failure> {
    let state = state_for(config)?;
    let result = VerifyResult {
        raw_norm_sqr: state.raw_norm_sqr(),
        report: constraint_report(&state, config.tolerances),
        implications: validate_implications(&state, config.tolerances),
    };
    let mut text = format!("Hardy state for {}\n", fmt_family(&config.family));
    let _ = writeln!(text, "raw squared norm before normalization: {:.12}", result.raw_norm_sqr);
    for c in &result.report.checks {
        let rule = match c.requirement {
            crate::hardy::Requirement::Zero => format!("<= {:e}", config.tolerances.zero),
            crate::hardy::Requirement::Positive => format!("> {:e}", config.tolerances.positivity),
        };
        let _ = writeln!(
            text,
            "  {:<9} = {:<20.12e} {:<12} {}",
            c.label,
            c.probability,
            rule,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(text, "implications:");
    for i in &result.implications {
        let _ = writeln!(
            text,
            "  {:<28} counter-event weight {:.12e} {}",
            i.implication.to_string(),
            i.counter_probability,
            if i.validated { "validated" } else { "NOT validated" }
        );
    }
    let passed = result.report.passed;
    let _ = writeln!(text, "constraints: {}", if passed { "PASS" } else { "FAIL" });
    Ok(Outcome {
        passed,
        result: to_value(&result),
        text,
    })
}

#[derive(Serialize)]
struct OptimizeResult {
    optimum: HardyOptimum,
    closed_form: f64,
}

fn cmd_optimize(config: &Config) -> Result<Outcome, Failure> {
    let optimum =
        optimize_hardy_fraction(config.grid, config.refine).map_err(|e| Failure::InvalidConfig(e.to_string()))?;
    let result = OptimizeResult {
        optimum,
        closed_form: (5.0 * 5f64.sqrt() - 11.0) / 2.0,
    };
    let text = format!(
        "grid {} x {}, {} refinement sweeps, {} evaluations\n\
         theta_left* = {:.12}\ntheta_right* = {:.12}\np(11-+)* = {:.12}\n(5*sqrt(5) - 11)/2 = {:.12}\n",
        config.grid,
        config.grid,
        config.refine,
        optimum.evaluations,
        optimum.theta_left,
        optimum.theta_right,
        optimum.probability,
        result.closed_form
    );
    Ok(Outcome {
        passed: true,
        result: to_value(&result),
        text,
    })
}

#[derive(Serialize)]
struct LhvResult {
    certificate: NoGoCertificate,
    naive_chain: ContextMixingReport,
    recheck: Option<RecheckSummary>,
}

fn cmd_lhv(config: &Config) -> Result<Outcome, Failure> {
    let state = state_for(config)?;
    let certificate = nogo_certificate_for(&state);
    let naive_chain = detect_context_mixing(&state, &hardy_implications()[..3]);
    let recheck = if config.recheck {
        // check the document as emitted, not the in-memory value
        let emitted = serde_json::to_string(&certificate).map_err(|e| Failure::Internal(e.to_string()))?;
        let parsed: NoGoCertificate =
            serde_json::from_str(&emitted).map_err(|e| Failure::Internal(e.to_string()))?;
        Some(recheck(&parsed).map_err(|e| Failure::Internal(format!("certificate recheck failed: {e}")))?)
    } else {
        None
    };

    let c = &certificate;
    let mut text = format!(
        "{} deterministic strategies, {} survive {}\n",
        c.strategy_count,
        c.survivors.len(),
        c.constraints.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
    );
    for s in &c.survivors {
        let _ = writeln!(text, "  survivor: {s}");
    }
    for e in &c.eliminated {
        let cited: Vec<String> = e.violated.iter().map(|&i| format!("#{i} {}", c.constraints[i])).collect();
        let _ = writeln!(text, "  eliminated: {}  violates {}", e.strategy, cited.join("; "));
    }
    let _ = writeln!(
        text,
        "survivors producing {}{}: {}",
        c.target_settings,
        c.target_outcomes,
        c.survivors_reaching_target.len()
    );
    let _ = writeln!(text, "deduction chain ({} steps):", c.chain.len());
    for (i, step) in c.chain.iter().enumerate() {
        let _ = writeln!(
            text,
            "  {}. {} => {}  by #{} {}",
            i + 1,
            step.premise,
            step.conclusion,
            step.constraint,
            c.constraints[step.constraint]
        );
    }
    let _ = writeln!(text, "  contradicts {}", c.contradicts);
    let _ = writeln!(
        text,
        "quantum witness: p({}{}) = {:.12} > {:e}",
        c.quantum_witness.settings, c.quantum_witness.outcomes, c.quantum_witness.probability, c.quantum_witness.threshold
    );
    let _ = writeln!(
        text,
        "naive chaining: {} context switches; composed {} => {} {}",
        naive_chain.switches.len(),
        c.chain.first().map(|s| s.premise.to_string()).unwrap_or_default(),
        c.chain.last().map(|s| s.conclusion.to_string()).unwrap_or_default(),
        match &naive_chain.composed {
            Some(k) if !k.holds => format!(
                "is refuted by {} with weight {:.12}",
                k.counterexamples[0], k.counterexamples[0].weight
            ),
            Some(_) => "holds".to_string(),
            None => "cannot be formed".to_string(),
        }
    );
    if let Some(summary) = &recheck {
        let _ = writeln!(
            text,
            "recheck: valid ({} strategies, {} survivors, {} steps)",
            summary.strategies_checked, summary.survivors, summary.steps_checked
        );
    }
    Ok(Outcome {
        passed: true,
        result: to_value(&LhvResult {
            certificate,
            naive_chain,
            recheck,
        }),
        text,
    })
}

#[derive(Serialize)]
struct ArgueResult {
    proposition: &'static str,
    evaluation: PropositionEvaluation,
    narrations: Vec<Narration>,
}

fn cmd_argue(config: &Config, which: PropositionArg) -> Result<Outcome, Failure> {
    let state = state_for(config)?;
    let (label, schema) = match which {
        PropositionArg::One => ("I", PropositionSchema::proposition_one()),
        PropositionArg::Two => ("II", PropositionSchema::proposition_two()),
    };
    let evaluation = evaluate_proposition(&state, &schema);
    let mut narrations = Vec::new();
    if let Some(frame) = config.frame {
        narrations.push(narrate_proposition(&schema, frame));
        for rv in &evaluation.trace {
            narrations.push(narrate_verdict(&rv.actual, schema.query(), &rv.verdict, frame));
        }
    }

    let mut text = format!("proposition ({label}) for {}\n", fmt_family(&config.family));
    for rv in &evaluation.trace {
        let verdict = match rv.verdict.kind {
            VerdictKind::NecessarilyPlus => "necessarily +",
            VerdictKind::NecessarilyMinus => "necessarily -",
            VerdictKind::Undetermined => "undetermined",
            VerdictKind::Inconsistent => "inconsistent",
        };
        let worlds: Vec<String> = rv
            .verdict
            .feasible
            .iter()
            .map(|r| format!("{r} w={:.6}", r.weight))
            .collect();
        let _ = writeln!(
            text,
            "  actual {} (w={:.6}): had R{} been measured, result {verdict}  [{}]",
            rv.actual,
            rv.actual.weight,
            schema.alternative_right(),
            worlds.join(", ")
        );
    }
    match evaluation.status {
        Derivability::Derivable => {
            let _ = writeln!(text, "result: Derivable");
        }
        Derivability::NotDerivable => {
            let w: Vec<String> = evaluation.witnesses.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(text, "result: NotDerivable, witnesses {}", w.join(", "));
        }
    }
    for n in &narrations {
        let _ = writeln!(text, "[{}] {}", to_value(&n.frame).as_str().unwrap_or(""), n.text);
    }
    Ok(Outcome {
        passed: true,
        result: to_value(&ArgueResult {
            proposition: label,
            evaluation,
            narrations,
        }),
        text,
    })
}

#[derive(Serialize)]
struct SampleResult {
    tally: Tally,
    report: EmpiricalReport,
}

fn cmd_sample(config: &Config) -> Result<Outcome, Failure> {
    let state = state_for(config)?;
    let tally = sample_runs(&state, config.runs, config.seed).map_err(|e| Failure::InvalidConfig(e.to_string()))?;
    let report = empirical_report(&tally, &state).map_err(|e| Failure::Internal(e.to_string()))?;
    let mut text = format!("{} runs, seed {}\n", tally.total, tally.seed);
    let _ = writeln!(
        text,
        "  {:<8} {:>8} {:>8} {:>12} {:>12} {:>9}",
        "bucket", "count", "n(s)", "frequency", "born", "z"
    );
    for b in &report.buckets {
        let _ = writeln!(
            text,
            "  {:<8} {:>8} {:>8} {:>12.6} {:>12.6} {:>9.3}{}",
            format!("{}{}", b.settings, b.outcomes),
            b.count,
            b.settings_total,
            b.frequency,
            b.probability,
            b.z_score,
            if b.forbidden { "  forbidden" } else { "" }
        );
    }
    for f in &report.failures {
        let _ = writeln!(text, "  failure: {f}");
    }
    let _ = writeln!(text, "empirical check: {}", if report.passed { "PASS" } else { "FAIL" });
    Ok(Outcome {
        passed: report.passed,
        result: to_value(&SampleResult { tally, report }),
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_parsing() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!((parse_angle("45deg").unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("90°").unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(parse_angle("abc").is_err());
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(round_significant(1.0 / 12.0), 0.0833333333333);
        assert_eq!(round_significant(0.0), 0.0);
        assert_eq!(round_significant(123456.7890123456), 123456.789012);
    }

    #[test]
    fn invalid_config_exits_two() {
        let out = run(["hardy", "verify", "--runs", "0"]);
        assert_eq!(out.code, EXIT_INVALID_CONFIG);
        let out = run(["hardy", "optimize", "--grid", "4"]);
        assert_eq!(out.code, EXIT_INVALID_CONFIG);
        let out = run(["hardy", "verify", "--theta-left", "inf"]);
        assert_eq!(out.code, EXIT_INVALID_CONFIG);
        let out = run(["hardy", "frobnicate"]);
        assert_eq!(out.code, EXIT_INVALID_CONFIG);
    }

    #[test]
    fn strict_tolerance_override_fails_verify() {
        let out = run(["hardy", "verify", "--positivity-tol", "0.5"]);
        assert_eq!(out.code, EXIT_FAILURE);
        assert!(out.stdout.contains("FAIL"));
    }
}
