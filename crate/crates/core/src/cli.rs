//! Command-line front end. Every subcommand prints a versioned JSON report and
//! exits 0 on pass, 1 on failure, 2 on usage errors and 3 when a zero test is
//! undecided.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::eulersys::{HCase, SystemParams};
use crate::invariants::{independent_count, invariance_report, kinematic_basis, xi_symbols, AlgebraSelector, Reading};
use crate::liealg::{structure_report, Sampler};
use crate::liftcurve::{lift, verify, write_csv, Branch, LiftCase, LiftOptions, LiftResult, PlaneCurve};
use crate::suite::{self, Status, SuiteConfig, SCHEMA};
use crate::symcore::{is_zero, parse, parse_rational, Expr, Verdict, ZeroConfig};
use crate::thermostate::{
    admissible_theorem2, internal_energy, kappa, FamilyKind, RatioKind, StateFamily, Theorem2Params,
};

#[derive(Debug, Parser)]
#[command(name = "curveflow", version, about = "Symmetries, thermodynamic states, invariants and lifts for flows on a space curve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every sampled point.
    #[arg(long, global = true, env = "CURVEFLOW_SEED")]
    pub seed: Option<u64>,
    /// Output path; JSON goes to stdout when omitted. For `lift` this is the table.
    #[arg(long, global = true, env = "CURVEFLOW_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json, env = "CURVEFLOW_FORMAT")]
    pub format: Format,
    /// Relative tolerance of sampled zero tests.
    #[arg(long, global = true, env = "CURVEFLOW_ZERO_TOL")]
    pub zero_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Default)]
pub struct CaseParams {
    #[arg(long, env = "CURVEFLOW_LAMBDA", allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, env = "CURVEFLOW_LAMBDA1", allow_hyphen_values = true)]
    pub lambda1: Option<String>,
    #[arg(long, env = "CURVEFLOW_LAMBDA2", allow_hyphen_values = true)]
    pub lambda2: Option<String>,
    /// Gravity constant.
    #[arg(long, env = "CURVEFLOW_G", allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Heat conductivity.
    #[arg(long, env = "CURVEFLOW_K", allow_hyphen_values = true)]
    pub k: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct StateParams {
    #[arg(long, num_args = 4..=5, env = "CURVEFLOW_GAMMA", allow_negative_numbers = true, value_delimiter = ' ')]
    pub gamma: Vec<String>,
    #[arg(long, env = "CURVEFLOW_C1", allow_hyphen_values = true)]
    pub c1: Option<String>,
    #[arg(long, env = "CURVEFLOW_C2", allow_hyphen_values = true)]
    pub c2: Option<String>,
    #[arg(long, env = "CURVEFLOW_S0", allow_hyphen_values = true)]
    pub s0: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadingArg {
    AsPrinted,
    Lambda2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveArg {
    Circle,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every listed generator of a case.
    Symmetries {
        case: String,
        #[command(flatten)]
        params: CaseParams,
    },
    /// Brackets, derived series and thermodynamic projection of a case's algebra.
    Algebra {
        case: String,
        #[command(flatten)]
        params: CaseParams,
    },
    /// A thermodynamic state family: Legendrian check, symmetry, kappa.
    Thermo {
        family: String,
        #[command(flatten)]
        state: StateParams,
        #[arg(long, env = "CURVEFLOW_LAMBDA2", allow_hyphen_values = true)]
        lambda2: Option<String>,
    },
    /// Classify a general state by sign conditions.
    Admissible {
        #[command(flatten)]
        state: StateParams,
        /// `irrational` or `rational:m:k` for gamma3/gamma4.
        #[arg(long, env = "CURVEFLOW_RATIO")]
        ratio: String,
    },
    /// Check the kinematic or Euler invariant basis of a case.
    Invariants {
        case: String,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long)]
        euler: bool,
        #[arg(long, num_args = 1.., env = "CURVEFLOW_XI", allow_negative_numbers = true, value_delimiter = ' ')]
        xi: Vec<String>,
        #[arg(long, value_enum, default_value_t = ReadingArg::AsPrinted)]
        reading: ReadingArg,
    },
    /// Lift a plane curve and verify the lift.
    Lift {
        case: String,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long, value_enum, default_value_t = CurveArg::Circle)]
        curve: CurveArg,
        /// CSV with `tau,x,y` and optionally `x_tau,y_tau` when `--curve file`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        tau_max: f64,
        /// Starting height; defaults to the height at t = 1 on parametric branches.
        #[arg(long, env = "CURVEFLOW_Z0", allow_hyphen_values = true)]
        z0: Option<f64>,
        #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
        branch: BranchArg,
        /// Pass threshold for the equation and height residuals.
        #[arg(long, env = "CURVEFLOW_RESIDUAL_TOL")]
        residual_tol: Option<f64>,
        #[arg(long, env = "CURVEFLOW_ROOT_TOL")]
        root_tol: Option<f64>,
        #[arg(long, env = "CURVEFLOW_ODE_RTOL")]
        ode_rtol: Option<f64>,
        /// Where the JSON report goes; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Every acceptance criterion.
    Report,
}

/// Outcome of a subcommand before it is written out.
struct Outcome {
    status: Status,
    body: Value,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn expr(text: &str) -> CliResult<Expr> {
    parse(text).map_err(|e| CliError::Usage(format!("cannot parse `{text}`: {e}")))
}

fn param(v: &Option<String>, name: &str) -> CliResult<Expr> {
    v.as_deref().map(expr).unwrap_or_else(|| Ok(Expr::sym(name)))
}

fn build_case(name: &str, p: &CaseParams) -> CliResult<HCase> {
    let symbolic = HCase::symbolic(name).map_err(usage)?;
    let case = match symbolic {
        HCase::Linear(_) => HCase::Linear(param(&p.lambda, "lambda")?),
        HCase::Quadratic(_) => HCase::Quadratic(param(&p.lambda, "lambda")?),
        HCase::Power(..) => HCase::Power(param(&p.lambda1, "lambda1")?, param(&p.lambda2, "lambda2")?),
        HCase::Exp(..) => HCase::Exp(param(&p.lambda1, "lambda1")?, param(&p.lambda2, "lambda2")?),
        other => other,
    };
    case.validate().map_err(usage)?;
    Ok(case)
}

fn system_params(p: &CaseParams) -> CliResult<SystemParams> {
    Ok(SystemParams { g: param(&p.g, "g")?, k: param(&p.k, "k")?, shift: None })
}

fn zero_config(common: &Common) -> ZeroConfig {
    let mut z = ZeroConfig::default();
    if let Some(seed) = common.seed {
        z.seed = seed;
    }
    if let Some(t) = common.zero_tol {
        z.rel_tol = t;
    }
    z
}

fn suite_config(common: &Common) -> SuiteConfig {
    let mut c = common.seed.map(SuiteConfig::with_seed).unwrap_or_default();
    c.zero = zero_config(common);
    c
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn symmetries(common: &Common, case: &str, params: &CaseParams) -> CliResult<Outcome> {
    let case = build_case(case, params)?;
    let table = suite::symmetry_table(&case, &system_params(params)?, &zero_config(common)).map_err(CliError::Usage)?;
    Ok(Outcome { status: table.status, body: to_value(&table) })
}

fn algebra(common: &Common, case: &str, params: &CaseParams) -> CliResult<Outcome> {
    let case = build_case(case, params)?;
    let sampler = Sampler::new(common.seed.unwrap_or(Sampler::default().seed()));
    Ok(match structure_report(&case, &sampler) {
        Ok(r) => Outcome { status: Status::of_bool(r.solvable && r.thermo_part_matches), body: to_value(&r) },
        Err(e) => Outcome { status: Status::Fail, body: json!({ "case": case.name(), "error": e.to_string() }) },
    })
}

fn thermo(family: &str, state: &StateParams, lambda2: &Option<String>) -> CliResult<Outcome> {
    let kind = FamilyKind::parse(family).ok_or_else(|| CliError::Usage(format!("unknown family `{family}`")))?;
    let f = if state.gamma.is_empty() && state.c1.is_none() && state.c2.is_none() && state.s0.is_none() && lambda2.is_none() {
        StateFamily::symbolic(kind)
    } else {
        let gamma = if state.gamma.is_empty() {
            (1..=kind.gamma_count()).map(|i| Expr::sym(&format!("gamma{i}"))).collect()
        } else {
            state.gamma.iter().map(|g| expr(g)).collect::<CliResult<Vec<_>>>()?
        };
        let l2 = lambda2.as_deref().map(expr).transpose()?;
        StateFamily::new(kind, &gamma, l2, param(&state.c1, "C1")?, param(&state.c2, "C2")?, param(&state.s0, "s0")?)
            .map_err(usage)?
    };
    let legendrian = f.legendrian_residual().map(|r| is_zero(&r)).unwrap_or(Verdict::NonZero);
    let symmetric = f.is_symmetric();
    let k = kappa(&f).ok();
    let cross = k.as_ref().map(|k| is_zero(&k.q_rs)).unwrap_or(Verdict::NonZero);
    let energy = internal_energy(&f).map(|e| e.to_string()).unwrap_or_else(|e| format!("error: {e}"));
    let status = Status::all([legendrian, symmetric, cross].map(Status::of_verdict));
    Ok(Outcome {
        status,
        body: json!({
            "family": f,
            "legendrian": Status::of_verdict(legendrian),
            "symmetric": Status::of_verdict(symmetric),
            "kappa": k,
            "kappa_cross_term_zero": Status::of_verdict(cross),
            "internal_energy": energy,
        }),
    })
}

fn admissible(state: &StateParams, ratio: &str) -> CliResult<Outcome> {
    let rat = |v: &str| parse_rational(v).ok_or_else(|| CliError::Usage(format!("`{v}` is not a rational number")));
    if state.gamma.len() != 4 {
        return Err(CliError::Usage("admissible needs exactly four --gamma values".into()));
    }
    let req = |v: &Option<String>, name: &str| v.clone().ok_or_else(|| CliError::Usage(format!("--{name} is required")));
    let gamma = [rat(&state.gamma[0])?, rat(&state.gamma[1])?, rat(&state.gamma[2])?, rat(&state.gamma[3])?];
    let params = Theorem2Params {
        gamma,
        c1: rat(&req(&state.c1, "c1")?)?,
        c2: rat(&req(&state.c2, "c2")?)?,
        s0: rat(&req(&state.s0, "s0")?)?,
        ratio: RatioKind::parse(ratio).ok_or_else(|| CliError::Usage(format!("bad --ratio `{ratio}`")))?,
    };
    let verdict = admissible_theorem2(&params).map_err(usage)?;
    Ok(Outcome { status: Status::of_bool(verdict.admissible), body: json!({ "params": params, "verdict": verdict }) })
}

fn invariants(case: &str, params: &CaseParams, euler: bool, xi: &[String], reading: ReadingArg) -> CliResult<Outcome> {
    let case = build_case(case, params)?;
    let reading = match reading {
        ReadingArg::AsPrinted => Reading::AsPrinted,
        ReadingArg::Lambda2 => Reading::Lambda2,
    };
    let selector = if euler {
        let xi = if xi.is_empty() { xi_symbols(&case) } else { xi.iter().map(|x| expr(x)).collect::<CliResult<Vec<_>>>()? };
        AlgebraSelector::Euler(xi)
    } else {
        AlgebraSelector::Kinematic
    };
    let report = invariance_report(&case, &selector, reading).map_err(usage)?;
    let count = independent_count(&kinematic_basis(&case).invariants, 1).ok();
    Ok(Outcome {
        status: Status::of_verdict(report.verdict()),
        body: json!({ "report": report, "kinematic_order1_count": count }),
    })
}

/// Height at `t = 1` on the parametric branches, a small height for case 4.
fn default_z0(case: &LiftCase) -> f64 {
    let t0 = 1.0f64;
    match *case {
        LiftCase::Quadratic { lambda } => t0.cos().powi(2) / (4.0 * lambda),
        LiftCase::Exp { lambda2, .. } => t0.cos() / lambda2,
        LiftCase::Log => -t0.cos().ln(),
        LiftCase::Power { .. } => 0.1,
        LiftCase::Const | LiftCase::Linear { .. } => 0.0,
    }
}

#[derive(Serialize)]
struct LiftSummary<'a> {
    case: LiftCase,
    samples: usize,
    z0: f64,
    branch: Branch,
    max_ode_residual: f64,
    l_monotone: bool,
    a_monotone: bool,
    output: Option<&'a str>,
}

#[allow(clippy::too_many_arguments)]
fn lift_cmd(
    common: &Common,
    case: &str,
    params: &CaseParams,
    curve: CurveArg,
    input: &Option<PathBuf>,
    samples: usize,
    tau_max: f64,
    z0: Option<f64>,
    branch: BranchArg,
    tols: (Option<f64>, Option<f64>, Option<f64>),
) -> CliResult<(Outcome, Option<LiftResult>)> {
    let hcase = build_case(case, params)?;
    let lc = LiftCase::from_hcase(&hcase).map_err(usage)?;
    let c = match curve {
        CurveArg::Circle => PlaneCurve::circle_arc(samples, tau_max).map_err(usage)?,
        CurveArg::File => {
            let path = input.as_ref().ok_or_else(|| CliError::Usage("--curve file needs --input".into()))?;
            let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            PlaneCurve::from_csv(f).map_err(usage)?
        }
    };
    let mut opts = LiftOptions::default();
    if matches!(lc, LiftCase::Power { .. }) {
        opts.residual_tol = 1e-6;
    }
    let (residual_tol, root_tol, ode_rtol) = tols;
    opts.residual_tol = residual_tol.unwrap_or(opts.residual_tol);
    opts.root_tol = root_tol.unwrap_or(opts.root_tol);
    opts.ode_rtol = ode_rtol.unwrap_or(opts.ode_rtol);
    let branch = if branch == BranchArg::Plus { Branch::Plus } else { Branch::Minus };
    let z0 = z0.unwrap_or_else(|| default_z0(&lc));
    match lift(&lc, z0, &c, branch, &opts) {
        Ok(r) => {
            let v = verify(&r, &c);
            let nondecreasing = |x: &[f64]| x.windows(2).all(|w| w[1] >= w[0]);
            let summary = LiftSummary {
                case: lc,
                samples: c.len(),
                z0,
                branch,
                max_ode_residual: r.max_ode_residual,
                l_monotone: nondecreasing(&r.l),
                a_monotone: nondecreasing(&r.a),
                output: common.out.as_ref().and_then(|p| p.to_str()),
            };
            let ok = v.max_ode_residual < opts.residual_tol && v.h_residual < opts.residual_tol && summary.l_monotone;
            let body = json!({ "lift": summary, "verify": v, "options": opts });
            Ok((Outcome { status: Status::of_bool(ok), body }, Some(r)))
        }
        Err(e) => Ok((
            Outcome { status: Status::Fail, body: json!({ "case": lc, "z0": z0, "error": e.to_string() }) },
            None,
        )),
    }
}

fn open_out(path: &PathBuf) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(body: Value, status: Status, path: Option<&PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("status".into(), to_value(&status));
    match body {
        Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json") + "\n";
    match path {
        Some(p) => open_out(p)?.write_all(text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    }
    .map_err(|e| CliError::Io(e.to_string()))
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<Status> {
    let common = &cli.common;
    let out = common.out.as_ref();
    let outcome = match &cli.command {
        Command::Symmetries { case, params } => symmetries(common, case, params)?,
        Command::Algebra { case, params } => algebra(common, case, params)?,
        Command::Thermo { family, state, lambda2 } => thermo(family, state, lambda2)?,
        Command::Admissible { state, ratio } => admissible(state, ratio)?,
        Command::Invariants { case, params, euler, xi, reading } => invariants(case, params, *euler, xi, *reading)?,
        Command::Lift { case, params, curve, input, samples, tau_max, z0, branch, residual_tol, root_tol, ode_rtol, report } => {
            let (outcome, result) =
                lift_cmd(common, case, params, *curve, input, *samples, *tau_max, *z0, *branch, (*residual_tol, *root_tol, *ode_rtol))?;
            if let (Some(r), Some(path)) = (&result, out) {
                let w = open_out(path)?;
                // The table is CSV unless JSON is asked for with a non-.csv path.
                if common.format == Format::Csv || path.extension().is_some_and(|e| e == "csv") {
                    write_csv(r, w).map_err(usage)?;
                } else {
                    serde_json::to_writer(w, r).map_err(|e| CliError::Io(e.to_string()))?;
                }
            }
            emit(outcome.body, outcome.status, report.as_ref(), stdout)?;
            return Ok(outcome.status);
        }
        Command::Report => {
            let r = suite::run_suite(&suite_config(common));
            for c in &r.criteria {
                writeln!(stderr, "{}", c.summary_line()).map_err(|e| CliError::Io(e.to_string()))?;
            }
            Outcome { status: r.status, body: json!({ "criteria": r.criteria }) }
        }
    };
    emit(outcome.body, outcome.status, out, stdout)?;
    Ok(outcome.status)
}

/// Runs the CLI on `args` and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(status) => status.exit_code(),
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(CliError::Io(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            1
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("curveflow").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["symmetries", "cubic"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["admissible", "--gamma", "1", "2", "3", "4", "--ratio", "maybe"]).0, 2);
    }

    #[test]
    fn admissible_even_case() {
        let (code, out) = call(&["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "1", "--c2", "1", "--s0", "0", "--ratio", "rational:1:2"]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["verdict"]["admissible"], true);
    }

    #[test]
    fn power_as_printed_fails_honestly() {
        let (code, _) = call(&["invariants", "power", "--euler"]);
        assert_eq!(code, 1);
        assert_eq!(call(&["invariants", "power", "--euler", "--reading", "lambda2"]).0, 0);
    }
}
