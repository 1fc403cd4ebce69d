//! The verification suite behind `curveflow report` and the acceptance test.
//!
//! Each criterion collects named checks; a criterion passes when all of its
//! checks pass and is undecided when a zero test could not decide.

use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use crate::eulersys::{build_system, generators, Generator, HCase, SystemParams};
use crate::invariants::{
    independent_count, invariance_report, kinematic_basis, xi_symbols, AlgebraSelector, InvarianceReport, Reading,
};
use crate::liealg::{in_span, kernel_theta, structure_report, AlgebraBasis, Sampler};
use crate::liftcurve::{lift, verify, Branch, LiftCase, LiftOptions, PlaneCurve, VerifyReport};
use crate::symcore::{is_zero, Verdict, ZeroConfig};
use crate::thermostate::{kappa, theorem2_sweep, FamilyKind, StateFamily, SweepConfig};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    pub fn of_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn of_verdict(v: Verdict) -> Status {
        match v {
            Verdict::Zero => Status::Pass,
            Verdict::NonZero => Status::Fail,
            Verdict::Undecided => Status::Undecided,
        }
    }

    /// Fail dominates undecided, which dominates pass.
    pub fn all<I: IntoIterator<Item = Status>>(it: I) -> Status {
        it.into_iter().fold(Status::Pass, |acc, s| match (acc, s) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Undecided, _) | (_, Status::Undecided) => Status::Undecided,
            _ => Status::Pass,
        })
    }

    /// Process exit code: 0 pass, 1 fail, 3 undecided.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undecided => 3,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Undecided => "UNDECIDED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, status: Status, detail: Value) -> Check {
        Check { name: name.into(), status, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    fn new(id: u8, title: &'static str, checks: Vec<Check>) -> Self {
        CriterionReport { id, title, status: Status::all(checks.iter().map(|c| c.status)), checks }
    }

    /// `PASS 1 symmetry tables (12 checks)` or the first failing check.
    pub fn summary_line(&self) -> String {
        let bad: Vec<&str> = self.checks.iter().filter(|c| c.status != Status::Pass).map(|c| c.name.as_str()).collect();
        if bad.is_empty() {
            format!("{} {} {} ({} checks)", self.status.word(), self.id, self.title, self.checks.len())
        } else {
            format!("{} {} {}: {}", self.status.word(), self.id, self.title, bad.join(", "))
        }
    }
}

/// Seeds for every sampled quantity.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub zero: ZeroConfig,
    pub sampler_seed: u64,
    pub sweep: SweepConfig,
    /// Upper bound on the symmetry-table runtime.
    pub symmetry_budget: Duration,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            zero: ZeroConfig::default(),
            sampler_seed: Sampler::default().seed(),
            sweep: SweepConfig::default(),
            symmetry_budget: Duration::from_secs(300),
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut c = SuiteConfig::default();
        c.zero.seed = seed;
        c.sampler_seed = seed;
        c.sweep.seed = seed;
        c
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self.sampler_seed)
    }
}

// ---------------------------------------------------------------------------
// symmetry tables

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorCheck {
    pub label: String,
    pub field: String,
    pub status: Status,
    pub residuals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryTable {
    pub case: String,
    pub status: Status,
    pub generators: Vec<GeneratorCheck>,
}

fn default_g() -> crate::symcore::Expr {
    SystemParams::default().g
}

pub fn symmetry_table(case: &HCase, params: &SystemParams, cfg: &ZeroConfig) -> Result<SymmetryTable, String> {
    let sys = build_system(case, params).map_err(|e| e.to_string())?;
    let gens: Vec<GeneratorCheck> = generators(case, &params.g)
        .into_iter()
        .map(|g| {
            let r = sys.is_symmetry(&g.field, cfg);
            GeneratorCheck {
                label: g.label,
                field: g.field.to_string(),
                status: Status::of_verdict(r.verdict),
                residuals: r.residuals.iter().map(|x| x.residual.clone()).collect(),
            }
        })
        .collect();
    Ok(SymmetryTable { case: case.name().into(), status: Status::all(gens.iter().map(|g| g.status)), generators: gens })
}

/// Case-specific generators beyond `X1..X5`.
fn specific(case: &HCase) -> Vec<Generator> {
    generators(case, &default_g()).into_iter().skip(5).collect()
}

/// Every case-specific generator on every other case's system: it must pass
/// exactly when it lies in that case's algebra.
fn negative_control(cfg: &SuiteConfig) -> Check {
    let sampler = cfg.sampler();
    let cases = HCase::all_symbolic();
    let mut mismatches = Vec::new();
    let (mut rejected, mut shared) = (0usize, 0usize);
    let mut status = Status::Pass;
    for source in &cases {
        for g in specific(source) {
            for target in cases.iter().filter(|c| *c != source) {
                let sys = build_system(target, &SystemParams::default()).expect("symbolic case");
                let verdict = sys.is_symmetry(&g.field, &cfg.zero).verdict;
                let span = AlgebraBasis::of_case(target).fields();
                let inside = in_span(&g.field, &span, &sampler).unwrap_or(false);
                match (verdict, inside) {
                    (Verdict::Undecided, _) => status = Status::Undecided,
                    (Verdict::Zero, true) => shared += 1,
                    (Verdict::NonZero, false) => rejected += 1,
                    _ => mismatches.push(format!("{}:{} on {}", source.name(), g.label, target.name())),
                }
            }
        }
    }
    if !mismatches.is_empty() {
        status = Status::Fail;
    }
    Check::new(
        "negative control",
        status,
        json!({ "rejected": rejected, "shared_generators": shared, "mismatches": mismatches }),
    )
}

pub fn criterion1(cfg: &SuiteConfig) -> CriterionReport {
    let start = Instant::now();
    let mut checks: Vec<Check> = HCase::all_symbolic()
        .iter()
        .map(|c| match symmetry_table(c, &SystemParams::default(), &cfg.zero) {
            Ok(t) => {
                let failing: Vec<&str> =
                    t.generators.iter().filter(|g| g.status != Status::Pass).map(|g| g.label.as_str()).collect();
                Check::new(
                    format!("{} generators", c.name()),
                    t.status,
                    json!({ "generators": t.generators.len(), "failing": failing }),
                )
            }
            Err(e) => Check::new(format!("{} generators", c.name()), Status::Fail, json!({ "error": e })),
        })
        .collect();
    checks.push(negative_control(cfg));
    let within = start.elapsed() <= cfg.symmetry_budget;
    checks.push(Check::new("runtime budget", Status::of_bool(within), json!({ "budget_seconds": cfg.symmetry_budget.as_secs() })));
    CriterionReport::new(1, "symmetry tables", checks)
}

// ---------------------------------------------------------------------------
// structure

/// Derived series labels as expected for each case.
pub fn expected_series(case: &HCase) -> Vec<String> {
    let top = format!("g^{}", case.index());
    let middle: &[&str] = match case {
        HCase::Generic(_) => &["<X2,X3>"],
        HCase::Const | HCase::Linear(_) => &["<X1,X2,X3,X6,X7>", "<X6>"],
        HCase::Quadratic(_) => &["<X2,X3,X7,X8>"],
        _ => &["<X1,X2,X3>"],
    };
    std::iter::once(top).chain(middle.iter().map(|s| s.to_string())).chain(std::iter::once("0".into())).collect()
}

pub fn expected_kernel_dim(case: &HCase) -> usize {
    match case {
        HCase::Const | HCase::Linear(_) | HCase::Quadratic(_) => 3,
        _ => 1,
    }
}

pub fn criterion2(cfg: &SuiteConfig) -> CriterionReport {
    let sampler = cfg.sampler();
    let checks = HCase::all_symbolic()
        .iter()
        .map(|c| match structure_report(c, &sampler) {
            Ok(r) => {
                let got: Vec<String> = r.derived_series.iter().map(|t| t.label.clone()).collect();
                let want = expected_series(c);
                Check::new(
                    format!("{} derived series", c.name()),
                    Status::of_bool(got == want && r.solvable),
                    json!({ "series": got, "expected": want, "solvable": r.solvable }),
                )
            }
            Err(e) => Check::new(format!("{} derived series", c.name()), Status::Fail, json!({ "error": e.to_string() })),
        })
        .collect();
    CriterionReport::new(2, "derived series", checks)
}

pub fn criterion3(cfg: &SuiteConfig) -> CriterionReport {
    let sampler = cfg.sampler();
    let checks = HCase::all_symbolic()
        .iter()
        .map(|c| match structure_report(c, &sampler) {
            Ok(r) => {
                let dim = kernel_theta(&AlgebraBasis::of_case(c), &sampler).map(|k| k.dim()).unwrap_or(usize::MAX);
                let want = expected_kernel_dim(c);
                Check::new(
                    format!("{} thermodynamic part", c.name()),
                    Status::of_bool(r.thermo_part_matches && dim == want),
                    json!({
                        "span_matches": r.thermo_part_matches,
                        "kernel_dim": dim,
                        "expected_kernel_dim": want,
                        "kernel": r.kernel,
                    }),
                )
            }
            Err(e) => Check::new(format!("{} thermodynamic part", c.name()), Status::Fail, json!({ "error": e.to_string() })),
        })
        .collect();
    CriterionReport::new(3, "thermodynamic projection", checks)
}

// ---------------------------------------------------------------------------
// thermodynamics

pub const FAMILIES: [FamilyKind; 4] = [FamilyKind::General, FamilyKind::Case3, FamilyKind::Case4, FamilyKind::Case6];

/// Legendrian residual, symmetry and `kappa` cross term of a family.
pub fn family_check(kind: FamilyKind) -> Check {
    let f = StateFamily::symbolic(kind);
    let name = format!("{} family", kind.name());
    let legendrian = match f.legendrian_residual() {
        Ok(r) => is_zero(&r),
        Err(_) => Verdict::NonZero,
    };
    let symmetric = f.is_symmetric();
    let (cross, cross_text) = match kappa(&f) {
        Ok(k) => (is_zero(&k.q_rs), k.q_rs.to_string()),
        Err(e) => (Verdict::NonZero, e.to_string()),
    };
    let status = Status::all([legendrian, symmetric, cross].map(Status::of_verdict));
    Check::new(
        name,
        status,
        json!({
            "legendrian": Status::of_verdict(legendrian),
            "symmetric": Status::of_verdict(symmetric),
            "kappa_cross_term": cross_text,
        }),
    )
}

pub fn criterion4(cfg: &SuiteConfig) -> CriterionReport {
    let mut checks: Vec<Check> = FAMILIES.iter().map(|k| family_check(*k)).collect();
    let sweep = theorem2_sweep(&cfg.sweep);
    let ok = sweep.disagreements.is_empty() && sweep.configurations >= 1000;
    checks.push(Check::new("admissibility sweep", Status::of_bool(ok), serde_json::to_value(&sweep).unwrap_or(Value::Null)));
    CriterionReport::new(4, "thermodynamic states", checks)
}

// ---------------------------------------------------------------------------
// invariants

/// Cases whose printed Euler exponents carry `xi2` where `lambda2` is needed.
pub fn has_exponent_ambiguity(case: &HCase) -> bool {
    matches!(case, HCase::Power(..) | HCase::Exp(..))
}

fn report_check(name: String, r: Result<InvarianceReport, crate::invariants::InvariantError>) -> (Check, Option<InvarianceReport>) {
    match r {
        Ok(r) => (
            Check::new(name, Status::of_verdict(r.verdict()), json!({ "failures": r.failures })),
            Some(r),
        ),
        Err(e) => (Check::new(name, Status::Fail, json!({ "error": e.to_string() })), None),
    }
}

pub fn criterion5() -> CriterionReport {
    let mut checks = Vec::new();
    for c in HCase::all_symbolic() {
        let (k, _) = report_check(format!("{} kinematic", c.name()), invariance_report(&c, &AlgebraSelector::Kinematic, Reading::AsPrinted));
        checks.push(k);
        let xi = AlgebraSelector::Euler(xi_symbols(&c));
        if has_exponent_ambiguity(&c) {
            let (alt, _) = report_check(format!("{} euler (lambda2 exponents)", c.name()), invariance_report(&c, &xi, Reading::Lambda2));
            checks.push(alt);
            // As printed, the members with xi2 exponents are reported, not counted.
            if let Ok(printed) = invariance_report(&c, &xi, Reading::AsPrinted) {
                checks.push(Check::new(
                    format!("{} euler as printed (flagged)", c.name()),
                    Status::Pass,
                    json!({ "verdict": Status::of_verdict(printed.verdict()), "flagged": printed.failures }),
                ));
            }
        } else {
            let (e, _) = report_check(format!("{} euler", c.name()), invariance_report(&c, &xi, Reading::AsPrinted));
            checks.push(e);
        }
    }
    let generic = HCase::symbolic("generic").expect("generic case");
    let count = independent_count(&kinematic_basis(&generic).invariants, 1);
    checks.push(match count {
        Ok(n) => Check::new("generic order-1 count", Status::of_bool(n == 4), json!({ "count": n, "expected": 4 })),
        Err(e) => Check::new("generic order-1 count", Status::Fail, json!({ "error": e.to_string() })),
    });
    CriterionReport::new(5, "differential invariants", checks)
}

// ---------------------------------------------------------------------------
// lifts

/// A lift exercised by the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftScenario {
    pub case: LiftCase,
    pub z0: f64,
    pub branch: Branch,
    /// The plane curve is the unit circle over `[0, tau_max]`.
    pub tau_max: f64,
    pub ode_tol: f64,
    pub h_tol: f64,
}

/// Parametric branches start at `t = 1`, away from the cusp at `t = 0`.
/// The power lift has a bounded plane length, so it uses a short arc.
pub fn lift_scenarios() -> Vec<LiftScenario> {
    let full = std::f64::consts::TAU;
    let t0 = 1.0f64;
    let on_circle = |case, z0| LiftScenario { case, z0, branch: Branch::Plus, tau_max: full, ode_tol: 1e-8, h_tol: 1e-8 };
    vec![
        on_circle(LiftCase::Const, 1.0),
        on_circle(LiftCase::Linear { lambda: 0.5 }, 0.0),
        on_circle(LiftCase::Quadratic { lambda: 1.0 / 32.0 }, 8.0 * t0.cos().powi(2)),
        LiftScenario {
            case: LiftCase::Power { lambda1: 1.0, lambda2: 11.0 / 3.0 },
            z0: 0.1,
            branch: Branch::Minus,
            tau_max: 0.25,
            ode_tol: 1e-6,
            h_tol: 1e-6,
        },
        on_circle(LiftCase::Exp { lambda1: 1.0, lambda2: 1.0 }, t0.cos()),
        on_circle(LiftCase::Log, -t0.cos().ln()),
    ]
}

pub const ACCEPTANCE_SAMPLES: usize = 2001;
/// Coarse grid for the refinement check; halving gives `2n - 1` samples.
pub const REFINEMENT_SAMPLES: usize = 201;
/// Residuals below this are rounding noise and exempt from the refinement ratio.
pub const NOISE_FLOOR: f64 = 1e-12;

pub fn run_scenario(s: &LiftScenario, samples: usize) -> Result<VerifyReport, String> {
    let c = PlaneCurve::circle_arc(samples, s.tau_max).map_err(|e| e.to_string())?;
    let r = lift(&s.case, s.z0, &c, s.branch, &LiftOptions::default()).map_err(|e| e.to_string())?;
    Ok(verify(&r, &c))
}

fn refines(coarse: f64, fine: f64) -> bool {
    fine <= NOISE_FLOOR || coarse >= 8.0 * fine
}

pub fn lift_check(s: &LiftScenario) -> Check {
    let name = format!("{} lift", s.case.name());
    let run = || -> Result<(VerifyReport, VerifyReport, VerifyReport), String> {
        Ok((
            run_scenario(s, ACCEPTANCE_SAMPLES)?,
            run_scenario(s, REFINEMENT_SAMPLES)?,
            run_scenario(s, 2 * REFINEMENT_SAMPLES - 1)?,
        ))
    };
    match run() {
        Ok((main, coarse, fine)) => {
            let within = main.max_ode_residual < s.ode_tol && main.h_residual < s.h_tol;
            let converges = refines(coarse.max_ode_residual, fine.max_ode_residual) && refines(coarse.h_residual, fine.h_residual);
            Check::new(
                name,
                Status::of_bool(within && converges),
                json!({
                    "scenario": s,
                    "ode_residual": main.max_ode_residual,
                    "h_residual": main.h_residual,
                    "h_relative": main.relative,
                    "refinement": {
                        "samples": [coarse.samples, fine.samples],
                        "ode": [coarse.max_ode_residual, fine.max_ode_residual],
                        "h": [coarse.h_residual, fine.h_residual],
                    },
                }),
            )
        }
        Err(e) => Check::new(name, Status::Fail, json!({ "scenario": s, "error": e })),
    }
}

pub fn criterion6() -> CriterionReport {
    CriterionReport::new(6, "curve lifts", lift_scenarios().iter().map(lift_check).collect())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub status: Status,
    pub criteria: Vec<CriterionReport>,
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let criteria = vec![criterion1(cfg), criterion2(cfg), criterion3(cfg), criterion4(cfg), criterion5(), criterion6()];
    SuiteReport { schema: SCHEMA, status: Status::all(criteria.iter().map(|c| c.status)), criteria }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_combination() {
        assert_eq!(Status::all([Status::Pass, Status::Undecided]), Status::Undecided);
        assert_eq!(Status::all([Status::Undecided, Status::Fail]), Status::Fail);
        assert_eq!(Status::all([]), Status::Pass);
        assert_eq!(Status::Undecided.exit_code(), 3);
    }

    #[test]
    fn series_labels() {
        let c = HCase::symbolic("linear").unwrap();
        assert_eq!(expected_series(&c), vec!["g^2", "<X1,X2,X3,X6,X7>", "<X6>", "0"]);
    }

    #[test]
    fn refinement_rule() {
        assert!(refines(1e-6, 1e-7));
        assert!(!refines(1e-6, 2e-7));
        assert!(refines(1e-13, 5e-13));
    }

    #[test]
    fn summary_names_failures() {
        let r = CriterionReport::new(9, "demo", vec![Check::new("a", Status::Pass, Value::Null), Check::new("b", Status::Fail, Value::Null)]);
        assert_eq!(r.summary_line(), "FAIL 9 demo: b");
    }
}
