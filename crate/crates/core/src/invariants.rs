//! Kinematic and Euler differential invariants and invariant derivations.
//!
//! A function `J` on the prolonged system is invariant under an algebra when
//! `reduce(X^(k) J) = 0` for every basis field `X`. Kinematic invariants use the
//! geometric ideal `ker theta`; Euler invariants add one thermodynamic field
//! `A = sum xi_i X_i`.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::eulersys::{build_system, combine, Generator, HCase, SystemE, SystemParams};
use crate::jetspace::{apply_field, total_derivative, PointField};
use crate::liealg::{kernel_theta, AlgebraBasis, Sampler};
use crate::symcore::{differentiate, eval_exact, normalize, parse, BaseVar, Expr, Field, JetVar, Rational, Symbol, Verdict, ZeroConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("{0} is not rational in the jet variables of positive order")]
    NotRational(String),
    #[error("degenerate xi: {0}")]
    Degenerate(String),
    #[error("all xi vanish")]
    ZeroXi,
    #[error("expected {expected} xi values, got {found}")]
    XiCount { expected: usize, found: usize },
    #[error("zero test undecided for {0}")]
    Undecided(String),
    #[error("no regular sample point found")]
    Singular,
}

/// A candidate invariant with the label it is displayed under.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCandidate {
    pub label: String,
    #[serde(serialize_with = "ser_expr")]
    pub expr: Expr,
    pub order: u32,
}

fn ser_expr<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

fn positive_order_jets(e: &Expr) -> bool {
    e.any_symbol(&|s| s.as_jet().map(|j| j.order() > 0).unwrap_or(false))
}

/// Jets of positive order occur only under integer powers and field operations.
fn rational_in_jets(e: &Expr) -> bool {
    match e {
        Expr::Num(_) | Expr::Sym(_) => true,
        Expr::Add(v) | Expr::Mul(v) => v.iter().all(rational_in_jets),
        Expr::Pow(b, x) => {
            rational_in_jets(b) && !positive_order_jets(x) && (!positive_order_jets(b) || x.as_integer().is_some())
        }
        Expr::Fun(_, arg) => !positive_order_jets(arg),
    }
}

impl InvariantCandidate {
    pub fn new(label: impl Into<String>, expr: Expr) -> Result<Self, InvariantError> {
        let label = label.into();
        if !rational_in_jets(&expr) {
            return Err(InvariantError::NotRational(label));
        }
        let order = expr.max_jet_order();
        Ok(InvariantCandidate { label, expr, order })
    }

    pub fn parse(text: &str) -> Result<Self, InvariantError> {
        let e = parse(text).map_err(|err| InvariantError::NotRational(format!("{text}: {err}")))?;
        InvariantCandidate::new(text, e)
    }
}

/// `A D_t + B D_a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivationCandidate {
    pub label: String,
    #[serde(serialize_with = "ser_expr")]
    pub a: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub b: Expr,
}

impl DerivationCandidate {
    pub fn new(label: impl Into<String>, a: Expr, b: Expr) -> Self {
        DerivationCandidate { label: label.into(), a, b }
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        let mut terms = Vec::new();
        if !self.a.is_zero_literal() {
            terms.push(&self.a * total_derivative(e, BaseVar::T));
        }
        if !self.b.is_zero_literal() {
            terms.push(&self.b * total_derivative(e, BaseVar::A));
        }
        normalize(&Expr::add_all(terms))
    }
}

/// Generating invariants together with the invariant derivations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Basis {
    pub invariants: Vec<InvariantCandidate>,
    pub derivations: Vec<DerivationCandidate>,
}

fn p(text: &str) -> Expr {
    parse(text).expect("static invariant")
}

fn basis(invariants: &[&str], derivations: &[(&str, &str, &str)]) -> Basis {
    Basis {
        invariants: invariants.iter().map(|t| InvariantCandidate::parse(t).expect("static invariant")).collect(),
        derivations: derivations.iter().map(|(l, a, b)| DerivationCandidate::new(*l, p(a), p(b))).collect(),
    }
}

/// Cases whose geometric ideal contains the Galilean boost.
fn has_boost(case: &HCase) -> bool {
    matches!(case, HCase::Const | HCase::Linear(_) | HCase::Quadratic(_))
}

pub fn kinematic_basis(case: &HCase) -> Basis {
    if has_boost(case) {
        basis(
            &["rho", "s", "u_a", "rho_a", "s_a", "s_t + u*s_a"],
            &[("D_t + u*D_a", "1", "u"), ("D_a", "0", "1")],
        )
    } else {
        basis(&["a", "u", "rho", "s", "u_a", "rho_a", "s_t", "s_a"], &[("D_t", "1", "0"), ("D_a", "0", "1")])
    }
}

/// How to read exponents printed with `xi2` in the power and exponential cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    AsPrinted,
    /// `xi2` in exponents replaced by the case constant `lambda2`.
    Lambda2,
}

/// Generators combined by `xi_1, xi_2, ...` into the thermodynamic field `A`.
pub fn xi_generators(case: &HCase) -> &'static [&'static str] {
    match case {
        HCase::Generic(_) => &["X2", "X3", "X4", "X5"],
        HCase::Const | HCase::Linear(_) => &["X2", "X3", "X4", "X5", "X8", "X9"],
        _ => &["X2", "X3", "X4", "X5", "X6"],
    }
}

/// `xi1, xi2, ...` as symbols.
pub fn xi_symbols(case: &HCase) -> Vec<Expr> {
    (1..=xi_generators(case).len()).map(|i| Expr::sym(&format!("xi{i}"))).collect()
}

fn bind_xi(text: &str, xi: &[Expr], lambda_subs: &[(Symbol, Expr)]) -> Expr {
    let mut map: std::collections::HashMap<Symbol, Expr> =
        xi.iter().enumerate().map(|(i, x)| (Symbol::new(&format!("xi{}", i + 1)), x.clone())).collect();
    for (s, v) in lambda_subs {
        map.insert(s.clone(), v.clone());
    }
    normalize(&p(text).subs(&map))
}

fn case_constants(case: &HCase) -> Vec<(Symbol, Expr)> {
    match case {
        HCase::Linear(l) | HCase::Quadratic(l) => vec![(Symbol::new("lambda"), l.clone())],
        HCase::Power(l1, l2) | HCase::Exp(l1, l2) => {
            vec![(Symbol::new("lambda1"), l1.clone()), (Symbol::new("lambda2"), l2.clone())]
        }
        _ => vec![],
    }
}

fn check_xi(case: &HCase, xi: &[Expr]) -> Result<(), InvariantError> {
    let expected = xi_generators(case).len();
    if xi.len() != expected {
        return Err(InvariantError::XiCount { expected, found: xi.len() });
    }
    if xi.iter().all(|x| normalize(x).is_zero_literal()) {
        return Err(InvariantError::ZeroXi);
    }
    Ok(())
}

/// Denominators that must not vanish, invariants, and `(label, A, B)` derivations.
type BasisText = (Vec<&'static str>, Vec<&'static str>, Vec<(&'static str, &'static str, &'static str)>);

/// The displayed Euler invariants and derivations of a case.
pub fn euler_basis(case: &HCase, xi: &[Expr], reading: Reading) -> Result<Basis, InvariantError> {
    check_xi(case, xi)?;
    let alt = reading == Reading::Lambda2;
    let (denominators, invs, ders): BasisText = match case {
        HCase::Generic(_) => (
            vec!["xi4"],
            vec!["a", "(s - xi2/xi4)*rho", "u", "u_a", "rho_a/rho", "s_t*rho", "s_a*rho"],
            vec![("D_t", "1", "0"), ("D_a", "0", "1")],
        ),
        HCase::Const => (
            vec!["xi4", "xi4 + xi5 - xi6"],
            vec![
                "(s - xi2/(xi4 + xi5 - xi6))*rho_a/(rho*s_a)",
                "u_a*rho^(xi6/xi4 + 1)/rho_a",
                "rho_a*rho^(xi5/xi4 - 1)",
                "u_a*s_a*rho^4/rho_a^3",
                "(s_t + u*s_a)*rho^3/rho_a^2",
            ],
            vec![
                ("rho^((xi5 + xi6)/xi4)*(D_t + u*D_a)", "rho^((xi5 + xi6)/xi4)", "u*rho^((xi5 + xi6)/xi4)"),
                ("rho^(xi5/xi4)*D_a", "0", "rho^(xi5/xi4)"),
            ],
        ),
        HCase::Linear(_) => (
            vec!["xi4 + xi5", "lambda*g*(xi4 - 2*xi5) - 2*xi6"],
            vec![
                "(s - xi2/(xi4 + xi5))*rho_a/(rho*s_a)",
                "u_a*rho^(lambda*g*xi5/(lambda*g*(xi4 - 2*xi5) - 2*xi6))",
                "rho_a*u_a^(-2)*rho^(xi6/(lambda*g*(xi4 - 2*xi5) - 2*xi6) - 1)",
                "u_a*s_a*rho^4/rho_a^3",
                "(s_t + u*s_a)*rho^3/rho_a^2",
            ],
            vec![
                (
                    "rho^(lambda*g*xi5/(lambda*g*(xi4 - 2*xi5) - 2*xi6))*(D_t + u*D_a)",
                    "rho^(lambda*g*xi5/(lambda*g*(xi4 - 2*xi5) - 2*xi6))",
                    "u*rho^(lambda*g*xi5/(lambda*g*(xi4 - 2*xi5) - 2*xi6))",
                ),
                (
                    "rho^((2*lambda*g*xi5 + xi6)/(lambda*g*(xi4 - 2*xi5) - 2*xi6))*D_a",
                    "0",
                    "rho^((2*lambda*g*xi5 + xi6)/(lambda*g*(xi4 - 2*xi5) - 2*xi6))",
                ),
            ],
        ),
        HCase::Quadratic(_) => (
            vec!["xi4", "xi4 - 2*xi5"],
            vec![
                "(s - xi2/xi4)*rho_a/(rho*s_a)",
                "u_a",
                "rho_a*rho^(xi5/(xi4 - 2*xi5) - 1)",
                "s_a*rho^4/rho_a^3",
                "(s_t + u*s_a)*rho^3/rho_a^2",
            ],
            vec![("D_t + u*D_a", "1", "u"), ("rho^(xi5/(xi4 - 2*xi5))*D_a", "0", "rho^(xi5/(xi4 - 2*xi5))")],
        ),
        HCase::Power(..) => (
            vec!["xi5", "xi4 + xi5"],
            vec![
                if alt { "rho*u^2*a^(xi4*(lambda2 - 2)/(2*xi5))" } else { "rho*u^2*a^(xi4*(xi2 - 2)/(2*xi5))" },
                "(s - xi2/(xi4 + xi5))*a*u*rho",
                if alt { "u*a^(-lambda2/2)" } else { "u*a^(-xi2/2)" },
                "u_a*a/u",
                "rho_a*a/rho",
                "s_t*a^2*rho",
                "s_a*a^2*u*rho",
            ],
            vec![
                if alt { ("a^(1 - lambda2/2)*D_t", "a^(1 - lambda2/2)", "0") } else { ("a^(1 - xi2/2)*D_t", "a^(1 - xi2/2)", "0") },
                ("a*D_a", "0", "a"),
            ],
        ),
        HCase::Exp(..) => (
            vec!["xi4", "xi5"],
            vec![
                if alt { "rho*u*exp(lambda2*xi4*a/(2*xi5))" } else { "rho*u*exp(xi2*xi4*a/(2*xi5))" },
                "(s - xi2/xi4)*u*rho",
                if alt { "u*exp(-lambda2*a/2)" } else { "u*exp(-xi2*a/2)" },
                "u_a/u",
                "rho_a/rho",
                "s_t*rho",
                "s_a*u*rho",
            ],
            vec![
                if alt { ("exp(-lambda2*a/2)*D_t", "exp(-lambda2*a/2)", "0") } else { ("exp(-xi2*a/2)*D_t", "exp(-xi2*a/2)", "0") },
                ("D_a", "0", "1"),
            ],
        ),
        HCase::Log => (
            vec!["xi5", "xi4 + xi5"],
            vec![
                "rho*a^(-xi4/xi5)",
                "(s - xi2/(xi4 + xi5))*a*rho",
                "u",
                "u_a*a",
                "rho_a*a/rho",
                "s_t*a^2*rho",
                "s_a*a^2*rho",
            ],
            vec![("a*D_t", "a", "0"), ("a*D_a", "0", "a")],
        ),
    };
    let consts = case_constants(case);
    for d in denominators {
        if bind_xi(d, xi, &consts).is_zero_literal() {
            return Err(InvariantError::Degenerate(format!("{d} = 0")));
        }
    }
    let invariants = invs
        .iter()
        .map(|t| InvariantCandidate::new(*t, bind_xi(t, xi, &consts)))
        .collect::<Result<Vec<_>, _>>()?;
    let derivations = ders
        .iter()
        .map(|(l, a, b)| DerivationCandidate::new(*l, bind_xi(a, xi, &consts), bind_xi(b, xi, &consts)))
        .collect();
    Ok(Basis { invariants, derivations })
}

// ---------------------------------------------------------------------------
// algebras

/// `g_m = ker theta` of the case's symmetry algebra.
pub fn kinematic_algebra(case: &HCase) -> AlgebraBasis {
    let alg = AlgebraBasis::of_case(case);
    kernel_theta(&alg, &Sampler::default()).expect("generator tables are projectable")
}

/// `g_m` extended by `A = sum xi_i X_i`.
pub fn euler_algebra(case: &HCase, xi: &[Expr]) -> Result<AlgebraBasis, InvariantError> {
    check_xi(case, xi)?;
    let all = AlgebraBasis::of_case(case);
    let pick = |label: &str| all.generators.iter().find(|g| g.label == label).expect("generator label").field.clone();
    let fields: Vec<PointField> = xi_generators(case).iter().map(|l| pick(l)).collect();
    let a = PointField::linear_combination(xi.iter().cloned().zip(fields.iter()));
    let mut out = kinematic_algebra(case);
    let label = xi_generators(case).iter().enumerate().map(|(i, l)| format!("xi{}*{}", i + 1, l)).collect::<Vec<_>>().join(" + ");
    out.generators.push(Generator { label, field: a });
    out.label = format!("g_sym({})", case.name());
    Ok(out)
}

#[derive(Debug, Clone)]
pub enum AlgebraSelector {
    Kinematic,
    Euler(Vec<Expr>),
}

/// A case's system and algebra, ready for repeated invariance checks.
pub struct Checker {
    pub system: SystemE,
    pub algebra: AlgebraBasis,
    pub cfg: ZeroConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorResidual {
    pub generator: String,
    pub verdict: Verdict,
    pub residual: String,
}

impl Checker {
    pub fn new(case: &HCase, selector: &AlgebraSelector) -> Result<Self, InvariantError> {
        let algebra = match selector {
            AlgebraSelector::Kinematic => kinematic_algebra(case),
            AlgebraSelector::Euler(xi) => euler_algebra(case, xi)?,
        };
        let system = build_system(case, &SystemParams::default()).map_err(|e| InvariantError::Degenerate(e.to_string()))?;
        Ok(Checker { system, algebra, cfg: ZeroConfig::default() })
    }

    /// `reduce(X^(k) J)` for each algebra generator.
    pub fn residuals(&self, j: &Expr) -> Vec<GeneratorResidual> {
        let j = self.system.reduce(j);
        self.algebra
            .generators
            .iter()
            .map(|g| {
                let r = self.system.reduce(&apply_field(&g.field, &j));
                let verdict = crate::symcore::zero_test(&r, &self.cfg).verdict;
                GeneratorResidual { generator: g.label.clone(), verdict, residual: r.to_string() }
            })
            .collect()
    }

    pub fn verdict(&self, j: &Expr) -> Verdict {
        combine(self.residuals(j).iter().map(|r| r.verdict))
    }

    /// `nabla J` for every `J`, reduced, checked for invariance.
    pub fn derivation_verdict(&self, d: &DerivationCandidate, basis: &[InvariantCandidate]) -> Verdict {
        combine(basis.iter().map(|j| self.verdict(&self.system.reduce(&d.apply(&j.expr)))))
    }
}

fn decided(v: Verdict, label: &str) -> Result<bool, InvariantError> {
    match v {
        Verdict::Zero => Ok(true),
        Verdict::NonZero => Ok(false),
        Verdict::Undecided => Err(InvariantError::Undecided(label.to_string())),
    }
}

pub fn is_kinematic_invariant(j: &InvariantCandidate, case: &HCase) -> Result<bool, InvariantError> {
    decided(Checker::new(case, &AlgebraSelector::Kinematic)?.verdict(&j.expr), &j.label)
}

pub fn is_euler_invariant(j: &InvariantCandidate, case: &HCase, xi: &[Expr]) -> Result<bool, InvariantError> {
    decided(Checker::new(case, &AlgebraSelector::Euler(xi.to_vec()))?.verdict(&j.expr), &j.label)
}

pub fn derivation_is_invariant(
    d: &DerivationCandidate,
    case: &HCase,
    selector: &AlgebraSelector,
    basis: &[InvariantCandidate],
) -> Result<bool, InvariantError> {
    decided(Checker::new(case, selector)?.derivation_verdict(d, basis), &d.label)
}

// ---------------------------------------------------------------------------
// counting

const PRIMES: [i64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn exact_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if !row[col].is_zero() {
                let f = &row[col] / &pivot_row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Number of independent members of pure order `k`, as the exact rank of their
/// Jacobian in the order-`k` jets at a rational point.
///
/// Jets are treated as free coordinates; the point uses `rho = 2`, `T = 3` and
/// small primes elsewhere, rotated on each of up to ten attempts.
pub fn independent_count(basis: &[InvariantCandidate], k: u32) -> Result<usize, InvariantError> {
    let members: Vec<&InvariantCandidate> = basis.iter().filter(|j| j.order == k).collect();
    if members.is_empty() {
        return Ok(0);
    }
    let jets: Vec<Symbol> = Field::ALL.iter().flat_map(|f| JetVar::of_order(*f, k)).map(|j| j.symbol()).collect();
    let rows: Vec<Vec<Expr>> = members.iter().map(|m| jets.iter().map(|j| normalize(&differentiate(&m.expr, j))).collect()).collect();
    let names: BTreeSet<Symbol> = rows.iter().flatten().flat_map(|e| e.symbols()).collect();
    for attempt in 0..10 {
        let value = |s: &Symbol| -> Option<Rational> {
            match s.name() {
                "rho" => return Some(Rational::from_integer(2.into())),
                "T" => return Some(Rational::from_integer(3.into())),
                _ => {}
            }
            let i = names.iter().position(|n| n == s)?;
            Some(Rational::from_integer(PRIMES[(i + 3 * attempt) % PRIMES.len()].into()))
        };
        let evaluated: Option<Vec<Vec<Rational>>> =
            rows.iter().map(|r| r.iter().map(|e| eval_exact(e, &value)).collect()).collect();
        if let Some(m) = evaluated {
            return Ok(exact_rank(m));
        }
    }
    Err(InvariantError::Singular)
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberReport {
    pub label: String,
    pub verdict: Verdict,
    pub residuals: Vec<GeneratorResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub case: String,
    pub algebra: String,
    pub reading: Option<Reading>,
    pub invariants: Vec<MemberReport>,
    pub derivations: Vec<MemberReport>,
    /// Labels of members that are not invariant.
    pub failures: Vec<String>,
}

impl InvarianceReport {
    pub fn verdict(&self) -> Verdict {
        combine(self.invariants.iter().chain(&self.derivations).map(|m| m.verdict))
    }
}

pub fn invariance_report(case: &HCase, selector: &AlgebraSelector, reading: Reading) -> Result<InvarianceReport, InvariantError> {
    let (basis, read) = match selector {
        AlgebraSelector::Kinematic => (kinematic_basis(case), None),
        AlgebraSelector::Euler(xi) => (euler_basis(case, xi, reading)?, Some(reading)),
    };
    let checker = Checker::new(case, selector)?;
    let invariants: Vec<MemberReport> = basis
        .invariants
        .iter()
        .map(|j| {
            let residuals = checker.residuals(&j.expr);
            MemberReport { label: j.label.clone(), verdict: combine(residuals.iter().map(|r| r.verdict)), residuals }
        })
        .collect();
    let derivations: Vec<MemberReport> = basis
        .derivations
        .iter()
        .map(|d| {
            let mut residuals = Vec::new();
            for j in &basis.invariants {
                for mut r in checker.residuals(&checker.system.reduce(&d.apply(&j.expr))) {
                    r.generator = format!("{} on {}", r.generator, j.label);
                    residuals.push(r);
                }
            }
            MemberReport { label: d.label.clone(), verdict: combine(residuals.iter().map(|r| r.verdict)), residuals }
        })
        .collect();
    let failures = invariants.iter().chain(&derivations).filter(|m| m.verdict != Verdict::Zero).map(|m| m.label.clone()).collect();
    Ok(InvarianceReport { case: case.name().to_string(), algebra: checker.algebra.label.clone(), reading: read, invariants, derivations, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(n: &str) -> HCase {
        HCase::symbolic(n).unwrap()
    }

    fn j(t: &str) -> InvariantCandidate {
        InvariantCandidate::parse(t).unwrap()
    }

    #[test]
    fn kinematic_examples() {
        assert!(is_kinematic_invariant(&j("s_t + u*s_a"), &case("const")).unwrap());
        assert!(!is_kinematic_invariant(&j("u"), &case("const")).unwrap());
        assert!(is_kinematic_invariant(&j("u"), &case("generic")).unwrap());
    }

    #[test]
    fn euler_examples() {
        let g = case("generic");
        let xi = xi_symbols(&g);
        assert!(is_euler_invariant(&j("(s - xi2/xi4)*rho"), &g, &xi).unwrap());
        assert!(is_euler_invariant(&j("s_t*rho"), &g, &xi).unwrap());
        assert!(!is_euler_invariant(&j("s*rho"), &g, &xi).unwrap());
    }

    #[test]
    fn euler_algebra_shapes() {
        let g = case("generic");
        assert_eq!(euler_algebra(&g, &xi_symbols(&g)).unwrap().dim(), 2);
        let c = case("const");
        let xi: Vec<Expr> = ["xi1", "xi2", "xi3", "xi4", "0", "0"].iter().map(|t| p(t)).collect();
        assert_eq!(euler_algebra(&c, &xi).unwrap().dim(), 4);
        assert_eq!(euler_algebra(&g, &[Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()]), Err(InvariantError::ZeroXi));
    }

    #[test]
    fn derivation_examples() {
        let k = AlgebraSelector::Kinematic;
        let gen = kinematic_basis(&case("generic")).invariants;
        let cst = kinematic_basis(&case("const")).invariants;
        assert!(derivation_is_invariant(&DerivationCandidate::new("D_a", p("0"), p("1")), &case("generic"), &k, &gen).unwrap());
        assert!(derivation_is_invariant(&DerivationCandidate::new("D_t + u*D_a", p("1"), p("u")), &case("const"), &k, &cst).unwrap());
        assert!(!derivation_is_invariant(&DerivationCandidate::new("D_t", p("1"), p("0")), &case("const"), &k, &cst).unwrap());
    }

    #[test]
    fn counting() {
        let gen = kinematic_basis(&case("generic")).invariants;
        assert_eq!(independent_count(&gen, 1).unwrap(), 4);
        let cst = kinematic_basis(&case("const")).invariants;
        assert_eq!(independent_count(&cst, 1).unwrap(), 4);
        let mut dup = gen.clone();
        dup.push(j("u_a"));
        assert_eq!(independent_count(&dup, 1).unwrap(), 4);
    }

    #[test]
    fn rationality_is_checked() {
        assert!(InvariantCandidate::parse("rho^(1/2)*u_a").is_ok());
        assert!(matches!(InvariantCandidate::parse("u_a^(1/2)"), Err(InvariantError::NotRational(_))));
        assert!(matches!(InvariantCandidate::parse("sin(s_a)"), Err(InvariantError::NotRational(_))));
    }

    #[test]
    fn degenerate_xi() {
        let q = case("quadratic");
        let xi: Vec<Expr> = ["1", "1", "1", "2", "1"].iter().map(|t| p(t)).collect();
        assert!(matches!(euler_basis(&q, &xi, Reading::AsPrinted), Err(InvariantError::Degenerate(_))));
    }

    #[test]
    fn log_basis_verbatim() {
        let l = case("log");
        let b = euler_basis(&l, &xi_symbols(&l), Reading::AsPrinted).unwrap();
        let labels: Vec<&str> = b.invariants.iter().map(|j| j.label.as_str()).collect();
        assert_eq!(labels[0], "rho*a^(-xi4/xi5)");
        assert_eq!(labels.len(), 7);
    }
}
