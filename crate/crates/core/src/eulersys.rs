//! The Euler system on a naturally parametrised space curve.
//!
//! With `a` the arc length and `h(a)` the height of the curve,
//!
//! ```text
//! E1 = rho (u_t + u u_a) + p_a + g h'(a) rho
//! E2 = rho_t + rho_a u + rho u_a
//! E3 = T (s_t + u s_a) - (k / rho) T_aa
//! ```
//!
//! `u_t`, `rho_t` and `s_t` are principal; every other jet is a free coordinate.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::jetspace::{apply_field, total_derivative, PointField};
use crate::symcore::normalize::looks_negative;
use crate::symcore::{differentiate, expand, normalize, parse, rat, zero_test, BaseVar, Expr, Field, JetVar, Symbol, Verdict, ZeroConfig};

/// Height profile of the curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HCase {
    /// Arbitrary `h`, usually the undefined function `h(a)`.
    Generic(Expr),
    Const,
    Linear(Expr),
    Quadratic(Expr),
    Power(Expr, Expr),
    Exp(Expr, Expr),
    Log,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
}

impl HCase {
    pub const NAMES: [&'static str; 7] = ["generic", "const", "linear", "quadratic", "power", "exp", "log"];

    /// The case with symbolic parameters `lambda`, `lambda1`, `lambda2`.
    pub fn symbolic(name: &str) -> Result<HCase, CaseError> {
        let s = Expr::sym;
        Ok(match name {
            "generic" => HCase::Generic(Expr::undef("h", Expr::sym("a"))),
            "const" => HCase::Const,
            "linear" => HCase::Linear(s("lambda")),
            "quadratic" => HCase::Quadratic(s("lambda")),
            "power" => HCase::Power(s("lambda1"), s("lambda2")),
            "exp" => HCase::Exp(s("lambda1"), s("lambda2")),
            "log" => HCase::Log,
            other => return Err(CaseError::UnknownCase(other.to_string())),
        })
    }

    pub fn all_symbolic() -> Vec<HCase> {
        HCase::NAMES.iter().map(|n| HCase::symbolic(n).unwrap()).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            HCase::Generic(_) => "generic",
            HCase::Const => "const",
            HCase::Linear(_) => "linear",
            HCase::Quadratic(_) => "quadratic",
            HCase::Power(..) => "power",
            HCase::Exp(..) => "exp",
            HCase::Log => "log",
        }
    }
    /// Position in `NAMES`; 0 is the generic case.
    /// Index in the paper's numbering of special cases (0 for the generic one).
    pub fn index(&self) -> usize {
        HCase::NAMES.iter().position(|n| *n == self.name()).unwrap()
    }

    pub fn validate(&self) -> Result<(), CaseError> {
        let bad = |msg: &str| Err(CaseError::InvalidParameter(msg.to_string()));
        let num = |e: &Expr| e.as_num().cloned();
        match self {
            HCase::Linear(l) | HCase::Quadratic(l) if l.is_zero_literal() => bad("lambda must be nonzero"),
            HCase::Power(l1, l2) => {
                if l1.is_zero_literal() {
                    return bad("lambda1 must be nonzero");
                }
                match num(l2) {
                    Some(q) if [0, 1, 2].iter().any(|n| q == rat(*n, 1)) => bad("lambda2 must avoid 0, 1, 2"),
                    _ => Ok(()),
                }
            }
            HCase::Exp(l1, l2) if l1.is_zero_literal() || l2.is_zero_literal() => {
                bad("lambda1 and lambda2 must be nonzero")
            }
            _ => Ok(()),
        }
    }

    /// `h(a)`.
    pub fn height(&self) -> Expr {
        let a = Expr::sym("a");
        match self {
            HCase::Generic(h) => h.clone(),
            HCase::Const => Expr::zero(),
            HCase::Linear(l) => l * a,
            HCase::Quadratic(l) => l * Expr::powi(a, 2),
            HCase::Power(l1, l2) => l1 * Expr::pow(a, l2.clone()),
            HCase::Exp(l1, l2) => l1 * (l2 * a).exp(),
            HCase::Log => a.ln(),
        }
    }

    /// For the quadratic case: true when the oscillatory (lambda > 0) generators apply.
    pub fn quadratic_positive(&self) -> bool {
        match self {
            HCase::Quadratic(l) => !looks_negative(&normalize(l)),
            _ => false,
        }
    }
}

impl fmt::Display for HCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemParams {
    pub g: Expr,
    pub k: Expr,
    /// Replaces `h(a)` by `h(a + a0) + h0`.
    pub shift: Option<(Expr, Expr)>,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams { g: Expr::sym("g"), k: Expr::sym("k"), shift: None }
    }
}

pub struct SystemE {
    pub case: HCase,
    pub params: SystemParams,
    pub equations: [Expr; 3],
    /// Solved forms of `u_t`, `rho_t`, `s_t`.
    pub principal: [(JetVar, Expr); 3],
    memo: RwLock<HashMap<JetVar, Expr>>,
}

fn is_principal(j: &JetVar) -> bool {
    j.nt >= 1 && matches!(j.field, Field::U | Field::Rho | Field::S)
}

pub fn build_system(case: &HCase, params: &SystemParams) -> Result<SystemE, CaseError> {
    case.validate()?;
    let a = Symbol::new("a");
    let mut h = case.height();
    if let Some((a0, h0)) = &params.shift {
        h = h.subs1(&a, &(Expr::sym("a") + a0)) + h0;
    }
    let dh = normalize(&differentiate(&h, &a));
    let p = |s: &str| parse(s).expect("static expression");
    let (g, k) = (&params.g, &params.k);
    let e1 = p("rho*(u_t + u*u_a) + p_a") + g * &dh * p("rho");
    let e2 = p("rho_t + rho_a*u + rho*u_a");
    let e3 = p("T*(s_t + u*s_a)") - k * p("T_aa/rho");
    let ut = normalize(&(p("-u*u_a - p_a/rho") - g * &dh));
    let rt = p("-rho_a*u - rho*u_a");
    let st = normalize(&(p("-u*s_a") + k * p("T_aa/(rho*T)")));
    let j = |s: &str| JetVar::parse(s).unwrap();
    Ok(SystemE {
        case: case.clone(),
        params: params.clone(),
        equations: [e1, e2, e3],
        principal: [(j("u_t"), ut), (j("rho_t"), rt), (j("s_t"), st)],
        memo: RwLock::new(HashMap::new()),
    })
}

impl SystemE {
    pub fn gravity_term(&self) -> Expr {
        expand(&(&self.equations[0] - parse("rho*(u_t + u*u_a) + p_a").unwrap()))
    }

    fn solved(&self, field: Field) -> &Expr {
        &self.principal.iter().find(|(j, _)| j.field == field).unwrap().1
    }

    /// Reduced value of a principal jet.
    fn principal_form(&self, j: JetVar) -> Expr {
        if let Some(e) = self.memo.read().expect("reduction memo poisoned").get(&j) {
            return e.clone();
        }
        let out = if j.nt == 1 {
            let mut e = self.solved(j.field).clone();
            for _ in 0..j.na {
                e = normalize(&total_derivative(&e, BaseVar::A));
            }
            e
        } else {
            let parent = JetVar::new(j.field, j.nt - 1, j.na);
            let d = total_derivative(&self.principal_form(parent), BaseVar::T);
            self.reduce(&d)
        };
        self.memo.write().expect("reduction memo poisoned").insert(j, out.clone());
        out
    }

    /// Normal form modulo the system and its differential consequences.
    pub fn reduce(&self, e: &Expr) -> Expr {
        let principal: Vec<JetVar> = e.symbols().iter().filter_map(|s| s.as_jet()).filter(is_principal).collect();
        if principal.is_empty() {
            return normalize(e);
        }
        let map: HashMap<Symbol, Expr> = principal.into_iter().map(|j| (j.symbol(), self.principal_form(j))).collect();
        normalize(&e.subs(&map))
    }

    pub fn is_symmetry(&self, x: &PointField, cfg: &ZeroConfig) -> SymmetryReport {
        let residuals: Vec<Residual> = self
            .equations
            .iter()
            .enumerate()
            .map(|(i, eq)| {
                let r = self.reduce(&apply_field(x, eq));
                let z = zero_test(&r, cfg);
                Residual { equation: format!("E{}", i + 1), verdict: z.verdict, residual: r.to_string() }
            })
            .collect();
        let verdict = combine(residuals.iter().map(|r| r.verdict));
        SymmetryReport { verdict, residuals }
    }
}

/// Zero if all are zero, NonZero if any is nonzero, Undecided otherwise.
pub fn combine<I: IntoIterator<Item = Verdict>>(vs: I) -> Verdict {
    let mut out = Verdict::Zero;
    for v in vs {
        match v {
            Verdict::NonZero => return Verdict::NonZero,
            Verdict::Undecided => out = Verdict::Undecided,
            Verdict::Zero => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub equation: String,
    pub verdict: Verdict,
    pub residual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// `zero` means every reduced residual vanishes, i.e. the field is a symmetry.
    pub verdict: Verdict,
    pub residuals: Vec<Residual>,
}

impl SymmetryReport {
    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Zero
    }
}

// ---------------------------------------------------------------------------
// generator tables

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub label: String,
    pub field: PointField,
}

fn gen(label: &str, parts: &[(&str, &str)]) -> Generator {
    Generator { label: label.to_string(), field: PointField::parse(parts).expect("static generator") }
}

fn gen_expr(label: &str, parts: Vec<(&'static str, Expr)>) -> Generator {
    Generator { label: label.to_string(), field: PointField::from_parts(parts) }
}

pub fn common_generators() -> Vec<Generator> {
    vec![
        gen("X1", &[("t", "1")]),
        gen("X2", &[("p", "1")]),
        gen("X3", &[("s", "1")]),
        gen("X4", &[("T", "T")]),
        gen("X5", &[("p", "p"), ("rho", "rho"), ("s", "-s")]),
    ]
}

/// `X9` of the linear case with the `d_u` coefficient `c (t + u/(lambda g))`.
///
/// The two printed tables disagree on `c` (1 versus 2); see [`linear_x9_choice`].
pub fn linear_x9(lambda: &Expr, g: &Expr, c: i64) -> Generator {
    let lg = lambda * g;
    let t = Expr::sym("t");
    let a = Expr::sym("a");
    let u = Expr::sym("u");
    gen_expr(
        "X9",
        vec![
            ("a", Expr::powi(t.clone(), 2) / 2 + a / &lg),
            ("u", Expr::int(c) * (t + u / &lg)),
            ("rho", Expr::int(-2) * Expr::sym("rho") / &lg),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct X9Choice {
    /// Coefficient that makes `X9` a symmetry.
    pub chosen: i64,
    pub rejected: i64,
    pub chosen_passes: bool,
    pub rejected_passes: bool,
}

/// Decides the linear-case `X9` variant by testing both against the system.
pub fn linear_x9_choice() -> X9Choice {
    static CHOICE: OnceLock<X9Choice> = OnceLock::new();
    *CHOICE.get_or_init(|| {
        let case = HCase::symbolic("linear").unwrap();
        let params = SystemParams::default();
        let sys = build_system(&case, &params).unwrap();
        let cfg = ZeroConfig::default();
        let lambda = Expr::sym("lambda");
        let one = sys.is_symmetry(&linear_x9(&lambda, &params.g, 1).field, &cfg).pass();
        let two = sys.is_symmetry(&linear_x9(&lambda, &params.g, 2).field, &cfg).pass();
        if two && !one {
            X9Choice { chosen: 2, rejected: 1, chosen_passes: two, rejected_passes: one }
        } else {
            X9Choice { chosen: 1, rejected: 2, chosen_passes: one, rejected_passes: two }
        }
    })
}

/// The case-specific generators `X6, X7, ...`.
pub fn special_generators(case: &HCase, g: &Expr) -> Vec<Generator> {
    let t = || Expr::sym("t");
    let a = || Expr::sym("a");
    let u = || Expr::sym("u");
    let rho = || Expr::sym("rho");
    let s = || Expr::sym("s");
    match case {
        HCase::Generic(_) => vec![],
        HCase::Const => vec![
            gen("X6", &[("a", "1")]),
            gen("X7", &[("a", "t"), ("u", "1")]),
            gen("X8", &[("t", "t"), ("a", "a"), ("s", "-s")]),
            gen("X9", &[("t", "t"), ("u", "-u"), ("p", "-2*p"), ("s", "s")]),
        ],
        HCase::Linear(l) => vec![
            gen("X6", &[("a", "1")]),
            gen("X7", &[("a", "t"), ("u", "1")]),
            gen("X8", &[("t", "t"), ("a", "2*a"), ("u", "u"), ("rho", "-2*rho"), ("s", "-s")]),
            linear_x9(l, g, linear_x9_choice().chosen),
        ],
        HCase::Quadratic(l) => {
            let x6 = gen("X6", &[("a", "a"), ("u", "u"), ("rho", "-2*rho")]);
            if case.quadratic_positive() {
                let w = (Expr::int(2) * l * g).sqrt();
                let wt = &w * t();
                vec![
                    x6,
                    gen_expr("X7", vec![("a", wt.clone().sin()), ("u", &w * wt.clone().cos())]),
                    gen_expr("X8", vec![("a", wt.clone().cos()), ("u", -(&w * wt.sin()))]),
                ]
            } else {
                let w = (Expr::int(-2) * l * g).sqrt();
                let wt = &w * t();
                vec![
                    x6,
                    gen_expr("X7", vec![("a", wt.clone().exp()), ("u", &w * wt.clone().exp())]),
                    gen_expr("X8", vec![("a", (-wt.clone()).exp()), ("u", -(&w * (-wt).exp()))]),
                ]
            }
        }
        HCase::Power(_, l2) => {
            let d = l2 - Expr::int(2);
            vec![gen_expr(
                "X6",
                vec![
                    ("t", t()),
                    ("a", Expr::int(-2) * a() / &d),
                    ("u", -(l2 * u()) / &d),
                    ("rho", Expr::int(2) * l2 * rho() / &d),
                    ("s", -s()),
                ],
            )]
        }
        HCase::Exp(_, l2) => vec![gen_expr(
            "X6",
            vec![
                ("t", t()),
                ("a", Expr::int(-2) / l2),
                ("u", -u()),
                ("p", -Expr::sym("p")),
                ("rho", rho()),
            ],
        )],
        HCase::Log => vec![gen("X6", &[("t", "t"), ("a", "a"), ("s", "-s")])],
    }
}

/// `X1..X5` followed by the case-specific generators.
pub fn generators(case: &HCase, g: &Expr) -> Vec<Generator> {
    let mut out = common_generators();
    out.extend(special_generators(case, g));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::is_zero;

    fn sys(name: &str) -> SystemE {
        build_system(&HCase::symbolic(name).unwrap(), &SystemParams::default()).unwrap()
    }

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn gravity_terms() {
        assert!(sys("const").gravity_term().is_zero_literal());
        assert!(is_zero(&(sys("linear").gravity_term() - p("g*lambda*rho"))).is_zero());
        assert!(is_zero(&(sys("quadratic").gravity_term() - p("2*g*lambda*a*rho"))).is_zero());
    }

    #[test]
    fn equations_reduce_to_zero() {
        for name in HCase::NAMES {
            let s = sys(name);
            for e in &s.equations {
                assert!(is_zero(&s.reduce(e)).is_zero(), "{name}: {e}");
            }
        }
    }

    #[test]
    fn reduction_examples() {
        let s = sys("generic");
        assert!(is_zero(&(s.reduce(&p("rho_t + rho_a*u")) + p("rho*u_a"))).is_zero());
        let r = s.reduce(&p("u_ta"));
        assert!(r.symbols().iter().filter_map(|x| x.as_jet()).all(|j| !is_principal(&j)));
    }

    #[test]
    fn reduce_is_a_projection() {
        let s = sys("exp");
        for text in ["u_tt*rho + s_ta", "rho_tt - T_aa", "u_ta*s_t"] {
            let once = s.reduce(&p(text));
            assert_eq!(s.reduce(&once), once);
        }
    }

    #[test]
    fn invalid_parameters() {
        let bad = HCase::Power(Expr::one(), Expr::int(2));
        assert!(build_system(&bad, &SystemParams::default()).is_err());
        assert!(HCase::symbolic("cubic").is_err());
    }

    #[test]
    fn table_sizes() {
        let g = Expr::sym("g");
        let sizes: Vec<usize> = HCase::all_symbolic().iter().map(|c| generators(c, &g).len()).collect();
        assert_eq!(sizes, vec![5, 9, 9, 8, 6, 6, 6]);
    }

    #[test]
    fn power_x6_coefficients() {
        let g = Expr::sym("g");
        let x6 = &special_generators(&HCase::symbolic("power").unwrap(), &g)[0].field;
        assert!(is_zero(&(&x6.xi_a + p("2*a/(lambda2 - 2)"))).is_zero());
        assert!(is_zero(&(x6.fiber(Field::U) + p("lambda2*u/(lambda2 - 2)"))).is_zero());
        assert!(is_zero(&(x6.fiber(Field::Rho) - p("2*lambda2*rho/(lambda2 - 2)"))).is_zero());
    }

    #[test]
    fn time_translation_and_boost() {
        let cfg = ZeroConfig::default();
        let x1 = &common_generators()[0].field;
        assert!(sys("generic").is_symmetry(x1, &cfg).pass());
        let x7 = PointField::parse(&[("a", "t"), ("u", "1")]).unwrap();
        assert!(sys("const").is_symmetry(&x7, &cfg).pass());
        assert!(!sys("generic").is_symmetry(&x7, &cfg).pass());
    }

    #[test]
    fn translation_fails_on_quadratic_with_gravity_residual() {
        let da = PointField::parse(&[("a", "1")]).unwrap();
        let r = sys("quadratic").is_symmetry(&da, &ZeroConfig::default());
        assert_eq!(r.verdict, Verdict::NonZero);
        let e1 = parse(&r.residuals[0].residual).unwrap();
        assert!(is_zero(&(e1 - p("2*g*lambda*rho"))).is_zero());
    }
}
