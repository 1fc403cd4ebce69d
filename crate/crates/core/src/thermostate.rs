//! Thermodynamic states as Legendrian surfaces in (p, rho, s, T).
//!
//! A state is given by `p = p(rho)` and `T = T(s)`; the symplectic form is
//! `ds ^ dT + rho^-2 drho ^ dp`. Admissibility is negative definiteness of
//! `kappa = d(1/T) . d eps - rho^-2 d(p/T) . drho` on the surface.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::liealg::ThermoField;
use crate::symcore::{differentiate, eval_f64, expand, is_zero, normalize, parse, rat, Expr, Rational, Symbol, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("`{0}` is not a thermodynamic variable")]
    NonThermodynamic(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),
    #[error("incompatible family: {0}")]
    Incompatible(String),
    #[error("cannot integrate {0}")]
    Integration(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ratio tag {tag} disagrees with gamma3/gamma4 = {actual}")]
    InconsistentRatio { tag: String, actual: String },
}

fn sym(name: &str) -> Symbol {
    Symbol::new(name)
}

fn thermo_symbols() -> [Symbol; 4] {
    [sym("p"), sym("rho"), sym("s"), sym("T")]
}

/// `{F, G}` for `Omega = ds ^ dT + rho^-2 drho ^ dp`, so `{s, T} = 1` and `{rho, p} = rho^2`.
pub fn poisson_bracket(f: &Expr, g: &Expr) -> Result<Expr, ThermoError> {
    for e in [f, g] {
        if let Some(bad) = e.symbols().into_iter().find(|s| s.is_coordinate() && !thermo_symbols().contains(s)) {
            return Err(ThermoError::NonThermodynamic(bad.to_string()));
        }
    }
    let [p, rho, s, t] = thermo_symbols();
    let d = |e: &Expr, x: &Symbol| differentiate(e, x);
    let r2 = Expr::powi(Expr::Sym(rho.clone()), 2);
    Ok(normalize(&(d(f, &s) * d(g, &t) - d(f, &t) * d(g, &s) + r2 * (d(f, &rho) * d(g, &p) - d(f, &p) * d(g, &rho)))))
}

// ---------------------------------------------------------------------------
// families

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    General,
    Case3,
    Case4,
    Case6,
}

impl FamilyKind {
    pub fn parse(name: &str) -> Option<FamilyKind> {
        Some(match name {
            "general" => FamilyKind::General,
            "case3" => FamilyKind::Case3,
            "case4" => FamilyKind::Case4,
            "case6" => FamilyKind::Case6,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::General => "general",
            FamilyKind::Case3 => "case3",
            FamilyKind::Case4 => "case4",
            FamilyKind::Case6 => "case6",
        }
    }

    pub fn gamma_count(&self) -> usize {
        if *self == FamilyKind::General {
            4
        } else {
            5
        }
    }
}

/// A Legendrian state `p = p_of_rho`, `T = t_of_s` with its one-dimensional symmetry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateFamily {
    pub kind: FamilyKind,
    #[serde(serialize_with = "ser_exprs")]
    pub gamma: Vec<Expr>,
    /// Only meaningful for case 4.
    #[serde(serialize_with = "ser_expr")]
    pub lambda2: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub c1: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub c2: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub s0: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub p_of_rho: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub t_of_s: Expr,
    /// The symmetry field `Z` the state is invariant under.
    pub symmetry: ThermoField,
}

fn ser_expr<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

fn ser_exprs<S: serde::Serializer>(v: &[Expr], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

fn nonzero(e: &Expr, what: &'static str) -> Result<(), ThermoError> {
    if normalize(e).is_zero_literal() {
        Err(ThermoError::Degenerate(what))
    } else {
        Ok(())
    }
}

fn field(parts: &[(&str, Expr)]) -> ThermoField {
    let mut coeffs: [Expr; 4] = std::array::from_fn(|_| Expr::zero());
    for (name, c) in parts {
        let i = ThermoField::COORDINATES.iter().position(|n| n == name).expect("thermodynamic coordinate");
        coeffs[i] = normalize(&(&coeffs[i] + c));
    }
    ThermoField { coeffs }
}

struct Common {
    c1: Expr,
    c2: Expr,
    s0: Expr,
}

fn build(kind: FamilyKind, gamma: Vec<Expr>, lambda2: Expr, c: Common, p: Expr, t: Expr, z: ThermoField) -> StateFamily {
    StateFamily {
        kind,
        gamma,
        lambda2,
        c1: c.c1,
        c2: c.c2,
        s0: c.s0,
        p_of_rho: normalize(&p),
        t_of_s: normalize(&t),
        symmetry: ThermoField { coeffs: z.coeffs.map(|e| normalize(&e)) },
    }
}

/// `p = C1 rho - g1/g4`, `T = C2 (g2 - g4 s)^(-g3/g4)`.
pub fn state_general(g: [Expr; 4], c1: Expr, c2: Expr, s0: Expr) -> Result<StateFamily, ThermoError> {
    nonzero(&g[3], "gamma4 = 0")?;
    let [g1, g2, g3, g4] = g.clone();
    let (rho, s, p, t) = (Expr::sym("rho"), Expr::sym("s"), Expr::sym("p"), Expr::sym("T"));
    let pr = &c1 * &rho - &g1 / &g4;
    let ts = &c2 * Expr::pow(&g2 - &g4 * &s, -(&g3 / &g4));
    let z = field(&[("p", g1 + &g4 * p), ("s", g2 - &g4 * s), ("T", g3 * t), ("rho", g4 * rho)]);
    Ok(build(FamilyKind::General, g.to_vec(), Expr::zero(), Common { c1, c2, s0 }, pr, ts, z))
}

/// `p = C1 rho^(g5/g4) - g1/g5`, `T = C2 (g2 - g5 s)^(-g3/g5)`.
pub fn state_case3(g: [Expr; 5], c1: Expr, c2: Expr, s0: Expr) -> Result<StateFamily, ThermoError> {
    nonzero(&g[3], "gamma4 = 0")?;
    nonzero(&g[4], "gamma5 = 0")?;
    let [g1, g2, g3, g4, g5] = g.clone();
    let (rho, s, p, t) = (Expr::sym("rho"), Expr::sym("s"), Expr::sym("p"), Expr::sym("T"));
    let pr = &c1 * Expr::pow(rho.clone(), &g5 / &g4) - &g1 / &g5;
    let ts = &c2 * Expr::pow(&g2 - &g5 * &s, -(&g3 / &g5));
    let z = field(&[("p", g1 + &g5 * p), ("s", g2 - &g5 * s), ("T", g3 * t), ("rho", g4 * rho)]);
    Ok(build(FamilyKind::Case3, g.to_vec(), Expr::zero(), Common { c1, c2, s0 }, pr, ts, z))
}

/// `p = C1 rho^(g5/(2 l2 g4 + g5)) - g1/g5`, `T = C2 (D s - g2)^(-g3/D)` with `D = (l2 - 2) g4 + g5`.
pub fn state_case4(lambda2: Expr, g: [Expr; 5], c1: Expr, c2: Expr, s0: Expr) -> Result<StateFamily, ThermoError> {
    let [g1, g2, g3, g4, g5] = g.clone();
    let d = normalize(&((&lambda2 - Expr::int(2)) * &g4 + &g5));
    let e = normalize(&(Expr::int(2) * &lambda2 * &g4 + &g5));
    nonzero(&d, "(lambda2 - 2) gamma4 + gamma5 = 0")?;
    nonzero(&e, "2 lambda2 gamma4 + gamma5 = 0")?;
    nonzero(&g5, "gamma5 = 0")?;
    let (rho, s, p, t) = (Expr::sym("rho"), Expr::sym("s"), Expr::sym("p"), Expr::sym("T"));
    let pr = &c1 * Expr::pow(rho.clone(), &g5 / &e) - &g1 / &g5;
    let ts = &c2 * Expr::pow(&d * &s - &g2, -(&g3 / &d));
    let z = field(&[("p", g1 + &g5 * p), ("s", g2 - &d * s), ("T", g3 * t), ("rho", e * rho)]);
    Ok(build(FamilyKind::Case4, g.to_vec(), lambda2, Common { c1, c2, s0 }, pr, ts, z))
}

/// `p = C1 rho - g1/g5`, `T = C2 (g2 + g4 s)^(g3/g4)`.
///
/// The symmetry is `g1 d_p + g2 d_s + g3 T d_T + g4 s d_s + g5 (p d_p + rho d_rho)`;
/// a `g4 rho d_rho` term in its place would not leave this state invariant.
pub fn state_case6(g: [Expr; 5], c1: Expr, c2: Expr, s0: Expr) -> Result<StateFamily, ThermoError> {
    nonzero(&g[3], "gamma4 = 0")?;
    nonzero(&g[4], "gamma5 = 0")?;
    let [g1, g2, g3, g4, g5] = g.clone();
    let (rho, s, p, t) = (Expr::sym("rho"), Expr::sym("s"), Expr::sym("p"), Expr::sym("T"));
    let pr = &c1 * &rho - &g1 / &g5;
    let ts = &c2 * Expr::pow(&g2 + &g4 * &s, &g3 / &g4);
    let z = field(&[("p", g1 + &g5 * p), ("s", g2 + g4 * s), ("T", g3 * t), ("rho", g5 * rho)]);
    Ok(build(FamilyKind::Case6, g.to_vec(), Expr::zero(), Common { c1, c2, s0 }, pr, ts, z))
}

impl StateFamily {
    /// The family with all parameters symbolic.
    pub fn symbolic(kind: FamilyKind) -> StateFamily {
        let g = |i: usize| Expr::sym(&format!("gamma{i}"));
        let (c1, c2, s0) = (Expr::sym("C1"), Expr::sym("C2"), Expr::sym("s0"));
        match kind {
            FamilyKind::General => state_general([g(1), g(2), g(3), g(4)], c1, c2, s0),
            FamilyKind::Case3 => state_case3([g(1), g(2), g(3), g(4), g(5)], c1, c2, s0),
            FamilyKind::Case4 => state_case4(Expr::sym("lambda2"), [g(1), g(2), g(3), g(4), g(5)], c1, c2, s0),
            FamilyKind::Case6 => state_case6([g(1), g(2), g(3), g(4), g(5)], c1, c2, s0),
        }
        .expect("symbolic parameters are never degenerate")
    }

    /// Builds a family from numeric or symbolic parameter expressions.
    pub fn new(kind: FamilyKind, gamma: &[Expr], lambda2: Option<Expr>, c1: Expr, c2: Expr, s0: Expr) -> Result<StateFamily, ThermoError> {
        if gamma.len() != kind.gamma_count() {
            return Err(ThermoError::Degenerate("wrong number of gamma parameters"));
        }
        let g5 = |i: usize| gamma[i].clone();
        match kind {
            FamilyKind::General => state_general([g5(0), g5(1), g5(2), g5(3)], c1, c2, s0),
            FamilyKind::Case3 => state_case3([g5(0), g5(1), g5(2), g5(3), g5(4)], c1, c2, s0),
            FamilyKind::Case4 => {
                let l2 = lambda2.unwrap_or_else(|| Expr::sym("lambda2"));
                state_case4(l2, [g5(0), g5(1), g5(2), g5(3), g5(4)], c1, c2, s0)
            }
            FamilyKind::Case6 => state_case6([g5(0), g5(1), g5(2), g5(3), g5(4)], c1, c2, s0),
        }
    }

    /// The defining relations `p - p(rho)` and `T - T(s)`.
    pub fn relations(&self) -> (Expr, Expr) {
        (Expr::sym("p") - &self.p_of_rho, Expr::sym("T") - &self.t_of_s)
    }

    /// Restriction to the surface: `p` and `T` replaced by their values.
    pub fn on_surface(&self, e: &Expr) -> Expr {
        let map = HashMap::from([(sym("p"), self.p_of_rho.clone()), (sym("T"), self.t_of_s.clone())]);
        normalize(&e.subs(&map))
    }

    pub fn legendrian_residual(&self) -> Result<Expr, ThermoError> {
        let (f, g) = self.relations();
        Ok(self.on_surface(&poisson_bracket(&f, &g)?))
    }

    /// `Z` applied to both relations, restricted to the surface.
    pub fn symmetry_residuals(&self) -> (Expr, Expr) {
        let z = &self.symmetry;
        let apply = |e: &Expr| {
            let terms = thermo_symbols().iter().zip(&z.coeffs).map(|(x, c)| c * differentiate(e, x)).collect::<Vec<_>>();
            self.on_surface(&Expr::add_all(terms))
        };
        let (f, g) = self.relations();
        (apply(&f), apply(&g))
    }

    pub fn is_symmetric(&self) -> Verdict {
        let (a, b) = self.symmetry_residuals();
        match (is_zero(&a), is_zero(&b)) {
            (Verdict::Zero, Verdict::Zero) => Verdict::Zero,
            (Verdict::NonZero, _) | (_, Verdict::NonZero) => Verdict::NonZero,
            _ => Verdict::Undecided,
        }
    }
}

// ---------------------------------------------------------------------------
// internal energy

/// Symbols standing for `eps` and its derivatives in (rho, s).
pub const EPS: [&str; 6] = ["eps", "eps_r", "eps_s", "eps_rr", "eps_rs", "eps_ss"];

/// The pair of PDEs on `eps(rho, s)` expressing invariance of a state under `z`.
///
/// Obtained by applying `z` to `p - rho^2 eps_rho` and `T - eps_s` on the
/// surface; `z` must map the surface coordinates (rho, s) to themselves.
pub fn epsilon_system_of(z: &ThermoField) -> Result<(Expr, Expr), ThermoError> {
    let [cp, crho, cs, ct] = z.coeffs.clone();
    for (c, allowed) in [(&crho, ["rho", "s"]), (&cs, ["rho", "s"])] {
        if c.symbols().iter().any(|x| x.is_coordinate() && !allowed.contains(&x.name())) {
            return Err(ThermoError::Incompatible(format!("coefficient {c} leaves the (rho, s) chart")));
        }
    }
    let e = |n: &str| Expr::sym(n);
    let rho = e("rho");
    let r2 = Expr::powi(rho.clone(), 2);
    let on = |c: &Expr| {
        let map = HashMap::from([(sym("p"), &r2 * e("eps_r")), (sym("T"), e("eps_s"))]);
        c.subs(&map)
    };
    // Z(p - rho^2 eps_r) and Z(T - eps_s) with Z(eps_x) = eps_xr Z(rho) + eps_xs Z(s)
    let first = on(&cp) - (Expr::int(2) * &rho * &crho * e("eps_r") + &r2 * (e("eps_rr") * &crho + e("eps_rs") * &cs));
    let second = on(&ct) - (e("eps_rs") * &crho + e("eps_ss") * &cs);
    Ok((normalize(&(-first / r2)), normalize(&(-second))))
}

/// The invariance system of the general symmetry:
/// `g4 rho eps_rr + (g2 - g4 s) eps_rs + g4 eps_r - g1/rho^2` and
/// `(g2 - g4 s) eps_ss + g4 rho eps_rs - g3 eps_s`.
pub fn epsilon_system(gamma: &[Expr; 4]) -> Result<(Expr, Expr), ThermoError> {
    nonzero(&gamma[3], "gamma4 = 0")?;
    let f = state_general(gamma.clone(), Expr::sym("C1"), Expr::sym("C2"), Expr::sym("s0"))?;
    epsilon_system_of(&f.symmetry)
}

/// Replaces the `eps` symbols by the derivatives of a concrete `eps(rho, s)`.
pub fn substitute_epsilon(system: &Expr, eps: &Expr) -> Expr {
    let (r, s) = (sym("rho"), sym("s"));
    let d = |e: &Expr, x: &Symbol| differentiate(e, x);
    let er = d(eps, &r);
    let es = d(eps, &s);
    let map = HashMap::from([
        (sym("eps"), eps.clone()),
        (sym("eps_rr"), d(&er, &r)),
        (sym("eps_rs"), d(&er, &s)),
        (sym("eps_ss"), d(&es, &s)),
        (sym("eps_r"), er),
        (sym("eps_s"), es),
    ]);
    normalize(&system.subs(&map))
}

/// Antiderivative in `x` of a sum of terms `c x^n` or `c (alpha + beta x)^q`.
pub fn integrate(e: &Expr, x: &Symbol) -> Result<Expr, ThermoError> {
    let fail = || ThermoError::Integration(e.to_string());
    let e = expand(e);
    let terms = match &e {
        Expr::Add(v) => v.clone(),
        other => vec![other.clone()],
    };
    let mut out = Vec::new();
    for term in terms {
        let factors = match &term {
            Expr::Mul(v) => v.clone(),
            other => vec![other.clone()],
        };
        let (free, dep): (Vec<Expr>, Vec<Expr>) = factors.into_iter().partition(|f| !f.contains(x));
        let coeff = Expr::mul_all(free);
        let (base, q) = match dep.as_slice() {
            [] => {
                out.push(coeff * Expr::Sym(x.clone()));
                continue;
            }
            [Expr::Pow(b, q)] if !q.contains(x) => ((**b).clone(), (**q).clone()),
            [b] => (b.clone(), Expr::one()),
            _ => return Err(fail()),
        };
        let beta = normalize(&differentiate(&base, x));
        if beta.contains(x) || beta.is_zero_literal() {
            return Err(fail());
        }
        let q1 = normalize(&(&q + Expr::one()));
        out.push(if q1.is_zero_literal() {
            coeff * base.ln() / beta
        } else {
            coeff * Expr::pow(base, q1.clone()) / (beta * q1)
        });
    }
    Ok(normalize(&Expr::add_all(out)))
}

/// `eps(rho, s)` with `eps_s = T` and `eps_rho = p / rho^2`, additive constant zero.
pub fn internal_energy(f: &StateFamily) -> Result<Expr, ThermoError> {
    let (rho, s) = (sym("rho"), sym("s"));
    let e_r = normalize(&(&f.p_of_rho / Expr::powi(Expr::sym("rho"), 2)));
    let e_s = f.t_of_s.clone();
    // eps_sr = eps_rs: here both sides vanish separately
    if e_r.contains(&s) || e_s.contains(&rho) {
        let lhs = differentiate(&e_r, &s);
        let rhs = differentiate(&e_s, &rho);
        if is_zero(&(lhs - rhs)) != Verdict::Zero {
            return Err(ThermoError::Incompatible("eps_rs differs from eps_sr".into()));
        }
        return Err(ThermoError::Incompatible("mixed dependence is not separable".into()));
    }
    for bad in ["p", "T"] {
        if e_r.contains(&sym(bad)) || e_s.contains(&sym(bad)) {
            return Err(ThermoError::Incompatible(format!("state depends on {bad}")));
        }
    }
    Ok(normalize(&(integrate(&e_r, &rho)? + integrate(&e_s, &s)?)))
}

// ---------------------------------------------------------------------------
// kappa

/// `Q_rr drho^2 + 2 Q_rs drho ds + Q_ss ds^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticForm2 {
    #[serde(serialize_with = "ser_expr")]
    pub q_rr: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub q_rs: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub q_ss: Expr,
}

/// `kappa` on the surface in coordinates (rho, s), from `eps` via `T = eps_s`, `p = rho^2 eps_rho`.
pub fn kappa(f: &StateFamily) -> Result<QuadraticForm2, ThermoError> {
    let eps = internal_energy(f)?;
    let (r, s) = (sym("rho"), sym("s"));
    let d = |e: &Expr, x: &Symbol| normalize(&differentiate(e, x));
    let rho = Expr::sym("rho");
    let t = d(&eps, &s);
    let p = normalize(&(Expr::powi(rho.clone(), 2) * d(&eps, &r)));
    let inv_t = Expr::pow(t.clone(), Expr::int(-1));
    // d(1/T) . d eps  -  rho^-2 d(p/T) . d rho, symmetrised
    let a = [d(&inv_t, &r), d(&inv_t, &s)];
    let b = [d(&eps, &r), d(&eps, &s)];
    let pt = &p * &inv_t;
    let c = [d(&pt, &r), d(&pt, &s)];
    let w = Expr::pow(rho, Expr::int(-2));
    let q_rr = &a[0] * &b[0] - &w * &c[0];
    let q_rs = (&a[0] * &b[1] + &a[1] * &b[0] - &w * &c[1]) / 2;
    let q_ss = &a[1] * &b[1];
    Ok(QuadraticForm2 { q_rr: normalize(&q_rr), q_rs: normalize(&q_rs), q_ss: normalize(&q_ss) })
}

const MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    NegativeDefinite,
    NotNegativeDefinite,
    /// A leading minor lies within the margin of zero.
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaSample {
    pub rho: f64,
    pub s: f64,
    pub temperature: f64,
    pub q_rr: f64,
    pub q_rs: f64,
    pub q_ss: f64,
    pub definiteness: Definiteness,
}

/// `kappa` evaluated at a point of a numeric family.
pub fn kappa_at(f: &StateFamily, form: &QuadraticForm2, rho: f64, s: f64) -> Result<KappaSample, ThermoError> {
    if rho <= 0.0 {
        return Err(ThermoError::Domain(format!("rho = {rho} is not positive")));
    }
    let env = |x: &Symbol| match x.name() {
        "rho" => Some(rho),
        "s" => Some(s),
        _ => None,
    };
    let ev = |e: &Expr| eval_f64(e, &env).map_err(|err| ThermoError::Domain(format!("{e}: {err}")));
    let temperature = ev(&f.t_of_s)?;
    let (q_rr, q_rs, q_ss) = (ev(&form.q_rr)?, ev(&form.q_rs)?, ev(&form.q_ss)?);
    let det = q_rr * q_ss - q_rs * q_rs;
    let scale = q_rr.abs().max(q_ss.abs()).max(1.0);
    let definiteness = if q_rr.abs() < MARGIN * scale || det.abs() < MARGIN * scale * scale {
        Definiteness::Marginal
    } else if q_rr < 0.0 && det > 0.0 {
        Definiteness::NegativeDefinite
    } else {
        Definiteness::NotNegativeDefinite
    };
    Ok(KappaSample { rho, s, temperature, q_rr, q_rs, q_ss, definiteness })
}

/// Negative definiteness of `kappa` at `(rho, s)` with a positive temperature.
pub fn is_admissible_at(f: &StateFamily, rho: f64, s: f64) -> Result<bool, ThermoError> {
    let form = kappa(f)?;
    let k = kappa_at(f, &form, rho, s)?;
    Ok(k.temperature > 0.0 && k.definiteness == Definiteness::NegativeDefinite)
}

/// The per-family inequalities as displayed, at one value of `s`.
pub fn displayed_conditions_at(f: &StateFamily, s: f64) -> Result<bool, ThermoError> {
    let env = |x: &Symbol| (x.name() == "s").then_some(s);
    let ev = |text: &str| -> Result<f64, ThermoError> {
        let mut e = parse(text).expect("static condition");
        let names = ["gamma1", "gamma2", "gamma3", "gamma4", "gamma5"];
        let mut map: HashMap<Symbol, Expr> = names.iter().zip(&f.gamma).map(|(n, g)| (sym(n), g.clone())).collect();
        map.insert(sym("C1"), f.c1.clone());
        map.insert(sym("lambda2"), f.lambda2.clone());
        e = normalize(&e.subs(&map));
        eval_f64(&e, &env).map_err(|err| ThermoError::Domain(format!("{e}: {err}")))
    };
    Ok(match f.kind {
        FamilyKind::General => ev("gamma3/(gamma2 - gamma4*s)")? > 0.0 && ev("C1")? > 0.0,
        FamilyKind::Case3 => ev("gamma3/(gamma2 - gamma5*s)")? > 0.0 && ev("gamma5*C1/gamma4")? > 0.0,
        FamilyKind::Case4 => {
            ev("gamma3/(((lambda2 - 2)*gamma4 + gamma5)*s - gamma2)")? < 0.0
                && ev("gamma5*C1/(2*lambda2*gamma4 + gamma5)")? > 0.0
        }
        FamilyKind::Case6 => ev("gamma3/(gamma2 + gamma4*s)")? > 0.0 && ev("C1")? > 0.0,
    })
}

// ---------------------------------------------------------------------------
// the classification predicate

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RatioKind {
    Irrational,
    /// `gamma3/gamma4 = m/k` in lowest terms with `k > 0`.
    Rational { m: i64, k: i64 },
}

impl RatioKind {
    /// `irrational` or `rational:m:k`.
    pub fn parse(text: &str) -> Option<RatioKind> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["irrational"] => Some(RatioKind::Irrational),
            ["rational", m, k] => {
                let (m, k): (i64, i64) = (m.parse().ok()?, k.parse().ok()?);
                (k > 0 && m.gcd(&k) == 1).then_some(RatioKind::Rational { m, k })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    S0BelowRatio,
    C1Positive,
    Gamma1OverGamma4Negative,
    Gamma3Positive,
    Gamma4Positive,
    C2Positive,
    RatioPositive,
    C2Gamma4Positive,
}

impl Condition {
    /// Conditions that constrain `kappa`; `gamma1/gamma4 < 0` only shifts the pressure.
    pub fn is_sign_condition(self) -> bool {
        self != Condition::Gamma1OverGamma4Negative
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theorem2Verdict {
    pub admissible: bool,
    pub failed: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theorem2Params {
    #[serde(serialize_with = "ser_rats")]
    pub gamma: [Rational; 4],
    #[serde(serialize_with = "ser_rat")]
    pub c1: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub c2: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub s0: Rational,
    pub ratio: RatioKind,
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_rats<S: serde::Serializer>(v: &[Rational; 4], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

/// The classification of admissible one-parameter-symmetric states.
///
/// An `Irrational` tag is accepted with any numeric ratio, since numeric inputs
/// are always rational.
pub fn admissible_theorem2(params: &Theorem2Params) -> Result<Theorem2Verdict, ThermoError> {
    let [g1, g2, g3, g4] = &params.gamma;
    if g4.is_zero() {
        return Err(ThermoError::Degenerate("gamma4 = 0"));
    }
    let pos = |q: &Rational| q.is_positive();
    let mut failed = Vec::new();
    let mut need = |ok: bool, c: Condition| {
        if !ok {
            failed.push(c);
        }
    };
    need(params.s0 < g2 / g4, Condition::S0BelowRatio);
    need(pos(&params.c1), Condition::C1Positive);
    need((g1 / g4).is_negative(), Condition::Gamma1OverGamma4Negative);
    match params.ratio {
        RatioKind::Irrational => {
            need(pos(g3), Condition::Gamma3Positive);
            need(pos(g4), Condition::Gamma4Positive);
            need(pos(&params.c2), Condition::C2Positive);
        }
        RatioKind::Rational { m, k } => {
            let actual = g3 / g4;
            if actual != rat(m, k) {
                return Err(ThermoError::InconsistentRatio { tag: format!("rational:{m}:{k}"), actual: actual.to_string() });
            }
            need(m > 0, Condition::RatioPositive);
            if k % 2 == 0 {
                need(pos(g4), Condition::Gamma4Positive);
                need(pos(&params.c2), Condition::C2Positive);
            } else if m % 2 == 0 {
                need(pos(&params.c2), Condition::C2Positive);
            } else {
                need(pos(&(&params.c2 * g4)), Condition::C2Gamma4Positive);
            }
        }
    }
    failed.sort();
    Ok(Theorem2Verdict { admissible: failed.is_empty(), failed })
}

impl Theorem2Params {
    pub fn family(&self) -> StateFamily {
        let e = |q: &Rational| Expr::num(q.clone());
        state_general(self.gamma.clone().map(|q| e(&q)), e(&self.c1), e(&self.c2), e(&self.s0)).expect("gamma4 checked nonzero")
    }
}

// ---------------------------------------------------------------------------
// agreement sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub configurations: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { configurations: 1000, seed: 0x7e57 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDisagreement {
    pub params: Theorem2Params,
    pub verdict: Theorem2Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub configurations: usize,
    pub points_per_configuration: usize,
    pub predicted_admissible: usize,
    pub predicted_inadmissible: usize,
    /// Rejected only by `gamma1/gamma4 < 0`, which `kappa` does not see.
    pub pressure_offset_only: usize,
    pub marginal_points: usize,
    pub disagreements: Vec<SweepDisagreement>,
}

/// Offsets below `s0` and densities at which `kappa` is sampled.
const S_OFFSETS: [(i64, i64); 5] = [(1, 1024), (1, 4), (1, 1), (4, 1), (32, 1)];
const RHOS: [f64; 3] = [0.125, 1.0, 8.0];

fn pick<T: Clone>(rng: &mut ChaCha8Rng, v: &[T]) -> T {
    v[rng.gen_range(0..v.len())].clone()
}

fn sign(q: &Rational) -> Rational {
    if q.is_negative() {
        rat(-1, 1)
    } else {
        rat(1, 1)
    }
}

fn nonzero_abs(q: &Rational) -> Rational {
    if q.is_zero() {
        rat(1, 2)
    } else {
        q.abs()
    }
}

/// Random parameters with small dyadic or rational values; `s0` never equals `gamma2/gamma4`.
///
/// Half the draws are pushed into the admissible region, and half of those get
/// one condition broken again, so both verdicts are well represented.
pub fn random_params(rng: &mut ChaCha8Rng) -> Theorem2Params {
    let halves: Vec<Rational> = (-6..=6).map(|n| rat(n, 2)).collect();
    let nonzero: Vec<Rational> = [-3, -2, -1, 1, 2, 3].iter().map(|n| rat(*n, 1)).chain([rat(1, 2), rat(-1, 2)]).collect();
    let consts: Vec<Rational> = [-2, -1, 0, 1, 2].iter().map(|n| rat(*n, 1)).chain([rat(1, 2), rat(-1, 2)]).collect();
    let mut g1 = pick(rng, &halves);
    let g2 = pick(rng, &halves);
    let mut g4 = pick(rng, &nonzero);
    let irrational = rng.gen_bool(0.3);
    // even denominators stand in for irrational ratios: both forbid real roots of negatives
    let (mut num, den) = if irrational {
        (2 * rng.gen_range(-4i64..4) + 1, pick(rng, &[2i64, 4, 8]))
    } else {
        (rng.gen_range(-4i64..=4), rng.gen_range(1i64..=5))
    };
    let mut c1 = pick(rng, &consts);
    let mut c2 = pick(rng, &consts);
    let mut s0_below = None;
    if rng.gen_bool(0.5) {
        num = num.abs().max(1);
        let k = rat(num, den).denom().to_i64().unwrap();
        if irrational || k % 2 == 0 {
            g4 = g4.abs();
        }
        c1 = nonzero_abs(&c1);
        g1 = -nonzero_abs(&g1) * sign(&g4);
        let m = rat(num, den).numer().to_i64().unwrap();
        c2 = nonzero_abs(&c2) * if k % 2 == 1 && m % 2 != 0 { sign(&g4) } else { rat(1, 1) };
        s0_below = Some(true);
        if rng.gen_bool(0.5) {
            match rng.gen_range(0..6) {
                0 => c1 = -c1,
                1 => c2 = -c2,
                2 => g4 = -g4,
                3 => g1 = -g1,
                4 => num = -num,
                _ => s0_below = Some(false),
            }
        }
    }
    let r = rat(num, den);
    let ratio = if irrational {
        RatioKind::Irrational
    } else {
        RatioKind::Rational { m: r.numer().to_i64().unwrap(), k: r.denom().to_i64().unwrap() }
    };
    let g3 = &r * &g4;
    let boundary = &g2 / &g4;
    let s0 = match s0_below {
        Some(below) => {
            let gap = pick(rng, &[rat(1, 3), rat(1, 2), rat(2, 1)]);
            if below {
                &boundary - gap
            } else {
                &boundary + gap
            }
        }
        None => loop {
            let s0 = pick(rng, &halves);
            if s0 != boundary {
                break s0;
            }
        },
    };
    Theorem2Params { gamma: [g1, g2, g3, g4], c1, c2, s0, ratio }
}

/// Compares the classification predicate with pointwise sampling of `kappa`.
///
/// A predicted-admissible configuration must be admissible at every sample; one
/// rejected by a sign condition must fail at some sample. Undefined or
/// non-positive temperature counts as failure.
pub fn theorem2_sweep(cfg: &SweepConfig) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = SweepReport {
        configurations: cfg.configurations,
        points_per_configuration: S_OFFSETS.len() * RHOS.len(),
        predicted_admissible: 0,
        predicted_inadmissible: 0,
        pressure_offset_only: 0,
        marginal_points: 0,
        disagreements: Vec::new(),
    };
    let mut forms: BTreeMap<String, QuadraticForm2> = BTreeMap::new();
    for _ in 0..cfg.configurations {
        let params = random_params(&mut rng);
        let verdict = admissible_theorem2(&params).expect("generated parameters are consistent");
        let family = params.family();
        let key = format!("{}|{}", family.p_of_rho, family.t_of_s);
        let form = match forms.get(&key) {
            Some(f) => f.clone(),
            None => {
                let f = kappa(&family).expect("general family has an internal energy");
                forms.insert(key, f.clone());
                f
            }
        };
        let mut passes = 0;
        let mut failing = None;
        for (dn, dd) in S_OFFSETS {
            let s = (&params.s0 - rat(dn, dd)).to_f64().unwrap();
            for rho in RHOS {
                let ok = match kappa_at(&family, &form, rho, s) {
                    Ok(k) => {
                        if k.definiteness == Definiteness::Marginal {
                            report.marginal_points += 1;
                        }
                        k.temperature > 0.0 && k.definiteness == Definiteness::NegativeDefinite
                    }
                    Err(_) => false,
                };
                if ok {
                    passes += 1;
                } else if failing.is_none() {
                    failing = Some((rho, s));
                }
            }
        }
        let sign_failure = verdict.failed.iter().any(|c| c.is_sign_condition());
        let mismatch = if verdict.admissible {
            report.predicted_admissible += 1;
            failing.map(|(rho, s)| format!("predicted admissible but kappa fails at rho = {rho}, s = {s}"))
        } else if sign_failure {
            report.predicted_inadmissible += 1;
            (passes == report.points_per_configuration).then(|| "predicted inadmissible but kappa passes at every sample".to_string())
        } else {
            report.pressure_offset_only += 1;
            None
        };
        if let Some(detail) = mismatch {
            report.disagreements.push(SweepDisagreement { params, verdict, detail });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn q(n: i64) -> Rational {
        rat(n, 1)
    }

    /// gamma = (-1, 1, 1, 1), C2 = 1, s0 = 0.
    fn general(c1: i64) -> StateFamily {
        let g = [-1, 1, 1, 1].map(Expr::int);
        state_general(g, Expr::int(c1), Expr::one(), Expr::zero()).unwrap()
    }

    fn zero(e: &Expr) -> bool {
        is_zero(e) == Verdict::Zero
    }

    #[test]
    fn bracket_examples() {
        assert!(poisson_bracket(&p("p"), &p("s")).unwrap().is_zero_literal());
        assert_eq!(poisson_bracket(&p("rho"), &p("p")).unwrap(), p("rho^2"));
        assert_eq!(poisson_bracket(&p("s"), &p("T")).unwrap(), Expr::one());
        assert!(matches!(poisson_bracket(&p("u"), &p("p")), Err(ThermoError::NonThermodynamic(_))));
    }

    #[test]
    fn general_bracket_vanishes_identically() {
        let f = p("p - C1*rho + gamma1/gamma4");
        let g = p("T - C2*(gamma2 - gamma4*s)^(-gamma3/gamma4)");
        assert!(poisson_bracket(&f, &g).unwrap().is_zero_literal());
    }

    #[test]
    fn general_family_shape() {
        let f = general(1);
        assert!(zero(&(&f.p_of_rho - p("rho + 1"))));
        assert!(zero(&(&f.t_of_s - p("1/(1 - s)"))));
    }

    #[test]
    fn epsilon_system_matches_display() {
        let g = [p("gamma1"), p("gamma2"), p("gamma3"), p("gamma4")];
        let (a, b) = epsilon_system(&g).unwrap();
        assert!(zero(&(a - p("gamma4*rho*eps_rr + (gamma2 - gamma4*s)*eps_rs + gamma4*eps_r - gamma1/rho^2"))));
        assert!(zero(&(b - p("(gamma2 - gamma4*s)*eps_ss + gamma4*rho*eps_rs - gamma3*eps_s"))));
        let degenerate = [p("gamma1"), p("gamma2"), p("gamma3"), Expr::zero()];
        assert!(epsilon_system(&degenerate).is_err());
    }

    #[test]
    fn internal_energy_oracle() {
        let f = general(1);
        let eps = internal_energy(&f).unwrap();
        assert!(zero(&(eps - p("ln(rho) - 1/rho - ln(1 - s)"))), "closed form by hand");
    }

    #[test]
    fn energy_solves_epsilon_system() {
        let f = StateFamily::symbolic(FamilyKind::General);
        let eps = internal_energy(&f).unwrap();
        let (a, b) = epsilon_system_of(&f.symmetry).unwrap();
        assert!(zero(&substitute_epsilon(&a, &eps)));
        assert!(zero(&substitute_epsilon(&b, &eps)));
    }

    #[test]
    fn incompatible_family_rejected() {
        let mut f = StateFamily::symbolic(FamilyKind::General);
        f.p_of_rho = p("rho*s");
        assert!(matches!(internal_energy(&f), Err(ThermoError::Incompatible(_))));
    }

    #[test]
    fn kappa_general() {
        let f = StateFamily::symbolic(FamilyKind::General);
        let k = kappa(&f).unwrap();
        assert!(zero(&k.q_rs));
        assert!(zero(&(&k.q_ss + p("gamma3/(gamma2 - gamma4*s)"))));
        assert!(zero(&(&k.q_rr + p("C1/rho^2") / &f.t_of_s)));
    }

    #[test]
    fn kappa_at_reference_point() {
        let f = general(1);
        let k = kappa_at(&f, &kappa(&f).unwrap(), 1.0, 0.0).unwrap();
        assert!((k.q_rr + 1.0).abs() < 1e-12 && (k.q_ss + 1.0).abs() < 1e-12 && k.q_rs.abs() < 1e-12);
        assert!(is_admissible_at(&f, 1.0, 0.0).unwrap());
        let bad = general(-1);
        assert!(!is_admissible_at(&bad, 1.0, 0.0).unwrap());
        assert!(is_admissible_at(&f, 0.0, 0.0).is_err());
    }

    #[test]
    fn case_constructors() {
        let g = |v: [i64; 5]| v.map(Expr::int);
        let c = |n: i64| Expr::int(n);
        let f3 = state_case3(g([-1, 1, 1, 2, 2]), c(1), c(1), c(0)).unwrap();
        assert!(zero(&(&f3.p_of_rho - p("rho + 1/2"))));
        assert!(state_case4(c(2), g([-1, 1, 1, 1, 0]), c(1), c(1), c(0)).is_err());
        assert!(state_case6(g([-1, 1, 1, 0, 1]), c(1), c(1), c(0)).is_err());
    }

    #[test]
    fn symmetric_families() {
        for kind in [FamilyKind::General, FamilyKind::Case3, FamilyKind::Case4, FamilyKind::Case6] {
            let f = StateFamily::symbolic(kind);
            assert!(f.legendrian_residual().unwrap().is_zero_literal());
            assert_eq!(f.is_symmetric(), Verdict::Zero, "{kind:?}");
            assert!(zero(&kappa(&f).unwrap().q_rs), "{kind:?}");
        }
    }

    #[test]
    fn printed_case6_symmetry_is_not_tangent() {
        let mut f = StateFamily::symbolic(FamilyKind::Case6);
        f.symmetry = field(&[
            ("p", p("gamma1 + gamma5*p")),
            ("s", p("gamma2")),
            ("T", p("gamma3*T")),
            ("rho", p("(gamma4 + gamma5)*rho")),
        ]);
        assert_eq!(f.is_symmetric(), Verdict::NonZero);
    }

    #[test]
    fn theorem2_examples() {
        let base = Theorem2Params {
            gamma: [q(-1), q(1), q(1), q(2)],
            c1: q(1),
            c2: q(1),
            s0: q(0),
            ratio: RatioKind::Rational { m: 1, k: 2 },
        };
        assert!(admissible_theorem2(&base).unwrap().admissible);
        let odd = Theorem2Params { gamma: [q(1), q(1), q(-1), q(-1)], c2: q(-1), s0: q(-2), ratio: RatioKind::Rational { m: 1, k: 1 }, ..base.clone() };
        assert!(admissible_theorem2(&odd).unwrap().admissible);
        let c1 = Theorem2Params { c1: q(-1), ..base.clone() };
        assert_eq!(admissible_theorem2(&c1).unwrap().failed, vec![Condition::C1Positive]);
        let wrong_tag = Theorem2Params { ratio: RatioKind::Rational { m: 1, k: 3 }, ..base };
        assert!(matches!(admissible_theorem2(&wrong_tag), Err(ThermoError::InconsistentRatio { .. })));
    }

    #[test]
    fn ratio_tags() {
        assert_eq!(RatioKind::parse("rational:1:2"), Some(RatioKind::Rational { m: 1, k: 2 }));
        assert_eq!(RatioKind::parse("irrational"), Some(RatioKind::Irrational));
        assert_eq!(RatioKind::parse("rational:2:4"), None);
    }

    #[test]
    fn integrator() {
        let x = sym("s");
        let r = integrate(&p("3*(1 - 2*s)^(1/2) + s^2 + 1/s"), &x).unwrap();
        assert!(zero(&(differentiate(&r, &x) - p("3*(1 - 2*s)^(1/2) + s^2 + 1/s"))));
        assert!(integrate(&p("sin(s)"), &x).is_err());
    }

    #[test]
    fn small_sweep_agrees() {
        let r = theorem2_sweep(&SweepConfig { configurations: 60, seed: 3 });
        assert!(r.disagreements.is_empty(), "{:?}", r.disagreements.first());
    }
}
