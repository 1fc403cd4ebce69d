//! Zero testing.
//!
//! Route 1 maps the expression to a rational function whose variables are the
//! symbols plus opaque atoms (functions, roots, symbolic powers). A zero
//! numerator proves zero. When every atom is algebraically independent of the
//! others a nonzero numerator proves nonzero. Before looking at the numerator,
//! `r^q` is replaced by its radicand for root atoms and `sin^2` by `1 - cos^2`.
//!
//! Route 2 samples the original expression at random points and compares the
//! value with the magnitude of the terms that produced it.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{eval_scaled, Env, EvalError};
use super::expr::{Expr, Func, Rational};
use super::normalize::{expand, normalize};
use super::poly::{Mono, Poly, RatFun, VarId};
use super::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    NonZero,
    Undecided,
}

impl Verdict {
    pub fn is_zero(self) -> bool {
        self == Verdict::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Rational normal form with no dependent atoms.
    Exact,
    /// Normal form after root and Pythagorean rewrites.
    Rewrite,
    Sampling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub verdict: Verdict,
    pub method: Method,
    /// Valid sample points used (sampling only).
    pub samples: usize,
    /// Largest relative residual seen while sampling.
    pub max_relative: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroConfig {
    pub samples: usize,
    pub rel_tol: f64,
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        ZeroConfig { samples: 20, rel_tol: 1e-9, max_attempts: 2000, seed: 0x00c0_ffee }
    }
}

pub fn is_zero(e: &Expr) -> Verdict {
    zero_test(e, &ZeroConfig::default()).verdict
}

pub fn zero_test(e: &Expr, cfg: &ZeroConfig) -> ZeroReport {
    if e.is_zero_literal() {
        return ZeroReport { verdict: Verdict::Zero, method: Method::Exact, samples: 0, max_relative: 0.0 };
    }
    if let Some((verdict, method)) = algebraic_route(e) {
        return ZeroReport { verdict, method, samples: 0, max_relative: 0.0 };
    }
    sample(e, cfg)
}

// ---------------------------------------------------------------------------
// algebraic route

#[derive(Debug, Clone)]
enum Atom {
    Sym,
    Root { base: Expr, q: u32 },
    Opaque { independent: bool, expr: Expr },
}

#[derive(Default)]
struct Atoms {
    list: Vec<Atom>,
    index: HashMap<Expr, VarId>,
}

impl Atoms {
    fn var(&mut self, key: Expr, make: impl FnOnce() -> Atom) -> VarId {
        if let Some(&v) = self.index.get(&key) {
            return v;
        }
        let v = self.list.len() as VarId;
        self.list.push(make());
        self.index.insert(key, v);
        v
    }
}

struct Failed;

fn to_ratfun(e: &Expr, atoms: &mut Atoms, depth: u32) -> Result<RatFun, Failed> {
    if depth > 64 {
        return Err(Failed);
    }
    match e {
        Expr::Num(q) => Ok(RatFun::constant(q.clone())),
        Expr::Sym(_) => Ok(RatFun::from_poly(Poly::var(atoms.var(e.clone(), || Atom::Sym)))),
        Expr::Add(v) => {
            let mut acc = RatFun::constant(Rational::zero());
            for t in v {
                acc = acc.add(&to_ratfun(t, atoms, depth)?);
            }
            Ok(acc)
        }
        Expr::Mul(v) => {
            let mut acc = RatFun::constant(Rational::one());
            for f in v {
                acc = acc.mul(&to_ratfun(f, atoms, depth)?);
                if acc.is_zero() {
                    break;
                }
            }
            Ok(acc)
        }
        Expr::Pow(b, x) => {
            if let Some(n) = x.as_integer() {
                if n.unsigned_abs() > 64 {
                    return Err(Failed);
                }
                return to_ratfun(b, atoms, depth)?.powi(n).map_err(|_| Failed);
            }
            let n = normalize(e);
            match &n {
                Expr::Pow(nb, nx) => match nx.as_num() {
                    Some(q) => {
                        let qd: u32 = q.denom().try_into().map_err(|_| Failed)?;
                        let m: i64 = (q * Rational::from_integer(qd.into())).to_integer().try_into().map_err(|_| Failed)?;
                        let key = Expr::Pow(nb.clone(), Box::new(Expr::rat(1, qd as i64)));
                        let base = (**nb).clone();
                        let v = atoms.var(key, || Atom::Root { base, q: qd });
                        Ok(RatFun::from_poly(Poly::mono(Mono::var(v, m as i32), Rational::one())))
                    }
                    None => {
                        let ex = expand(nx);
                        let (konst, rest) = split_constant(&ex);
                        let key = Expr::Pow(nb.clone(), Box::new(rest));
                        let v = atoms.var(key.clone(), || Atom::Opaque { independent: false, expr: key });
                        let head = RatFun::from_poly(Poly::var(v));
                        if konst.is_zero() {
                            Ok(head)
                        } else {
                            let tail = Expr::pow((**nb).clone(), Expr::Num(konst));
                            Ok(head.mul(&to_ratfun(&tail, atoms, depth + 1)?))
                        }
                    }
                },
                other => to_ratfun(other, atoms, depth + 1),
            }
        }
        Expr::Fun(f, _) => {
            let n = normalize(e);
            if !matches!(n, Expr::Fun(..)) {
                return to_ratfun(&n, atoms, depth + 1);
            }
            let independent = matches!(f, Func::Undef { .. });
            let v = atoms.var(n.clone(), || Atom::Opaque { independent, expr: n });
            Ok(RatFun::from_poly(Poly::var(v)))
        }
    }
}

/// Splits the rational constant term off a canonical sum.
fn split_constant(e: &Expr) -> (Rational, Expr) {
    match e {
        Expr::Num(q) => (q.clone(), Expr::zero()),
        Expr::Add(v) => {
            let mut k = Rational::zero();
            let mut rest = Vec::new();
            for t in v {
                match t {
                    Expr::Num(q) => k += q,
                    other => rest.push(other.clone()),
                }
            }
            (k, Expr::add_all(rest))
        }
        other => (Rational::zero(), other.clone()),
    }
}

/// Replaces `r^e` by `r^(e mod q) * base^(e div q)` for every root atom.
fn reduce_roots(num: &Poly, atoms: &mut Atoms) -> Result<RatFun, Failed> {
    let roots: Vec<(VarId, Expr, u32)> = atoms
        .list
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            Atom::Root { base, q } => Some((i as VarId, base.clone(), *q)),
            _ => None,
        })
        .collect();
    if roots.is_empty() {
        return Ok(RatFun::from_poly(num.clone()));
    }
    let mut bases = Vec::with_capacity(roots.len());
    for (_, b, _) in &roots {
        bases.push(to_ratfun(b, atoms, 1)?);
    }
    let mut acc = RatFun::constant(Rational::zero());
    for (m, c) in num.terms() {
        let mut term = RatFun::constant(c.clone());
        let mut rest = m.clone();
        for ((v, _, q), b) in roots.iter().zip(&bases) {
            let (e, without) = rest.take(*v);
            let q = *q as i32;
            let (d, r) = (e.div_euclid(q), e.rem_euclid(q));
            rest = without.mul(&Mono::var(*v, r));
            if d != 0 {
                term = term.mul(&b.powi(d as i64).map_err(|_| Failed)?);
            }
        }
        term = term.mul(&RatFun::from_poly(Poly::mono(rest, Rational::one())));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Rewrites `sin(x)^k`, k >= 2, as `sin(x)^(k-2) * (1 - cos(x)^2)` when `cos(x)` is present.
fn pythagoras(num: &Poly, atoms: &Atoms) -> Poly {
    let mut pairs = Vec::new();
    for (i, a) in atoms.list.iter().enumerate() {
        if let Atom::Opaque { expr: Expr::Fun(Func::Sin, arg), .. } = a {
            let cos = Expr::Fun(Func::Cos, arg.clone());
            if let Some(&c) = atoms.index.get(&cos) {
                pairs.push((i as VarId, c));
            }
        }
    }
    let mut p = num.clone();
    for (s, c) in pairs {
        loop {
            let mut changed = false;
            let mut next = Poly::zero();
            for (m, coef) in p.terms() {
                let (e, without) = m.take(s);
                if e >= 2 {
                    changed = true;
                    let base = Poly::mono(without.mul(&Mono::var(s, e - 2)), coef.clone());
                    let one_minus_c2 = Poly::one().sub(&Poly::mono(Mono::var(c, 2), Rational::one()));
                    next = next.add(&base.mul(&one_minus_c2));
                } else {
                    next = next.add(&Poly::mono(m.clone(), coef.clone()));
                }
            }
            p = next;
            if !changed {
                break;
            }
        }
    }
    p
}

fn algebraic_route(e: &Expr) -> Option<(Verdict, Method)> {
    let mut atoms = Atoms::default();
    let rf = to_ratfun(e, &mut atoms, 0).ok()?;
    if rf.is_zero() {
        let exact = atoms.list.iter().all(|a| matches!(a, Atom::Sym | Atom::Opaque { independent: true, .. }));
        return Some((Verdict::Zero, if exact { Method::Exact } else { Method::Rewrite }));
    }
    let reduced = reduce_roots(&rf.num, &mut atoms).ok()?;
    let num = pythagoras(&reduced.num, &atoms);
    if num.is_zero() {
        return Some((Verdict::Zero, Method::Rewrite));
    }
    let independent = atoms.list.iter().all(|a| matches!(a, Atom::Sym | Atom::Opaque { independent: true, .. }));
    if independent {
        return Some((Verdict::NonZero, Method::Exact));
    }
    None
}

// ---------------------------------------------------------------------------
// sampling route

struct SampleEnv {
    values: HashMap<Symbol, f64>,
    salt: u64,
}

impl Env for SampleEnv {
    fn symbol(&self, s: &Symbol) -> Option<f64> {
        self.values.get(s).copied()
    }

    fn undefined(&self, name: &str, order: u32, arg: f64) -> Option<f64> {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (name, order, arg.to_bits(), self.salt).hash(&mut h);
        let mut rng = ChaCha8Rng::seed_from_u64(h.finish());
        Some(rng.gen_range(0.5..2.5))
    }
}

fn sample(e: &Expr, cfg: &ZeroConfig) -> ZeroReport {
    let syms: Vec<Symbol> = e.symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut valid = 0;
    let mut max_rel: f64 = 0.0;
    for attempt in 0..cfg.max_attempts {
        // positive values first, then mixed signs for parameters that must be negative
        let signed = attempt >= cfg.max_attempts / 8;
        let values = syms
            .iter()
            .map(|s| {
                let mag: f64 = rng.gen_range(0.5..2.5);
                let neg = signed && !s.is_coordinate() && rng.gen_bool(0.5);
                (s.clone(), if neg { -mag } else { mag })
            })
            .collect();
        let env = SampleEnv { values, salt: rng.gen() };
        match eval_scaled(e, &env) {
            Ok(s) => {
                let rel = if s.scale > 0.0 { s.value.abs() / s.scale } else { s.value.abs() };
                max_rel = max_rel.max(rel);
                if rel > cfg.rel_tol {
                    return ZeroReport { verdict: Verdict::NonZero, method: Method::Sampling, samples: valid + 1, max_relative: rel };
                }
                valid += 1;
                if valid >= cfg.samples {
                    return ZeroReport { verdict: Verdict::Zero, method: Method::Sampling, samples: valid, max_relative: max_rel };
                }
            }
            Err(EvalError::Domain(_)) => continue,
            Err(EvalError::Unbound(_)) => break,
        }
    }
    ZeroReport { verdict: Verdict::Undecided, method: Method::Sampling, samples: valid, max_relative: max_rel }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse::parse;

    fn z(s: &str) -> ZeroReport {
        zero_test(&parse(s).unwrap(), &ZeroConfig::default())
    }

    #[test]
    fn rational_fragment_is_exact() {
        let r = z("(rho_a*u + rho*u_a) - (rho*u_a + u*rho_a)");
        assert_eq!((r.verdict, r.method), (Verdict::Zero, Method::Exact));
        let r = z("u_a - rho_a");
        assert_eq!((r.verdict, r.method), (Verdict::NonZero, Method::Exact));
        let r = z("1/(u + rho) - 1/(rho + u)");
        assert_eq!(r.verdict, Verdict::Zero);
        let r = z("(u^2 - rho^2)/(u - rho) - u - rho");
        assert_eq!((r.verdict, r.method), (Verdict::Zero, Method::Exact));
    }

    #[test]
    fn pythagorean_rewrite() {
        let r = z("sin(omega*t)^2 + cos(omega*t)^2 - 1");
        assert_eq!((r.verdict, r.method), (Verdict::Zero, Method::Rewrite));
    }

    #[test]
    fn roots_reduce() {
        assert!(is_zero(&parse("sqrt(2*lambda*g)^3 - 2*lambda*g*sqrt(2*lambda*g)").unwrap()).is_zero());
        assert!(is_zero(&parse("sqrt(1 - 4*lambda*a)^2 + 4*lambda*a - 1").unwrap()).is_zero());
    }

    #[test]
    fn symbolic_powers() {
        assert!(is_zero(&parse("rho^(xi5/xi4)*rho^(-1) - rho^((xi5 - xi4)/xi4)").unwrap()).is_zero());
        let r = z("rho^(xi5/xi4) - rho^(xi6/xi4)");
        assert_eq!(r.verdict, Verdict::NonZero);
    }

    #[test]
    fn undefined_functions_are_independent_atoms() {
        let r = z("h_d1(a)*rho - rho*h_d1(a)");
        assert_eq!((r.verdict, r.method), (Verdict::Zero, Method::Exact));
        let r = z("h_d1(a) - h_d2(a)");
        assert_eq!((r.verdict, r.method), (Verdict::NonZero, Method::Exact));
    }

    #[test]
    fn exp_and_ln_cancel() {
        assert!(is_zero(&parse("exp(lambda2*a)*exp(-lambda2*a) - 1").unwrap()).is_zero());
        assert!(is_zero(&parse("ln(exp(u)) - u").unwrap()).is_zero());
    }

    #[test]
    fn sampling_only_route() {
        // exp(2x) and exp(x)^2 land on different atoms after normalisation rules
        let r = z("exp(2*t) - exp(t)*exp(t)");
        assert_eq!(r.verdict, Verdict::Zero);
        let r = z("arctan(u) + arctan(1/u) - arccos(0)");
        assert_eq!((r.verdict, r.method), (Verdict::Zero, Method::Sampling));
    }

    #[test]
    fn undecided_when_nowhere_defined() {
        let r = z("ln(-1 - u^2)");
        assert_eq!(r.verdict, Verdict::Undecided);
    }
}
