//! Canonical simplification.
//!
//! Radical rules assume symbols under a fractional power are positive, which
//! holds on the physical domain (rho, T > 0) and for the parameter-only bases
//! that occur in generator coefficients. A product carrying an explicit negative
//! constant is never split under a fractional power.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{rational_powi, Expr, Func, Rational};

const MAX_PASSES: usize = 16;
const MAX_FOLD_EXP: u64 = 512;

/// Simplifies to a fixpoint; `normalize(normalize(e)) == normalize(e)`.
pub fn normalize(e: &Expr) -> Expr {
    let mut cur = simplify(e);
    for _ in 0..MAX_PASSES {
        let next = simplify(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

/// Distributes products over sums and expands positive integer powers of sums.
pub fn expand(e: &Expr) -> Expr {
    normalize(&expand_raw(&normalize(e)))
}

fn expand_raw(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Sym(_) => e.clone(),
        Expr::Add(v) => Expr::add_all(v.iter().map(expand_raw)),
        Expr::Mul(v) => {
            let mut terms: Vec<Expr> = vec![Expr::one()];
            for f in v {
                let fx = expand_raw(f);
                let parts: Vec<Expr> = match fx {
                    Expr::Add(ts) => ts,
                    other => vec![other],
                };
                let mut next = Vec::with_capacity(terms.len() * parts.len());
                for t in &terms {
                    for p in &parts {
                        next.push(Expr::mul_all([t.clone(), p.clone()]));
                    }
                }
                terms = next;
            }
            Expr::add_all(terms)
        }
        Expr::Pow(b, ex) => {
            let bx = expand_raw(b);
            match (ex.as_integer(), &bx) {
                (Some(n), Expr::Add(_)) if (1..=12).contains(&n) => {
                    let mut acc = bx.clone();
                    for _ in 1..n {
                        acc = expand_raw(&Expr::mul_all([acc, bx.clone()]));
                    }
                    acc
                }
                _ => Expr::pow(bx, expand_raw(ex)),
            }
        }
        Expr::Fun(f, a) => Expr::func(f.clone(), expand_raw(a)),
    }
}

fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Sym(_) => e.clone(),
        Expr::Add(v) => simp_add(v.iter().map(simplify).collect()),
        Expr::Mul(v) => simp_mul(v.iter().map(simplify).collect()),
        Expr::Pow(b, x) => simp_pow(simplify(b), simplify(x)),
        Expr::Fun(f, a) => simp_fun(f.clone(), simplify(a)),
    }
}

fn with_coef(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Num(q) => Expr::Num(c * q),
        Expr::Mul(mut v) => {
            v.insert(0, Expr::Num(c));
            Expr::Mul(v)
        }
        other => Expr::Mul(vec![Expr::Num(c), other]),
    }
}

fn simp_add(children: Vec<Expr>) -> Expr {
    let mut konst = Rational::zero();
    let mut like: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = children;
    while let Some(c) = stack.pop() {
        match c {
            Expr::Num(q) => konst += q,
            Expr::Add(inner) => stack.extend(inner),
            other => {
                let (co, rest) = other.split_coefficient();
                if let Expr::Num(q) = rest {
                    konst += co * q;
                } else {
                    *like.entry(rest).or_insert_with(Rational::zero) += co;
                }
            }
        }
    }
    let mut out: Vec<Expr> =
        like.into_iter().filter(|(_, c)| !c.is_zero()).map(|(r, c)| with_coef(c, r)).collect();
    if !konst.is_zero() {
        out.push(Expr::Num(konst));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

fn simp_mul(children: Vec<Expr>) -> Expr {
    let mut coef = Rational::one();
    let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();
    let mut stack = children;
    while let Some(f) = stack.pop() {
        match f {
            Expr::Num(q) => coef *= q,
            Expr::Mul(inner) => stack.extend(inner),
            Expr::Pow(b, x) => bases.entry(*b).or_default().push(*x),
            Expr::Fun(Func::Exp, x) => exp_args.push(*x),
            other => bases.entry(other).or_default().push(Expr::one()),
        }
    }
    if coef.is_zero() {
        return Expr::zero();
    }
    let mut factors: Vec<Expr> = Vec::new();
    let absorb = |p: Expr, coef: &mut Rational, factors: &mut Vec<Expr>| match p {
        Expr::Num(q) => *coef *= q,
        Expr::Mul(inner) => {
            for g in inner {
                match g {
                    Expr::Num(q) => *coef *= q,
                    other => factors.push(other),
                }
            }
        }
        other => factors.push(other),
    };
    for (b, xs) in bases {
        let x = if xs.len() == 1 { xs.into_iter().next().unwrap() } else { simp_add(xs) };
        let p = simp_pow(b, x);
        absorb(p, &mut coef, &mut factors);
    }
    if !exp_args.is_empty() {
        let x = simp_add(exp_args);
        let p = simp_fun(Func::Exp, x);
        absorb(p, &mut coef, &mut factors);
    }
    if coef.is_zero() {
        return Expr::zero();
    }
    factors.sort();
    if factors.is_empty() {
        return Expr::Num(coef);
    }
    if !coef.is_one() {
        factors.insert(0, Expr::Num(coef));
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Mul(factors)
    }
}

/// Exact `q`-th root of a nonnegative integer, if it exists.
fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = num_integer::Roots::nth_root(n, q);
    (num_traits::pow(r.clone(), q as usize) == *n).then_some(r)
}

fn rational_root(b: &Rational, q: u32) -> Option<Rational> {
    let neg = b.is_negative();
    if neg && q.is_multiple_of(2) {
        return None;
    }
    let a = b.abs();
    let n = exact_root(a.numer(), q)?;
    let d = exact_root(a.denom(), q)?;
    let r = Rational::new(n, d);
    Some(if neg { -r } else { r })
}

fn num_pow(b: &Rational, x: &Rational) -> Expr {
    if x.is_integer() {
        if let Some(n) = x.to_integer().to_i64() {
            if n.unsigned_abs() <= MAX_FOLD_EXP && !(b.is_zero() && n < 0) {
                return Expr::Num(rational_powi(b, n));
            }
        }
        return Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(x.clone())));
    }
    if b.is_zero() {
        return if x.is_positive() {
            Expr::zero()
        } else {
            Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(x.clone())))
        };
    }
    let q = x.denom().to_u32().unwrap_or(0);
    let whole = x.floor();
    let frac = x - &whole;
    let n = whole.to_integer().to_i64().unwrap_or(0);
    let int_part = if n.unsigned_abs() <= MAX_FOLD_EXP { Some(rational_powi(b, n)) } else { None };
    if q > 0 && q <= 64 {
        if let Some(r) = rational_root(b, q) {
            let m = frac.numer().to_i64().unwrap_or(0);
            if let Some(ip) = &int_part {
                return Expr::Num(ip * rational_powi(&r, m));
            }
        }
    }
    match int_part {
        Some(ip) if !b.is_negative() => {
            let root = Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(frac)));
            if ip.is_one() {
                root
            } else {
                Expr::Mul(vec![Expr::Num(ip), root])
            }
        }
        _ => Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(x.clone()))),
    }
}

fn has_negative_constant(v: &[Expr]) -> bool {
    v.iter().any(|f| matches!(f, Expr::Num(q) if q.is_negative()))
}

/// Canonical exponent: expanded, so that `(x+y)/z` and `x/z + y/z` agree.
fn canonical_exponent(x: Expr) -> Expr {
    match x {
        Expr::Num(_) | Expr::Sym(_) => x,
        other => {
            let ex = normalize(&expand_raw(&other));
            if ex == other {
                other
            } else {
                ex
            }
        }
    }
}

fn simp_pow(b: Expr, x: Expr) -> Expr {
    let x = canonical_exponent(x);
    if x.is_zero_literal() || b.is_one_literal() {
        return Expr::one();
    }
    if x.is_one_literal() {
        return b;
    }
    match (&b, &x) {
        (Expr::Num(bq), Expr::Num(xq)) => num_pow(bq, xq),
        (Expr::Num(bq), _) if bq.is_zero() => Expr::Pow(Box::new(b), Box::new(x)),
        (Expr::Pow(c, f), _) => {
            let even_inner = matches!(&**f, Expr::Num(q) if q.numer().is_even_int());
            if x.as_integer().is_some() || !even_inner {
                simp_pow((**c).clone(), simp_mul(vec![(**f).clone(), x]))
            } else {
                Expr::Pow(Box::new(b), Box::new(x))
            }
        }
        (Expr::Mul(v), _) if x.as_integer().is_some() || !has_negative_constant(v) => {
            simp_mul(v.iter().map(|f| simp_pow(f.clone(), x.clone())).collect())
        }
        (Expr::Fun(Func::Exp, a), _) => simp_fun(Func::Exp, simp_mul(vec![(**a).clone(), x])),
        _ => Expr::Pow(Box::new(b), Box::new(x)),
    }
}

trait EvenInt {
    fn is_even_int(&self) -> bool;
}

impl EvenInt for BigInt {
    fn is_even_int(&self) -> bool {
        num_integer::Integer::is_even(self)
    }
}

/// True when `x` reads as a negated expression in canonical form.
pub(crate) fn looks_negative(x: &Expr) -> bool {
    match x {
        Expr::Num(q) => q.is_negative(),
        Expr::Mul(v) => has_negative_constant(&v[..1.min(v.len())]),
        Expr::Add(v) => v.first().map(looks_negative).unwrap_or(false),
        _ => false,
    }
}

fn negate(x: &Expr) -> Expr {
    simplify(&Expr::mul_all([Expr::int(-1), x.clone()]))
}

fn simp_fun(f: Func, a: Expr) -> Expr {
    match f {
        Func::Exp => match &a {
            x if x.is_zero_literal() => Expr::one(),
            Expr::Fun(Func::Ln, y) => (**y).clone(),
            Expr::Mul(v) if v.len() == 2 && matches!((&v[0], &v[1]), (Expr::Num(_), Expr::Fun(Func::Ln, _))) => {
                if let Expr::Fun(_, y) = &v[1] {
                    simp_pow((**y).clone(), v[0].clone())
                } else {
                    unreachable!()
                }
            }
            _ => Expr::Fun(Func::Exp, Box::new(a)),
        },
        Func::Ln => match &a {
            x if x.is_one_literal() => Expr::zero(),
            Expr::Fun(Func::Exp, y) => (**y).clone(),
            _ => Expr::Fun(Func::Ln, Box::new(a)),
        },
        Func::Sin | Func::Arctan => {
            if a.is_zero_literal() {
                Expr::zero()
            } else if looks_negative(&a) {
                negate(&Expr::Fun(f, Box::new(negate(&a))))
            } else {
                Expr::Fun(f, Box::new(a))
            }
        }
        Func::Cos => {
            if a.is_zero_literal() {
                Expr::one()
            } else if looks_negative(&a) {
                Expr::Fun(Func::Cos, Box::new(negate(&a)))
            } else {
                Expr::Fun(Func::Cos, Box::new(a))
            }
        }
        Func::Arccos if a.is_one_literal() => Expr::zero(),
        _ => Expr::Fun(f, Box::new(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse::parse;

    fn n(s: &str) -> Expr {
        normalize(&parse(s).unwrap())
    }

    #[test]
    fn collects_like_terms_and_powers() {
        assert_eq!(n("rho*u + u*rho - 2*rho*u"), Expr::zero());
        assert_eq!(n("rho^2/rho"), Expr::sym("rho"));
        assert_eq!(n("sqrt(lambda)*sqrt(lambda)"), Expr::sym("lambda"));
        assert_eq!(n("sqrt(2*lambda*g)^2"), n("2*lambda*g"));
    }

    #[test]
    fn numeric_roots_fold() {
        assert_eq!(n("4^(1/2)"), Expr::int(2));
        assert_eq!(n("(9/4)^(3/2)"), Expr::rat(27, 8));
        assert_eq!(n("(-8)^(1/3)"), Expr::int(-2));
        assert_eq!(n("2^(1/2)*2^(1/2)"), Expr::int(2));
    }

    #[test]
    fn function_rules() {
        assert_eq!(n("exp(ln(rho))"), Expr::sym("rho"));
        assert_eq!(n("exp(t)*exp(-t)"), Expr::one());
        assert_eq!(n("sin(-t) + sin(t)"), Expr::zero());
        assert_eq!(n("cos(-t) - cos(t)"), Expr::zero());
    }

    #[test]
    fn symbolic_exponents_merge() {
        assert_eq!(n("rho^(xi5/xi4 - 1)*rho"), n("rho^(xi5/xi4)"));
        assert_eq!(n("rho^((xi5+xi6)/xi4) / rho^(xi5/xi4 + xi6/xi4)"), Expr::one());
    }

    #[test]
    fn expand_distributes() {
        assert_eq!(expand(&parse("(u + 1)^2 - u^2 - 2*u").unwrap()), Expr::one());
        assert_eq!(expand(&parse("rho*(u_t + u*u_a) - rho*u_t").unwrap()), n("rho*u*u_a"));
    }

    #[test]
    fn never_splits_negative_radicand() {
        let e = n("(-2*lambda*g)^(1/2)");
        assert!(matches!(e, Expr::Pow(..)));
    }
}
