use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::symbol::{Symbol, SymbolKind};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Elementary functions of one argument.
///
/// `Undef` is an unspecified smooth function (the height profile `h(a)` of the
/// generic case); `order` counts how many times it has been differentiated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Arccos,
    Arctan,
    Undef { name: Arc<str>, order: u32 },
}

impl Func {
    pub fn name(&self) -> String {
        match self {
            Func::Sin => "sin".into(),
            Func::Cos => "cos".into(),
            Func::Exp => "exp".into(),
            Func::Ln => "ln".into(),
            Func::Arccos => "arccos".into(),
            Func::Arctan => "arctan".into(),
            Func::Undef { name, order: 0 } => name.to_string(),
            Func::Undef { name, order } => format!("{name}_d{order}"),
        }
    }

    pub fn builtin(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "arccos" | "acos" => Func::Arccos,
            "arctan" | "atan" => Func::Arctan,
            _ => return None,
        })
    }
}

/// Symbolic expression over rationals, named symbols and elementary functions.
///
/// Exponents are arbitrary expressions so that parameter-dependent powers such as
/// `rho^(xi5/xi4 - 1)` stay exact; in practice they never depend on coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Num(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn num(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::Num(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Expr::Num(q) if q.is_integer() => q.to_integer().to_i64(),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_one())
    }

    /// Sum with flattening and constant folding.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut konst = Rational::zero();
        let mut out = Vec::new();
        for t in terms {
            match t {
                Expr::Num(q) => konst += q,
                Expr::Add(inner) => {
                    for u in inner {
                        match u {
                            Expr::Num(q) => konst += q,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if !konst.is_zero() {
            out.push(Expr::Num(konst));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    /// Product with flattening and constant folding.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut konst = Rational::one();
        let mut out = Vec::new();
        for f in factors {
            match f {
                Expr::Num(q) => konst *= q,
                Expr::Mul(inner) => {
                    for u in inner {
                        match u {
                            Expr::Num(q) => konst *= q,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
            if konst.is_zero() {
                return Expr::zero();
            }
        }
        if out.is_empty() {
            return Expr::Num(konst);
        }
        if !konst.is_one() {
            out.insert(0, Expr::Num(konst));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::Mul(out)
        }
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if exp.is_zero_literal() || base.is_one_literal() {
            return Expr::one();
        }
        if exp.is_one_literal() {
            return base;
        }
        if let (Expr::Num(b), Some(n)) = (&base, exp.as_integer()) {
            if n.unsigned_abs() <= 512 && !(b.is_zero() && n < 0) {
                return Expr::Num(rational_powi(b, n));
            }
        }
        if base.is_zero_literal() {
            if let Some(q) = exp.as_num() {
                if q.is_positive() {
                    return Expr::zero();
                }
            }
        }
        Expr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Expr::int(n))
    }

    pub fn recip(self) -> Expr {
        Expr::powi(self, -1)
    }

    pub fn sqrt(self) -> Expr {
        Expr::pow(self, Expr::rat(1, 2))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        match (&f, &arg) {
            (Func::Sin, a) | (Func::Arctan, a) if a.is_zero_literal() => Expr::zero(),
            (Func::Cos, a) | (Func::Exp, a) if a.is_zero_literal() => Expr::one(),
            (Func::Ln, a) if a.is_one_literal() => Expr::zero(),
            _ => Expr::Fun(f, Box::new(arg)),
        }
    }

    pub fn sin(self) -> Expr {
        Expr::func(Func::Sin, self)
    }
    pub fn cos(self) -> Expr {
        Expr::func(Func::Cos, self)
    }
    pub fn exp(self) -> Expr {
        Expr::func(Func::Exp, self)
    }
    pub fn ln(self) -> Expr {
        Expr::func(Func::Ln, self)
    }

    /// An unspecified function `name(arg)`.
    pub fn undef(name: &str, arg: Expr) -> Expr {
        Expr::Fun(Func::Undef { name: Arc::from(name), order: 0 }, Box::new(arg))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Expr::Fun(_, a) => a.collect_symbols(out),
        }
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s) => s == sym,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.contains(sym)),
            Expr::Pow(b, e) => b.contains(sym) || e.contains(sym),
            Expr::Fun(_, a) => a.contains(sym),
        }
    }

    pub fn any_symbol(&self, pred: &dyn Fn(&Symbol) -> bool) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s) => pred(s),
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.any_symbol(pred)),
            Expr::Pow(b, e) => b.any_symbol(pred) || e.any_symbol(pred),
            Expr::Fun(_, a) => a.any_symbol(pred),
        }
    }

    /// True when no base, fiber or jet coordinate occurs.
    pub fn is_coordinate_free(&self) -> bool {
        !self.any_symbol(&|s| s.is_coordinate())
    }

    pub fn max_jet_order(&self) -> u32 {
        self.symbols().iter().filter_map(|s| s.as_jet()).map(|j| j.order()).max().unwrap_or(0)
    }

    pub fn has_undefined_function(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Sym(_) => false,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.has_undefined_function()),
            Expr::Pow(b, e) => b.has_undefined_function() || e.has_undefined_function(),
            Expr::Fun(Func::Undef { .. }, _) => true,
            Expr::Fun(_, a) => a.has_undefined_function(),
        }
    }

    /// Simultaneous substitution of symbols. The result is lightly simplified only.
    pub fn subs(&self, map: &HashMap<Symbol, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(v) => Expr::add_all(v.iter().map(|e| e.subs(map))),
            Expr::Mul(v) => Expr::mul_all(v.iter().map(|e| e.subs(map))),
            Expr::Pow(b, e) => Expr::pow(b.subs(map), e.subs(map)),
            Expr::Fun(f, a) => Expr::func(f.clone(), a.subs(map)),
        }
    }

    pub fn subs1(&self, sym: &Symbol, value: &Expr) -> Expr {
        let mut map = HashMap::new();
        map.insert(sym.clone(), value.clone());
        self.subs(&map)
    }

    /// Number of nodes, used to keep work bounded and for diagnostics.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Sym(_) => 1,
            Expr::Add(v) | Expr::Mul(v) => 1 + v.iter().map(|e| e.size()).sum::<usize>(),
            Expr::Pow(b, e) => 1 + b.size() + e.size(),
            Expr::Fun(_, a) => 1 + a.size(),
        }
    }

    /// Splits a leading rational coefficient off a product.
    pub fn split_coefficient(&self) -> (Rational, Expr) {
        match self {
            Expr::Num(q) => (q.clone(), Expr::one()),
            Expr::Mul(v) => {
                let mut coef = Rational::one();
                let mut rest = Vec::with_capacity(v.len());
                for f in v {
                    match f {
                        Expr::Num(q) => coef *= q,
                        other => rest.push(other.clone()),
                    }
                }
                (coef, Expr::mul_all(rest))
            }
            other => (Rational::one(), other.clone()),
        }
    }

    pub fn parameter_symbols(&self) -> BTreeSet<Symbol> {
        self.symbols().into_iter().filter(|s| s.kind() == SymbolKind::Parameter).collect()
    }
}

pub(crate) fn rational_powi(b: &Rational, n: i64) -> Rational {
    if n >= 0 {
        num_traits::pow(b.clone(), n as usize)
    } else {
        num_traits::pow(b.recip(), n.unsigned_abs() as usize)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::Num(q)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::Sym(s)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::Sym(s.clone())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, Expr::int(rhs))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), Expr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all([a, b]));
binop!(Sub, sub, |a, b| Expr::add_all([a, -b]));
binop!(Mul, mul, |a, b| Expr::mul_all([a, b]));
binop!(Div, div, |a, b| Expr::mul_all([a, Expr::powi(b, -1)]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(q) => Expr::Num(-q),
            other => Expr::mul_all([Expr::int(-1), other]),
        }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}

// ---------------------------------------------------------------------------
// printing

const PREC_ADD: u8 = 1;
const PREC_NEG: u8 = 2;
const PREC_MUL: u8 = 3;
const PREC_POW: u8 = 5;

fn write_rational(q: &Rational, out: &mut String) {
    if q.is_integer() {
        out.push_str(&q.numer().to_string());
    } else {
        out.push_str(&q.numer().to_string());
        out.push('/');
        out.push_str(&q.denom().to_string());
    }
}

fn num_prec(q: &Rational) -> u8 {
    if q.is_negative() {
        PREC_NEG
    } else if q.is_integer() {
        u8::MAX
    } else {
        PREC_MUL
    }
}

fn is_negative_term(e: &Expr) -> bool {
    match e {
        Expr::Num(q) => q.is_negative(),
        Expr::Mul(v) => matches!(v.first(), Some(Expr::Num(q)) if q.is_negative()),
        _ => false,
    }
}

fn node_prec(e: &Expr) -> u8 {
    match e {
        Expr::Num(q) => num_prec(q),
        Expr::Sym(_) | Expr::Fun(..) => u8::MAX,
        Expr::Add(_) => PREC_ADD,
        Expr::Mul(_) => {
            if is_negative_term(e) {
                PREC_NEG
            } else {
                PREC_MUL
            }
        }
        Expr::Pow(_, ex) => match ex.as_num() {
            Some(q) if q.is_negative() => PREC_MUL,
            _ => PREC_POW,
        },
    }
}

fn write_wrapped(e: &Expr, min_prec: u8, out: &mut String) {
    if node_prec(e) < min_prec {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_exponent(e: &Expr, out: &mut String) {
    match e {
        Expr::Num(q) if q.is_integer() && !q.is_negative() => write_rational(q, out),
        Expr::Sym(s) => out.push_str(s.name()),
        _ => {
            out.push('(');
            write_expr(e, out);
            out.push(')');
        }
    }
}

fn write_power(base: &Expr, exp: &Expr, out: &mut String) {
    write_wrapped(base, u8::MAX, out);
    out.push('^');
    write_exponent(exp, out);
}

/// Writes a product of factors with numeric coefficient `coef` (sign already handled).
fn write_product(coef: &Rational, factors: &[&Expr], out: &mut String) {
    let mut numer: Vec<String> = Vec::new();
    let mut denom: Vec<String> = Vec::new();
    if !coef.numer().is_one() {
        numer.push(coef.numer().to_string());
    }
    if !coef.denom().is_one() {
        denom.push(coef.denom().to_string());
    }
    for f in factors {
        let mut s = String::new();
        match f {
            Expr::Pow(b, ex) if ex.as_num().map(|q| q.is_negative()).unwrap_or(false) => {
                let q = -ex.as_num().unwrap().clone();
                if q.is_one() {
                    write_wrapped(b, u8::MAX, &mut s);
                } else {
                    write_power(b, &Expr::Num(q), &mut s);
                }
                denom.push(s);
            }
            other => {
                write_wrapped(other, PREC_MUL + 1, &mut s);
                numer.push(s);
            }
        }
    }
    if numer.is_empty() {
        out.push('1');
    } else {
        out.push_str(&numer.join("*"));
    }
    if !denom.is_empty() {
        out.push('/');
        if denom.len() == 1 {
            out.push_str(&denom[0]);
        } else {
            out.push('(');
            out.push_str(&denom.join("*"));
            out.push(')');
        }
    }
}

fn write_term_abs(e: &Expr, out: &mut String) {
    match e {
        Expr::Num(q) => write_rational(&q.abs(), out),
        Expr::Mul(v) => {
            let (coef, rest): (Rational, Vec<&Expr>) = match v.first() {
                Some(Expr::Num(q)) => (q.abs(), v[1..].iter().collect()),
                _ => (Rational::one(), v.iter().collect()),
            };
            write_product(&coef, &rest, out);
        }
        other => write_expr(other, out),
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Num(q) => write_rational(q, out),
        Expr::Sym(s) => out.push_str(s.name()),
        Expr::Add(v) => {
            for (i, t) in v.iter().enumerate() {
                let neg = is_negative_term(t);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                let mut s = String::new();
                write_term_abs(t, &mut s);
                if matches!(t, Expr::Add(_)) {
                    out.push('(');
                    out.push_str(&s);
                    out.push(')');
                } else {
                    out.push_str(&s);
                }
            }
        }
        Expr::Mul(_) => {
            if is_negative_term(e) {
                out.push('-');
            }
            write_term_abs(e, out);
        }
        Expr::Pow(b, ex) => match ex.as_num() {
            Some(q) if q.is_negative() => write_product(&Rational::one(), &[e], out),
            _ => write_power(b, ex, out),
        },
        Expr::Fun(f, a) => {
            out.push_str(&f.name());
            out.push('(');
            write_expr(a, out);
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(self, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::erasing_op)]
    fn constructors_fold_constants() {
        let x = Expr::sym("u");
        assert_eq!(&x * 0, Expr::zero());
        assert_eq!(&x * 1, x);
        assert_eq!(Expr::int(2) + Expr::int(3), Expr::int(5));
        assert_eq!(Expr::pow(Expr::int(2), Expr::int(-2)), Expr::rat(1, 4));
        assert_eq!(Expr::rat(6, -4), Expr::rat(-3, 2));
    }

    #[test]
    fn printing() {
        let rho = Expr::sym("rho");
        let u = Expr::sym("u");
        let e = &rho * (Expr::sym("u_t") + &u * Expr::sym("u_a"));
        assert_eq!(e.to_string(), "rho*(u_t + u*u_a)");
        let e = Expr::sym("p") - Expr::sym("C1") * &rho / Expr::int(2);
        assert_eq!(e.to_string(), "p - C1*rho/2");
        assert_eq!(Expr::pow(Expr::sym("p"), Expr::rat(1, 2)).to_string(), "p^(1/2)");
        assert_eq!(Expr::powi(rho.clone(), -2).to_string(), "1/rho^2");
    }
}
