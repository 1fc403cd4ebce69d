//! Infix grammar shared by the parser and the printer.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right associative
//! atom  := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Jet names carry derivative letters after an underscore (`u_ta`, `T_aa`).
//! Decimals are read as exact rationals. `sqrt(x)` is sugar for `x^(1/2)`, and a
//! registered function `h` may appear as `h(a)` or as its derivative `h_d2(a)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::expr::{Expr, Func, Rational};
use super::symbol::SymbolTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("unknown function `{name}` at {pos}")]
    UnknownFunction { pos: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Name(String),
    Op(char),
}

fn greek(c: char) -> Option<&'static str> {
    Some(match c {
        'ρ' => "rho",
        'λ' => "lambda",
        'γ' => "gamma",
        'ξ' => "xi",
        'ε' | 'ϵ' => "eps",
        'ω' => "omega",
        'μ' => "mu",
        _ => return None,
    })
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).map(|x| x.1.is_ascii_digit()).unwrap_or(false)) {
            let mut int_part = String::new();
            let mut frac_part = String::new();
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                int_part.push(chars[i].1);
                i += 1;
            }
            if i < chars.len() && chars[i].1 == '.' {
                i += 1;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    frac_part.push(chars[i].1);
                    i += 1;
                }
            }
            let digits = format!("{int_part}{frac_part}");
            let numer: BigInt = digits.parse().map_err(|_| ParseError::Syntax { pos, msg: "bad number".into() })?;
            let denom = num_traits::pow(BigInt::from(10), frac_part.len());
            out.push((Tok::Num(Rational::new(numer, denom)), pos));
        } else if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while i < chars.len() {
                let ch = chars[i].1;
                if let Some(g) = greek(ch) {
                    name.push_str(g);
                } else if ch.is_ascii_alphanumeric() || ch == '_' {
                    name.push(ch);
                } else {
                    break;
                }
                i += 1;
            }
            out.push((Tok::Name(name), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), pos));
            i += 1;
        } else {
            return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    table: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax { pos: self.pos(), msg: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.unary()?;
                if d.is_zero_literal() {
                    return Err(ParseError::Syntax { pos, msg: "division by zero".into() });
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let ex = self.unary()?;
            if base.is_zero_literal() && ex.as_num().map(|q| *q <= Rational::zero()).unwrap_or(false) {
                return Err(ParseError::Syntax { pos: self.pos(), msg: "zero to a nonpositive power".into() });
            }
            return Ok(Expr::pow(base, ex));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.toks.get(self.i).cloned() {
            Some((Tok::Num(q), _)) => {
                self.i += 1;
                Ok(Expr::Num(q))
            }
            Some((Tok::Op('('), _)) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some((Tok::Name(name), _)) => {
                self.i += 1;
                if self.eat('(') {
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return self.call(&name, arg, pos);
                }
                self.table
                    .lookup(&name)
                    .map(Expr::Sym)
                    .ok_or(ParseError::UnknownSymbol { pos, name })
            }
            Some((Tok::Op(c), _)) => Err(ParseError::Syntax { pos, msg: format!("unexpected `{c}`") }),
            None => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
        }
    }

    fn call(&self, name: &str, arg: Expr, pos: usize) -> Result<Expr, ParseError> {
        if name == "sqrt" {
            return Ok(arg.sqrt());
        }
        if let Some(f) = Func::builtin(name) {
            return Ok(Expr::func(f, arg));
        }
        let (head, order) = match name.rsplit_once("_d") {
            Some((h, n)) if !n.is_empty() && n.chars().all(|c| c.is_ascii_digit()) => {
                (h, n.parse::<u32>().map_err(|_| ParseError::UnknownFunction { pos, name: name.into() })?)
            }
            _ => (name, 0),
        };
        if self.table.has_function(head) {
            Ok(Expr::Fun(Func::Undef { name: Arc::from(head), order }, Box::new(arg)))
        } else {
            Err(ParseError::UnknownFunction { pos, name: name.into() })
        }
    }
}

/// Parses with the default symbol table.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &SymbolTable::default())
}

pub fn parse_with(text: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0, end: text.len(), table };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return Err(ParseError::Syntax { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(e)
}

/// Reads a rational literal such as `-3`, `0.25` or `11/3`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let e = parse_with(text, &SymbolTable::empty()).ok()?;
    match e {
        Expr::Num(q) => Some(q),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::expr::rat;
    use crate::symcore::normalize::normalize;

    #[test]
    fn product_with_three_factors_in_first_summand() {
        let e = parse("rho*(u_t + u*u_a)").unwrap();
        match e {
            Expr::Mul(v) => {
                assert_eq!(v[0], Expr::sym("rho"));
                assert!(matches!(&v[1], Expr::Add(ts) if ts.len() == 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_node() {
        assert_eq!(parse("p^(1/2)").unwrap(), Expr::Pow(Box::new(Expr::sym("p")), Box::new(Expr::rat(1, 2))));
        // right associative
        assert_eq!(parse("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse("-u^2").unwrap().to_string(), "-u^2");
    }

    #[test]
    fn oscillator_coefficient() {
        let e = parse("sin(sqrt(2*lambda*g)*t)").unwrap();
        assert!(matches!(e, Expr::Fun(Func::Sin, _)));
        assert_eq!(e.to_string(), "sin((2*lambda*g)^(1/2)*t)");
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("11/3"), Some(rat(11, 3)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
    }

    #[test]
    fn greek_aliases() {
        assert_eq!(parse("ρ*λ").unwrap(), parse("rho*lambda").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("u + zeta"), Err(ParseError::UnknownSymbol { pos: 4, name: "zeta".into() }));
        assert!(matches!(parse("u + (v"), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse("u + (p"), Err(ParseError::Syntax { pos: 6, .. })));
        assert!(matches!(parse("foo(u)"), Err(ParseError::UnknownFunction { .. })));
        assert!(matches!(parse("u $ p"), Err(ParseError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn undefined_function_derivatives() {
        let e = parse("h_d2(a)").unwrap();
        assert!(matches!(e, Expr::Fun(Func::Undef { order: 2, .. }, _)));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "rho*(u_t + u*u_a) + p_a + g*lambda*rho",
            "C1*rho - gamma1/gamma4",
            "C2*(gamma2 - gamma4*s)^(-gamma3/gamma4)",
            "u_a*s_a*rho^4/rho_a^3",
            "sqrt(2*lambda*g)*cos(sqrt(2*lambda*g)*t)",
            "-(t^2/2 + a/(lambda*g))",
            "exp(-lambda2*a/2)*h_d1(a)",
            "(-2)^(1/3) + 3/4*T_aa",
        ] {
            let e = normalize(&parse(s).unwrap());
            let back = normalize(&parse(&e.to_string()).unwrap());
            assert_eq!(back, e, "round trip of {s} via {e}");
        }
    }
}
