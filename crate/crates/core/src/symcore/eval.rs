use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::expr::{rational_powi, Expr, Func, Rational};
use super::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(&'static str),
}

/// Values for symbols and for undefined functions at a numeric argument.
pub trait Env {
    fn symbol(&self, s: &Symbol) -> Option<f64>;
    fn undefined(&self, _name: &str, _order: u32, _arg: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(&Symbol) -> Option<f64>> Env for F {
    fn symbol(&self, s: &Symbol) -> Option<f64> {
        self(s)
    }
}

/// A value together with the magnitude of the terms that produced it.
///
/// `scale` bounds the size of intermediate summands, so `|value| / scale` is a
/// meaningful relative residual even after heavy cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub scale: f64,
}

fn check(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain("non-finite value"))
    }
}

pub fn eval_f64(e: &Expr, env: &dyn Env) -> Result<f64, EvalError> {
    eval_scaled(e, env).map(|s| s.value)
}

pub fn eval_scaled(e: &Expr, env: &dyn Env) -> Result<Scaled, EvalError> {
    let plain = |v: f64| -> Result<Scaled, EvalError> { check(v).map(|v| Scaled { value: v, scale: v.abs() }) };
    match e {
        Expr::Num(q) => plain(q.to_f64().unwrap_or(f64::NAN)),
        Expr::Sym(s) => plain(env.symbol(s).ok_or_else(|| EvalError::Unbound(s.name().to_string()))?),
        Expr::Add(v) => {
            let mut value = 0.0;
            let mut scale = 0.0;
            for t in v {
                let s = eval_scaled(t, env)?;
                value += s.value;
                scale += s.scale;
            }
            Ok(Scaled { value: check(value)?, scale })
        }
        Expr::Mul(v) => {
            let mut value = 1.0;
            let mut scale = 1.0;
            for f in v {
                let s = eval_scaled(f, env)?;
                value *= s.value;
                scale *= s.scale;
            }
            Ok(Scaled { value: check(value)?, scale })
        }
        Expr::Pow(b, x) => {
            let bs = eval_scaled(b, env)?;
            let xv = eval_f64(x, env)?;
            let bv = bs.value;
            let is_int = xv.fract() == 0.0 && x.as_num().map(|q| q.is_integer()).unwrap_or(false);
            if bv == 0.0 && xv <= 0.0 {
                return Err(EvalError::Domain("zero to a nonpositive power"));
            }
            let value = if is_int {
                bv.powi(xv as i32)
            } else if bv < 0.0 {
                // real odd roots of negative bases
                match x.as_num() {
                    Some(q) if q.denom().to_u64().map(|d| d % 2 == 1).unwrap_or(false) => {
                        let sign = if q.numer().to_i64().map(|n| n % 2 != 0).unwrap_or(false) { -1.0 } else { 1.0 };
                        sign * (-bv).powf(xv)
                    }
                    _ => return Err(EvalError::Domain("fractional power of a negative number")),
                }
            } else {
                bv.powf(xv)
            };
            let scale = if xv > 0.0 { bs.scale.powf(xv) } else { value.abs() };
            Ok(Scaled { value: check(value)?, scale: scale.max(value.abs()) })
        }
        Expr::Fun(f, a) => {
            let x = eval_f64(a, env)?;
            let v = match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain("logarithm of a nonpositive number"));
                    }
                    x.ln()
                }
                Func::Arccos => {
                    if !(-1.0..=1.0).contains(&x) {
                        return Err(EvalError::Domain("arccos outside [-1, 1]"));
                    }
                    x.acos()
                }
                Func::Arctan => x.atan(),
                Func::Undef { name, order } => {
                    env.undefined(name, *order, x).ok_or_else(|| EvalError::Unbound(f.name()))?
                }
            };
            plain(v)
        }
    }
}

/// Exact value on the rational fragment; `None` for anything transcendental,
/// fractional powers, unbound symbols or division by zero.
pub fn eval_exact(e: &Expr, env: &dyn Fn(&Symbol) -> Option<Rational>) -> Option<Rational> {
    match e {
        Expr::Num(q) => Some(q.clone()),
        Expr::Sym(s) => env(s),
        Expr::Add(v) => v.iter().try_fold(Rational::zero(), |acc, t| Some(acc + eval_exact(t, env)?)),
        Expr::Mul(v) => {
            v.iter().try_fold(Rational::from_integer(1.into()), |acc, t| Some(acc * eval_exact(t, env)?))
        }
        Expr::Pow(b, x) => {
            let n = x.as_integer()?;
            let bv = eval_exact(b, env)?;
            if bv.is_zero() && n < 0 {
                return None;
            }
            if n.unsigned_abs() > 4096 {
                return None;
            }
            Some(rational_powi(&bv, n))
        }
        Expr::Fun(..) => None,
    }
}

/// Sign of an exact value, or of a float outside `margin`.
pub fn sign_with_margin(v: f64, margin: f64) -> Option<i8> {
    if v > margin {
        Some(1)
    } else if v < -margin {
        Some(-1)
    } else {
        None
    }
}

pub fn rational_sign(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::expr::rat;
    use crate::symcore::parse::parse;

    fn env(s: &Symbol) -> Option<f64> {
        match s.name() {
            "rho" => Some(2.0),
            "u" => Some(-3.0),
            _ => None,
        }
    }

    #[test]
    fn evaluates_with_scale() {
        let e = parse("rho*u - u*rho + 1").unwrap();
        let s = eval_scaled(&e, &env).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.scale, 13.0);
    }

    #[test]
    fn domain_errors() {
        assert!(eval_f64(&parse("ln(u)").unwrap(), &env).is_err());
        assert!(eval_f64(&parse("u^(1/2)").unwrap(), &env).is_err());
        assert!((eval_f64(&parse("u^(1/3)").unwrap(), &env).unwrap() + 3f64.cbrt()).abs() < 1e-15);
        assert!(matches!(eval_f64(&parse("s").unwrap(), &env), Err(EvalError::Unbound(_))));
    }

    #[test]
    fn exact_fragment() {
        let e = parse("rho^2/u + 1/3").unwrap();
        let v = eval_exact(&e, &|s: &Symbol| match s.name() {
            "rho" => Some(rat(2, 1)),
            "u" => Some(rat(-3, 1)),
            _ => None,
        });
        assert_eq!(v, Some(rat(-1, 1)));
        assert_eq!(eval_exact(&parse("sin(rho)").unwrap(), &|_: &Symbol| Some(rat(1, 1))), None);
    }
}
