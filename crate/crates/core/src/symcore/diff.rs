use super::expr::{Expr, Func};
use super::symbol::Symbol;

/// Partial derivative; every other symbol, jets included, is independent of `x`.
pub fn differentiate(e: &Expr, x: &Symbol) -> Expr {
    if !e.contains(x) {
        return Expr::zero();
    }
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == x {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Add(v) => Expr::add_all(v.iter().map(|t| differentiate(t, x))),
        Expr::Mul(v) => {
            let mut terms = Vec::new();
            for (i, f) in v.iter().enumerate() {
                let df = differentiate(f, x);
                if df.is_zero_literal() {
                    continue;
                }
                let mut parts = Vec::with_capacity(v.len());
                parts.extend(v[..i].iter().cloned());
                parts.push(df);
                parts.extend(v[i + 1..].iter().cloned());
                terms.push(Expr::mul_all(parts));
            }
            Expr::add_all(terms)
        }
        Expr::Pow(b, ex) => {
            let db = differentiate(b, x);
            if !ex.contains(x) {
                // ex * b^(ex-1) * db
                let lowered = Expr::pow((**b).clone(), Expr::add_all([(**ex).clone(), Expr::int(-1)]));
                Expr::mul_all([(**ex).clone(), lowered, db])
            } else {
                let dex = differentiate(ex, x);
                let ln_b = (**b).clone().ln();
                let inner = Expr::add_all([
                    Expr::mul_all([dex, ln_b]),
                    Expr::mul_all([(**ex).clone(), db, (**b).clone().recip()]),
                ]);
                Expr::mul_all([e.clone(), inner])
            }
        }
        Expr::Fun(f, a) => {
            let da = differentiate(a, x);
            let a = (**a).clone();
            let outer = match f {
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
                Func::Exp => a.exp(),
                Func::Ln => a.recip(),
                Func::Arccos => {
                    -Expr::pow(Expr::add_all([Expr::one(), -Expr::powi(a, 2)]), Expr::rat(-1, 2))
                }
                Func::Arctan => Expr::add_all([Expr::one(), Expr::powi(a, 2)]).recip(),
                Func::Undef { name, order } => {
                    Expr::Fun(Func::Undef { name: name.clone(), order: order + 1 }, Box::new(a))
                }
            };
            Expr::mul_all([outer, da])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse::parse;
    use crate::symcore::zero::is_zero;

    fn d(s: &str, x: &str) -> Expr {
        differentiate(&parse(s).unwrap(), &Symbol::new(x))
    }

    fn same(a: &Expr, b: &str) -> bool {
        is_zero(&(a - parse(b).unwrap())).is_zero()
    }

    #[test]
    fn product_rule() {
        assert_eq!(d("rho*u", "rho"), Expr::sym("u"));
    }

    #[test]
    fn jets_are_independent() {
        assert!(d("u_a", "u").is_zero_literal());
    }

    #[test]
    fn chain_rule_on_parametric_power() {
        // hand chain rule: d/ds (g2 - g4 s)^(-g3/g4) = g3 (g2 - g4 s)^(-g3/g4 - 1)
        let got = d("(gamma2 - gamma4*s)^(-gamma3/gamma4)", "s");
        assert!(same(&got, "gamma3*(gamma2 - gamma4*s)^(-gamma3/gamma4 - 1)"));
    }

    #[test]
    fn undefined_function_counts_order() {
        assert_eq!(d("h(a)", "a").to_string(), "h_d1(a)");
        assert_eq!(d("h_d1(a)", "a").to_string(), "h_d2(a)");
    }

    #[test]
    fn elementary_functions() {
        assert!(same(&d("sin(omega*t)", "t"), "omega*cos(omega*t)"));
        assert!(same(&d("arctan(u)", "u"), "1/(1 + u^2)"));
        assert!(same(&d("ln(rho)", "rho"), "1/rho"));
    }
}
