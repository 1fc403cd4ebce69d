//! Jet coordinates, total derivatives and prolongation of point vector fields.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::symcore::{differentiate, expand, normalize, parse, BaseVar, Expr, Field, JetVar, ParseError, Symbol};

/// Point vector field `xi_t d_t + xi_a d_a + sum phi_w d_w` on (t, a, u, p, rho, s, T).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointField {
    pub xi_t: Expr,
    pub xi_a: Expr,
    /// Indexed by [`Field::index`].
    pub phi: [Expr; 5],
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("coefficient of d_{0} depends on jet variable {1}")]
    JetDependence(String, String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl PointField {
    pub fn zero() -> PointField {
        PointField { xi_t: Expr::zero(), xi_a: Expr::zero(), phi: std::array::from_fn(|_| Expr::zero()) }
    }

    /// Builds a field from `(coordinate, coefficient)` pairs; repeated coordinates add up.
    pub fn from_parts<I: IntoIterator<Item = (&'static str, Expr)>>(parts: I) -> PointField {
        let mut out = PointField::zero();
        for (name, c) in parts {
            let slot = out.slot_mut(name).unwrap_or_else(|| panic!("unknown coordinate {name}"));
            *slot = Expr::add_all([slot.clone(), c]);
        }
        out.normalized()
    }

    /// Parses `(coordinate, coefficient)` pairs such as `("a", "t")`.
    pub fn parse(parts: &[(&str, &str)]) -> Result<PointField, FieldError> {
        let mut out = PointField::zero();
        for (name, text) in parts {
            let c = parse(text)?;
            let slot = out.slot_mut(name).ok_or_else(|| FieldError::UnknownCoordinate(name.to_string()))?;
            *slot = Expr::add_all([slot.clone(), c]);
        }
        out.validate()?;
        Ok(out.normalized())
    }

    fn slot_mut(&mut self, name: &str) -> Option<&mut Expr> {
        match name {
            "t" => Some(&mut self.xi_t),
            "a" => Some(&mut self.xi_a),
            other => Field::from_name(other).map(|f| &mut self.phi[f.index()]),
        }
    }

    /// Coefficients in the order t, a, u, p, rho, s, T.
    pub fn coefficients(&self) -> [&Expr; 7] {
        [&self.xi_t, &self.xi_a, &self.phi[0], &self.phi[1], &self.phi[2], &self.phi[3], &self.phi[4]]
    }

    pub const COORDINATES: [&'static str; 7] = ["t", "a", "u", "p", "rho", "s", "T"];

    pub fn base(&self, x: BaseVar) -> &Expr {
        match x {
            BaseVar::T => &self.xi_t,
            BaseVar::A => &self.xi_a,
        }
    }

    pub fn fiber(&self, f: Field) -> &Expr {
        &self.phi[f.index()]
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        for (name, c) in Self::COORDINATES.iter().zip(self.coefficients()) {
            if let Some(j) = c.symbols().into_iter().filter_map(|s| s.as_jet()).find(|j| j.order() > 0) {
                return Err(FieldError::JetDependence(name.to_string(), j.name()));
            }
        }
        Ok(())
    }

    pub fn is_zero_literal(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_zero_literal())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> PointField {
        PointField { xi_t: f(&self.xi_t), xi_a: f(&self.xi_a), phi: std::array::from_fn(|i| f(&self.phi[i])) }
    }

    pub fn normalized(&self) -> PointField {
        self.map(normalize)
    }

    pub fn add(&self, other: &PointField) -> PointField {
        let mut out = self.clone();
        out.xi_t = Expr::add_all([self.xi_t.clone(), other.xi_t.clone()]);
        out.xi_a = Expr::add_all([self.xi_a.clone(), other.xi_a.clone()]);
        for i in 0..5 {
            out.phi[i] = Expr::add_all([self.phi[i].clone(), other.phi[i].clone()]);
        }
        out.normalized()
    }

    pub fn scale(&self, c: &Expr) -> PointField {
        self.map(|e| normalize(&(c * e)))
    }

    pub fn linear_combination<'a, I: IntoIterator<Item = (Expr, &'a PointField)>>(terms: I) -> PointField {
        terms.into_iter().fold(PointField::zero(), |acc, (c, x)| acc.add(&x.scale(&c)))
    }

    /// Directional derivative of a function of the 0-jet coordinates (jets are ignored).
    pub fn derive(&self, e: &Expr) -> Expr {
        let mut terms = Vec::with_capacity(7);
        for (name, c) in Self::COORDINATES.iter().zip(self.coefficients()) {
            if c.is_zero_literal() {
                continue;
            }
            let d = differentiate(e, &Symbol::new(name));
            if !d.is_zero_literal() {
                terms.push(c * d);
            }
        }
        Expr::add_all(terms)
    }

    pub fn subs(&self, sym: &Symbol, value: &Expr) -> PointField {
        self.map(|e| normalize(&e.subs1(sym, value)))
    }
}

impl fmt::Display for PointField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, c) in Self::COORDINATES.iter().zip(self.coefficients()) {
            if c.is_zero_literal() {
                continue;
            }
            let d = format!("d_{name}");
            parts.push(if c.is_one_literal() {
                d
            } else if matches!(c, Expr::Add(_)) {
                format!("({c})*{d}")
            } else {
                format!("{c}*{d}")
            });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl Serialize for PointField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        for (name, c) in Self::COORDINATES.iter().zip(self.coefficients()) {
            if !c.is_zero_literal() {
                m.serialize_entry(name, &c.to_string())?;
            }
        }
        m.end()
    }
}

/// Lie bracket `[X, Y]` of point fields, coefficient-wise `X(Y_c) - Y(X_c)`.
pub fn bracket(x: &PointField, y: &PointField) -> PointField {
    let c = |xc: &Expr, yc: &Expr| {
        let d = normalize(&(x.derive(yc) - y.derive(xc)));
        if expand(&d).is_zero_literal() {
            Expr::zero()
        } else {
            d
        }
    };
    PointField {
        xi_t: c(&x.xi_t, &y.xi_t),
        xi_a: c(&x.xi_a, &y.xi_a),
        phi: std::array::from_fn(|i| c(&x.phi[i], &y.phi[i])),
    }
}

/// `D_t` or `D_a`: explicit derivative plus the chain rule through every jet present.
pub fn total_derivative(e: &Expr, x: BaseVar) -> Expr {
    let mut terms = vec![differentiate(e, &x.symbol())];
    for s in e.symbols() {
        if let Some(j) = s.as_jet() {
            let d = differentiate(e, &s);
            if !d.is_zero_literal() {
                terms.push(d * Expr::Sym(j.bump(x).symbol()));
            }
        }
    }
    Expr::add_all(terms)
}

// ---------------------------------------------------------------------------
// prolongation

type CacheKey = (PointField, JetVar);

fn cache() -> &'static RwLock<HashMap<CacheKey, Expr>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Expr>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficient of `d_{w_J}` in the prolongation of `x`.
///
/// `phi_{J,y} = D_y(phi_J) - w_{J,t} D_y(xi_t) - w_{J,a} D_y(xi_a)`, with the parent
/// of a mixed jet taken along `a` first.
pub fn jet_coefficient(x: &PointField, j: JetVar) -> Expr {
    if j.order() == 0 {
        return x.fiber(j.field).clone();
    }
    let key = (x.clone(), j);
    if let Some(c) = cache().read().expect("prolongation cache poisoned").get(&key) {
        return c.clone();
    }
    let (parent, dir) = if j.na > 0 {
        (JetVar::new(j.field, j.nt, j.na - 1), BaseVar::A)
    } else {
        (JetVar::new(j.field, j.nt - 1, 0), BaseVar::T)
    };
    let phi = jet_coefficient(x, parent);
    let wt = Expr::Sym(parent.bump(BaseVar::T).symbol());
    let wa = Expr::Sym(parent.bump(BaseVar::A).symbol());
    let c = normalize(
        &(total_derivative(&phi, dir)
            - wt * total_derivative(&x.xi_t, dir)
            - wa * total_derivative(&x.xi_a, dir)),
    );
    cache().write().expect("prolongation cache poisoned").insert(key, c.clone());
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProlongedField {
    pub base: PointField,
    pub order: u32,
    pub coefficients: BTreeMap<JetVar, Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression has jet order {found}, prolongation only reaches {order}")]
pub struct OrderOverflow {
    pub found: u32,
    pub order: u32,
}

pub fn prolong(x: &PointField, k: u32) -> ProlongedField {
    let mut coefficients = BTreeMap::new();
    for f in Field::ALL {
        for n in 0..=k {
            for j in JetVar::of_order(f, n) {
                coefficients.insert(j, jet_coefficient(x, j));
            }
        }
    }
    ProlongedField { base: x.clone(), order: k, coefficients }
}

impl ProlongedField {
    pub fn coefficient(&self, j: JetVar) -> Option<&Expr> {
        self.coefficients.get(&j)
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr, OrderOverflow> {
        let found = e.max_jet_order();
        if found > self.order {
            return Err(OrderOverflow { found, order: self.order });
        }
        Ok(apply_field(&self.base, e))
    }
}

/// Prolonged action on `e`, prolonging exactly as far as the jets of `e` require.
pub fn apply_field(x: &PointField, e: &Expr) -> Expr {
    let mut terms = Vec::new();
    for b in [BaseVar::T, BaseVar::A] {
        let c = x.base(b);
        if !c.is_zero_literal() {
            let d = differentiate(e, &b.symbol());
            if !d.is_zero_literal() {
                terms.push(c * d);
            }
        }
    }
    for s in e.symbols() {
        if let Some(j) = s.as_jet() {
            let c = jet_coefficient(x, j);
            if c.is_zero_literal() {
                continue;
            }
            let d = differentiate(e, &s);
            if !d.is_zero_literal() {
                terms.push(c * d);
            }
        }
    }
    Expr::add_all(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::is_zero;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn same(a: &Expr, b: &str) -> bool {
        is_zero(&(a - p(b))).is_zero()
    }

    fn x7() -> PointField {
        PointField::parse(&[("a", "t"), ("u", "1")]).unwrap()
    }

    #[test]
    fn total_derivatives() {
        assert_eq!(total_derivative(&p("u"), BaseVar::A), p("u_a"));
        assert!(same(&total_derivative(&p("rho*u"), BaseVar::A), "rho_a*u + rho*u_a"));
        // step inside the prolongation of t d_a + d_u
        assert!(same(&total_derivative(&p("1 - t*u_a"), BaseVar::T), "-u_a - t*u_ta"));
        assert_eq!(total_derivative(&p("h(a)*rho"), BaseVar::A).to_string(), "h_d1(a)*rho + h(a)*rho_a");
    }

    #[test]
    fn constant_field_prolongs_trivially() {
        let dt = PointField::parse(&[("t", "1")]).unwrap();
        let pr = prolong(&dt, 2);
        assert!(pr.coefficients.iter().all(|(_, c)| c.is_zero_literal()));
        assert!(pr.apply(&p("a")).unwrap().is_zero_literal());
    }

    #[test]
    fn galilean_boost() {
        let pr = prolong(&x7(), 1);
        assert!(same(pr.coefficient(JetVar::parse("u_t").unwrap()).unwrap(), "-u_a"));
        assert!(pr.coefficient(JetVar::parse("u_a").unwrap()).unwrap().is_zero_literal());
        assert!(is_zero(&pr.apply(&p("s_t + u*s_a")).unwrap()).is_zero());
        assert!(same(&pr.apply(&p("u")).unwrap(), "1"));
    }

    #[test]
    fn scaling_weight_on_entropy_jets() {
        let x5 = PointField::parse(&[("p", "p"), ("rho", "rho"), ("s", "-s")]).unwrap();
        let pr = prolong(&x5, 1);
        assert!(same(pr.coefficient(JetVar::parse("s_t").unwrap()).unwrap(), "-s_t"));
    }

    #[test]
    fn order_overflow() {
        let pr = prolong(&x7(), 1);
        assert_eq!(pr.apply(&p("T_aa")), Err(OrderOverflow { found: 2, order: 1 }));
    }

    #[test]
    fn rejects_jet_coefficients() {
        assert!(matches!(PointField::parse(&[("a", "u_t")]), Err(FieldError::JetDependence(..))));
    }

    #[test]
    fn restriction_to_order_zero_is_the_base_field() {
        let pr = prolong(&x7(), 2);
        for f in Field::ALL {
            assert_eq!(pr.coefficient(JetVar::fiber(f)), Some(pr.base.fiber(f)));
        }
    }

    #[test]
    fn brackets() {
        let x1 = PointField::parse(&[("t", "1")]).unwrap();
        let x2 = PointField::parse(&[("p", "1")]).unwrap();
        let x4 = PointField::parse(&[("T", "T")]).unwrap();
        let x5 = PointField::parse(&[("p", "p"), ("rho", "rho"), ("s", "-s")]).unwrap();
        assert_eq!(bracket(&x2, &x5), x2);
        assert_eq!(bracket(&x1, &x7()), PointField::parse(&[("a", "1")]).unwrap());
        assert!(bracket(&x4, &x5).is_zero_literal());
    }

    #[test]
    fn display() {
        assert_eq!(x7().to_string(), "t*d_a + d_u");
    }
}
