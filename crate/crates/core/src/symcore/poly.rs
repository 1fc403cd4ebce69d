//! Laurent polynomials and rational functions over the rationals.
//!
//! Denominators are kept as a multiset of canonical polynomial factors, so two
//! rational functions can be added without any gcd computation. The zero test
//! only ever looks at the numerator.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::expr::Rational;

pub type VarId = u32;

/// Monomial with integer (possibly negative) exponents, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(Vec<(VarId, i32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(v: VarId, e: i32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exps(&self) -> &[(VarId, i32)] {
        &self.0
    }

    pub fn exp_of(&self, v: VarId) -> i32 {
        self.0.iter().find(|(w, _)| *w == v).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Mono(out)
    }

    pub fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    pub fn pow(&self, n: i32) -> Mono {
        if n == 0 {
            return Mono::one();
        }
        Mono(self.0.iter().map(|&(v, e)| (v, e * n)).collect())
    }

    /// Removes variable `v`, returning its exponent.
    pub fn take(&self, v: VarId) -> (i32, Mono) {
        let e = self.exp_of(v);
        (e, Mono(self.0.iter().copied().filter(|(w, _)| *w != v).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(q: Rational) -> Poly {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(Mono::one(), q);
        }
        p
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn mono(m: Mono, q: Rational) -> Poly {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(m, q);
        }
        p
    }

    pub fn var(v: VarId) -> Poly {
        Poly::mono(Mono::var(v, 1), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    /// Single-term polynomial, returned as (coefficient, monomial).
    pub fn as_monomial(&self) -> Option<(Rational, Mono)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), m.clone()))
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Mono, q: Rational) {
        use std::collections::btree_map::Entry;
        if q.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(q);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, q) in &small.terms {
            big.add_term(m.clone(), q.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc: BTreeMap<Mono, Rational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let slot = acc.entry(m).or_insert_with(Rational::zero);
                *slot += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Writes `self = c * m * p` with `p` free of monomial content and with
    /// leading coefficient one. Requires a nonzero polynomial.
    pub fn canonical_factor(&self) -> (Rational, Mono, Poly) {
        assert!(!self.is_zero());
        let mut mins: BTreeMap<VarId, i32> = self.vars().into_iter().map(|v| (v, i32::MAX)).collect();
        for m in self.terms.keys() {
            for (v, cur) in mins.iter_mut() {
                *cur = (*cur).min(m.exp_of(*v));
            }
        }
        let content = Mono(mins.into_iter().filter(|(_, e)| *e != 0).collect());
        let inv = content.inv();
        let shifted: BTreeMap<Mono, Rational> = self.terms.iter().map(|(m, c)| (m.mul(&inv), c.clone())).collect();
        let lc = shifted.iter().next_back().unwrap().1.clone();
        let lc_inv = lc.recip();
        let p = Poly { terms: shifted.into_iter().map(|(m, c)| (m, c * &lc_inv)).collect() };
        (lc, content, p)
    }

    /// Variables that occur with a nonzero exponent somewhere.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.keys().flat_map(|m| m.exps().iter().map(|(v, _)| *v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Quotient of a Laurent polynomial by a product of canonical factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    pub num: Poly,
    pub den: Vec<(Poly, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisionByZero;

impl RatFun {
    pub fn from_poly(p: Poly) -> RatFun {
        RatFun { num: p, den: Vec::new() }
    }

    pub fn constant(q: Rational) -> RatFun {
        RatFun::from_poly(Poly::constant(q))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn mult_of(den: &[(Poly, u32)], f: &Poly) -> u32 {
        den.iter().find(|(g, _)| g == f).map(|(_, m)| *m).unwrap_or(0)
    }

    fn expand_factors(fs: &[(Poly, u32)]) -> Poly {
        fs.iter().fold(Poly::one(), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut lcm = self.den.clone();
        for (f, m) in &other.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*m),
                None => lcm.push((f.clone(), *m)),
            }
        }
        let missing = |den: &[(Poly, u32)]| -> Vec<(Poly, u32)> {
            lcm.iter()
                .filter_map(|(f, m)| {
                    let k = m - RatFun::mult_of(den, f);
                    (k > 0).then(|| (f.clone(), k))
                })
                .collect()
        };
        let a = self.num.mul(&RatFun::expand_factors(&missing(&self.den)));
        let b = other.num.mul(&RatFun::expand_factors(&missing(&other.den)));
        let num = a.add(&b);
        if num.is_zero() {
            return RatFun::from_poly(num);
        }
        RatFun { num, den: lcm }
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        let num = self.num.mul(&other.num);
        if num.is_zero() {
            return RatFun::from_poly(num);
        }
        let mut den = self.den.clone();
        for (f, m) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 += m,
                None => den.push((f.clone(), *m)),
            }
        }
        RatFun { num, den }
    }

    pub fn recip(&self) -> Result<RatFun, DivisionByZero> {
        if self.num.is_zero() {
            return Err(DivisionByZero);
        }
        let (c, content, p) = self.num.canonical_factor();
        let mut top = self.den.clone();
        let mut den = Vec::new();
        if p.as_constant().is_none() {
            match top.iter_mut().find(|(g, _)| *g == p) {
                Some(slot) => slot.1 -= 1,
                None => den.push((p, 1)),
            }
        }
        top.retain(|(_, m)| *m > 0);
        let num = RatFun::expand_factors(&top).mul_mono(&content.inv()).scale(&c.recip());
        Ok(RatFun { num, den })
    }

    pub fn powi(&self, n: i64) -> Result<RatFun, DivisionByZero> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        let num = base.num.pow(k);
        let den = base.den.iter().map(|(f, m)| (f.clone(), m * k)).collect();
        Ok(RatFun { num, den })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::expr::rat;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn laurent_cancellation() {
        let p = x().mul(&RatFun::from_poly(x()).recip().unwrap().num);
        assert_eq!(p, Poly::one());
    }

    #[test]
    fn sum_of_fractions_cancels() {
        // 1/(x+y) + 1/(-x-y) = 0
        let s = x().add(&y());
        let a = RatFun::from_poly(s.clone()).recip().unwrap();
        let b = RatFun::from_poly(s.neg()).recip().unwrap();
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn canonical_factor_strips_content() {
        let p = x().mul(&x()).scale(&rat(3, 1)).add(&x().mul(&y()).scale(&rat(6, 1)));
        let (c, m, q) = p.canonical_factor();
        assert_eq!(m, Mono::var(0, 1));
        assert_eq!(q.mul_mono(&m).scale(&c), p);
    }

    #[test]
    fn recip_cancels_matching_factor() {
        let s = RatFun::from_poly(x().add(&Poly::one()));
        let inv = s.recip().unwrap();
        let back = inv.recip().unwrap();
        assert!(back.den.is_empty());
        assert_eq!(back.num, x().add(&Poly::one()));
    }
}
