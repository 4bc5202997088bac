//! Sparse multivariate polynomials over Q in x (= s_1) and the odd times.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::q::{format_rat, Rat};
use crate::real::{Real, RealCtx};

/// A monomial: sorted (variable, exponent) pairs with positive exponents.
/// Variable j stands for s_{2j-1}; j = 1 is x.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(j: u32) -> Self {
        Monomial(alloc::vec![(j, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable_by_key(|&(j, _)| j);
        // merge duplicates
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (j, e) in pairs {
            match out.last_mut() {
                Some((lj, le)) if *lj == j => *le += e,
                _ => out.push((j, e)),
            }
        }
        Monomial(out)
    }

    pub fn exponent(&self, j: u32) -> u32 {
        self.0
            .binary_search_by_key(&j, |&(v, _)| v)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&other.0);
        Monomial::from_pairs(pairs)
    }

    /// Divides by var j once; returns the lowered monomial and the old exponent.
    fn lower(&self, j: u32) -> Option<(Monomial, u32)> {
        let e = self.exponent(j);
        if e == 0 {
            return None;
        }
        let mut pairs = self.0.clone();
        for p in pairs.iter_mut() {
            if p.0 == j {
                p.1 -= 1;
            }
        }
        Some((Monomial::from_pairs(pairs), e))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        MultiPoly { terms }
    }

    /// The variable s_{2j-1} (j = 1 is x).
    pub fn var(j: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(j), Rat::one());
        MultiPoly { terms }
    }

    pub fn from_terms(pairs: Vec<(Monomial, Rat)>) -> Self {
        let mut out = MultiPoly::zero();
        for (m, c) in pairs {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Partial derivative with respect to variable j.
    pub fn deriv(&self, j: u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            if let Some((lowered, e)) = m.lower(j) {
                out.add_term(lowered, c * Rat::from_integer(e.into()));
            }
        }
        out
    }

    /// Exact rational evaluation; `value_of` maps variable index to value
    /// (missing variables evaluate to zero).
    pub fn eval_rat<F: Fn(u32) -> Rat>(&self, value_of: F) -> Rat {
        let mut cache: BTreeMap<u32, Rat> = BTreeMap::new();
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(j, e) in m.pairs() {
                let v = cache.entry(j).or_insert_with(|| value_of(j));
                for _ in 0..e {
                    t *= &*v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluation with the spatial variable (j = 1) given as a Real and all
    /// time variables rational. Used on quadrature nodes.
    pub fn eval_real_x<F: Fn(u32) -> Rat>(
        &self,
        ctx: &RealCtx,
        x: &Real,
        time_of: F,
    ) -> Real {
        let mut acc = ctx.zero();
        for (m, c) in &self.terms {
            let mut t = ctx.from_rat(c);
            for &(j, e) in m.pairs() {
                if j == 1 {
                    let p = ctx.powi(x, e as i32);
                    t = ctx.mul(&t, &p);
                } else {
                    let v = time_of(j);
                    let p = ctx.from_rat(&crate::q::rat_pow(&v, e as i32));
                    t = ctx.mul(&t, &p);
                }
            }
            acc = ctx.add(&acc, &t);
        }
        acc
    }

    /// Canonical text form in the deterministic monomial order.
    pub fn render<F: Fn(u32) -> String>(&self, var_name: F) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in &self.terms {
            let mut s = String::new();
            if m.is_unit() {
                s.push_str(&format_rat(c));
            } else {
                if !c.is_one() {
                    if *c == -Rat::one() {
                        s.push('-');
                    } else {
                        s.push_str(&format_rat(c));
                        s.push('*');
                    }
                }
                let mut first = true;
                for &(j, e) in m.pairs() {
                    if !first {
                        s.push('*');
                    }
                    first = false;
                    s.push_str(&var_name(j));
                    if e > 1 {
                        s.push('^');
                        s.push_str(itoa(e).as_str());
                    }
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

fn itoa(v: u32) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    let _ = write!(s, "{v}");
    s
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let named = self.render(|j| {
            if j == 1 {
                String::from("x")
            } else {
                let mut s = String::from("s");
                s.push_str(itoa(2 * j - 1).as_str());
                s
            }
        });
        f.write_str(&named)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    #[test]
    fn arithmetic_and_derivative() {
        // p = x^2 s3 + 2x
        let x = MultiPoly::var(1);
        let s3 = MultiPoly::var(2);
        let p = x.mul(&x).mul(&s3).add(&x.scale(&rat(2, 1)));
        // dp/dx = 2 x s3 + 2
        let dp = p.deriv(1);
        let expect = x
            .mul(&s3)
            .scale(&rat(2, 1))
            .add(&MultiPoly::constant(rat(2, 1)));
        assert_eq!(dp, expect);
        // dp/ds3 = x^2
        assert_eq!(p.deriv(2), x.mul(&x));
        // dp/ds5 = 0
        assert!(p.deriv(3).is_zero());
    }

    #[test]
    fn eval_exact() {
        let x = MultiPoly::var(1);
        let s3 = MultiPoly::var(2);
        let p = x.mul(&x).mul(&s3).add(&x.scale(&rat(2, 1)));
        // at x=3, s3=1/2: 9/2 + 6 = 21/2
        let v = p.eval_rat(|j| if j == 1 { rat(3, 1) } else { rat(1, 2) });
        assert_eq!(v, rat(21, 2));
    }

    #[test]
    fn display_canonical() {
        let x = MultiPoly::var(1);
        let s3 = MultiPoly::var(2);
        let p = x
            .mul(&x)
            .scale(&rat(-1, 1))
            .add(&s3.scale(&rat(1, 3)))
            .add(&MultiPoly::one());
        assert_eq!(alloc::format!("{p}"), "1 + -x^2 + 1/3*s3");
    }
}
