//! Differential polynomials in an abstract potential u and its x-derivatives,
//! with exact rational coefficients and the total-derivative derivation D
//! (D u^(i) = u^(i+1), extended by the product rule).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::q::{format_rat, Rat};
use crate::real::{Real, RealCtx};
use crate::Result;

/// Monomial in u, u', u'', ...: sorted (derivative order, exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct UMonomial(Vec<(u32, u32)>);

impl UMonomial {
    pub fn unit() -> Self {
        UMonomial(Vec::new())
    }

    pub fn u_deriv(order: u32) -> Self {
        UMonomial(alloc::vec![(order, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable_by_key(|&(o, _)| o);
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (o, e) in pairs {
            match out.last_mut() {
                Some((lo, le)) if *lo == o => *le += e,
                _ => out.push((o, e)),
            }
        }
        UMonomial(out)
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    fn mul(&self, other: &UMonomial) -> UMonomial {
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&other.0);
        UMonomial::from_pairs(pairs)
    }
}

/// Sparse differential polynomial; zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<UMonomial, Rat>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(UMonomial::unit(), c);
        }
        DiffPoly { terms }
    }

    /// The i-th derivative of u as a polynomial (i = 0 is u itself).
    pub fn u_deriv(order: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(UMonomial::u_deriv(order), Rat::one());
        DiffPoly { terms }
    }

    pub fn u() -> Self {
        DiffPoly::u_deriv(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UMonomial, &Rat)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: UMonomial, c: Rat) {
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

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// The derivation D: product rule over each monomial, D u^(i) = u^(i+1).
    pub fn derivation(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (idx, &(o, e)) in m.pairs().iter().enumerate() {
                let mut pairs: Vec<(u32, u32)> = m.pairs().to_vec();
                pairs[idx].1 -= 1;
                pairs.push((o + 1, 1));
                out.add_term(
                    UMonomial::from_pairs(pairs),
                    c * Rat::from_integer(e.into()),
                );
            }
        }
        out
    }

    /// Iterated derivation.
    pub fn derivation_n(&self, n: u32) -> DiffPoly {
        let mut acc = self.clone();
        for _ in 0..n {
            acc = acc.derivation();
        }
        acc
    }

    /// Highest derivative order of u appearing.
    pub fn max_u_order(&self) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(o, _)| o))
            .max()
    }

    /// Substitutes numeric values for u, u', u''...; `u_values[i]` is the
    /// value of the i-th derivative.
    pub fn eval(&self, ctx: &RealCtx, u_values: &[Real]) -> Result<Real> {
        let mut acc = ctx.zero();
        for (m, c) in &self.terms {
            let mut t = ctx.from_rat(c);
            for &(o, e) in m.pairs() {
                let v = u_values
                    .get(o as usize)
                    .ok_or(Error::InvalidArgument("missing u-derivative value"))?;
                let p = ctx.powi(v, e as i32);
                t = ctx.mul(&t, &p);
            }
            acc = ctx.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Canonical rendering with u, u', u'', u^(k) factors.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let name = |o: u32| -> String {
            match o {
                0 => String::from("u"),
                1 => String::from("u'"),
                2 => String::from("u''"),
                3 => String::from("u'''"),
                k => {
                    let mut s = String::from("u^(");
                    s.push_str(&itoa(k));
                    s.push(')');
                    s
                }
            }
        };
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in &self.terms {
            let mut s = String::new();
            if m.pairs().is_empty() {
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
                for &(o, e) in m.pairs() {
                    if !first {
                        s.push('*');
                    }
                    first = false;
                    s.push_str(&name(o));
                    if e > 1 {
                        s.push('^');
                        s.push_str(&itoa(e));
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
