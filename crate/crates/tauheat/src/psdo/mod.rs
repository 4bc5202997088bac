//! Pseudo-differential operator calculus over differential polynomials:
//! truncated Laurent series in the derivation symbol d with DiffPoly
//! coefficients, sum a_m d^m.
//!
//! Multiplication implements d o a = a d + (Da) and, for negative powers,
//! d^-1 o a = sum_{r>=0} (-1)^r (D^r a) d^(-1-r), truncated with explicit
//! bookkeeping: every operator carries the lowest order at which its
//! coefficients are trustworthy, and every operation propagates it. Silent
//! truncation is the classic bug source in symbol calculi; nothing here is
//! silent.
//!
//! On top of the raw calculus: the square root L^(1/2) = d + sum a_i d^-i of
//! L = d^2 + u by order-by-order matching of S^2 = L, the differential parts
//! (L^(j/2))_+, and the Lax right-hand sides [(L^(j/2))_+, L], which must be
//! multiplication operators (order-zero coefficients only).

pub mod diffpoly;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Zero;

pub use diffpoly::{DiffPoly, UMonomial};

use crate::error::Error;
use crate::expr::tau::TauFunction;
use crate::oracle::PotentialEvaluator;
use crate::q::{gen_binomial, rat, Rat};
use crate::real::{Real, RealCtx};
use crate::sato::w_coeff;
use crate::Result;

/// Lowest order at which an operator's coefficients are correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trust {
    /// Every stored coefficient is exact and every absent one is zero.
    Exact,
    /// Orders >= the bound are correct; anything below was discarded.
    Truncated(i64),
}

impl Trust {
    fn combine(a: Trust, b: Trust) -> Trust {
        match (a, b) {
            (Trust::Exact, t) | (t, Trust::Exact) => t,
            (Trust::Truncated(x), Trust::Truncated(y)) => Trust::Truncated(x.max(y)),
        }
    }
}

/// A pseudo-differential operator sum_m a_m d^m with tracked truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdOp {
    coeffs: BTreeMap<i64, DiffPoly>,
    trust: Trust,
}

impl PsdOp {
    pub fn zero() -> Self {
        PsdOp {
            coeffs: BTreeMap::new(),
            trust: Trust::Exact,
        }
    }

    /// The Schrodinger operator L = d^2 + u.
    pub fn schrodinger() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(2, DiffPoly::one());
        coeffs.insert(0, DiffPoly::u());
        PsdOp {
            coeffs,
            trust: Trust::Exact,
        }
    }

    /// The bare derivation d.
    pub fn derivation() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1, DiffPoly::one());
        PsdOp {
            coeffs,
            trust: Trust::Exact,
        }
    }

    /// d^-1 carried to the given truncation depth (orders >= -depth trusted).
    pub fn inverse_derivation(depth: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(-1, DiffPoly::one());
        PsdOp {
            coeffs,
            trust: Trust::Truncated(-(depth as i64)),
        }
    }

    /// Multiplication operator by a differential polynomial.
    pub fn multiplication(a: DiffPoly) -> Self {
        let mut coeffs = BTreeMap::new();
        if !a.is_zero() {
            coeffs.insert(0, a);
        }
        PsdOp {
            coeffs,
            trust: Trust::Exact,
        }
    }

    pub fn trust(&self) -> Trust {
        self.trust
    }

    pub fn coeff(&self, order: i64) -> DiffPoly {
        self.coeffs.get(&order).cloned().unwrap_or_else(DiffPoly::zero)
    }

    /// Coefficient with a trust check.
    pub fn coeff_checked(&self, order: i64) -> Result<DiffPoly> {
        if let Trust::Truncated(t) = self.trust {
            if order < t {
                return Err(Error::TruncationExceeded {
                    requested: order,
                    trusted: t,
                });
            }
        }
        Ok(self.coeff(order))
    }

    pub fn orders(&self) -> impl Iterator<Item = (&i64, &DiffPoly)> {
        self.coeffs.iter()
    }

    pub fn max_order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_order(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    fn insert(&mut self, order: i64, c: DiffPoly) {
        if c.is_zero() {
            self.coeffs.remove(&order);
        } else {
            self.coeffs.insert(order, c);
        }
    }

    fn add_at(&mut self, order: i64, c: &DiffPoly) {
        let cur = self.coeff(order);
        self.insert(order, cur.add(c));
    }

    pub fn add(&self, other: &PsdOp) -> PsdOp {
        let mut out = self.clone();
        out.trust = Trust::combine(self.trust, other.trust);
        for (&m, c) in &other.coeffs {
            out.add_at(m, c);
        }
        out.drop_untrusted();
        out
    }

    pub fn sub(&self, other: &PsdOp) -> PsdOp {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, c: &Rat) -> PsdOp {
        PsdOp {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&m, a)| (m, a.scale(c)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
            trust: self.trust,
        }
    }

    fn drop_untrusted(&mut self) {
        if let Trust::Truncated(t) = self.trust {
            self.coeffs.retain(|&m, _| m >= t);
        }
    }

    /// Differential part (orders >= 0). Exact whenever the operator was
    /// trusted down to order 0.
    pub fn plus_part(&self) -> PsdOp {
        let trust = match self.trust {
            Trust::Exact => Trust::Exact,
            Trust::Truncated(t) if t <= 0 => Trust::Exact,
            Trust::Truncated(t) => Trust::Truncated(t),
        };
        PsdOp {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&m, _)| m >= 0)
                .map(|(&m, c)| (m, c.clone()))
                .collect(),
            trust,
        }
    }

    /// Integral (Volterra) part (orders < 0); trust carries over.
    pub fn minus_part(&self) -> PsdOp {
        PsdOp {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&m, _)| m < 0)
                .map(|(&m, c)| (m, c.clone()))
                .collect(),
            trust: self.trust,
        }
    }

    /// Raw product keeping orders >= floor; no trust logic.
    fn mul_with_floor(&self, other: &PsdOp, floor: Option<i64>) -> PsdOp {
        let mut out = PsdOp::zero();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                // d^i o b = sum_r C(i, r) (D^r b) d^(i-r)
                let mut r: i64 = 0;
                let mut db = b.clone();
                loop {
                    let target = i + j - r;
                    if let Some(f) = floor {
                        if target < f {
                            break;
                        }
                    }
                    let cir = gen_binomial(&Rat::from_integer(i.into()), r as u32);
                    if !cir.is_zero() {
                        let term = a.mul(&db).scale(&cir);
                        out.add_at(target, &term);
                    }
                    r += 1;
                    if i >= 0 && r > i {
                        break; // finite Leibniz expansion
                    }
                    if floor.is_none() {
                        break; // unreachable: infinite expansion demands a floor
                    }
                    db = db.derivation();
                }
            }
        }
        out
    }

    /// Operator product with truncation propagation. Errors when an infinite
    /// expansion arises with no truncation bound on either operand, or when
    /// the operands' trusted ranges leave no trusted output orders.
    pub fn mul(&self, other: &PsdOp) -> Result<PsdOp> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(PsdOp::zero());
        }
        let maxord_a = self.max_order().unwrap();
        let maxord_b = other.max_order().unwrap();
        let la = match self.trust {
            Trust::Exact => None,
            Trust::Truncated(t) => Some(t + maxord_b),
        };
        let lb = match other.trust {
            Trust::Exact => None,
            Trust::Truncated(t) => Some(t + maxord_a),
        };
        let trust_floor = match (la, lb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.max(y)),
        };
        let needs_floor = self.min_order().unwrap() < 0;
        let floor = match (trust_floor, needs_floor) {
            (Some(f), _) => Some(f),
            (None, false) => None,
            (None, true) => {
                return Err(Error::TruncationExceeded {
                    requested: i64::MIN,
                    trusted: 0,
                })
            }
        };
        if let Some(f) = floor {
            if f > maxord_a + maxord_b {
                return Err(Error::TruncationExceeded {
                    requested: maxord_a + maxord_b,
                    trusted: f,
                });
            }
        }
        let mut out = self.mul_with_floor(other, floor);
        out.trust = match floor {
            None => Trust::Exact,
            Some(f) => Trust::Truncated(f),
        };
        out.drop_untrusted();
        Ok(out)
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &PsdOp) -> Result<PsdOp> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    /// Formal adjoint of a purely differential operator:
    /// (sum a_m d^m)* = sum (-d)^m o a_m.
    pub fn adjoint_differential(&self) -> Result<PsdOp> {
        if self.min_order().unwrap_or(0) < 0 {
            return Err(Error::InvalidArgument(
                "adjoint implemented for differential parts only",
            ));
        }
        let mut out = PsdOp::zero();
        for (&m, a) in &self.coeffs {
            let mut da = a.clone();
            for r in 0..=m {
                let c = gen_binomial(&Rat::from_integer(m.into()), r as u32)
                    * if m % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
                out.add_at(m - r, &da.scale(&c));
                da = da.derivation();
            }
        }
        out.trust = self.trust;
        Ok(out)
    }
}

/// L^(1/2) = d + sum_{i=1}^{depth} a_i d^-i with S^2 = L exactly through
/// order -depth+1; leading coefficients a_1 = u/2, a_2 = -u'/4.
pub fn sqrt_l(depth: u32) -> PsdOp {
    let l = PsdOp::schrodinger();
    let floor = -(depth as i64) - 1;
    let mut s = PsdOp::derivation();
    for t in 1..=depth as i64 {
        let s2 = s.mul_with_floor(&s, Some(floor));
        let r = l.sub(&PsdOp {
            coeffs: s2.coeffs,
            trust: Trust::Exact,
        });
        let a_t = r.coeff(1 - t).scale(&rat(1, 2));
        s.insert(-t, a_t);
    }
    s.trust = Trust::Truncated(-(depth as i64));
    s
}

/// Odd power (L^(j/2)) to the working depth, as S^j.
fn l_half_power(j: u32, depth: u32) -> Result<PsdOp> {
    let s = sqrt_l(depth);
    let mut p = s.clone();
    for _ in 1..j {
        p = p.mul(&s)?;
    }
    Ok(p)
}

/// The Lax right-hand side [(L^(j/2))_+, L] for odd j, returned as the
/// differential polynomial it multiplies by. The commutator must have no
/// coefficients at positive orders; a nonzero one means the calculus broke
/// and is reported as an error rather than truncated away.
pub fn lax_rhs(j: u32, depth: u32) -> Result<DiffPoly> {
    if j % 2 == 0 {
        return Err(Error::InvalidArgument("lax_rhs takes odd j"));
    }
    if depth < j + 2 {
        return Err(Error::InvalidArgument("depth must be at least j + 2"));
    }
    let p = l_half_power(j, depth)?;
    let plus = p.plus_part();
    match plus.trust {
        Trust::Exact => {}
        Trust::Truncated(t) => {
            return Err(Error::TruncationExceeded {
                requested: 0,
                trusted: t,
            })
        }
    }
    let l = PsdOp::schrodinger();
    let c = plus.commutator(&l)?;
    for (&m, a) in c.orders() {
        if m > 0 && !a.is_zero() {
            return Err(Error::NotMultiplicationOperator(m));
        }
        if m < 0 && !a.is_zero() {
            return Err(Error::NotMultiplicationOperator(m));
        }
    }
    Ok(c.coeff(0))
}

/// Residual of the diagonal flow identity
/// [(L^((2n-1)/2))_+, L] = 2 d_x W_{2n}(x,x): the left side evaluated through
/// the differential-polynomial calculus with u-derivatives from tau, the
/// right side from the exact x- and y-derivatives of the kernel coefficient.
pub fn lax_vs_wkernel(
    tau: &Arc<TauFunction>,
    n: u32,
    x: &Rat,
    times: &BTreeMap<u32, Rat>,
    precision: u32,
) -> Result<Real> {
    if n == 0 {
        return Err(Error::InvalidArgument("flow identity needs n >= 1"));
    }
    let j = 2 * n - 1;
    let rhs_poly = lax_rhs(j, j + 2)?;
    let mut ctx = RealCtx::new(precision + 10);
    let max_order = rhs_poly.max_u_order().unwrap_or(0);
    let pot = PotentialEvaluator::new(tau.clone(), max_order);
    let uvals = pot.u_derivative_values(&mut ctx, x, times)?;
    let lhs = rhs_poly.eval(&ctx, &uvals)?;
    // d/dx of W_{2n}(x,x) = (d_x W + d_y W)|_{y=x}
    let w = w_coeff(tau, 2 * n);
    let dw = w.expr().deriv_x().add(&w.expr().deriv_y());
    let dwv = dw.eval_diag(&mut ctx, x, times)?;
    let rhs = ctx.mul(&ctx.from_i64(2), &dwv);
    let r = ctx.sub(&lhs, &rhs);
    Ok(ctx.abs(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    #[test]
    fn leibniz_rule_d_after_u() {
        // d o u = u d + u'
        let d = PsdOp::derivation();
        let u = PsdOp::multiplication(DiffPoly::u());
        let p = d.mul(&u).unwrap();
        assert_eq!(p.coeff(1), DiffPoly::u());
        assert_eq!(p.coeff(0), DiffPoly::u_deriv(1));
        assert_eq!(p.trust(), Trust::Exact);
    }

    #[test]
    fn volterra_expansion_example() {
        // d^-1 o u truncated at depth 3 -> u d^-1 - u' d^-2 + u'' d^-3
        let dinv = PsdOp::inverse_derivation(3);
        let u = PsdOp::multiplication(DiffPoly::u());
        let p = dinv.mul(&u).unwrap();
        assert_eq!(p.coeff(-1), DiffPoly::u());
        assert_eq!(p.coeff(-2), DiffPoly::u_deriv(1).scale(&rat(-1, 1)));
        assert_eq!(p.coeff(-3), DiffPoly::u_deriv(2));
        assert_eq!(p.trust(), Trust::Truncated(-3));
        assert!(p.coeff_checked(-4).is_err());
    }

    #[test]
    fn l_squared_by_hand() {
        // (d^2 + u)(d^2 + u) = d^4 + 2u d^2 + 2u' d + (u'' + u^2)
        let l = PsdOp::schrodinger();
        let p = l.mul(&l).unwrap();
        assert_eq!(p.coeff(4), DiffPoly::one());
        assert_eq!(p.coeff(3), DiffPoly::zero());
        assert_eq!(p.coeff(2), DiffPoly::u().scale(&rat(2, 1)));
        assert_eq!(p.coeff(1), DiffPoly::u_deriv(1).scale(&rat(2, 1)));
        assert_eq!(
            p.coeff(0),
            DiffPoly::u_deriv(2).add(&DiffPoly::u().mul(&DiffPoly::u()))
        );
        assert_eq!(p.trust(), Trust::Exact);
    }

    #[test]
    fn sqrt_l_leading_coefficients() {
        let s = sqrt_l(6);
        assert_eq!(s.coeff(1), DiffPoly::one());
        assert_eq!(s.coeff(0), DiffPoly::zero());
        assert_eq!(s.coeff(-1), DiffPoly::u().scale(&rat(1, 2)));
        assert_eq!(s.coeff(-2), DiffPoly::u_deriv(1).scale(&rat(-1, 4)));
        // a_3 = (u'' - u^2)/8
        assert_eq!(
            s.coeff(-3),
            DiffPoly::u_deriv(2)
                .sub(&DiffPoly::u().mul(&DiffPoly::u()))
                .scale(&rat(1, 8))
        );
    }

    #[test]
    fn sqrt_l_squares_back_to_l() {
        let depth = 7;
        let s = sqrt_l(depth);
        let p = s.mul(&s).unwrap();
        // trusted through order -depth+1
        assert_eq!(p.trust(), Trust::Truncated(-(depth as i64) + 1));
        let l = PsdOp::schrodinger();
        for m in (-(depth as i64) + 1)..=2 {
            assert_eq!(p.coeff(m), l.coeff(m), "order {m}");
        }
    }

    #[test]
    fn fractional_power_consistency() {
        // (L^(1/2))^(2m) == L^m through the tracked order, m <= 3
        let depth = 9;
        let s = sqrt_l(depth);
        let l = PsdOp::schrodinger();
        for m in 1..=3u32 {
            let mut spow = s.clone();
            for _ in 1..(2 * m) {
                spow = spow.mul(&s).unwrap();
            }
            let mut lpow = l.clone();
            for _ in 1..m {
                lpow = lpow.mul(&l).unwrap();
            }
            let t = match spow.trust() {
                Trust::Truncated(t) => t,
                Trust::Exact => -(depth as i64),
            };
            for ord in t..=(2 * m as i64) {
                assert_eq!(spow.coeff(ord), lpow.coeff(ord), "m={m} order {ord}");
            }
        }
    }

    #[test]
    fn lax_rhs_low_orders() {
        // j = 1: u'; j = 3: (u''' + 6 u u')/4
        assert_eq!(lax_rhs(1, 3).unwrap(), DiffPoly::u_deriv(1));
        let kdv = DiffPoly::u_deriv(3)
            .scale(&rat(1, 4))
            .add(&DiffPoly::u().mul(&DiffPoly::u_deriv(1)).scale(&rat(3, 2)));
        assert_eq!(lax_rhs(3, 5).unwrap(), kdv);
    }

    #[test]
    fn lax_rhs_fifth_flow() {
        // j = 5: (u^(5) + 10 u u''' + 20 u' u'' + 30 u^2 u')/16
        let expect = DiffPoly::u_deriv(5)
            .add(&DiffPoly::u().mul(&DiffPoly::u_deriv(3)).scale(&rat(10, 1)))
            .add(
                &DiffPoly::u_deriv(1)
                    .mul(&DiffPoly::u_deriv(2))
                    .scale(&rat(20, 1)),
            )
            .add(
                &DiffPoly::u()
                    .mul(&DiffPoly::u())
                    .mul(&DiffPoly::u_deriv(1))
                    .scale(&rat(30, 1)),
            )
            .scale(&rat(1, 16));
        assert_eq!(lax_rhs(5, 7).unwrap(), expect);
    }

    #[test]
    fn free_potential_flows_vanish() {
        // u = 0: every flow rhs evaluates to zero
        let ctx = RealCtx::new(30);
        for j in [1u32, 3, 5] {
            let p = lax_rhs(j, j + 2).unwrap();
            let zeros = alloc::vec![ctx.zero(); (p.max_u_order().unwrap_or(0) + 1) as usize];
            let v = p.eval(&ctx, &zeros).unwrap();
            assert!(v.is_zero() || v.to_f64().abs() < 1e-25);
        }
    }

    #[test]
    fn adjoint_involution_on_differential_parts() {
        // (AB)* = B* A* for A = d^2 + u, B = u d
        let a = PsdOp::schrodinger();
        let b = {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(1, DiffPoly::u());
            PsdOp {
                coeffs,
                trust: Trust::Exact,
            }
        };
        let ab = a.mul(&b).unwrap();
        let lhs = ab.adjoint_differential().unwrap();
        let rhs = b
            .adjoint_differential()
            .unwrap()
            .mul(&a.adjoint_differential().unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        // and adjoint is an involution
        assert_eq!(lhs.adjoint_differential().unwrap(), ab);
    }

    #[test]
    fn associativity_up_to_truncation() {
        let a = sqrt_l(8);
        let b = PsdOp::schrodinger();
        let c = {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(-1, DiffPoly::u_deriv(1));
            coeffs.insert(1, DiffPoly::u());
            PsdOp {
                coeffs,
                trust: Trust::Truncated(-8),
            }
        };
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        let t = match (ab_c.trust(), a_bc.trust()) {
            (Trust::Truncated(x), Trust::Truncated(y)) => x.max(y),
            _ => -8,
        };
        let hi = ab_c.max_order().unwrap().max(a_bc.max_order().unwrap());
        for m in t..=hi {
            assert_eq!(ab_c.coeff(m), a_bc.coeff(m), "order {m}");
        }
    }
}
