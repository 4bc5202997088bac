//! Rational-in-(x-y) expressions with exponential-polynomial coefficients:
//! finite sums of
//!
//!    c * (x-y)^(-pole) * A(x) * B(y),   A = N / tau^p,  B = M / tau^q,
//!
//! with N, M exponential-polynomial and a single shared tau-function in the
//! denominators. Closed under d/dx and d/dy, which is what the Hadamard sum,
//! the recursion oracle, and the flow checks all lean on. Expressions in x
//! alone (wave coefficients, the potential u and its derivatives) are the
//! special case with B = 1 and pole = 0.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::expr::tau::{ExpPoly, SpatialPoint, TauFunction};
use crate::q::Rat;
use crate::real::{Real, RealCtx};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatExpTerm {
    pub coeff: Rat,
    /// Power of (x-y)^(-pole); negative values mean positive powers of (x-y).
    pub pole: i32,
    pub x_num: ExpPoly,
    pub x_den_pow: u32,
    pub y_num: ExpPoly,
    pub y_den_pow: u32,
}

/// Sum of RatExpTerms over a shared tau-function.
#[derive(Debug, Clone)]
pub struct RatExpExpression {
    tau: Arc<TauFunction>,
    terms: Vec<RatExpTerm>,
}

impl RatExpExpression {
    pub fn zero(tau: Arc<TauFunction>) -> Self {
        RatExpExpression {
            tau,
            terms: Vec::new(),
        }
    }

    pub fn constant(tau: Arc<TauFunction>, c: Rat) -> Self {
        let mut e = RatExpExpression::zero(tau);
        if !c.is_zero() {
            e.terms.push(RatExpTerm {
                coeff: c,
                pole: 0,
                x_num: ExpPoly::one(),
                x_den_pow: 0,
                y_num: ExpPoly::one(),
                y_den_pow: 0,
            });
        }
        e
    }

    /// A single x-side ratio N / tau(x)^p.
    pub fn x_ratio(tau: Arc<TauFunction>, num: ExpPoly, den_pow: u32) -> Self {
        let mut e = RatExpExpression::zero(tau);
        if !num.is_zero() {
            e.terms.push(RatExpTerm {
                coeff: Rat::one(),
                pole: 0,
                x_num: num,
                x_den_pow: den_pow,
                y_num: ExpPoly::one(),
                y_den_pow: 0,
            });
        }
        e
    }

    pub fn tau(&self) -> &Arc<TauFunction> {
        &self.tau
    }

    pub fn terms(&self) -> &[RatExpTerm] {
        &self.terms
    }

    pub fn push(&mut self, term: RatExpTerm) {
        if !term.coeff.is_zero() && !term.x_num.is_zero() && !term.y_num.is_zero() {
            self.terms.push(term);
        }
    }

    /// Structurally zero: no terms survive normalization. For tau = 1 the
    /// kernel coefficients W_n (n >= 1) and all H_n come out in this form,
    /// which is what makes the free-case degeneracy exact rather than numeric.
    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &RatExpExpression) -> RatExpExpression {
        debug_assert!(Arc::ptr_eq(&self.tau, &other.tau) || self.tau == other.tau);
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.compress();
        out
    }

    pub fn scale(&self, c: &Rat) -> RatExpExpression {
        if c.is_zero() {
            return RatExpExpression::zero(self.tau.clone());
        }
        RatExpExpression {
            tau: self.tau.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| RatExpTerm {
                    coeff: &t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Merges terms with identical structure (pole and all four factors).
    pub fn compress(&mut self) {
        let mut grouped: BTreeMap<(i32, u32, u32), Vec<RatExpTerm>> = BTreeMap::new();
        for t in self.terms.drain(..) {
            grouped
                .entry((t.pole, t.x_den_pow, t.y_den_pow))
                .or_default()
                .push(t);
        }
        for (_, bucket) in grouped {
            let mut merged: Vec<RatExpTerm> = Vec::with_capacity(bucket.len());
            'outer: for t in bucket {
                for m in merged.iter_mut() {
                    if m.x_num == t.x_num && m.y_num == t.y_num {
                        m.coeff += &t.coeff;
                        continue 'outer;
                    }
                }
                merged.push(t);
            }
            self.terms
                .extend(merged.into_iter().filter(|t| !t.coeff.is_zero()));
        }
    }

    /// Exact derivative with respect to x. Three contributions per term:
    /// the pole, the numerator, and the tau-denominator.
    pub fn deriv_x(&self) -> RatExpExpression {
        let tau_expr = self.tau.expr();
        let dtau = tau_expr.deriv(1);
        let mut out = RatExpExpression::zero(self.tau.clone());
        for t in &self.terms {
            if t.pole != 0 {
                out.push(RatExpTerm {
                    coeff: &t.coeff * Rat::from_integer((-t.pole).into()),
                    pole: t.pole + 1,
                    ..t.clone()
                });
            }
            let dn = t.x_num.deriv(1);
            if !dn.is_zero() {
                out.push(RatExpTerm {
                    x_num: dn,
                    coeff: t.coeff.clone(),
                    ..t.clone()
                });
            }
            if t.x_den_pow > 0 {
                out.push(RatExpTerm {
                    coeff: &t.coeff * Rat::from_integer((-(t.x_den_pow as i64)).into()),
                    x_num: t.x_num.mul(&dtau),
                    x_den_pow: t.x_den_pow + 1,
                    ..t.clone()
                });
            }
        }
        out.compress();
        out
    }

    /// Exact derivative with respect to y.
    pub fn deriv_y(&self) -> RatExpExpression {
        let tau_expr = self.tau.expr();
        let dtau = tau_expr.deriv(1);
        let mut out = RatExpExpression::zero(self.tau.clone());
        for t in &self.terms {
            if t.pole != 0 {
                out.push(RatExpTerm {
                    coeff: &t.coeff * Rat::from_integer((t.pole).into()),
                    pole: t.pole + 1,
                    ..t.clone()
                });
            }
            let dn = t.y_num.deriv(1);
            if !dn.is_zero() {
                out.push(RatExpTerm {
                    y_num: dn,
                    coeff: t.coeff.clone(),
                    ..t.clone()
                });
            }
            if t.y_den_pow > 0 {
                out.push(RatExpTerm {
                    coeff: &t.coeff * Rat::from_integer((-(t.y_den_pow as i64)).into()),
                    y_num: t.y_num.mul(&dtau),
                    y_den_pow: t.y_den_pow + 1,
                    ..t.clone()
                });
            }
        }
        out.compress();
        out
    }

    /// Multiplies every term's x-side by num / tau(x)^den_pow.
    pub fn mul_x_ratio(&self, num: &ExpPoly, den_pow: u32) -> RatExpExpression {
        RatExpExpression {
            tau: self.tau.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| RatExpTerm {
                    x_num: t.x_num.mul(num),
                    x_den_pow: t.x_den_pow + den_pow,
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Highest pole order present.
    pub fn max_pole(&self) -> i32 {
        self.terms.iter().map(|t| t.pole).max().unwrap_or(0)
    }

    /// Applies the Schrodinger operator L = d^2/dx^2 + u on the x side, with
    /// u = 2 (log tau)'' = 2 tau''/tau - 2 (tau'/tau)^2.
    pub fn schrodinger_apply(&self) -> RatExpExpression {
        let d2 = self.deriv_x().deriv_x();
        let tau_expr = self.tau.expr();
        let dt = tau_expr.deriv(1);
        let ddt = dt.deriv(1);
        let two = Rat::from_integer(2.into());
        let minus_two = Rat::from_integer((-2).into());
        let u_num = self.mul_x_ratio(&ddt.scale(&two), 1);
        let u_sq = self.mul_x_ratio(&dt.mul(&dt).scale(&minus_two), 2);
        d2.add(&u_num).add(&u_sq)
    }

    fn eval_with_points(
        &self,
        ctx: &mut RealCtx,
        px: &mut SpatialPoint<'_>,
        py: &mut SpatialPoint<'_>,
        dxy: Option<&Real>,
    ) -> Result<Real> {
        // tau values once per side, reused across terms
        let tau_expr = self.tau.expr();
        let need_x_den = self.terms.iter().any(|t| t.x_den_pow > 0);
        let need_y_den = self.terms.iter().any(|t| t.y_den_pow > 0);
        let tau_x = if need_x_den {
            let v = tau_expr.eval(ctx, px);
            if v.is_zero() {
                return Err(Error::DenominatorZero);
            }
            Some(v)
        } else {
            None
        };
        let tau_y = if need_y_den {
            let v = tau_expr.eval(ctx, py);
            if v.is_zero() {
                return Err(Error::DenominatorZero);
            }
            Some(v)
        } else {
            None
        };
        let dxy_val = match dxy {
            Some(d) => {
                if d.is_zero() && self.terms.iter().any(|t| t.pole > 0) {
                    return Err(Error::DiagonalEvaluation);
                }
                Some(d.clone())
            }
            None => {
                if self.terms.iter().any(|t| t.pole != 0) {
                    return Err(Error::DiagonalEvaluation);
                }
                None
            }
        };
        let mut acc = ctx.zero();
        for t in &self.terms {
            let mut v = ctx.from_rat(&t.coeff);
            if t.pole != 0 {
                let d = dxy_val.as_ref().expect("pole without separation");
                let p = ctx.powi(d, -t.pole);
                v = ctx.mul(&v, &p);
            }
            if !t.x_num.is_one() {
                let n = t.x_num.eval(ctx, px);
                v = ctx.mul(&v, &n);
            }
            if t.x_den_pow > 0 {
                let d = ctx.powi(tau_x.as_ref().expect("tau(x)"), t.x_den_pow as i32);
                v = ctx.div(&v, &d);
            }
            if !t.y_num.is_one() {
                let n = t.y_num.eval(ctx, py);
                v = ctx.mul(&v, &n);
            }
            if t.y_den_pow > 0 {
                let d = ctx.powi(tau_y.as_ref().expect("tau(y)"), t.y_den_pow as i32);
                v = ctx.div(&v, &d);
            }
            acc = ctx.add(&acc, &v);
        }
        Ok(acc)
    }

    /// Evaluation at exact rational coordinates (x, y) with shared times.
    pub fn eval_rat(
        &self,
        ctx: &mut RealCtx,
        x: &Rat,
        y: &Rat,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        let mut px = SpatialPoint::from_rat(ctx, x, times);
        let mut py = SpatialPoint::from_rat(ctx, y, times);
        let d = x - y;
        let dr = ctx.from_rat(&d);
        self.eval_with_points(ctx, &mut px, &mut py, Some(&dr))
    }

    /// Evaluation with Real coordinates (quadrature nodes).
    pub fn eval_real(
        &self,
        ctx: &mut RealCtx,
        x: &Real,
        y: &Real,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        let mut px = SpatialPoint::from_real(x.clone(), times);
        let mut py = SpatialPoint::from_real(y.clone(), times);
        let d = ctx.sub(x, y);
        self.eval_with_points(ctx, &mut px, &mut py, Some(&d))
    }

    /// Mixed evaluation: Real x (a quadrature node), rational y.
    pub fn eval_real_rat(
        &self,
        ctx: &mut RealCtx,
        x: &Real,
        y: &Rat,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        let mut px = SpatialPoint::from_real(x.clone(), times);
        let mut py = SpatialPoint::from_rat(ctx, y, times);
        let yr = ctx.from_rat(y);
        let d = ctx.sub(x, &yr);
        self.eval_with_points(ctx, &mut px, &mut py, Some(&d))
    }

    /// Diagonal evaluation (x = y). Errors with DiagonalEvaluation when any
    /// pole term is present.
    pub fn eval_diag(
        &self,
        ctx: &mut RealCtx,
        x: &Rat,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        if self.terms.iter().any(|t| t.pole > 0) {
            return Err(Error::DiagonalEvaluation);
        }
        let mut px = SpatialPoint::from_rat(ctx, x, times);
        let mut py = SpatialPoint::from_rat(ctx, x, times);
        let zero = ctx.zero();
        self.eval_with_points(ctx, &mut px, &mut py, Some(&zero))
    }

    /// Evaluation of an x-only expression (every term has pole = 0 and
    /// trivial y-side).
    pub fn eval_x_only(
        &self,
        ctx: &mut RealCtx,
        x: &Rat,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        self.eval_diag(ctx, x, times)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::tau::EvalPoint;
    use crate::q::rat;

    #[test]
    fn pole_arithmetic() {
        // (x-y)^{-1} * (1/x - 1/y) at (1,2) = (-1) * (1/2) = -1/2;
        // term built over tau = x so that 1/x = tau'/tau with tau' = 1
        let tau = TauFunction::make_rational(1).unwrap();
        let one = ExpPoly::one();
        let mut e = RatExpExpression::zero(tau.clone());
        e.push(RatExpTerm {
            coeff: rat(1, 1),
            pole: 1,
            x_num: one.clone(),
            x_den_pow: 1,
            y_num: one.clone(),
            y_den_pow: 0,
        });
        e.push(RatExpTerm {
            coeff: rat(-1, 1),
            pole: 1,
            x_num: one.clone(),
            x_den_pow: 0,
            y_num: one.clone(),
            y_den_pow: 1,
        });
        let mut ctx = RealCtx::new(40);
        let v = e
            .eval_rat(&mut ctx, &rat(1, 1), &rat(2, 1), &BTreeMap::new())
            .unwrap();
        assert!((v.to_f64() + 0.5).abs() < 1e-30);
    }

    #[test]
    fn derivative_closure_matches_finite_differences() {
        // f(x,y) = (x-y)^{-2} * tau'(x)/tau(x) for the 1-soliton tau;
        // df/dx checked against a central difference
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        let dtau = tau.expr().deriv(1);
        let mut e = RatExpExpression::zero(tau.clone());
        e.push(RatExpTerm {
            coeff: rat(1, 1),
            pole: 2,
            x_num: dtau,
            x_den_pow: 1,
            y_num: ExpPoly::one(),
            y_den_pow: 0,
        });
        let de = e.deriv_x();
        let mut ctx = RealCtx::new(60);
        let times = BTreeMap::new();
        let x0 = rat(7, 10);
        let y0 = rat(-2, 5);
        let h = rat(1, 100000);
        let fp = e
            .eval_rat(&mut ctx, &(&x0 + &h), &y0, &times)
            .unwrap()
            .to_f64();
        let fm = e
            .eval_rat(&mut ctx, &(&x0 - &h), &y0, &times)
            .unwrap()
            .to_f64();
        let fd = (fp - fm) / (2.0 * 1e-5);
        let exact = de.eval_rat(&mut ctx, &x0, &y0, &times).unwrap().to_f64();
        assert!(
            (fd - exact).abs() < 1e-8,
            "fd {fd} vs exact {exact}"
        );
        let _ = EvalPoint::at_x(rat(0, 1), 20);
    }

    #[test]
    fn diagonal_pole_rejected() {
        let tau = TauFunction::make_rational(1).unwrap();
        let mut e = RatExpExpression::zero(tau);
        e.push(RatExpTerm {
            coeff: rat(1, 1),
            pole: 1,
            x_num: ExpPoly::one(),
            x_den_pow: 0,
            y_num: ExpPoly::one(),
            y_den_pow: 0,
        });
        let mut ctx = RealCtx::new(30);
        assert!(matches!(
            e.eval_rat(&mut ctx, &rat(1, 1), &rat(1, 1), &BTreeMap::new()),
            Err(Error::DiagonalEvaluation)
        ));
    }

    #[test]
    fn denominator_zero_detected() {
        let tau = TauFunction::make_rational(1).unwrap(); // tau = x vanishes at 0
        let e = RatExpExpression::x_ratio(tau, ExpPoly::one(), 1);
        let mut ctx = RealCtx::new(30);
        assert!(matches!(
            e.eval_x_only(&mut ctx, &rat(0, 1), &BTreeMap::new()),
            Err(Error::DenominatorZero)
        ));
    }
}
