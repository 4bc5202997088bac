//! Wave-function coefficients and the kernel coefficients W_n(x,y), plus the
//! property checks that certify a tau-function actually solves the hierarchy.
//!
//! The reduced wave function expands as Psibar = sum_k psi_k z^-k with
//! psi_k = S_k(-ptilde) tau / tau, the adjoint with the opposite sign, and the
//! product Psibar(x) Psibar*(y) = sum_n W_n(x,y) z^-n gives
//!
//!   W_n(x,y) = sum_{k=0}^n [S_k(-ptilde) tau(x)] [S_{n-k}(ptilde) tau(y)]
//!              / (tau(x) tau(y)).
//!
//! Two diagnostics: the bilinear residue res_z[z^{2n} Psi^{(l)} Psi*] (zero
//! for hierarchy solutions) and the order-by-order wave recurrence
//! (d^2 + u) psi_k + 2 psi'_{k+1} = 0.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::One;

use crate::error::Error;
use crate::expr::ratexp::{RatExpExpression, RatExpTerm};
use crate::expr::tau::{ExpPoly, TauFunction};
use crate::q::{binomial, Rat};
use crate::real::{Real, RealCtx};
use crate::schur::{schur_apply, SchurSign};
use crate::Result;

/// Which of the two wave functions a coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveSide {
    Wave,
    Adjoint,
}

impl WaveSide {
    fn schur_sign(self) -> SchurSign {
        match self {
            WaveSide::Wave => SchurSign::Minus,
            WaveSide::Adjoint => SchurSign::Plus,
        }
    }
}

/// psi_k or psi*_k as an x-only expression S_k(-+ptilde) tau / tau.
#[derive(Debug, Clone)]
pub struct WaveCoefficient {
    index: u32,
    side: WaveSide,
    expr: RatExpExpression,
}

impl WaveCoefficient {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn side(&self) -> WaveSide {
        self.side
    }

    pub fn expr(&self) -> &RatExpExpression {
        &self.expr
    }

    pub fn eval(&self, ctx: &mut RealCtx, x: &Rat, times: &BTreeMap<u32, Rat>) -> Result<Real> {
        self.expr.eval_x_only(ctx, x, times)
    }
}

/// psi_k (side = Wave) or psi*_k (side = Adjoint); psi_0 = psi*_0 = 1.
pub fn wave_coeff(tau: &Arc<TauFunction>, k: u32, side: WaveSide) -> WaveCoefficient {
    let expr = if k == 0 {
        RatExpExpression::constant(tau.clone(), Rat::one())
    } else {
        let num = schur_apply(tau, k, side.schur_sign());
        RatExpExpression::x_ratio(tau.clone(), num, 1)
    };
    WaveCoefficient {
        index: k,
        side,
        expr,
    }
}

/// W_n(x,y) as a pole-free RatExpExpression.
#[derive(Debug, Clone)]
pub struct WKernelCoefficient {
    index: u32,
    expr: RatExpExpression,
}

impl WKernelCoefficient {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn expr(&self) -> &RatExpExpression {
        &self.expr
    }

    /// Evaluation with a canonical reduction order: the n+1 product terms are
    /// evaluated side-by-side and summed after sorting, so the construction
    /// with the roles of (x, -) and (y, +) swapped produces bit-identical
    /// values at swapped points.
    pub fn eval(
        &self,
        ctx: &mut RealCtx,
        x: &Rat,
        y: &Rat,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        eval_products_sorted(&self.expr, ctx, x, y, times)
    }

    /// Diagonal value W_n(x,x).
    pub fn eval_diag(
        &self,
        ctx: &mut RealCtx,
        x: &Rat,
        times: &BTreeMap<u32, Rat>,
    ) -> Result<Real> {
        self.expr.eval_diag(ctx, x, times)
    }
}

fn w_expr(
    tau: &Arc<TauFunction>,
    n: u32,
    x_sign: SchurSign,
    y_sign: SchurSign,
) -> RatExpExpression {
    if n == 0 {
        return RatExpExpression::constant(tau.clone(), Rat::one());
    }
    let mut expr = RatExpExpression::zero(tau.clone());
    for k in 0..=n {
        let (x_num, x_den) = if k == 0 {
            (ExpPoly::one(), 0)
        } else {
            (schur_apply(tau, k, x_sign), 1)
        };
        let (y_num, y_den) = if k == n {
            (ExpPoly::one(), 0)
        } else {
            (schur_apply(tau, n - k, y_sign), 1)
        };
        expr.push(RatExpTerm {
            coeff: Rat::one(),
            pole: 0,
            x_num,
            x_den_pow: x_den,
            y_num,
            y_den_pow: y_den,
        });
    }
    expr
}

/// W_n(x,y) from the tau-function; W_0 = 1 and tau = 1 gives a structurally
/// zero expression for every n >= 1.
pub fn w_coeff(tau: &Arc<TauFunction>, n: u32) -> WKernelCoefficient {
    WKernelCoefficient {
        index: n,
        expr: w_expr(tau, n, SchurSign::Minus, SchurSign::Plus),
    }
}

/// The swapped construction: the x side carries S_k(+ptilde), the y side
/// S_{n-k}(-ptilde). Evaluated at (b, a) it must reproduce w_coeff at (a, b)
/// exactly; see the symmetry tests.
pub fn w_coeff_swapped(tau: &Arc<TauFunction>, n: u32) -> WKernelCoefficient {
    WKernelCoefficient {
        index: n,
        expr: w_expr(tau, n, SchurSign::Plus, SchurSign::Minus),
    }
}

/// Per-term product evaluation with sorted reduction; requires a pole-free
/// expression. Each term is evaluated as (x-side ratio) * (y-side ratio) with
/// a single final multiplication, which keeps the value invariant under the
/// k -> n-k, x <-> y relabeling.
fn eval_products_sorted(
    expr: &RatExpExpression,
    ctx: &mut RealCtx,
    x: &Rat,
    y: &Rat,
    times: &BTreeMap<u32, Rat>,
) -> Result<Real> {
    use crate::expr::tau::SpatialPoint;
    if expr.terms().iter().any(|t| t.pole != 0) {
        return Err(Error::InvalidArgument(
            "sorted product evaluation requires a pole-free expression",
        ));
    }
    let mut px = SpatialPoint::from_rat(ctx, x, times);
    let mut py = SpatialPoint::from_rat(ctx, y, times);
    let tau_expr = expr.tau().expr();
    let tau_x = tau_expr.eval(ctx, &mut px);
    let tau_y = tau_expr.eval(ctx, &mut py);
    if (expr.terms().iter().any(|t| t.x_den_pow > 0) && tau_x.is_zero())
        || (expr.terms().iter().any(|t| t.y_den_pow > 0) && tau_y.is_zero())
    {
        return Err(Error::DenominatorZero);
    }
    let mut values: Vec<Real> = Vec::with_capacity(expr.terms().len());
    for t in expr.terms() {
        let mut fx = t.x_num.eval(ctx, &mut px);
        if t.x_den_pow > 0 {
            let d = ctx.powi(&tau_x, t.x_den_pow as i32);
            fx = ctx.div(&fx, &d);
        }
        let mut fy = t.y_num.eval(ctx, &mut py);
        if t.y_den_pow > 0 {
            let d = ctx.powi(&tau_y, t.y_den_pow as i32);
            fy = ctx.div(&fy, &d);
        }
        let mut v = ctx.mul(&fx, &fy);
        if !t.coeff.is_one() {
            v = ctx.mul_rat(&v, &t.coeff);
        }
        values.push(v);
    }
    values.sort_by(|a, b| a.cmp_total(b));
    let mut acc = ctx.zero();
    for v in &values {
        acc = ctx.add(&acc, v);
    }
    Ok(acc)
}

/// Bilinear residue res_z[z^{2n} Psi^{(l)}(x,s,z) Psi*(x,s,z)], computed as
/// the coefficient of z^{-2n-1} in [(d_x + z)^l Psibar] Psibar* (the
/// exponential factors cancel between the wave function and its adjoint).
/// The coefficient is a finite sum once the truncation order covers
/// 2n + l + 1, so the returned magnitude is limited only by evaluation
/// precision for genuine hierarchy solutions.
pub fn bilinear_check(
    tau: &Arc<TauFunction>,
    n: u32,
    l: u32,
    trunc: u32,
    x: &Rat,
    times: &BTreeMap<u32, Rat>,
    precision: u32,
) -> Result<Real> {
    if trunc < 2 * n + l + 1 {
        return Err(Error::InvalidArgument(
            "truncation order must cover 2n + l + 1",
        ));
    }
    let mut ctx = RealCtx::new(precision + 10);
    // adjoint values psi*_m(x), m <= trunc
    let mut adj: Vec<Real> = Vec::new();
    for m in 0..=trunc {
        let c = wave_coeff(tau, m, WaveSide::Adjoint);
        adj.push(c.eval(&mut ctx, x, times)?);
    }
    // wave-side derivatives d^(l-i) psi_k(x)
    let mut acc = ctx.zero();
    for i in 0..=l {
        let cli = ctx.from_rat(&Rat::from_integer(binomial(l, i)));
        for k in 0..=trunc {
            let m_idx = 2 * n as i64 + 1 + i as i64 - k as i64;
            if m_idx < 0 || m_idx > trunc as i64 {
                continue;
            }
            let mut e = wave_coeff(tau, k, WaveSide::Wave).expr().clone();
            for _ in 0..(l - i) {
                e = e.deriv_x();
            }
            let dv = e.eval_x_only(&mut ctx, x, times)?;
            let prod = ctx.mul(&dv, &adj[m_idx as usize]);
            let term = ctx.mul(&cli, &prod);
            acc = ctx.add(&acc, &term);
        }
    }
    Ok(ctx.abs(&acc))
}

/// Order-by-order wave recurrence residual (the z-expansion of
/// L Psibar + 2z d_x Psibar = 0 and its adjoint):
/// (d^2 + u) psi_k + 2 psi'_{k+1} = 0, resp. (d^2 + u) psi*_k - 2 psi*'_{k+1}.
pub fn wave_recurrence_check(
    tau: &Arc<TauFunction>,
    k: u32,
    side: WaveSide,
    x: &Rat,
    times: &BTreeMap<u32, Rat>,
    precision: u32,
) -> Result<Real> {
    let mut ctx = RealCtx::new(precision + 10);
    let psi_k = wave_coeff(tau, k, side);
    let lpsi = psi_k.expr().schrodinger_apply();
    let dnext = wave_coeff(tau, k + 1, side).expr().deriv_x();
    let a = lpsi.eval_x_only(&mut ctx, x, times)?;
    let b = dnext.eval_x_only(&mut ctx, x, times)?;
    let two = match side {
        WaveSide::Wave => ctx.from_i64(2),
        WaveSide::Adjoint => ctx.from_i64(-2),
    };
    let t = ctx.mul(&two, &b);
    let r = ctx.add(&a, &t);
    Ok(ctx.abs(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    fn no_times() -> BTreeMap<u32, Rat> {
        BTreeMap::new()
    }

    #[test]
    fn psi0_is_one() {
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        let c = wave_coeff(&tau, 0, WaveSide::Wave);
        let mut ctx = RealCtx::new(30);
        let v = c.eval(&mut ctx, &rat(1, 3), &no_times()).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn free_tau_wave_coeffs_vanish() {
        let tau = TauFunction::one();
        for k in 1..=6 {
            let c = wave_coeff(&tau, k, WaveSide::Wave);
            assert!(c.expr().is_structurally_zero());
            let c = wave_coeff(&tau, k, WaveSide::Adjoint);
            assert!(c.expr().is_structurally_zero());
        }
    }

    #[test]
    fn psi1_of_rational_tau() {
        // tau = x: psi_1 = -d_x tau / tau = -1/x, at x = 2 -> -1/2
        let tau = TauFunction::make_rational(1).unwrap();
        let c = wave_coeff(&tau, 1, WaveSide::Wave);
        let mut ctx = RealCtx::new(30);
        let v = c.eval(&mut ctx, &rat(2, 1), &no_times()).unwrap();
        assert!((v.to_f64() + 0.5).abs() < 1e-25);
    }

    #[test]
    fn w0_is_one_and_free_tau_w_vanishes() {
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        let w0 = w_coeff(&tau, 0);
        let mut ctx = RealCtx::new(30);
        let v = w0
            .eval(&mut ctx, &rat(1, 2), &rat(-1, 3), &no_times())
            .unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-25);
        let free = TauFunction::one();
        for n in 1..=8 {
            assert!(w_coeff(&free, n).expr().is_structurally_zero());
        }
    }

    #[test]
    fn w1_matches_log_derivative_difference() {
        // W_1(x,y) = tau'(y)/tau(y) - tau'(x)/tau(x)
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        let w1 = w_coeff(&tau, 1);
        let mut ctx = RealCtx::new(40);
        let (a, b) = (rat(7, 10), rat(-2, 5));
        let v = w1.eval(&mut ctx, &a, &b, &no_times()).unwrap();
        let dtau = tau.expr().deriv(1);
        let ratio = RatExpExpression::x_ratio(tau.clone(), dtau, 1);
        let rx = ratio.eval_x_only(&mut ctx, &a, &no_times()).unwrap();
        let ry = ratio.eval_x_only(&mut ctx, &b, &no_times()).unwrap();
        let expect = ctx.sub(&ry, &rx);
        let diff = ctx.sub(&v, &expect);
        assert!(diff.to_f64().abs() < 1e-35);
    }

    #[test]
    fn swapped_construction_is_bit_identical() {
        let tau = TauFunction::make_soliton(&[rat(1, 1), rat(1, 2)], &[]).unwrap();
        let (a, b) = (rat(3, 4), rat(-1, 5));
        for n in 1..=5 {
            let w = w_coeff(&tau, n);
            let ws = w_coeff_swapped(&tau, n);
            let mut ctx = RealCtx::new(40);
            let v1 = w.eval(&mut ctx, &a, &b, &no_times()).unwrap();
            let v2 = ws.eval(&mut ctx, &b, &a, &no_times()).unwrap();
            assert_eq!(v1, v2, "n = {n}");
        }
    }

    #[test]
    fn bilinear_residue_free_case() {
        let tau = TauFunction::one();
        let r = bilinear_check(&tau, 0, 0, 12, &rat(1, 3), &no_times(), 30).unwrap();
        assert!(r.is_zero() || r.to_f64() < 1e-28);
    }

    #[test]
    fn bilinear_residue_soliton() {
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        let r = bilinear_check(&tau, 0, 0, 12, &rat(3, 10), &no_times(), 40).unwrap();
        assert!(r.to_f64() < 1e-35, "residual {}", r.to_f64());
        let r = bilinear_check(&tau, 1, 2, 16, &rat(3, 10), &no_times(), 40).unwrap();
        assert!(r.to_f64() < 1e-33, "residual {}", r.to_f64());
    }

    #[test]
    fn wave_recurrence_soliton() {
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        for k in 0..=4 {
            let r = wave_recurrence_check(&tau, k, WaveSide::Wave, &rat(3, 10), &no_times(), 40)
                .unwrap();
            assert!(r.to_f64() < 1e-33, "k={k} residual {}", r.to_f64());
            let r = wave_recurrence_check(&tau, k, WaveSide::Adjoint, &rat(3, 10), &no_times(), 40)
                .unwrap();
            assert!(r.to_f64() < 1e-33, "adjoint k={k} residual {}", r.to_f64());
        }
    }
}
