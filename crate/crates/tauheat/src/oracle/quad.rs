//! Composite Gauss-Legendre quadrature in arbitrary precision.
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! refinement of double-precision Chebyshev-angle seeds; the iteration count
//! is fixed from the working precision, so node sets are deterministic.
//! Panel sums run in a fixed order.

use alloc::vec::Vec;

use crate::error::Error;
use crate::real::{Real, RealCtx};
use crate::Result;

/// Quadrature configuration: nodes per panel, starting panel count, target
/// tolerance for the panel-doubling refinement loop.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub nodes: u32,
    pub initial_panels: u32,
    pub target_tol: f64,
    pub max_panels: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes: 12,
            initial_panels: 2,
            target_tol: 1e-9,
            max_panels: 64,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 4 {
            return Err(Error::InvalidArgument("quadrature needs >= 4 nodes"));
        }
        if self.initial_panels < 1 || self.max_panels < self.initial_panels {
            return Err(Error::InvalidArgument("bad panel bounds"));
        }
        Ok(())
    }
}

/// cos via Taylor on a quarter-period; good to ~1e-12, plenty for Newton
/// seeds (core has no trig).
fn cos_seed(t: f64) -> f64 {
    let two_pi = core::f64::consts::TAU;
    let mut x = t % two_pi;
    if x < 0.0 {
        x += two_pi;
    }
    // fold into [0, pi/2] tracking the sign
    let (x, sign) = if x <= core::f64::consts::FRAC_PI_2 {
        (x, 1.0)
    } else if x <= core::f64::consts::PI {
        (core::f64::consts::PI - x, -1.0)
    } else if x <= 1.5 * core::f64::consts::PI {
        (x - core::f64::consts::PI, -1.0)
    } else {
        (two_pi - x, 1.0)
    };
    let x2 = x * x;
    let mut term = 1.0;
    let mut acc = 1.0;
    for k in 1..=12 {
        term *= -x2 / ((2 * k - 1) as f64 * (2 * k) as f64);
        acc += term;
    }
    sign * acc
}

/// Gauss-Legendre rule on [-1, 1] at the context precision.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<Real>,
    weights: Vec<Real>,
}

impl GaussLegendre {
    pub fn new(ctx: &RealCtx, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("rule needs >= 2 nodes"));
        }
        let nf = n as f64;
        let one = ctx.one();
        // fixed Newton iteration count: seeds carry ~1e-10, each step doubles
        let iters = {
            let bits = ctx.precision_bits() as u32;
            let mut it = 0u32;
            let mut acc = 32u64; // seed accuracy in bits
            while acc < bits as u64 + 8 {
                acc *= 2;
                it += 1;
            }
            it + 1
        };
        let mut nodes = Vec::with_capacity(n as usize);
        let mut weights = Vec::with_capacity(n as usize);
        for i in 0..n {
            let theta = core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut t = ctx.from_f64(cos_seed(theta));
            let mut dp = ctx.zero();
            for _ in 0..iters {
                let (p, d) = legendre_with_derivative(ctx, n, &t);
                dp = d;
                let step = ctx.div(&p, &dp);
                t = ctx.sub(&t, &step);
            }
            // weight w = 2 / ((1 - t^2) P'_n(t)^2)
            let t2 = ctx.mul(&t, &t);
            let omt2 = ctx.sub(&one, &t2);
            let dp2 = ctx.mul(&dp, &dp);
            let den = ctx.mul(&omt2, &dp2);
            let w = ctx.div(&ctx.from_i64(2), &den);
            nodes.push(t);
            weights.push(w);
        }
        nodes.reverse();
        weights.reverse();
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Composite integral of f over [a, b] with the given panel count;
    /// errors from the integrand propagate.
    pub fn integrate<F>(
        &self,
        ctx: &mut RealCtx,
        a: &Real,
        b: &Real,
        panels: u32,
        f: &mut F,
    ) -> Result<Real>
    where
        F: FnMut(&mut RealCtx, &Real) -> Result<Real>,
    {
        let span = ctx.sub(b, a);
        let pr = ctx.from_i64(panels as i64);
        let h = ctx.div(&span, &pr); // panel width
        let half = ctx.from_rat(&crate::q::rat(1, 2));
        let hh = ctx.mul(&h, &half);
        let mut acc = ctx.zero();
        for p in 0..panels {
            let pf = ctx.from_i64(p as i64);
            let off = ctx.mul(&h, &pf);
            let left = ctx.add(a, &off);
            let mid = ctx.add(&left, &hh);
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                let dt = ctx.mul(&hh, t);
                let xi = ctx.add(&mid, &dt);
                let fv = f(ctx, &xi)?;
                let contrib = ctx.mul(w, &fv);
                acc = ctx.add(&acc, &contrib);
            }
        }
        Ok(ctx.mul(&acc, &hh))
    }

    /// Panel-doubling refinement until |I_{2p} - I_p| <= tol or the panel
    /// limit is exceeded.
    pub fn integrate_adaptive<F>(
        &self,
        ctx: &mut RealCtx,
        a: &Real,
        b: &Real,
        cfg: &QuadratureConfig,
        f: &mut F,
    ) -> Result<Real>
    where
        F: FnMut(&mut RealCtx, &Real) -> Result<Real>,
    {
        let mut panels = cfg.initial_panels;
        let mut prev = self.integrate(ctx, a, b, panels, f)?;
        while panels * 2 <= cfg.max_panels {
            panels *= 2;
            let next = self.integrate(ctx, a, b, panels, f)?;
            let diff = ctx.sub(&next, &prev);
            if diff.to_f64().abs() <= cfg.target_tol {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNotConverged)
    }
}

/// (P_n(t), P'_n(t)) by the three-term recurrence.
fn legendre_with_derivative(ctx: &RealCtx, n: u32, t: &Real) -> (Real, Real) {
    let mut p0 = ctx.one();
    let mut p1 = t.clone();
    for m in 1..n {
        // (m+1) P_{m+1} = (2m+1) t P_m - m P_{m-1}
        let a = ctx.from_i64(2 * m as i64 + 1);
        let b = ctx.from_i64(m as i64);
        let c = ctx.from_i64(m as i64 + 1);
        let tp = ctx.mul(t, &p1);
        let atp = ctx.mul(&a, &tp);
        let bp = ctx.mul(&b, &p0);
        let num = ctx.sub(&atp, &bp);
        let next = ctx.div(&num, &c);
        p0 = p1;
        p1 = next;
    }
    // P'_n = n (t P_n - P_{n-1}) / (t^2 - 1)
    let nn = ctx.from_i64(n as i64);
    let tp = ctx.mul(t, &p1);
    let num = ctx.sub(&tp, &p0);
    let nnum = ctx.mul(&nn, &num);
    let t2 = ctx.mul(t, t);
    let den = ctx.sub(&t2, &ctx.one());
    let d = ctx.div(&nnum, &den);
    (p1, d)
}
