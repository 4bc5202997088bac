//! Tau-functions as exponential-polynomial sums, their differentiation and
//! arbitrary-precision evaluation, and the soliton / rational constructors.
//!
//! An ExpPoly is a finite sum of terms P(x, s3, s5, ...) * exp(phase) with
//! polynomial prefactors and linear phases, closed under differentiation with
//! respect to x and every odd time. A TauFunction wraps a nonzero ExpPoly
//! together with its time rule:
//!
//! * `Explicit`  - derivatives with respect to unlisted times vanish (the
//!   rational families are genuinely stationary under the higher flows, so the
//!   zero extension is the correct hierarchy dependence for them);
//! * `Dispersion` - soliton rule; phases carry generators that define the
//!   coefficient of s_{2j-1} for every j on demand.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::expr::phase::LinearPhase;
use crate::expr::poly::MultiPoly;
use crate::q::{rat, rat_pow, Rat};
use crate::real::{Real, RealCtx};
use crate::Result;

/// One exponential-polynomial term: prefactor * exp(phase).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPolyTerm {
    pub prefactor: MultiPoly,
    pub phase: LinearPhase,
}

/// A finite sum of exponential-polynomial terms, kept in a canonical form:
/// terms sorted by phase, like phases merged, zero prefactors dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: Vec<ExpPolyTerm>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly::default()
    }

    pub fn one() -> Self {
        ExpPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        ExpPoly::from_terms(alloc::vec![ExpPolyTerm {
            prefactor: MultiPoly::constant(c),
            phase: LinearPhase::zero(),
        }])
    }

    pub fn from_terms(terms: Vec<ExpPolyTerm>) -> Self {
        let mut grouped: BTreeMap<LinearPhase, MultiPoly> = BTreeMap::new();
        for t in terms {
            if t.prefactor.is_zero() {
                continue;
            }
            match grouped.get_mut(&t.phase) {
                Some(p) => *p = p.add(&t.prefactor),
                None => {
                    grouped.insert(t.phase, t.prefactor);
                }
            }
        }
        ExpPoly {
            terms: grouped
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|(phase, prefactor)| ExpPolyTerm { prefactor, phase })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[ExpPolyTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].phase.is_zero()
            && self.terms[0].prefactor.is_one()
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ExpPoly::from_terms(terms)
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, c: &Rat) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpPolyTerm {
                    prefactor: t.prefactor.scale(c),
                    phase: t.phase.clone(),
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(ExpPolyTerm {
                    prefactor: a.prefactor.mul(&b.prefactor),
                    phase: a.phase.add(&b.phase),
                });
            }
        }
        ExpPoly::from_terms(terms)
    }

    /// Derivative with respect to s_{2j-1} (j = 1 is d/dx). Exact: the phase
    /// contributes its coefficient, the prefactor its polynomial derivative.
    pub fn deriv(&self, j: u32) -> ExpPoly {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let beta = t.phase.time_coeff(j);
            if !beta.is_zero() {
                terms.push(ExpPolyTerm {
                    prefactor: t.prefactor.scale(&beta),
                    phase: t.phase.clone(),
                });
            }
            let dp = t.prefactor.deriv(j);
            if !dp.is_zero() {
                terms.push(ExpPolyTerm {
                    prefactor: dp,
                    phase: t.phase.clone(),
                });
            }
        }
        ExpPoly::from_terms(terms)
    }

    /// Iterated derivative by a multi-index keyed by the odd index 2j-1.
    pub fn deriv_multi(&self, multi_index: &BTreeMap<u32, u32>) -> ExpPoly {
        let mut acc = self.clone();
        for (&odd, &count) in multi_index {
            let j = (odd + 1) / 2;
            for _ in 0..count {
                acc = acc.deriv(j);
            }
        }
        acc
    }

    /// Evaluation at a spatial point (rational or real x) with rational times.
    pub fn eval(&self, ctx: &mut RealCtx, pt: &mut SpatialPoint<'_>) -> Real {
        let mut acc = ctx.zero();
        for t in &self.terms {
            let (a, b) = t.phase.split_value(pt.times);
            let e = pt.exp_phase(ctx, a, b);
            let pref = pt.eval_prefactor(ctx, &t.prefactor);
            let prod = ctx.mul(&pref, &e);
            acc = ctx.add(&acc, &prod);
        }
        acc
    }
}

/// Time rule of a tau-function (see module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeRule {
    Explicit,
    Dispersion,
}

/// A KdV tau-function: a nonzero ExpPoly plus its time rule. The induced
/// potential is u = 2 (log tau)''.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauFunction {
    expr: ExpPoly,
    time_rule: TimeRule,
}

impl TauFunction {
    pub fn new(expr: ExpPoly, time_rule: TimeRule) -> Result<Arc<Self>> {
        if expr.is_zero() {
            return Err(Error::InvalidArgument("tau-function must be nonzero"));
        }
        Ok(Arc::new(TauFunction { expr, time_rule }))
    }

    /// The free tau-function, tau = 1 (u = 0).
    pub fn one() -> Arc<Self> {
        TauFunction::new(ExpPoly::one(), TimeRule::Dispersion).expect("nonzero")
    }

    pub fn expr(&self) -> &ExpPoly {
        &self.expr
    }

    pub fn time_rule(&self) -> TimeRule {
        self.time_rule
    }

    /// Exact mixed derivative; the multi-index is keyed by odd index
    /// (1 -> d/dx, 3 -> d/ds3, ...). Total on valid tau-functions; composing
    /// two calls equals one call with the summed multi-index.
    pub fn differentiate(&self, multi_index: &BTreeMap<u32, u32>) -> ExpPoly {
        self.expr.deriv_multi(multi_index)
    }

    /// N-soliton tau-function. Phase of soliton i is
    /// 2 (k_i x + k_i^3 s3 + k_i^5 s5 + ...) + phi_i, and the interaction
    /// coefficient of solitons i and j is ((k_i - k_j)/(k_i + k_j))^2,
    /// fixed by the KdV flow check. Wavenumbers must be nonzero with pairwise
    /// distinct absolute values. `phase_constants` is either empty (all zero)
    /// or one constant per wavenumber.
    pub fn make_soliton(wavenumbers: &[Rat], phase_constants: &[Rat]) -> Result<Arc<Self>> {
        let n = wavenumbers.len();
        if !phase_constants.is_empty() && phase_constants.len() != n {
            return Err(Error::InvalidArgument(
                "phase_constants must be empty or match wavenumbers in length",
            ));
        }
        for (i, k) in wavenumbers.iter().enumerate() {
            if k.is_zero() {
                return Err(Error::ZeroWavenumber);
            }
            for other in &wavenumbers[..i] {
                if k.abs() == other.abs() {
                    return Err(Error::DuplicateWavenumber);
                }
            }
        }
        let phases: Vec<LinearPhase> = wavenumbers
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let c = phase_constants.get(i).cloned().unwrap_or_else(Rat::zero);
                LinearPhase::from_generator(rat(2, 1), k.clone(), c)
            })
            .collect();
        let mut terms = Vec::with_capacity(1 << n);
        for subset in 0u32..(1u32 << n) {
            let mut coeff = Rat::one();
            let mut phase = LinearPhase::zero();
            for i in 0..n {
                if subset & (1 << i) == 0 {
                    continue;
                }
                phase = phase.add(&phases[i]);
                for j in 0..i {
                    if subset & (1 << j) == 0 {
                        continue;
                    }
                    let num = &wavenumbers[i] - &wavenumbers[j];
                    let den = &wavenumbers[i] + &wavenumbers[j];
                    let r = num / den;
                    coeff *= &r * &r;
                }
            }
            terms.push(ExpPolyTerm {
                prefactor: MultiPoly::constant(coeff),
                phase,
            });
        }
        TauFunction::new(ExpPoly::from_terms(terms), TimeRule::Dispersion)
    }

    /// Rational (Adler-Moser) tau-functions: level 1 is tau = x, level 2 is
    /// tau = x^3 - 3 s3 (the s3 coefficient is fixed by the KdV flow check).
    /// Both are stationary under every higher flow, so the explicit rule's
    /// zero extension is their genuine hierarchy time dependence.
    pub fn make_rational(level: u32) -> Result<Arc<Self>> {
        let expr = match level {
            1 => ExpPoly::from_terms(alloc::vec![ExpPolyTerm {
                prefactor: MultiPoly::var(1),
                phase: LinearPhase::zero(),
            }]),
            2 => {
                let x3 = MultiPoly::var(1)
                    .mul(&MultiPoly::var(1))
                    .mul(&MultiPoly::var(1));
                let p = x3.sub(&MultiPoly::var(2).scale(&rat(3, 1)));
                ExpPoly::from_terms(alloc::vec![ExpPolyTerm {
                    prefactor: p,
                    phase: LinearPhase::zero(),
                }])
            }
            other => return Err(Error::UnsupportedLevel(other)),
        };
        TauFunction::new(expr, TimeRule::Explicit)
    }

    /// Evaluates tau at a point, carrying the point's precision plus a
    /// 10-digit guard.
    pub fn evaluate(&self, point: &EvalPoint) -> Real {
        let mut ctx = RealCtx::new(point.precision() + 10);
        let mut pt = SpatialPoint::from_rat(&ctx, point.x(), point.times());
        self.expr.eval(&mut ctx, &mut pt)
    }

    /// Evaluates tau(x; s + sign [z^-1]) at the point, where
    /// [z] = (z, z^3/3, z^5/5, ...). Exact in the symbolic layer: explicit
    /// phase coefficients shift by finitely many terms, and each dispersion
    /// generator (2, k) contributes the closed factor ((z -+ k)/(z +- k)).
    /// This is the Taylor-shift side of the wave-function identity and serves
    /// as an independent oracle for the Schur expansion.
    pub fn eval_shifted(
        &self,
        ctx: &mut RealCtx,
        point: &EvalPoint,
        z: &Rat,
        sign: i32,
    ) -> Result<Real> {
        if z.is_zero() {
            return Err(Error::InvalidArgument("shift parameter z must be nonzero"));
        }
        let sgn = if sign >= 0 { Rat::one() } else { -Rat::one() };
        // shifted coordinates for prefactors and explicit phase parts:
        // s_{2j-1} += sign * z^(1-2j) / (2j-1)
        let shift_of = |j: u32| -> Rat {
            &sgn * rat_pow(z, 1 - 2 * (j as i32)) / rat(2 * j as i64 - 1, 1)
        };
        let x_shifted = point.x() + shift_of(1);
        let mut times_shifted = point.times().clone();
        // explicit coefficients and prefactor variables can touch any stored
        // time; generators touch all, but enter through the closed factor.
        let mut js: Vec<u32> = Vec::new();
        for t in self.expr.terms() {
            for (&j, _) in t.phase.explicit_coeffs() {
                if j >= 2 {
                    js.push(j);
                }
            }
            for (m, _) in t.prefactor.terms() {
                for &(j, _) in m.pairs() {
                    if j >= 2 {
                        js.push(j);
                    }
                }
            }
        }
        for j in js {
            let odd = 2 * j - 1;
            let e = times_shifted.entry(odd).or_insert_with(Rat::zero);
            *e += shift_of(j);
        }
        let mut acc = ctx.zero();
        for t in self.expr.terms() {
            // The generator part of the phase splits as
            //   gen(s + sign [z^-1]) = gen(s) + sign * m * atanh(k/z)
            // with exp of the atanh term the exact rational factor
            // ((z + sign k)/(z - sign k))^(m/2). gen(s) is evaluated at the
            // *original* point; the explicit part and the prefactor are
            // evaluated at the shifted coordinates.
            let mut factor = Rat::one();
            let mut gen_arg = Rat::zero(); // gen(s) at the original point
            for (m, k) in t.phase.generators() {
                let half = m / rat(2, 1);
                if !half.is_integer() {
                    return Err(Error::InvalidArgument(
                        "time shift needs even generator multipliers",
                    ));
                }
                let e = half.to_integer().to_i32().ok_or(Error::InvalidArgument(
                    "generator multiplier out of range",
                ))?;
                let num = z + &sgn * k;
                let den = z - &sgn * k;
                if den.is_zero() || num.is_zero() {
                    return Err(Error::InvalidArgument(
                        "shift parameter collides with a wavenumber",
                    ));
                }
                factor *= rat_pow(&(num / den), e);
                gen_arg += m * k * point.x();
                for (&odd, tval) in point.times() {
                    gen_arg += m * rat_pow(k, odd as i32) * tval;
                }
            }
            // explicit phase part at shifted times, prefactor at shifted coords
            let sub = ExpPoly::from_terms(alloc::vec![ExpPolyTerm {
                prefactor: t.prefactor.scale(&factor),
                phase: LinearPhase::from_explicit(
                    t.phase.explicit_coeffs().clone(),
                    t.phase.constant().clone(),
                ),
            }]);
            let mut pt = SpatialPoint::from_rat(ctx, &x_shifted, &times_shifted);
            let base = sub.eval(ctx, &mut pt);
            let v = if gen_arg.is_zero() {
                base
            } else {
                let e = ctx.exp_rat(&gen_arg);
                ctx.mul(&base, &e)
            };
            acc = ctx.add(&acc, &v);
        }
        Ok(acc)
    }
}

/// Evaluation point: exact rational coordinates plus a working precision in
/// decimal digits. Times are keyed by the odd index (3, 5, ...); x and s_1
/// are identified, so index 1 is not accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPoint {
    x: Rat,
    times: BTreeMap<u32, Rat>,
    precision: u32,
}

/// Smallest accepted working precision, in decimal digits.
pub const MIN_PRECISION: u32 = 16;

impl EvalPoint {
    pub fn new(x: Rat, times: BTreeMap<u32, Rat>, precision: u32) -> Result<Self> {
        if precision < MIN_PRECISION {
            return Err(Error::PrecisionTooLow {
                min: MIN_PRECISION,
                got: precision,
            });
        }
        for &odd in times.keys() {
            if odd < 3 || odd % 2 == 0 {
                return Err(Error::InvalidArgument(
                    "times are keyed by odd index >= 3 (x and s1 are identified)",
                ));
            }
        }
        Ok(EvalPoint {
            x,
            times,
            precision,
        })
    }

    pub fn at_x(x: Rat, precision: u32) -> Result<Self> {
        EvalPoint::new(x, BTreeMap::new(), precision)
    }

    pub fn x(&self) -> &Rat {
        &self.x
    }

    pub fn times(&self) -> &BTreeMap<u32, Rat> {
        &self.times
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_x(&self, x: Rat) -> Self {
        EvalPoint {
            x,
            times: self.times.clone(),
            precision: self.precision,
        }
    }
}

/// A spatial coordinate prepared for evaluation: the exact rational form when
/// available (exact prefactor arithmetic, cacheable exp arguments) or a Real
/// coordinate (quadrature nodes), plus the shared time values and a per-point
/// cache of exponential factors keyed by the phase split (a, b).
pub struct SpatialPoint<'a> {
    x_rat: Option<Rat>,
    x_real: Real,
    times: &'a BTreeMap<u32, Rat>,
    exp_cache: BTreeMap<(Rat, Rat), Real>,
}

impl<'a> SpatialPoint<'a> {
    pub fn from_rat(ctx: &RealCtx, x: &Rat, times: &'a BTreeMap<u32, Rat>) -> Self {
        SpatialPoint {
            x_rat: Some(x.clone()),
            x_real: ctx.from_rat(x),
            times,
            exp_cache: BTreeMap::new(),
        }
    }

    pub fn from_real(x: Real, times: &'a BTreeMap<u32, Rat>) -> Self {
        SpatialPoint {
            x_rat: None,
            x_real: x,
            times,
            exp_cache: BTreeMap::new(),
        }
    }

    pub fn x_real(&self) -> &Real {
        &self.x_real
    }

    pub fn x_rat(&self) -> Option<&Rat> {
        self.x_rat.as_ref()
    }

    /// exp(a x + b), cached per distinct (a, b).
    fn exp_phase(&mut self, ctx: &mut RealCtx, a: Rat, b: Rat) -> Real {
        if a.is_zero() && b.is_zero() {
            return ctx.one();
        }
        if let Some(v) = self.exp_cache.get(&(a.clone(), b.clone())) {
            return v.clone();
        }
        let v = match &self.x_rat {
            Some(x) => {
                let arg = &a * x + &b;
                ctx.exp_rat(&arg)
            }
            None => {
                let ax = ctx.mul_rat(&self.x_real, &a);
                let bb = ctx.from_rat(&b);
                let arg = ctx.add(&ax, &bb);
                ctx.exp(&arg)
            }
        };
        self.exp_cache.insert((a, b), v.clone());
        v
    }

    fn eval_prefactor(&self, ctx: &RealCtx, p: &MultiPoly) -> Real {
        match &self.x_rat {
            Some(x) => {
                let v = p.eval_rat(|j| {
                    if j == 1 {
                        x.clone()
                    } else {
                        self.times.get(&(2 * j - 1)).cloned().unwrap_or_else(Rat::zero)
                    }
                });
                ctx.from_rat(&v)
            }
            None => p.eval_real_x(ctx, &self.x_real, |j| {
                self.times.get(&(2 * j - 1)).cloned().unwrap_or_else(Rat::zero)
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    fn times0() -> BTreeMap<u32, Rat> {
        BTreeMap::new()
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let tau = TauFunction::one();
        let mut idx = BTreeMap::new();
        idx.insert(3, 1);
        assert!(tau.differentiate(&idx).is_zero());
        idx.insert(1, 2);
        assert!(tau.differentiate(&idx).is_zero());
    }

    #[test]
    fn chain_rule_on_linear_phase() {
        // tau = exp(kx + k^3 s3) with k = 2: d/ds3 -> 8 * same exponential
        let phase = LinearPhase::from_generator(Rat::one(), rat(2, 1), Rat::zero());
        let tau = TauFunction::new(
            ExpPoly::from_terms(alloc::vec![ExpPolyTerm {
                prefactor: MultiPoly::one(),
                phase: phase.clone(),
            }]),
            TimeRule::Dispersion,
        )
        .unwrap();
        let mut idx = BTreeMap::new();
        idx.insert(3, 1);
        let d = tau.differentiate(&idx);
        let expected = ExpPoly::from_terms(alloc::vec![ExpPolyTerm {
            prefactor: MultiPoly::constant(rat(8, 1)),
            phase,
        }]);
        assert_eq!(d, expected);
    }

    #[test]
    fn x_is_s1() {
        // tau = x, d/ds1 = d/dx = 1
        let tau = TauFunction::make_rational(1).unwrap();
        let mut idx = BTreeMap::new();
        idx.insert(1, 1);
        assert!(tau.differentiate(&idx).is_one());
    }

    #[test]
    fn composition_equals_summed_multi_index() {
        let tau = TauFunction::make_soliton(&[rat(1, 1), rat(3, 2)], &[]).unwrap();
        let mut i1 = BTreeMap::new();
        i1.insert(1, 1);
        i1.insert(3, 1);
        let mut i2 = BTreeMap::new();
        i2.insert(3, 1);
        i2.insert(5, 2);
        let step = ExpPoly::deriv_multi(&tau.differentiate(&i1), &i2);
        let mut sum = BTreeMap::new();
        sum.insert(1, 1);
        sum.insert(3, 2);
        sum.insert(5, 2);
        assert_eq!(step, tau.differentiate(&sum));
    }

    #[test]
    fn evaluate_simple() {
        // tau = 1 + exp(2x) at x = 0 -> 2
        let tau = TauFunction::make_soliton(&[rat(1, 1)], &[]).unwrap();
        let p = EvalPoint::at_x(rat(0, 1), 30).unwrap();
        let v = tau.evaluate(&p);
        assert!((v.to_f64() - 2.0).abs() < 1e-25);
        // tau = x at x = 3 -> 3
        let tau = TauFunction::make_rational(1).unwrap();
        let v = tau.evaluate(&EvalPoint::at_x(rat(3, 1), 30).unwrap());
        assert!((v.to_f64() - 3.0).abs() < 1e-25);
    }

    #[test]
    fn soliton_validation() {
        assert!(matches!(
            TauFunction::make_soliton(&[rat(0, 1)], &[]),
            Err(Error::ZeroWavenumber)
        ));
        assert!(matches!(
            TauFunction::make_soliton(&[rat(2, 1), rat(-2, 1)], &[]),
            Err(Error::DuplicateWavenumber)
        ));
        assert!(matches!(
            TauFunction::make_rational(3),
            Err(Error::UnsupportedLevel(3))
        ));
        // N = 0 gives the free tau
        let free = TauFunction::make_soliton(&[], &[]).unwrap();
        assert!(free.expr().is_one());
    }

    #[test]
    fn eval_point_validation() {
        assert!(matches!(
            EvalPoint::at_x(rat(1, 1), 8),
            Err(Error::PrecisionTooLow { .. })
        ));
        let mut times = BTreeMap::new();
        times.insert(1, rat(1, 1));
        assert!(EvalPoint::new(rat(0, 1), times, 20).is_err());
        let mut times = BTreeMap::new();
        times.insert(3, rat(1, 2));
        assert!(EvalPoint::new(rat(0, 1), times, 20).is_ok());
    }

    #[test]
    fn two_soliton_interaction_coefficient() {
        // k = (1, 2): A12 = ((1-2)/(1+2))^2 = 1/9 on the top term
        let tau = TauFunction::make_soliton(&[rat(1, 1), rat(2, 1)], &[]).unwrap();
        assert_eq!(tau.expr().terms().len(), 4);
        let top = tau
            .expr()
            .terms()
            .iter()
            .max_by_key(|t| t.phase.x_coeff())
            .unwrap();
        assert_eq!(top.phase.x_coeff(), rat(6, 1));
        assert_eq!(top.prefactor, MultiPoly::constant(rat(1, 9)));
    }

    #[test]
    fn shifted_eval_matches_hand_value() {
        // tau = x: tau(s - [z^-1]) = x - 1/z
        let tau = TauFunction::make_rational(1).unwrap();
        let mut ctx = RealCtx::new(40);
        let p = EvalPoint::at_x(rat(2, 1), 40).unwrap();
        let v = tau.eval_shifted(&mut ctx, &p, &rat(10, 1), -1).unwrap();
        assert!((v.to_f64() - 1.9).abs() < 1e-30);
        let _ = times0();
    }
}
