//! Arbitrary-precision real arithmetic for the evaluation layer.
//!
//! A thin wrapper over a binary big-float backend. A `RealCtx` pins the
//! working precision and rounding mode, so every operation performed through
//! the same context is deterministic: identical inputs and precision give
//! bit-identical outputs. Rationals convert exactly (numerator and denominator
//! enter as exact binary integers, a single correctly-rounded division
//! follows), so the only rounding sources are arithmetic at the working
//! precision and `exp`.

use alloc::string::String;
use alloc::vec::Vec;

use astro_float_num::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::q::Rat;

const RM: RoundingMode = RoundingMode::ToEven;

/// Bits per requested decimal digit, rounded up (log2 10 = 3.3219...).
const BITS_PER_DIGIT_NUM: u64 = 3322;
const BITS_PER_DIGIT_DEN: u64 = 1000;

/// An arbitrary-precision real value.
#[derive(Debug, Clone, PartialEq)]
pub struct Real(BigFloat);

/// Evaluation context: working precision in bits plus cached constants.
pub struct RealCtx {
    bits: usize,
    cc: Consts,
}

impl RealCtx {
    /// Context carrying `digits` decimal digits of working precision
    /// (plus a fixed 32-bit slack).
    pub fn new(digits: u32) -> Self {
        let bits = (digits as u64 * BITS_PER_DIGIT_NUM).div_ceil(BITS_PER_DIGIT_DEN) as usize + 32;
        RealCtx {
            bits,
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn precision_bits(&self) -> usize {
        self.bits
    }

    pub fn zero(&self) -> Real {
        Real(BigFloat::from_i64(0, self.bits))
    }

    pub fn one(&self) -> Real {
        Real(BigFloat::from_i64(1, self.bits))
    }

    pub fn from_i64(&self, v: i64) -> Real {
        Real(BigFloat::from_i64(v, self.bits))
    }

    pub fn from_f64(&self, v: f64) -> Real {
        Real(BigFloat::from_f64(v, self.bits))
    }

    fn from_bigint(v: &BigInt) -> BigFloat {
        let sign = if v.is_negative() { Sign::Neg } else { Sign::Pos };
        let words: Vec<u64> = v.magnitude().to_u64_digits();
        if words.is_empty() {
            return BigFloat::from_i64(0, 64);
        }
        let exp = (words.len() * 64) as i32;
        BigFloat::from_words(&words, sign, exp)
    }

    /// Exact-then-rounded conversion of a rational.
    pub fn from_rat(&self, q: &Rat) -> Real {
        let num = Self::from_bigint(q.numer());
        if q.denom().to_u64() == Some(1) {
            let mut n = num;
            // keep full integer mantissa; round only if it exceeds working precision
            if n.mantissa_max_bit_len().unwrap_or(0) > self.bits {
                n = n.add(&BigFloat::from_i64(0, self.bits), self.bits, RM);
            }
            return Real(n);
        }
        let den = Self::from_bigint(q.denom());
        Real(num.div(&den, self.bits, RM))
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.add(&b.0, self.bits, RM))
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.sub(&b.0, self.bits, RM))
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.mul(&b.0, self.bits, RM))
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.div(&b.0, self.bits, RM))
    }

    pub fn neg(&self, a: &Real) -> Real {
        Real(a.0.neg())
    }

    pub fn abs(&self, a: &Real) -> Real {
        Real(a.0.abs())
    }

    /// a^n for signed integer n (reciprocal of the positive power when n < 0).
    pub fn powi(&self, a: &Real, n: i32) -> Real {
        if n >= 0 {
            Real(a.0.powi(n as usize, self.bits, RM))
        } else {
            let p = a.0.powi((-(n as i64)) as usize, self.bits, RM);
            Real(BigFloat::from_i64(1, self.bits).div(&p, self.bits, RM))
        }
    }

    pub fn exp(&mut self, a: &Real) -> Real {
        Real(a.0.exp(self.bits, RM, &mut self.cc))
    }

    pub fn exp_rat(&mut self, q: &Rat) -> Real {
        let a = self.from_rat(q);
        self.exp(&a)
    }

    pub fn mul_rat(&self, a: &Real, q: &Rat) -> Real {
        let b = self.from_rat(q);
        self.mul(a, &b)
    }

    /// Decimal rendering with the backend's scientific format.
    pub fn to_decimal_string(&mut self, a: &Real) -> String {
        a.0.format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| String::from("NaN"))
    }
}

impl Real {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Total-order comparison; evaluation never produces NaN, so this is total.
    pub fn cmp_total(&self, other: &Real) -> core::cmp::Ordering {
        let c = self.0.cmp(&other.0).expect("NaN in evaluation pipeline");
        c.cmp(&0)
    }

    /// Nearest f64, for tolerance checks and terse display. Values beyond the
    /// f64 exponent range clamp to 0 or +/-inf, which is what a tolerance
    /// comparison wants.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let exp = match self.0.exponent() {
            Some(e) => e as i64,
            None => return f64::NAN,
        };
        let words = match self.0.mantissa_digits() {
            Some(w) if !w.is_empty() => w,
            _ => return 0.0,
        };
        // mantissa is a little-endian fraction in [0.5, 1); take the top word
        let top = words[words.len() - 1];
        let frac = top as f64 / 18446744073709551616.0; // 2^64
        let sign = if self.0.is_negative() { -1.0 } else { 1.0 };
        if exp > 1023 {
            return sign * f64::INFINITY;
        }
        if exp < -1021 {
            return 0.0;
        }
        // 2^exp via direct bit construction (core has no exp2)
        let pow2 = f64::from_bits(((1023 + exp) as u64) << 52);
        sign * frac * pow2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    #[test]
    fn rational_conversion_exact() {
        let ctx = RealCtx::new(40);
        let a = ctx.from_rat(&rat(1, 8));
        assert!((a.to_f64() - 0.125).abs() < 1e-15);
        let b = ctx.from_rat(&rat(-7, 3));
        assert!((b.to_f64() + 7.0 / 3.0).abs() < 1e-14);
        // large integer converts exactly
        let big: BigInt = BigInt::from(3).pow(100);
        let c = ctx.from_rat(&Rat::from_integer(big));
        assert!((c.to_f64().log2() - 100.0 * 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn exp_known_value() {
        let mut ctx = RealCtx::new(40);
        let e = ctx.exp_rat(&rat(1, 1));
        assert!((e.to_f64() - core::f64::consts::E).abs() < 1e-15);
        let em = ctx.exp_rat(&rat(-7, 3));
        assert!((em.to_f64() - 0.09697196786440506281).abs() < 1e-16);
    }

    #[test]
    fn deterministic_ops() {
        let mut ctx = RealCtx::new(50);
        let a = ctx.exp_rat(&rat(22, 7));
        let b = ctx.exp_rat(&rat(22, 7));
        assert_eq!(a, b);
        let c = ctx.mul(&a, &b);
        let d = ctx.mul(&b, &a);
        assert_eq!(c, d);
    }

    #[test]
    fn powi_negative() {
        let ctx = RealCtx::new(40);
        let two = ctx.from_i64(2);
        let r = ctx.powi(&two, -3);
        assert!((r.to_f64() - 0.125).abs() < 1e-18);
    }
}
