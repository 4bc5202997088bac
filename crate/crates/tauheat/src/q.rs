//! Exact rational scalars and the small combinatorial functions used
//! throughout: factorials, double factorials with (-1)!! = 1, rising
//! Pochhammer symbols, and generalized binomial coefficients over Q.

use alloc::string::String;
use alloc::string::ToString;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational number; every structure constant in the crate is one.
pub type Rat = num_rational::BigRational;

/// Shorthand constructor from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer power with negative exponents allowed for nonzero base.
pub fn rat_pow(base: &Rat, exp: i32) -> Rat {
    base.pow(exp)
}

/// n! as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Double factorial with the convention (-1)!! = 0!! = 1.
///
/// Arguments below -1 are rejected rather than extended.
pub fn double_factorial(n: i64) -> Result<BigInt, Error> {
    if n < -1 {
        return Err(Error::DoubleFactorialRange(n));
    }
    let mut acc = BigInt::one();
    let mut m = n;
    while m >= 2 {
        acc *= m;
        m -= 2;
    }
    Ok(acc)
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
pub fn pochhammer(a: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    let mut f = a.clone();
    for _ in 0..k {
        acc *= &f;
        f += Rat::one();
    }
    acc
}

/// Binomial coefficient C(n, k) over the integers; 0 when k > n.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Generalized binomial C(a, k) = a (a-1) ... (a-k+1) / k! for rational a.
pub fn gen_binomial(a: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    let mut f = a.clone();
    for _ in 0..k {
        acc *= &f;
        f -= Rat::one();
    }
    acc / Rat::from_integer(factorial(k))
}

/// Parses a rational from "p/q", integer, or plain decimal notation
/// (e.g. "-3/4", "12", "0.125"). Decimal digits convert exactly.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty rational literal"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument("bad numerator"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument("bad denominator"))?;
        if d.is_zero() {
            return Err(Error::InvalidArgument("zero denominator"));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let ip: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::InvalidArgument("bad decimal"))?
        };
        if frac_part.is_empty() {
            return Ok(Rat::from_integer(ip));
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidArgument("bad decimal fraction"));
        }
        let fp: BigInt = frac_part
            .parse()
            .map_err(|_| Error::InvalidArgument("bad decimal fraction"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rat::new(fp, scale);
        let whole = Rat::from_integer(ip.abs());
        let total = whole + frac;
        return Ok(if neg { -total } else { total });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::InvalidArgument("bad integer literal"))?;
    Ok(Rat::from_integer(n))
}

/// Renders a rational as "p/q" (or "p" for integers); inverse of `parse_rat`.
pub fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        let mut s = q.numer().to_string();
        s.push('/');
        s.push_str(&q.denom().to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorial_convention() {
        assert_eq!(double_factorial(-1).unwrap(), BigInt::one());
        assert_eq!(double_factorial(0).unwrap(), BigInt::one());
        assert_eq!(double_factorial(1).unwrap(), BigInt::one());
        assert_eq!(double_factorial(5).unwrap(), BigInt::from(15));
        assert_eq!(double_factorial(6).unwrap(), BigInt::from(48));
        assert!(matches!(
            double_factorial(-3),
            Err(Error::DoubleFactorialRange(-3))
        ));
    }

    #[test]
    fn pochhammer_rising() {
        assert_eq!(pochhammer(&rat(3, 1), 0), Rat::one());
        // (2)_4 = 2*3*4*5 = 120
        assert_eq!(pochhammer(&rat(2, 1), 4), rat(120, 1));
        // (-1/2)_2 = (-1/2)(1/2) = -1/4
        assert_eq!(pochhammer(&rat(-1, 2), 2), rat(-1, 4));
    }

    #[test]
    fn gen_binomial_rational() {
        // C(-1/2, 2) = (-1/2)(-3/2)/2 = 3/8
        assert_eq!(gen_binomial(&rat(-1, 2), 2), rat(3, 8));
        assert_eq!(gen_binomial(&rat(4, 1), 2), rat(6, 1));
        assert_eq!(gen_binomial(&rat(4, 1), 0), Rat::one());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rat("12").unwrap(), rat(12, 1));
        assert_eq!(parse_rat("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rat("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert_eq!(format_rat(&rat(-3, 4)), "-3/4");
        assert_eq!(format_rat(&rat(8, 4)), "2");
    }
}
