//! Gegenbauer (ultraspherical) polynomials for arbitrary rational parameter,
//! the P_{n,j} polynomials from the smoothness analysis, and the exact
//! identities tying the two together.
//!
//! For lambda > -1/2 the classical orthogonality gives C_n^lambda its parity;
//! for the negative parameters needed here parity follows from the three-term
//! recurrence, and all identity checks are exact rational polynomial
//! comparisons (generalized binomials over Q, no gamma functions).

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::q::{binomial, double_factorial, factorial, format_rat, gen_binomial, rat, Rat};
use crate::Result;

/// Dense univariate polynomial over Q; coeffs[i] multiplies w^i.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn one() -> Self {
        UniPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = UniPoly { coeffs: alloc::vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + other.coeff(i));
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = alloc::vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// w -> -w.
    pub fn reflect(&self) -> UniPoly {
        UniPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
                .collect(),
        }
    }

    /// Parity check: even (j = 0) or odd (j = 1) under w -> -w.
    pub fn has_parity(&self, j: u32) -> bool {
        let r = self.reflect();
        if j % 2 == 0 {
            r == *self
        } else {
            r == self.scale(&-Rat::one())
        }
    }

    pub fn eval(&self, w: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    /// Coefficient list "c0, c1, ..." in the p/q notation.
    pub fn render_coeffs(&self) -> String {
        if self.coeffs.is_empty() {
            return String::from("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(format_rat).collect();
        parts.join(", ")
    }
}

/// (w - 1)^k as a UniPoly.
fn w_minus_one_pow(k: u32) -> UniPoly {
    let base = UniPoly::from_coeffs(alloc::vec![-Rat::one(), Rat::one()]);
    let mut acc = UniPoly::one();
    for _ in 0..k {
        acc = acc.mul(&base);
    }
    acc
}

/// Gegenbauer polynomial by the explicit (w-1)-expansion
///
///   C_n^lambda(w) = sum_k 2^k C(lambda+k-1, k) C(2 lambda+n+k-1, n-k) (w-1)^k,
///
/// valid for arbitrary rational lambda via generalized binomials.
pub fn gegenbauer_def(n: u32, lambda: &Rat) -> UniPoly {
    let mut acc = UniPoly::zero();
    for k in 0..=n {
        let c = rat(2, 1).pow(k as i32)
            * gen_binomial(&(lambda + rat(k as i64 - 1, 1)), k)
            * gen_binomial(
                &(lambda * rat(2, 1) + rat(n as i64 + k as i64 - 1, 1)),
                n - k,
            );
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&w_minus_one_pow(k).scale(&c));
    }
    acc
}

/// Gegenbauer polynomial by the three-term recurrence
///
///   2(m + lambda) w C_m = (m+1) C_{m+1} + (m + 2 lambda - 1) C_{m-1}
///
/// from C_0 = 1, C_1 = 2 lambda w. The only divisions are by m+1 > 0, so the
/// recurrence never breaks down.
pub fn gegenbauer_rec(n: u32, lambda: &Rat) -> UniPoly {
    let w = UniPoly::from_coeffs(alloc::vec![Rat::zero(), Rat::one()]);
    let mut c0 = UniPoly::one();
    let mut c1 = w.scale(&(lambda * rat(2, 1)));
    if n == 0 {
        return c0;
    }
    if n == 1 {
        return c1;
    }
    for m in 1..n {
        let a = &rat(2, 1) * (lambda + rat(m as i64, 1));
        let b = rat(m as i64, 1) + lambda * rat(2, 1) - Rat::one();
        let next = w
            .scale(&a)
            .mul(&c1)
            .sub(&c0.scale(&b))
            .scale(&(Rat::one() / rat(m as i64 + 1, 1)));
        c0 = c1;
        c1 = next;
    }
    c1
}

/// P_{n,j}(w) by the forward sum
///
///   sum_{k=0}^{n-1} 2^k C(j,k) (2n-2-k)!/(n-k-1)! (w-1)^(j-k)
///
/// (terms with k > j vanish through the binomial); 1 <= n, 0 <= j <= 2n-1.
pub fn pnj(n: u32, j: u32) -> Result<UniPoly> {
    if n == 0 || j > 2 * n - 1 {
        return Err(Error::InvalidArgument("pnj needs n >= 1 and j <= 2n-1"));
    }
    let mut acc = UniPoly::zero();
    for k in 0..n.min(j + 1) {
        let c = rat(2, 1).pow(k as i32)
            * Rat::from_integer(binomial(j, k))
            * Rat::from_integer(factorial(2 * n - 2 - k))
            / Rat::from_integer(factorial(n - k - 1));
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&w_minus_one_pow(j - k).scale(&c));
    }
    Ok(acc)
}

/// P_{n,j}(w) by the reindexed sum
///
///   sum_{k=max(0, j-n+1)}^{j} 2^(j-k) C(j,k) (2n-j-2+k)!/(n-j+k-1)! (w-1)^k,
///
/// which must agree with `pnj` exactly.
pub fn pnj_reindexed(n: u32, j: u32) -> Result<UniPoly> {
    if n == 0 || j > 2 * n - 1 {
        return Err(Error::InvalidArgument("pnj needs n >= 1 and j <= 2n-1"));
    }
    let mut acc = UniPoly::zero();
    let lo = (j as i64 - n as i64 + 1).max(0) as u32;
    for k in lo..=j {
        let c = rat(2, 1).pow((j - k) as i32)
            * Rat::from_integer(binomial(j, k))
            * Rat::from_integer(factorial(2 * n - j - 2 + k))
            / Rat::from_integer(factorial(n + k - j - 1));
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&w_minus_one_pow(k).scale(&c));
    }
    Ok(acc)
}

/// Exact identity between P_{n,j} and the Gegenbauer polynomial with
/// parameter n - j - 1/2:
///
///   j <= n-1:      P_{n,j} =  j! 2^(n-1) (2n-2j-3)!! C_j
///   n <= j <= 2n-2: P_{n,j} = (-1)^(j-n+1) j! 2^(n-1) / (2j-2n+1)!! C_j
///   j = 2n-1:      P_{n,j} = (-1)^n 2^(n-1) (2n-2)!! (C_{2n-1} + 1)
///
/// with (-1)!! = 1. Returns true iff the identity holds as exact polynomials.
pub fn pnj_gegenbauer_identity(n: u32, j: u32) -> Result<bool> {
    if n == 0 || j > 2 * n - 1 {
        return Err(Error::InvalidArgument("identity needs n >= 1, j <= 2n-1"));
    }
    let lambda = rat(n as i64 - j as i64, 1) - rat(1, 2);
    let cj = gegenbauer_def(j, &lambda);
    let p = pnj(n, j)?;
    let rhs = if j + 1 <= n {
        // j <= n-1
        let c = Rat::from_integer(factorial(j))
            * rat(2, 1).pow(n as i32 - 1)
            * Rat::from_integer(double_factorial(2 * n as i64 - 2 * j as i64 - 3)?);
        cj.scale(&c)
    } else if j <= 2 * n - 2 {
        let sign = if (j - n + 1) % 2 == 0 {
            Rat::one()
        } else {
            -Rat::one()
        };
        let c = sign * Rat::from_integer(factorial(j)) * rat(2, 1).pow(n as i32 - 1)
            / Rat::from_integer(double_factorial(2 * j as i64 - 2 * n as i64 + 1)?);
        cj.scale(&c)
    } else {
        // j = 2n-1
        let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
        let c = sign
            * rat(2, 1).pow(n as i32 - 1)
            * Rat::from_integer(double_factorial(2 * n as i64 - 2)?);
        cj.add(&UniPoly::one()).scale(&c)
    };
    Ok(p == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        // C_0 = 1, C_1 = 2 lambda w, C_2 = 2 lambda (1+lambda) w^2 - lambda
        let lam = rat(1, 3);
        assert!(gegenbauer_def(0, &lam).is_zero() == false);
        assert_eq!(gegenbauer_def(0, &lam), UniPoly::one());
        assert_eq!(
            gegenbauer_def(1, &lam),
            UniPoly::from_coeffs(alloc::vec![Rat::zero(), rat(2, 3)])
        );
        let c2 = gegenbauer_def(2, &lam);
        let expect = UniPoly::from_coeffs(alloc::vec![
            -lam.clone(),
            Rat::zero(),
            &rat(2, 1) * &lam * (Rat::one() + &lam),
        ]);
        assert_eq!(c2, expect);
        // C_3 at lambda = 1: 8w^3 - 4w
        let c3 = gegenbauer_def(3, &rat(1, 1));
        assert_eq!(
            c3,
            UniPoly::from_coeffs(alloc::vec![
                Rat::zero(),
                rat(-4, 1),
                Rat::zero(),
                rat(8, 1)
            ])
        );
    }

    #[test]
    fn def_equals_rec() {
        for lam in [rat(-7, 2), rat(-1, 2), rat(1, 3), rat(2, 1), rat(-13, 2)] {
            for n in 0..=12 {
                assert_eq!(
                    gegenbauer_def(n, &lam),
                    gegenbauer_rec(n, &lam),
                    "n={n} lambda={lam:?}"
                );
            }
        }
    }

    #[test]
    fn parity_from_recurrence() {
        for lam in [rat(-13, 2), rat(-3, 2), rat(5, 2)] {
            for n in 0..=9 {
                assert!(gegenbauer_rec(n, &lam).has_parity(n), "n={n} lam={lam:?}");
            }
        }
    }

    #[test]
    fn pnj_two_routes_agree() {
        for n in 1..=8 {
            for j in 0..=(2 * n - 1) {
                assert_eq!(
                    pnj(n, j).unwrap(),
                    pnj_reindexed(n, j).unwrap(),
                    "n={n} j={j}"
                );
            }
        }
    }

    #[test]
    fn pnj_parity() {
        for n in 1..=8 {
            for j in 0..=(2 * n - 2) {
                assert!(pnj(n, j).unwrap().has_parity(j), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn pnj_simple_cases() {
        // P_{1,0} = 1 (single k = 0 term)
        assert_eq!(pnj(1, 0).unwrap(), UniPoly::one());
        // n=1, j=0 identity: 1 = 0! 2^0 (-1)!! C_0^{1/2}
        assert!(pnj_gegenbauer_identity(1, 0).unwrap());
    }

    #[test]
    fn identities_exhaustive() {
        for n in 1..=8 {
            for j in 0..=(2 * n - 1) {
                assert!(pnj_gegenbauer_identity(n, j).unwrap(), "n={n} j={j}");
            }
        }
    }
}
