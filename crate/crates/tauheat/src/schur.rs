//! Elementary Schur polynomials S_k and their realization as time-derivative
//! operators.
//!
//! S_k is the coefficient of z^k in exp(sum_j s_{2j-1} z^(2j-1)); only odd
//! variables occur. Substituting the weighted derivatives
//! ptilde = (d_1, d_3/3, d_5/5, ...) turns S_k into an operator
//!
//!    S_k(+-ptilde) = sum_alpha c_alpha d^alpha,
//!    c_alpha = (+-1)^(sum m_j) prod_j 1 / ((2j-1)^(m_j) m_j!),
//!
//! where alpha runs over the partitions of k into odd parts, m_j counting the
//! parts equal to 2j-1.

use alloc::vec::Vec;

use num_traits::One;

use crate::expr::poly::{Monomial, MultiPoly};
use crate::expr::tau::{ExpPoly, TauFunction};
use crate::q::{factorial, rat_pow, Rat};

/// Multi-index over the odd slots: exponent m_j for each part size 2j-1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OddMultiIndex {
    /// Sorted (j, m_j) pairs with m_j > 0.
    exps: Vec<(u32, u32)>,
}

impl OddMultiIndex {
    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exps
    }

    /// Weight sum_j (2j-1) m_j, the partition size.
    pub fn weight(&self) -> u32 {
        self.exps.iter().map(|&(j, m)| (2 * j - 1) * m).sum()
    }

    /// Total number of parts sum_j m_j.
    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&(_, m)| m).sum()
    }

    fn monomial(&self) -> Monomial {
        Monomial::from_pairs(self.exps.clone())
    }
}

/// All partitions of k into odd parts, as multi-indices in a deterministic
/// lexicographic order.
pub fn odd_partitions(k: u32) -> Vec<OddMultiIndex> {
    let mut out = Vec::new();
    let mut current: Vec<(u32, u32)> = Vec::new();
    // recurse over the largest allowed part
    fn rec(remaining: u32, max_j: u32, current: &mut Vec<(u32, u32)>, out: &mut Vec<OddMultiIndex>) {
        if remaining == 0 {
            let mut exps = current.clone();
            exps.reverse(); // ascending j
            out.push(OddMultiIndex { exps });
            return;
        }
        let mut j = max_j;
        while j >= 1 {
            let part = 2 * j - 1;
            if part <= remaining {
                let max_m = remaining / part;
                for m in (1..=max_m).rev() {
                    current.push((j, m));
                    rec(remaining - part * m, j - 1, current, out);
                    current.pop();
                }
            }
            j -= 1;
        }
    }
    let max_j = k / 2 + 1;
    rec(k, max_j, &mut current, &mut out);
    out.sort();
    out
}

/// Sign selector for S_k(ptilde) vs S_k(-ptilde).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurSign {
    Plus,
    Minus,
}

/// The operator S_k(+-ptilde) expanded over weighted derivative multi-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurOperator {
    order: u32,
    sign: SchurSign,
    terms: Vec<(OddMultiIndex, Rat)>,
}

impl SchurOperator {
    pub fn new(order: u32, sign: SchurSign) -> Self {
        let terms = odd_partitions(order)
            .into_iter()
            .map(|alpha| {
                let mut c = Rat::one();
                for &(j, m) in alpha.exponents() {
                    let base = Rat::from_integer((2 * j as i64 - 1).into());
                    c /= rat_pow(&base, m as i32) * Rat::from_integer(factorial(m));
                }
                if sign == SchurSign::Minus && alpha.total_degree() % 2 == 1 {
                    c = -c;
                }
                (alpha, c)
            })
            .collect();
        SchurOperator { order, sign, terms }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn sign(&self) -> SchurSign {
        self.sign
    }

    pub fn terms(&self) -> &[(OddMultiIndex, Rat)] {
        &self.terms
    }

    /// Applies the operator to a tau-function: sum_alpha c_alpha d^alpha tau.
    pub fn apply(&self, tau: &TauFunction) -> ExpPoly {
        let mut acc = ExpPoly::zero();
        for (alpha, c) in &self.terms {
            let mut d = tau.expr().clone();
            for &(j, m) in alpha.exponents() {
                for _ in 0..m {
                    d = d.deriv(j);
                }
                if d.is_zero() {
                    break;
                }
            }
            acc = acc.add(&d.scale(c));
        }
        acc
    }
}

/// The polynomial S_k(s) itself, in the shared variable indexing
/// (variable j is s_{2j-1}).
pub fn schur_poly(k: u32) -> MultiPoly {
    let mut acc = MultiPoly::zero();
    for alpha in odd_partitions(k) {
        let mut c = Rat::one();
        for &(_, m) in alpha.exponents() {
            c /= Rat::from_integer(factorial(m));
        }
        acc = acc.add(&MultiPoly::from_terms(alloc::vec![(alpha.monomial(), c)]));
    }
    acc
}

/// S_k(+-ptilde) tau as an exponential-polynomial expression. Linear in tau;
/// k = 0 returns tau itself.
pub fn schur_apply(tau: &TauFunction, k: u32, sign: SchurSign) -> ExpPoly {
    SchurOperator::new(k, sign).apply(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    #[test]
    fn partitions_of_small_orders() {
        assert_eq!(odd_partitions(0).len(), 1); // empty partition
        assert_eq!(odd_partitions(1).len(), 1); // 1
        assert_eq!(odd_partitions(2).len(), 1); // 1+1
        assert_eq!(odd_partitions(3).len(), 2); // 1+1+1, 3
        assert_eq!(odd_partitions(4).len(), 2); // 1^4, 3+1
        assert_eq!(odd_partitions(8).len(), 6);
        for p in odd_partitions(8) {
            assert_eq!(p.weight(), 8);
        }
    }

    #[test]
    fn schur_poly_small_values() {
        // S_0 = 1, S_2 = s1^2/2, S_3 = s1^3/6 + s3
        assert!(schur_poly(0).is_one());
        let s1 = MultiPoly::var(1);
        let s3 = MultiPoly::var(2);
        assert_eq!(schur_poly(2), s1.mul(&s1).scale(&rat(1, 2)));
        assert_eq!(
            schur_poly(3),
            s1.mul(&s1).mul(&s1).scale(&rat(1, 6)).add(&s3)
        );
    }

    #[test]
    fn apply_to_constant_tau() {
        let tau = TauFunction::one();
        assert!(schur_apply(&tau, 0, SchurSign::Plus).is_one());
        for k in 1..=6 {
            assert!(schur_apply(&tau, k, SchurSign::Minus).is_zero());
            assert!(schur_apply(&tau, k, SchurSign::Plus).is_zero());
        }
    }

    #[test]
    fn minus_sign_on_tau_x() {
        // S_1(-ptilde) x = -d/dx x = -1
        let tau = TauFunction::make_rational(1).unwrap();
        let r = schur_apply(&tau, 1, SchurSign::Minus);
        assert_eq!(r, ExpPoly::constant(rat(-1, 1)));
    }

    #[test]
    fn operator_coefficients_match_exponential_expansion() {
        // coefficient of the pure-d1 index must be 1/k!, of the single part
        // 2j-1 must be 1/(2j-1)
        let op = SchurOperator::new(5, SchurSign::Plus);
        for (alpha, c) in op.terms() {
            if alpha.exponents() == [(1, 5)] {
                assert_eq!(c, &rat(1, 120));
            }
            if alpha.exponents() == [(3, 1)] {
                assert_eq!(c, &rat(1, 5));
            }
        }
        let opm = SchurOperator::new(5, SchurSign::Minus);
        for (alpha, c) in opm.terms() {
            if alpha.exponents() == [(3, 1)] {
                assert_eq!(c, &rat(-1, 5));
            }
            if alpha.exponents() == [(1, 2), (2, 1)] {
                // d1^2 (d3/3): 1/(2! * 3) with odd part count 3 -> minus
                assert_eq!(c, &rat(-1, 6));
            }
        }
    }
}
