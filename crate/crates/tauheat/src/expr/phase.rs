//! Linear phases of exponential terms: a x + sum_j b_j s_{2j-1} + c.
//!
//! A phase stores finitely many explicit time coefficients plus optional
//! dispersion generators. A generator (m, k) contributes m * k^(2j-1) to the
//! coefficient of s_{2j-1} for every j at once, which is how soliton phases
//! define derivatives with respect to arbitrarily high times. Since only odd
//! powers occur, a generator with negative wavenumber equals one with positive
//! wavenumber and flipped multiplier; normalization exploits that to keep a
//! canonical form.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::q::{rat_pow, Rat};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LinearPhase {
    /// Explicit coefficient of s_{2j-1}, keyed by j; j = 1 is x.
    explicit: BTreeMap<u32, Rat>,
    /// Dispersion generators (multiplier, wavenumber), wavenumbers positive
    /// and strictly increasing after normalization.
    generators: Vec<(Rat, Rat)>,
    /// Constant offset.
    constant: Rat,
}

impl LinearPhase {
    pub fn zero() -> Self {
        LinearPhase::default()
    }

    pub fn with_constant(c: Rat) -> Self {
        LinearPhase {
            constant: c,
            ..LinearPhase::default()
        }
    }

    /// Phase with explicit coefficients only (j = 1 is the x coefficient).
    pub fn from_explicit(coeffs: BTreeMap<u32, Rat>, constant: Rat) -> Self {
        let mut p = LinearPhase {
            explicit: coeffs,
            generators: Vec::new(),
            constant,
        };
        p.normalize();
        p
    }

    /// Dispersion phase m * (k x + k^3 s_3 + k^5 s_5 + ...) + c.
    pub fn from_generator(multiplier: Rat, wavenumber: Rat, constant: Rat) -> Self {
        let mut p = LinearPhase {
            explicit: BTreeMap::new(),
            generators: alloc::vec![(multiplier, wavenumber)],
            constant,
        };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.explicit.retain(|_, c| !c.is_zero());
        let mut merged: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (m, k) in self.generators.drain(..) {
            if m.is_zero() || k.is_zero() {
                continue;
            }
            // odd powers only: (m, -k) == (-m, k)
            let (m, k) = if k.is_negative() { (-m, -k) } else { (m, k) };
            *merged.entry(k).or_insert_with(Rat::zero) += m;
        }
        self.generators = merged
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(k, m)| (m, k))
            .collect();
    }

    /// Coefficient of s_{2j-1} (j = 1 gives the x coefficient).
    pub fn time_coeff(&self, j: u32) -> Rat {
        let mut c = self.explicit.get(&j).cloned().unwrap_or_else(Rat::zero);
        for (m, k) in &self.generators {
            c += m * rat_pow(k, (2 * j - 1) as i32);
        }
        c
    }

    pub fn x_coeff(&self) -> Rat {
        self.time_coeff(1)
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn explicit_coeffs(&self) -> &BTreeMap<u32, Rat> {
        &self.explicit
    }

    pub fn generators(&self) -> &[(Rat, Rat)] {
        &self.generators
    }

    /// True when the phase is identically zero (exp(phase) = 1).
    pub fn is_zero(&self) -> bool {
        self.explicit.is_empty() && self.generators.is_empty() && self.constant.is_zero()
    }

    /// Sum of phases, for products of exponentials.
    pub fn add(&self, other: &LinearPhase) -> LinearPhase {
        let mut explicit = self.explicit.clone();
        for (j, c) in &other.explicit {
            *explicit.entry(*j).or_insert_with(Rat::zero) += c;
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        let mut p = LinearPhase {
            explicit,
            generators,
            constant: &self.constant + &other.constant,
        };
        p.normalize();
        p
    }

    /// Splits the phase value into (x-coefficient, remainder): the phase at a
    /// point equals a * x + b. `times` is the point's set of nonzero times
    /// keyed by odd index 2j-1 (3, 5, ...); a phase with generators has
    /// nonzero coefficients at every time, but only the finitely many times
    /// the point carries contribute. Keeping x symbolic lets callers evaluate
    /// at non-rational spatial points (quadrature nodes).
    pub fn split_value(&self, times: &BTreeMap<u32, Rat>) -> (Rat, Rat) {
        let a = self.x_coeff();
        let mut b = self.constant.clone();
        for (&odd, t) in times {
            debug_assert!(odd >= 3 && odd % 2 == 1);
            if t.is_zero() {
                continue;
            }
            let j = (odd + 1) / 2;
            b += self.time_coeff(j) * t;
        }
        (a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::rat;

    #[test]
    fn generator_dispersion_rule() {
        // 2 * (k x + k^3 s3 + ...) with k = 3/2
        let p = LinearPhase::from_generator(rat(2, 1), rat(3, 2), Rat::zero());
        assert_eq!(p.x_coeff(), rat(3, 1));
        assert_eq!(p.time_coeff(2), rat(27, 4)); // 2*(3/2)^3
        assert_eq!(p.time_coeff(3), rat(243, 16)); // 2*(3/2)^5
    }

    #[test]
    fn negative_wavenumber_folds() {
        let a = LinearPhase::from_generator(rat(1, 1), rat(2, 1), Rat::zero());
        let b = LinearPhase::from_generator(rat(-1, 1), rat(-2, 1), Rat::zero());
        assert_eq!(a, b);
        // (1, k) + (1, -k) cancels identically
        let c = a.add(&LinearPhase::from_generator(rat(1, 1), rat(-2, 1), Rat::zero()));
        assert!(c.is_zero());
    }

    #[test]
    fn phase_addition() {
        let mut m = BTreeMap::new();
        m.insert(1, rat(1, 1));
        m.insert(2, rat(-1, 3));
        let a = LinearPhase::from_explicit(m, rat(1, 2));
        let b = a.add(&a);
        assert_eq!(b.x_coeff(), rat(2, 1));
        assert_eq!(b.time_coeff(2), rat(-2, 3));
        assert_eq!(b.constant(), &rat(1, 1));
    }
}
