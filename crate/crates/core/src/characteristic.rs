//! Exact rational theta characteristics.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;

use crate::numeric::frac;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Genus-1 characteristic `[α; β]`. Values are kept in lowest terms with a
/// positive denominator; no range restriction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharPair {
    pub alpha: Rational64,
    pub beta: Rational64,
}

impl CharPair {
    pub fn new(alpha: Rational64, beta: Rational64) -> Self {
        Self { alpha, beta }
    }

    pub const fn zero() -> Self {
        Self {
            alpha: Rational64::new_raw(0, 1),
            beta: Rational64::new_raw(0, 1),
        }
    }

    /// Canonical form for theta constants (argument zero).
    ///
    /// Returns `(k, canon)` such that `[α;β](τ) = e[k] · [canon](τ)`, with
    /// both entries of `canon` in `[0, 1)`. The flip `[α;β] = [−α;−β]` is
    /// applied when it lowers `β`.
    pub fn canonical_constant(&self) -> (Rational64, CharPair) {
        let direct = reduce_into_unit(self.alpha, self.beta);
        let flipped = reduce_into_unit(-self.alpha, -self.beta);
        if flipped.1.beta < direct.1.beta {
            flipped
        } else {
            direct
        }
    }
}

/// `[α;β] = e[kα]·[α mod 1; β − k]` with `k = ⌊β⌋`.
fn reduce_into_unit(alpha: Rational64, beta: Rational64) -> (Rational64, CharPair) {
    let k = beta.numer().div_floor(beta.denom());
    let phase = frac(alpha * Rational64::from_integer(k));
    (phase, CharPair::new(frac(alpha), beta - Rational64::from_integer(k)))
}

impl fmt::Display for CharPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.alpha, self.beta)
    }
}

/// Genus-2 characteristic `[α₁α₂; β₁β₂]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharQuad {
    pub alpha: [Rational64; 2],
    pub beta: [Rational64; 2],
}

impl CharQuad {
    pub fn new(alpha: [Rational64; 2], beta: [Rational64; 2]) -> Self {
        Self { alpha, beta }
    }

    pub fn zero() -> Self {
        Self::new([rat(0, 1); 2], [rat(0, 1); 2])
    }

    /// Characteristic `[a₁a₂; 00]`.
    pub fn top(a1: Rational64, a2: Rational64) -> Self {
        Self::new([a1, a2], [rat(0, 1); 2])
    }
}

impl fmt::Display for CharQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{};{},{}]",
            self.alpha[0], self.alpha[1], self.beta[0], self.beta[1]
        )
    }
}
