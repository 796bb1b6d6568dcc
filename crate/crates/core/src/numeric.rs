//! Shared numeric helpers: tolerances, exact unit phases, compensated sums.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};

/// Default hard cap on truncation indices and product lengths.
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// Environment variable overriding [`DEFAULT_MAX_TERMS`].
pub const MAX_TERMS_ENV: &str = "THETA_LAB_MAX_TERMS";

fn env_max_terms() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_TERMS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_MAX_TERMS)
    })
}

/// Absolute error target for series tails, plus the truncation hard cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    eps: f64,
    max_terms: usize,
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidTolerance(eps));
        }
        Ok(Self {
            eps,
            max_terms: env_max_terms(),
        })
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps: 1e-12,
            max_terms: env_max_terms(),
        }
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: Rational64) -> Rational64 {
    let (n, d) = (*x.numer(), *x.denom());
    Rational64::new(n.mod_floor(&d), d)
}

/// `e[x] = exp(2πix)` for rational `x`, with the exact values at multiples of
/// 1/4 and the cube roots of unity returned without rounding.
pub fn unit_phase(x: Rational64) -> Complex64 {
    let f = frac(x);
    let (n, d) = (*f.numer(), *f.denom());
    let h = 3f64.sqrt() / 2.0;
    match (n, d) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        (1, 3) => Complex64::new(-0.5, h),
        (2, 3) => Complex64::new(-0.5, -h),
        (1, 6) => Complex64::new(0.5, h),
        (5, 6) => Complex64::new(0.5, -h),
        _ => {
            let t = 2.0 * PI * (n as f64) / (d as f64);
            Complex64::new(t.cos(), t.sin())
        }
    }
}

/// `exp(2πi x)` for real or complex `x`.
pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

pub fn r2f(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Smallest `n >= start` with `bound(n) < target`, or an error past `cap`.
pub(crate) fn first_below(
    start: usize,
    cap: usize,
    target: f64,
    bound: impl Fn(usize) -> f64,
) -> Result<usize> {
    let mut n = start;
    loop {
        if bound(n) < target {
            return Ok(n);
        }
        if n >= cap {
            // report how far the bound would have had to go, within reason
            let mut needed = n;
            while needed < cap.saturating_mul(64) && bound(needed) >= target {
                needed = needed.saturating_mul(2).max(needed + 1);
            }
            return Err(Error::PrecisionUnattainable { needed, cap });
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn phase_table_matches_trig() {
        for d in 1..=14 {
            for n in -30..30 {
                let x = r(n, d);
                let t = 2.0 * PI * r2f(x);
                let z = unit_phase(x);
                // libm loses ~|t|·ulp on large arguments
                assert!((z - Complex64::new(t.cos(), t.sin())).norm() < 1e-12, "{x}");
            }
        }
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(r(-1, 3)), r(2, 3));
        assert_eq!(frac(r(7, 3)), r(1, 3));
        assert_eq!(frac(r(2, 1)), r(0, 1));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(Complex64::new(1e16, 0.0));
        s.add(Complex64::new(1.0, 1.0));
        s.add(Complex64::new(-1e16, 0.0));
        assert_eq!(s.value(), Complex64::new(1.0, 1.0));
    }

    #[test]
    fn tolerance_rejects_out_of_range() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert!(Tolerance::new(1e-12).is_ok());
    }
}
