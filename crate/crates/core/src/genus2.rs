//! Genus-2 theta functions with rational characteristics:
//!
//! ```text
//! θ[α;β](ζ, τ) = Σ_{m−α∈ℤ²} e[½ m·τm + m·(ζ+β)]
//! ```
//!
//! No normalisation prefactor is applied.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::characteristic::CharQuad;
use crate::error::{Error, Result};
use crate::genus1::TauPoint;
use crate::numeric::{first_below, r2f, unit_phase, CompensatedSum, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Symmetric 2×2 period matrix with positive-definite imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMatrix2 {
    t11: Complex64,
    t12: Complex64,
    t22: Complex64,
}

impl PeriodMatrix2 {
    pub fn new(t11: Complex64, t12: Complex64, t22: Complex64) -> Result<Self> {
        let finite = [t11, t12, t22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || t11.im <= 0.0 || t11.im * t22.im - t12.im * t12.im <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { t11, t12, t22 })
    }

    /// `diag(a, b)`.
    pub fn diagonal(a: TauPoint, b: TauPoint) -> Self {
        Self {
            t11: a.value(),
            t12: Complex64::new(0.0, 0.0),
            t22: b.value(),
        }
    }

    pub fn t11(&self) -> Complex64 {
        self.t11
    }

    pub fn t12(&self) -> Complex64 {
        self.t12
    }

    pub fn t22(&self) -> Complex64 {
        self.t22
    }

    /// Smallest eigenvalue of `Im τ`.
    pub fn lambda_min(&self) -> f64 {
        let (a, b, c) = (self.t11.im, self.t12.im, self.t22.im);
        0.5 * (a + c) - (0.25 * (a - c) * (a - c) + b * b).sqrt()
    }
}

/// The `τ₁₁ = τ₂₂` subset `[[τ₀, τ₁], [τ₁, τ₀]]`, parametrised by
/// `w₁ = ½(τ₀+τ₁)` and `w₂ = ½(τ₀−τ₁)`. Positive definiteness of the
/// imaginary part is `Im w₁ > 0` and `Im w₂ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricTau {
    tau0: Complex64,
    tau1: Complex64,
    // kept as given so that from_w round-trips exactly
    w1: Complex64,
    w2: Complex64,
}

impl SymmetricTau {
    pub fn new(tau0: Complex64, tau1: Complex64) -> Result<Self> {
        let (w1, w2) = ((tau0 + tau1) * 0.5, (tau0 - tau1) * 0.5);
        if w1.im > 0.0 && w2.im > 0.0 {
            Ok(Self { tau0, tau1, w1, w2 })
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }

    /// `τ₀ = w₁ + w₂`, `τ₁ = w₁ − w₂`.
    pub fn from_w(w1: TauPoint, w2: TauPoint) -> Self {
        Self {
            tau0: w1.value() + w2.value(),
            tau1: w1.value() - w2.value(),
            w1: w1.value(),
            w2: w2.value(),
        }
    }

    /// From the nome pair `q = e^{πiτ₀}`, `r = e^{πiτ₁}` (principal logs).
    pub fn from_nomes(q: Complex64, r: Complex64) -> Result<Self> {
        if q.norm() == 0.0 || r.norm() == 0.0 || !q.norm().is_finite() || !r.norm().is_finite() {
            return Err(Error::InvalidNome("q and r must be finite and nonzero".into()));
        }
        if !(q.norm() < 1.0 && (q * r).norm() < 1.0 && (q / r).norm() < 1.0) {
            return Err(Error::InvalidNome(
                "need |q| < 1, |qr| < 1 and |q/r| < 1".into(),
            ));
        }
        Self::new(q.ln() / (I * PI), r.ln() / (I * PI))
    }

    pub fn tau0(&self) -> Complex64 {
        self.tau0
    }

    pub fn tau1(&self) -> Complex64 {
        self.tau1
    }

    pub fn w1(&self) -> TauPoint {
        TauPoint::new(self.w1).expect("invariant: Im w₁ > 0")
    }

    pub fn w2(&self) -> TauPoint {
        TauPoint::new(self.w2).expect("invariant: Im w₂ > 0")
    }

    pub fn matrix(&self) -> PeriodMatrix2 {
        PeriodMatrix2 {
            t11: self.tau0,
            t12: self.tau1,
            t22: self.tau0,
        }
    }
}

/// `τ₀ = w₁ + w₂`, `τ₁ = w₁ − w₂`.
pub fn symmetric_tau_from_w(w1: TauPoint, w2: TauPoint) -> SymmetricTau {
    SymmetricTau::from_w(w1, w2)
}

/// The cubic period matrix `[[4w, 2w], [2w, 4w]]`, i.e. `w₁ = 3w`, `w₂ = w`.
pub fn cubic_period(w: TauPoint) -> PeriodMatrix2 {
    let w = w.value();
    PeriodMatrix2 {
        t11: w * 4.0,
        t12: w * 2.0,
        t22: w * 4.0,
    }
}

/// Window radius for the square summation domain `|mᵢ + αᵢ| ≤ R`.
///
/// Outside the window every point has `|m|₂ ≥ R`, and the sup-norm ring at
/// distance `R + k` holds at most `8(R+k) + 12` points, each bounded by
/// `exp(−πλρ² + 2πρs)` with `λ = λ_min(Im τ)` and `s = |Im ζ|₂`.
pub(crate) fn window_radius(lambda: f64, s: f64, tol: &Tolerance) -> Result<usize> {
    let start = ((s / lambda).ceil() as usize).saturating_add(1);
    first_below(start, tol.max_terms(), tol.eps() / 4.0, |r| {
        let mut tail = 0.0;
        let mut k = 0usize;
        loop {
            let rho = (r + k) as f64;
            let term = (8.0 * rho + 12.0) * (-PI * lambda * rho * rho + 2.0 * PI * rho * s).exp();
            tail += term;
            if term < 1e-300 || term < tail * 1e-17 {
                break;
            }
            k += 1;
        }
        tail
    })
}

/// `θ[α;β](ζ, τ)` with absolute truncation error below `tol.eps()`.
pub fn theta_char_g2(
    ch: CharQuad,
    zeta: [Complex64; 2],
    tau: &PeriodMatrix2,
    tol: &Tolerance,
) -> Result<Complex64> {
    let s = zeta[0].im.hypot(zeta[1].im);
    let radius = window_radius(tau.lambda_min(), s, tol)? as i64;
    Ok(window_sum(ch, zeta, tau, radius))
}

fn index_range(alpha: Rational64, radius: i64) -> std::ops::RangeInclusive<i64> {
    let r = Rational64::from_integer(radius);
    (-r - alpha).ceil().to_integer()..=(r - alpha).floor().to_integer()
}

/// Lexicographic sum over the square window of the given radius.
pub(crate) fn window_sum(
    ch: CharQuad,
    zeta: [Complex64; 2],
    tau: &PeriodMatrix2,
    radius: i64,
) -> Complex64 {
    let mut acc = CompensatedSum::new();
    for m1 in index_range(ch.alpha[0], radius) {
        let k1 = Rational64::from_integer(m1) + ch.alpha[0];
        let x = r2f(k1);
        let phase1 = k1 * ch.beta[0];
        for m2 in index_range(ch.alpha[1], radius) {
            let k2 = Rational64::from_integer(m2) + ch.alpha[1];
            let y = r2f(k2);
            let quad = tau.t11 * (x * x) + tau.t12 * (2.0 * x * y) + tau.t22 * (y * y);
            let lin = zeta[0] * x + zeta[1] * y;
            let w = (I * PI * (quad + lin * 2.0)).exp();
            acc.add(w * unit_phase(phase1 + k2 * ch.beta[1]));
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::{rat, CharPair};
    use crate::genus1::{theta_char_g1, theta_j};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    const Z2: [Complex64; 2] = [Complex64::new(0.0, 0.0); 2];

    #[test]
    fn diagonal_zero_characteristic_factorises() {
        let t = TauPoint::from_parts(0.0, 2.0).unwrap();
        let m = PeriodMatrix2::diagonal(t, t);
        let v = theta_char_g2(CharQuad::zero(), Z2, &m, &tol()).unwrap();
        let t3 = theta_j(3, c(0.0, 0.0), t, &tol()).unwrap();
        assert!((v - t3 * t3).norm() < 1e-12);
    }

    #[test]
    fn half_half_on_diagonal_is_theta2_squared() {
        let w = TauPoint::from_parts(0.1, 0.9).unwrap();
        let m = PeriodMatrix2::diagonal(w, w);
        let h = rat(1, 2);
        let v = theta_char_g2(CharQuad::top(h, h), Z2, &m, &tol()).unwrap();
        let t2 = theta_char_g1(CharPair::new(h, rat(0, 1)), c(0.0, 0.0), w, &tol()).unwrap();
        assert!((v - t2 * t2).norm() < 1e-12);
    }

    #[test]
    fn cubic_half_half_matches_lattice_form() {
        let w = TauPoint::from_parts(0.0, 1.1).unwrap();
        let m = cubic_period(w);
        let h = rat(1, 2);
        let v = theta_char_g2(CharQuad::top(h, h), Z2, &m, &tol()).unwrap();
        let q = w.nome().re;
        let mut oracle = 0.0;
        for a in -20..=20 {
            for b in -20..=20 {
                let (x, y) = (a as f64 + 0.5, b as f64 + 0.5);
                oracle += q.powf(4.0 * (x * x + x * y + y * y));
            }
        }
        assert!((v - oracle).norm() < 1e-13);
    }

    #[test]
    fn symmetric_tau_examples() {
        let w = TauPoint::from_parts(0.2, 0.7).unwrap();
        let st = symmetric_tau_from_w(w, w);
        assert_eq!(st.tau0(), w.value() * 2.0);
        assert_eq!(st.tau1(), c(0.0, 0.0));

        let w3 = TauPoint::new(w.value() * 3.0).unwrap();
        let st = symmetric_tau_from_w(w3, w);
        assert!((st.tau0() - w.value() * 4.0).norm() < 1e-15);
        assert!((st.tau1() - w.value() * 2.0).norm() < 1e-15);

        let st = symmetric_tau_from_w(
            TauPoint::from_parts(0.0, 1.2).unwrap(),
            TauPoint::from_parts(0.0, 0.7).unwrap(),
        );
        assert!((st.tau0() - c(0.0, 1.9)).norm() < 1e-15);
        assert!((st.tau1() - c(0.0, 0.5)).norm() < 1e-15);
        assert!(st.matrix().lambda_min() > 0.0);
        assert!((st.w1().value() - c(0.0, 1.2)).norm() < 1e-15);
        assert!((st.w2().value() - c(0.0, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn cubic_period_examples() {
        let m = cubic_period(TauPoint::from_parts(0.0, 1.0).unwrap());
        assert_eq!((m.t11(), m.t12(), m.t22()), (c(0.0, 4.0), c(0.0, 2.0), c(0.0, 4.0)));
        let m = cubic_period(TauPoint::from_parts(0.5, 0.8).unwrap());
        assert_eq!(m.t11(), c(2.0, 3.2));
        assert_eq!(m.t12(), c(1.0, 1.6));
        assert!((m.lambda_min() - 1.6).abs() < 1e-15);
    }

    #[test]
    fn non_positive_definite_rejected() {
        assert_eq!(
            PeriodMatrix2::new(c(0.0, 1.0), c(0.0, 1.0), c(0.0, 1.0)),
            Err(Error::NotPositiveDefinite)
        );
        assert!(PeriodMatrix2::new(c(0.0, -1.0), c(0.0, 0.0), c(0.0, 1.0)).is_err());
        assert!(SymmetricTau::new(c(0.0, 1.0), c(0.0, 1.5)).is_err());
        assert!(SymmetricTau::from_nomes(c(0.5, 0.0), c(0.4, 0.0)).is_err());
    }

    #[test]
    fn quasi_periodicity_in_first_argument() {
        let m = PeriodMatrix2::new(c(0.1, 1.2), c(0.05, 0.3), c(-0.2, 1.5)).unwrap();
        let ch = CharQuad::new([rat(1, 3), rat(1, 2)], [rat(1, 5), rat(2, 7)]);
        let z = [c(0.2, 0.1), c(-0.3, 0.05)];
        let shifted = [z[0] + 1.0, z[1]];
        let a = theta_char_g2(ch, z, &m, &tol()).unwrap();
        let b = theta_char_g2(ch, shifted, &m, &tol()).unwrap();
        assert!((b - a * crate::numeric::unit_phase(rat(1, 3))).norm() < 1e-12);
    }
}
