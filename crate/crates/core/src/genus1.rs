//! Genus-1 theta functions.
//!
//! The characteristic theta
//!
//! ```text
//! θ[α;β](u, τ) = Σ_{n∈ℤ} e[½(n+α)²τ + (n+α)(u+β)],   e[x] = exp(2πix)
//! ```
//!
//! is the single source of truth; the classical `θ₁..θ₄` are thin wrappers:
//! `θ₁ = −θ[½;½]`, `θ₂ = θ[½;0]`, `θ₃ = θ[0;0]`, `θ₄ = θ[0;½]`. With this
//! sign choice `θ₁(u,τ) = 2q^{1/4} sin(πu) ∏(…)` is real-positive for small
//! real `u` and purely imaginary `τ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::characteristic::{rat, CharPair};
use crate::error::{Error, Result};
use crate::numeric::{first_below, unit_phase, CompensatedSum, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Genus-1 modulus with `Im τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPoint(Complex64);

impl TauPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
            Ok(Self(tau))
        } else {
            Err(Error::NonPositiveImTau(tau.im))
        }
    }

    /// Shorthand for `τ = re + i·im`.
    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// The modulus whose nome `e^{πiτ}` is `q` (principal logarithm).
    pub fn from_nome(q: Complex64) -> Result<Self> {
        let r = q.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidNome(format!("need 0 < |q| < 1, got |q| = {r}")));
        }
        Self::new(q.ln() / (I * PI))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// `q = e^{πiτ}`.
    pub fn nome(&self) -> Complex64 {
        (I * PI * self.0).exp()
    }

    /// `k·τ` for a positive scale.
    pub fn scaled(&self, k: f64) -> Self {
        debug_assert!(k > 0.0);
        Self(self.0 * k)
    }
}

/// `exp(−πtk² + 2πks)`: bound on a term at lattice distance `k`.
fn gaussian_term(t: f64, s: f64, k: f64) -> f64 {
    (-PI * t * k * k + 2.0 * PI * k * s).exp()
}

/// Truncation radius for a one-dimensional theta sum.
///
/// Returns the smallest `N` past the peak of `k ↦ exp(−πtk² + 2πks)` such that
/// the two one-sided tails beyond `N` sum to less than `eps/4`.
pub(crate) fn truncation_radius(t: f64, s: f64, tol: &Tolerance) -> Result<usize> {
    let start = ((s / t).ceil() as usize).saturating_add(1);
    first_below(start, tol.max_terms(), tol.eps() / 4.0, |n| {
        let mut tail = 0.0;
        let mut j = 0usize;
        loop {
            let term = gaussian_term(t, s, (n + j) as f64);
            tail += term;
            if term < 1e-300 || term < tail * 1e-17 {
                break;
            }
            j += 1;
        }
        2.0 * tail
    })
}

/// `θ[α;β](u, τ)` with absolute truncation error below `tol.eps()`.
pub fn theta_char_g1(ch: CharPair, u: Complex64, tau: TauPoint, tol: &Tolerance) -> Result<Complex64> {
    let t = tau.value();
    let radius = truncation_radius(t.im, u.im.abs(), tol)? as i64;
    Ok(char_sum(ch, u, t, radius))
}

/// The characteristic sum over `|n + α| ≤ radius`, in increasing `n`.
pub(crate) fn char_sum(ch: CharPair, u: Complex64, tau: Complex64, radius: i64) -> Complex64 {
    let alpha = ch.alpha;
    let r = Rational64::from_integer(radius);
    let lo = (-r - alpha).ceil().to_integer();
    let hi = (r - alpha).floor().to_integer();
    let mut acc = CompensatedSum::new();
    for n in lo..=hi {
        let k = Rational64::from_integer(n) + alpha;
        let kf = *k.numer() as f64 / *k.denom() as f64;
        let w = (I * PI * (tau * (kf * kf) + u * (2.0 * kf))).exp();
        acc.add(w * unit_phase(k * ch.beta));
    }
    acc.value()
}

/// Characteristic behind the classical label `θ_j` and the sign it carries.
pub fn classical_characteristic(j: u8) -> Result<(f64, CharPair)> {
    let half = rat(1, 2);
    let zero = rat(0, 1);
    match j {
        1 => Ok((-1.0, CharPair::new(half, half))),
        2 => Ok((1.0, CharPair::new(half, zero))),
        3 => Ok((1.0, CharPair::new(zero, zero))),
        4 => Ok((1.0, CharPair::new(zero, half))),
        _ => Err(Error::InvalidThetaIndex(j)),
    }
}

/// Classical Jacobi theta `θ_j(u, τ)`, `j ∈ 1..=4`.
pub fn theta_j(j: u8, u: Complex64, tau: TauPoint, tol: &Tolerance) -> Result<Complex64> {
    let (sign, ch) = classical_characteristic(j)?;
    Ok(theta_char_g1(ch, u, tau, tol)? * sign)
}

/// Theta constant `[α;β](τ) = θ[α;β](0, τ)`.
pub fn theta_const(ch: CharPair, tau: TauPoint, tol: &Tolerance) -> Result<Complex64> {
    theta_char_g1(ch, Complex64::new(0.0, 0.0), tau, tol)
}

/// Partial triple product with `n_factors` factors for `θ₂`, `θ₃`, `θ₄`:
///
/// ```text
/// θ₄ = ∏(1−q^{2n})(1−q^{2n−1}z²)(1−q^{2n−1}z⁻²)
/// θ₃ = ∏(1−q^{2n})(1+q^{2n−1}z²)(1+q^{2n−1}z⁻²)
/// θ₂ = 2q^{1/4} cos(πu) ∏(1−q^{2n})(1+q^{2n}z²)(1+q^{2n}z⁻²)
/// ```
///
/// with `z = e^{πiu}`. `θ₁` is rejected: its zero at `u = 0` sits in the
/// prefactor and needs separate handling.
pub fn theta_j_product(j: u8, u: Complex64, tau: TauPoint, n_factors: usize) -> Result<Complex64> {
    if n_factors == 0 {
        return Err(Error::Domain("n_factors must be at least 1".into()));
    }
    let t = tau.value();
    let qpow = |k: f64| (I * PI * t * k).exp();
    let z2 = (I * 2.0 * PI * u).exp();
    let z2inv = (-I * 2.0 * PI * u).exp();
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    for n in 1..=n_factors {
        let n = n as f64;
        let even = qpow(2.0 * n);
        acc *= match j {
            4 => {
                let odd = qpow(2.0 * n - 1.0);
                (one - even) * (one - odd * z2) * (one - odd * z2inv)
            }
            3 => {
                let odd = qpow(2.0 * n - 1.0);
                (one - even) * (one + odd * z2) * (one + odd * z2inv)
            }
            2 => (one - even) * (one + even * z2) * (one + even * z2inv),
            _ => return Err(Error::InvalidThetaIndex(j)),
        };
    }
    if j == 2 {
        acc *= qpow(0.25) * (PI * u).cos() * 2.0;
    }
    Ok(acc)
}

/// Number of triple-product factors after which the omitted tail changes the
/// product by less than `tol.eps()` in absolute terms.
pub fn product_factor_count(u: Complex64, tau: TauPoint, tol: &Tolerance) -> Result<usize> {
    let a = (-PI * tau.value().im).exp();
    let growth = (2.0 * PI * u.im.abs()).exp();
    if a * growth >= 1.0 {
        return Err(Error::Domain(
            "|Im u| too large for the product form to converge".into(),
        ));
    }
    // partial-product magnitude is at most exp(Σ|x_n|)
    let total = (a * a + 2.0 * a * growth) / (1.0 - a * a);
    let scale = total.exp() * (1.0 + 2.0 * (PI * u.im.abs()).cosh());
    first_below(1, tol.max_terms(), tol.eps(), |n| {
        let s = a.powi(2 * n as i32) * (a * a + 2.0 * a * growth) / (1.0 - a * a);
        scale * (s.exp() - 1.0)
    })
}

/// Shift property of characteristic thetas:
///
/// ```text
/// θ[r;s](u + aτ + b, τ) = e[−½a²τ − a(u+s+b)] · θ[r+a; s+b](u, τ)
/// ```
///
/// Returns the phase and the shifted characteristic.
pub fn shift_characteristic(
    ch: CharPair,
    a: Rational64,
    b: Rational64,
    u: Complex64,
    tau: TauPoint,
) -> (Complex64, CharPair) {
    let af = *a.numer() as f64 / *a.denom() as f64;
    let analytic = (I * 2.0 * PI * (tau.value() * (-0.5 * af * af) - u * af)).exp();
    let phase = analytic * unit_phase(-a * (ch.beta + b));
    (phase, CharPair::new(ch.alpha + a, ch.beta + b))
}

/// Canonical representative for theta constants: `[ch](τ) = phase · [canon](τ)`
/// with both entries of `canon` in `[0, 1)`.
pub fn reduce_characteristic(ch: CharPair) -> (Complex64, CharPair) {
    let (k, canon) = ch.canonical_constant();
    (unit_phase(k), canon)
}

/// Dedekind eta `η(τ) = Q^{1/24} ∏(1 − Qⁿ)` with `Q = e^{2πiτ}`.
pub fn dedekind_eta(tau: TauPoint, tol: &Tolerance) -> Result<Complex64> {
    let t = tau.value();
    let big_q = (I * 2.0 * PI * t).exp();
    let a = big_q.norm();
    let prefactor = (I * 2.0 * PI * t / 24.0).exp();
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    let mut power = one;
    let mut n = 0usize;
    loop {
        n += 1;
        if n > tol.max_terms() {
            return Err(Error::PrecisionUnattainable {
                needed: n,
                cap: tol.max_terms(),
            });
        }
        power *= big_q;
        acc *= one - power;
        let tail = a.powi(n as i32 + 1) / (1.0 - a);
        if (tail.exp() - 1.0) * acc.norm() * prefactor.norm() < tol.eps() / 4.0 {
            break;
        }
    }
    Ok(prefactor * acc)
}
