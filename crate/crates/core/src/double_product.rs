//! Products of two genus-1 thetas as sums of genus-2 thetas on the symmetric
//! period matrix `[[w₁+w₂, w₁−w₂], [w₁−w₂, w₁+w₂]]`, and the inverse forms.
//!
//! Splitting the lattice `(m, n)` by `M = m+n`, `N = m−n` (same parity):
//!
//! ```text
//! θ₃(x,w₁)θ₃(y,w₂) = θ[00;00](ζ) + θ[½½;00](ζ)
//! θ₄(x,w₁)θ₄(y,w₂) = θ[00;00](ζ) − θ[½½;00](ζ)
//! θ₂(x,w₁)θ₂(y,w₂) = θ[0½;00](ζ) + θ[½0;00](ζ)
//! θ₁(x,w₁)θ₁(y,w₂) = θ[0½;00](ζ) − θ[½0;00](ζ)        ζ = (x+y, x−y)
//! ```

use num_complex::Complex64;
use num_rational::Rational64;

use crate::characteristic::{rat, CharPair, CharQuad};
use crate::error::Result;
use crate::genus1::{theta_char_g1, theta_j, TauPoint};
use crate::genus2::{cubic_period, symmetric_tau_from_w, theta_char_g2, SymmetricTau};
use crate::numeric::Tolerance;
use crate::report::IdentityReport;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which product of two genus-1 thetas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductKind {
    K33,
    K44,
    K22,
    K11,
}

impl ProductKind {
    pub const ALL: [ProductKind; 4] = [ProductKind::K33, ProductKind::K44, ProductKind::K22, ProductKind::K11];

    pub fn theta_index(self) -> u8 {
        match self {
            ProductKind::K33 => 3,
            ProductKind::K44 => 4,
            ProductKind::K22 => 2,
            ProductKind::K11 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ProductKind::K33 => "33",
            ProductKind::K44 => "44",
            ProductKind::K22 => "22",
            ProductKind::K11 => "11",
        }
    }

    /// The genus-2 pair `(first, second)` and the sign joining them.
    fn split(self) -> (G2Constant, G2Constant, f64) {
        match self {
            ProductKind::K33 => (G2Constant::Zero, G2Constant::HalfHalf, 1.0),
            ProductKind::K44 => (G2Constant::Zero, G2Constant::HalfHalf, -1.0),
            ProductKind::K22 => (G2Constant::ZeroHalf, G2Constant::HalfZero, 1.0),
            ProductKind::K11 => (G2Constant::ZeroHalf, G2Constant::HalfZero, -1.0),
        }
    }
}

/// The four genus-2 thetas with `β = (0,0)` and half-integer `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum G2Constant {
    /// `θ[00;00]`
    Zero,
    /// `θ[½½;00]`
    HalfHalf,
    /// `θ[0½;00]`
    ZeroHalf,
    /// `θ[½0;00]`
    HalfZero,
}

impl G2Constant {
    pub const ALL: [G2Constant; 4] = [G2Constant::Zero, G2Constant::HalfHalf, G2Constant::ZeroHalf, G2Constant::HalfZero];

    pub fn characteristic(self) -> CharQuad {
        let h = rat(1, 2);
        let z = rat(0, 1);
        match self {
            G2Constant::Zero => CharQuad::zero(),
            G2Constant::HalfHalf => CharQuad::top(h, h),
            G2Constant::ZeroHalf => CharQuad::top(z, h),
            G2Constant::HalfZero => CharQuad::top(h, z),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            G2Constant::Zero => "00",
            G2Constant::HalfHalf => "halfhalf",
            G2Constant::ZeroHalf => "0half",
            G2Constant::HalfZero => "half0",
        }
    }

    /// Genus-1 index pair and sign for `½(θ_a θ_a ± θ_b θ_b)`.
    fn inverse(self) -> (u8, u8, f64) {
        match self {
            G2Constant::Zero => (3, 4, 1.0),
            G2Constant::HalfHalf => (3, 4, -1.0),
            G2Constant::ZeroHalf => (2, 1, 1.0),
            G2Constant::HalfZero => (2, 1, -1.0),
        }
    }
}

/// The genus-2 theta `g` at `ζ = (x+y, x−y)` on the matrix built from `(w₁, w₂)`.
pub fn g2_value(g: G2Constant, x: Complex64, y: Complex64, tau: &SymmetricTau, tol: &Tolerance) -> Result<Complex64> {
    theta_char_g2(g.characteristic(), [x + y, x - y], &tau.matrix(), tol)
}

/// `θ_j(x,w₁)θ_j(y,w₂)` and its genus-2 decomposition.
pub fn double_product_split(
    kind: ProductKind,
    x: Complex64,
    y: Complex64,
    w1: TauPoint,
    w2: TauPoint,
    tol: &Tolerance,
) -> Result<(Complex64, Complex64)> {
    let j = kind.theta_index();
    let lhs = theta_j(j, x, w1, tol)? * theta_j(j, y, w2, tol)?;
    let tau = symmetric_tau_from_w(w1, w2);
    let (a, b, sign) = kind.split();
    let rhs = g2_value(a, x, y, &tau, tol)? + g2_value(b, x, y, &tau, tol)? * sign;
    Ok((lhs, rhs))
}

/// A genus-2 theta on the symmetric subset and its expression as half a sum
/// or difference of genus-1 products.
pub fn inverse_combine(
    which: G2Constant,
    x: Complex64,
    y: Complex64,
    w1: TauPoint,
    w2: TauPoint,
    tol: &Tolerance,
) -> Result<(Complex64, Complex64)> {
    let tau = symmetric_tau_from_w(w1, w2);
    let lhs = g2_value(which, x, y, &tau, tol)?;
    let (a, b, sign) = which.inverse();
    let pa = theta_j(a, x, w1, tol)? * theta_j(a, y, w2, tol)?;
    let pb = theta_j(b, x, w1, tol)? * theta_j(b, y, w2, tol)?;
    Ok((lhs, (pa + pb * sign) * 0.5))
}

/// `w₁ = w₂ = w` specialisation, written with genus-1 thetas at `2w`:
///
/// ```text
/// θ₃θ₃ = θ₃(x+y)θ₃(x−y) + θ₂(x+y)θ₂(x−y)
/// θ₄θ₄ = θ₃(x+y)θ₃(x−y) − θ₂(x+y)θ₂(x−y)
/// θ₂θ₂ = θ₃(x+y)θ₂(x−y) + θ₂(x+y)θ₃(x−y)
/// θ₁θ₁ = θ₃(x+y)θ₂(x−y) − θ₂(x+y)θ₃(x−y)
/// ```
pub fn duplication(
    kind: ProductKind,
    x: Complex64,
    y: Complex64,
    w: TauPoint,
    tol: &Tolerance,
) -> Result<(Complex64, Complex64)> {
    let j = kind.theta_index();
    let lhs = theta_j(j, x, w, tol)? * theta_j(j, y, w, tol)?;
    let w2 = w.scaled(2.0);
    let (s, d) = (x + y, x - y);
    let t = |j: u8, v: Complex64| theta_j(j, v, w2, tol);
    let rhs = match kind {
        ProductKind::K33 => t(3, s)? * t(3, d)? + t(2, s)? * t(2, d)?,
        ProductKind::K44 => t(3, s)? * t(3, d)? - t(2, s)? * t(2, d)?,
        ProductKind::K22 => t(3, s)? * t(2, d)? + t(2, s)? * t(3, d)?,
        ProductKind::K11 => t(3, s)? * t(2, d)? - t(2, s)? * t(3, d)?,
    };
    Ok((lhs, rhs))
}

/// `θ₄(u,τ)θ₃(u,τ) = θ₄(2u,2τ)θ₄(0,2τ)`, obtained from the 44 split at
/// `x = u+½, y = u, w₁ = w₂ = τ`. The intermediate form
/// `θ₃(2u+½,2τ)θ₃(½,2τ) − θ₂(2u+½,2τ)θ₂(½,2τ)` is recorded as a note.
pub fn landen_from_double(u: Complex64, tau: TauPoint, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let lhs = theta_j(4, u, tau, tol)? * theta_j(3, u, tau, tol)?;
    let t2 = tau.scaled(2.0);
    let half = Complex64::new(0.5, 0.0);
    let rhs = theta_j(4, u * 2.0, t2, tol)? * theta_j(4, ZERO, t2, tol)?;
    let mid = theta_j(3, u * 2.0 + half, t2, tol)? * theta_j(3, half, t2, tol)?
        - theta_j(2, u * 2.0 + half, t2, tol)? * theta_j(2, half, t2, tol)?;
    Ok(IdentityReport::from_values("dp.landen", lhs, rhs, accept).note("residual_intermediate_form", (mid - lhs).norm()))
}

/// Genus-2 theta constant `[α₁α₂;β₁β₂](q, r)` on the symmetric matrix with
/// `q = e^{πiτ₀}`, `r = e^{πiτ₁}`, against
///
/// ```text
/// [A;B](q₁)·[A';B'](q₂) + [A+½;B](q₁)·[A'+½;B'](q₂)
/// A = (α₁+α₂)/2, A' = (α₁−α₂)/2, B = β₁+β₂, B' = β₁−β₂, q₁ = (qr)², q₂ = (q/r)².
/// ```
///
/// The genus-1 constants are evaluated at `τ' = 2(τ₀ ± τ₁)`, so `q₁`, `q₂`
/// are never formed through a branch of the square.
pub fn general_char_split(
    alpha: [Rational64; 2],
    beta: [Rational64; 2],
    q: Complex64,
    r: Complex64,
    tol: &Tolerance,
) -> Result<(Complex64, Complex64)> {
    let st = SymmetricTau::from_nomes(q, r)?;
    general_char_split_tau(alpha, beta, &st, tol)
}

/// [`general_char_split`] with the modulus given directly.
pub fn general_char_split_tau(
    alpha: [Rational64; 2],
    beta: [Rational64; 2],
    st: &SymmetricTau,
    tol: &Tolerance,
) -> Result<(Complex64, Complex64)> {
    let lhs = theta_char_g2(CharQuad::new(alpha, beta), [ZERO, ZERO], &st.matrix(), tol)?;
    let t1 = TauPoint::new((st.tau0() + st.tau1()) * 2.0)?;
    let t2 = TauPoint::new((st.tau0() - st.tau1()) * 2.0)?;
    let a = (alpha[0] + alpha[1]) / 2;
    let a2 = (alpha[0] - alpha[1]) / 2;
    let b = beta[0] + beta[1];
    let b2 = beta[0] - beta[1];
    let h = rat(1, 2);
    let c = |al: Rational64, be: Rational64, t: TauPoint| theta_char_g1(CharPair::new(al, be), ZERO, t, tol);
    let rhs = c(a, b, t1)? * c(a2, b2, t2)? + c(a + h, b, t1)? * c(a2 + h, b2, t2)?;
    Ok((lhs, rhs))
}

/// `(2m+1)² + (2m+1)(2n+1) + (2n+1)²`: four times the exponent of a
/// `[½½;00]` lattice term on the cubic matrix.
fn form_halfhalf(m: i64, n: i64) -> i64 {
    let (a, b) = (2 * m + 1, 2 * n + 1);
    a * a + a * b + b * b
}

/// `(2j+1)² + (2j+1)(2k) + (2k)²`: the same for a `[½0;00]` term.
fn form_half0(j: i64, k: i64) -> i64 {
    let (a, b) = (2 * j + 1, 2 * k);
    a * a + a * b + b * b
}

/// Exact check that `(j, k) ↦ (m, n) = (j+k, −j−1)` is a bijection matching
/// the `[½0;00]` and `[½½;00]` exponents on `|j|, |k| ≤ radius`. Returns the
/// number of matched index pairs, or the first `(j, k)` that fails.
pub fn cubic_bijection_check(radius: i64) -> std::result::Result<usize, (i64, i64)> {
    let mut count = 0;
    for j in -radius..=radius {
        for k in -radius..=radius {
            let (m, n) = (j + k, -j - 1);
            let back = (-n - 1, m + n + 1);
            if back != (j, k) || form_halfhalf(m, n) != form_half0(j, k) {
                return Err((j, k));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// `[½½;00] = [½0;00] = [0½;00]` at `ζ = 0` on the cubic matrix. The
/// residual is the largest pairwise difference; the exact bijection check on
/// `|j|,|k| ≤ 12` is recorded as `bijection_pairs` (0 on failure) and folds
/// an infinite residual into the report if it fails.
pub fn cubic_char_equality(w: TauPoint, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let tau = cubic_period(w);
    let c = |g: G2Constant| theta_char_g2(g.characteristic(), [ZERO, ZERO], &tau, tol);
    let hh = c(G2Constant::HalfHalf)?;
    let h0 = c(G2Constant::HalfZero)?;
    let zh = c(G2Constant::ZeroHalf)?;
    let worst = (hh - h0).norm().max((hh - zh).norm()).max((h0 - zh).norm());
    let bij = cubic_bijection_check(12);
    let mut report = IdentityReport::from_values("dp.cubic_chars", hh, h0, accept)
        .fold_residual(worst)
        .note("residual_halfhalf_half0", (hh - h0).norm())
        .note("residual_halfhalf_0half", (hh - zh).norm())
        .note("bijection_pairs", bij.map(|n| n as f64).unwrap_or(0.0));
    if let Err((j, k)) = bij {
        report = report
            .fold_residual(f64::INFINITY)
            .note("finding", format!("index bijection fails at (j, k) = ({j}, {k})"));
    }
    Ok(report)
}
