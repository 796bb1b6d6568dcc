//! Borwein cubic theta series `a`, `b`, `c`, their genus-2 theta-constant
//! forms, and the ternary cube-sum identities.
//!
//! One-parameter series (`ω = e^{2πi/3}`):
//!
//! ```text
//! a(q) = Σ q^{m²+mn+n²}      b(q) = Σ ω^{m−n} q^{m²+mn+n²}
//! c(q) = Σ q^{(m+⅓)²+(m+⅓)(n+⅓)+(n+⅓)²}
//! ```
//!
//! Two-parameter series replace `q^{m²+mn+n²}` by `q^{m²+n²} r^{2mn}`; the
//! case `r² = q` gives back the one-parameter series. Non-integer powers are
//! taken as `q^x = exp(x·Log q)` with the principal logarithm.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::characteristic::{rat, CharPair, CharQuad};
use crate::error::{Error, Result};
use crate::genus1::{theta_char_g1, theta_j, TauPoint};
use crate::genus2::{cubic_period, theta_char_g2, PeriodMatrix2};
use crate::numeric::{unit_phase, CompensatedSum, Tolerance};
use crate::report::IdentityReport;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which Borwein series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Abc {
    A,
    B,
    C,
}

impl Abc {
    pub const ALL: [Abc; 3] = [Abc::A, Abc::B, Abc::C];

    pub fn label(self) -> &'static str {
        match self {
            Abc::A => "a",
            Abc::B => "b",
            Abc::C => "c",
        }
    }
}

fn check_nomes(q: Complex64, r: Option<Complex64>) -> Result<()> {
    if !(q.norm() < 1.0) {
        return Err(Error::InvalidNome(format!("|q| must be < 1 (got {})", q.norm())));
    }
    if let Some(r) = r {
        if r.norm() == 0.0 || !r.norm().is_finite() {
            return Err(Error::InvalidNome("r must be finite and nonzero".into()));
        }
        if !((q * r).norm() < 1.0 && (q / r).norm() < 1.0) {
            return Err(Error::InvalidNome("need |qr| < 1 and |q/r| < 1".into()));
        }
    }
    Ok(())
}

/// Default window `max(20, ⌈√(ln(1/eps) / ln(1/ρ))⌉ + 2)` where every term
/// outside `|m|,|n| ≤ W` is bounded by `ρ^{m²+n²}`: `ρ = |q|^{1/2}` for the
/// one-parameter series (`m²+mn+n² ≥ ½(m²+n²)`) and `ρ = max(|qr|, |q/r|)`
/// for the two-parameter ones.
pub fn default_window(q: Complex64, r: Option<Complex64>, tol: &Tolerance) -> Result<usize> {
    check_nomes(q, r)?;
    let rho = match r {
        None => q.norm().sqrt(),
        Some(r) => (q * r).norm().max((q / r).norm()),
    };
    if rho == 0.0 {
        return Ok(20);
    }
    let w = ((1.0 / tol.eps()).ln() / (1.0 / rho).ln()).sqrt().ceil() + 2.0;
    let w = w.max(20.0);
    if w > tol.max_terms() as f64 {
        return Err(Error::PrecisionUnattainable {
            needed: w as usize,
            cap: tol.max_terms(),
        });
    }
    Ok(w as usize)
}

/// Brute-force double sum over `|m|, |n| ≤ window`.
pub fn abc_series(which: Abc, q: Complex64, r: Option<Complex64>, window: usize) -> Result<Complex64> {
    check_nomes(q, r)?;
    if q == ZERO {
        return Ok(match which {
            Abc::A | Abc::B => Complex64::new(1.0, 0.0),
            Abc::C => ZERO,
        });
    }
    Ok(abc_series_log(which, q.ln(), r.map(|r| r.ln()), window))
}

/// [`abc_series`] with the default window.
pub fn abc_series_auto(which: Abc, q: Complex64, r: Option<Complex64>, tol: &Tolerance) -> Result<Complex64> {
    let window = default_window(q, r, tol)?;
    abc_series(which, q, r, window)
}

/// The series with `Log q` (and `Log r`) supplied, so callers can fix the
/// branch of fractional powers. Terms are summed in lexicographic order.
pub(crate) fn abc_series_log(which: Abc, log_q: Complex64, log_r: Option<Complex64>, window: usize) -> Complex64 {
    let w = window as i64;
    let shift = if which == Abc::C { 1 } else { 0 };
    let mut acc = CompensatedSum::new();
    for m in -w..=w {
        for n in -w..=w {
            // exponents scaled by 9 so they stay integral
            let (x, y) = (3 * m + shift, 3 * n + shift);
            let log = match log_r {
                None => log_q * ((x * x + x * y + y * y) as f64 / 9.0),
                Some(lr) => log_q * ((x * x + y * y) as f64 / 9.0) + lr * (2 * x * y) as f64 / 9.0,
            };
            let mut term = log.exp();
            if which == Abc::B {
                term *= unit_phase(rat((m - n).rem_euclid(3), 3));
            }
            acc.add(term);
        }
    }
    acc.value()
}

/// `a(q⁴) = [00;00]`, `b(q⁴) = [00;⅓⅔]`, `c(q⁴) = [⅓⅓;00]` on the cubic
/// matrix with `q = e^{πiw}`. The residual is the largest of the three.
pub fn abc_theta_links(q: Complex64, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let w = TauPoint::from_nome(q)?;
    let tau = cubic_period(w);
    let log_q4 = q.ln() * 4.0;
    let window = default_window(q.powu(4), None, tol)?;
    let z = rat(0, 1);
    let links = [
        (Abc::A, CharQuad::zero()),
        (Abc::B, CharQuad::new([z, z], [rat(1, 3), rat(2, 3)])),
        (Abc::C, CharQuad::top(rat(1, 3), rat(1, 3))),
    ];
    let mut report: Option<IdentityReport> = None;
    for (which, ch) in links {
        let series = abc_series_log(which, log_q4, None, window);
        let theta = theta_char_g2(ch, [ZERO, ZERO], &tau, tol)?;
        let res = (series - theta).norm();
        report = Some(match report {
            None => IdentityReport::from_values("cubic.links", series, theta, accept),
            Some(r) => r.fold_residual(res),
        })
        .map(|r| r.note(&format!("residual_{}", which.label()), res));
    }
    Ok(report.expect("three links"))
}

/// `a(q⁴) = ½{θ₃(q³)θ₃(q) + θ₄(q³)θ₄(q)}` with `θ_j(q) = θ_j(0, w)`, `q = e^{πiw}`.
pub fn bba_check(q: Complex64, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let w = TauPoint::from_nome(q)?;
    let window = default_window(q.powu(4), None, tol)?;
    let lhs = abc_series_log(Abc::A, q.ln() * 4.0, None, window);
    let t = |j: u8, t: TauPoint| theta_j(j, ZERO, t, tol);
    let w3 = w.scaled(3.0);
    let rhs = (t(3, w3)? * t(3, w)? + t(4, w3)? * t(4, w)?) * 0.5;
    Ok(IdentityReport::from_values("cubic.bba", lhs, rhs, accept))
}

fn real_unit_nome(q: Complex64) -> Result<f64> {
    if q.im != 0.0 || !(q.re > 0.0 && q.re < 1.0) {
        return Err(Error::Domain(format!(
            "this check needs real q in (0, 1) for the real cube root (got {q})"
        )));
    }
    Ok(q.re)
}

/// `b(q) = (3/2)a(q³) − ½a(q)` and `c(q) = ½a(q^{1/3}) − ½a(q)`, for real
/// `q ∈ (0, 1)` only.
pub fn bbc_check(q: Complex64, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let x = real_unit_nome(q)?;
    let a = |v: f64| abc_series_auto(Abc::A, Complex64::new(v, 0.0), None, tol);
    let aq = a(x)?;
    let b = abc_series_auto(Abc::B, q, None, tol)?;
    let c = abc_series_auto(Abc::C, q, None, tol)?;
    let b_rhs = a(x.powi(3))? * 1.5 - aq * 0.5;
    let c_rhs = a(x.cbrt())? * 0.5 - aq * 0.5;
    let rb = (b - b_rhs).norm();
    let rc = (c - c_rhs).norm();
    Ok(IdentityReport::from_values("cubic.bbc", b, b_rhs, accept)
        .fold_residual(rc)
        .note("residual_b", rb)
        .note("residual_c", rc))
}

/// `a³ = b³ + c³`. With `r` given and `r² ≠ q` this is not expected to hold
/// and the report carries the residual as data.
pub fn cubic_identity(q: Complex64, r: Option<Complex64>, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let v = |w: Abc| abc_series_auto(w, q, r, tol);
    let (a, b, c) = (v(Abc::A)?, v(Abc::B)?, v(Abc::C)?);
    let lhs = a.powu(3);
    let rhs = b.powu(3) + c.powu(3);
    let on_curve = r.is_none_or(|r| (r * r - q).norm() <= 1e-14 * q.norm().max(1e-300));
    let id = if on_curve { "cubic.identity" } else { "cubic.identity.offdiag" };
    Ok(IdentityReport::from_values(id, lhs, rhs, accept)
        .note("r_squared_equals_q", if on_curve { 1.0 } else { 0.0 })
        .note("relative_residual", (lhs - rhs).norm() / lhs.norm()))
}

/// The two-parameter series against their genus-1 product forms
/// (`q₁ = (qr)²`, `q₂ = (q/r)²`):
///
/// ```text
/// a = [0;0](q₁)[0;0](q₂) + [½;0](q₁)[½;0](q₂)
/// b = [0;0](q₁)[0;⅓](q₂) − [½;0](q₁)[½;⅓](q₂)
/// c = [⅓;0](q₁)[0;0](q₂) + [⅚;0](q₁)[½;0](q₂)
/// ```
///
/// `r = None` means `r = e^{½ Log q}`.
pub fn abc_product_forms(q: Complex64, r: Option<Complex64>, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    check_nomes(q, r)?;
    if q == ZERO {
        return Err(Error::InvalidNome("q must be nonzero".into()));
    }
    let log_q = q.ln();
    let log_r = r.map_or(log_q * 0.5, |r| r.ln());
    let tau0 = log_q / (I * PI);
    let tau1 = log_r / (I * PI);
    let t1 = TauPoint::new((tau0 + tau1) * 2.0)?;
    let t2 = TauPoint::new((tau0 - tau1) * 2.0)?;
    let k = |a: (i64, i64), b: (i64, i64), t: TauPoint| {
        theta_char_g1(CharPair::new(rat(a.0, a.1), rat(b.0, b.1)), ZERO, t, tol)
    };
    let (z, h, th) = ((0, 1), (1, 2), (1, 3));
    let forms = [
        (Abc::A, k(z, z, t1)? * k(z, z, t2)? + k(h, z, t1)? * k(h, z, t2)?),
        (Abc::B, k(z, z, t1)? * k(z, th, t2)? - k(h, z, t1)? * k(h, th, t2)?),
        (Abc::C, k(th, z, t1)? * k(z, z, t2)? + k((5, 6), z, t1)? * k(h, z, t2)?),
    ];
    let window = default_window(q, Some(log_r.exp()), tol)?;
    let mut report: Option<IdentityReport> = None;
    for (which, product) in forms {
        let series = abc_series_log(which, log_q, Some(log_r), window);
        let res = (series - product).norm();
        report = Some(match report {
            None => IdentityReport::from_values("cubic.product_forms", series, product, accept),
            Some(r) => r.fold_residual(res),
        })
        .map(|r| r.note(&format!("residual_{}", which.label()), res));
    }
    Ok(report.expect("three forms"))
}

/// Input to the cube-sum identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubeSumInput {
    Genus1(TauPoint),
    Genus2(PeriodMatrix2),
}

/// Sign convention for the phase `e(∓3 a'·a'')` in the cube sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubePhase {
    /// `e(−3 a'·a'')`
    #[default]
    Printed,
    /// `e(+3 a'·a'')`
    Conjugate,
}

const THIRDS: [i64; 3] = [0, 1, 2];

/// `Σ e(s·3a'·a'') [a';a'']³` over thirds, for `s = −1` and `s = +1`, with the
/// terms evaluated in parallel and summed in lexicographic order.
fn cube_sums(input: &CubeSumInput, tol: &Tolerance) -> Result<(Complex64, Complex64, Complex64, usize)> {
    // (characteristic numerators in thirds, a'·a'' in ninths)
    let terms: Vec<(Vec<i64>, i64)> = match input {
        CubeSumInput::Genus1(_) => THIRDS
            .iter()
            .flat_map(|&a| THIRDS.iter().map(move |&b| (vec![a, b], a * b)))
            .collect(),
        CubeSumInput::Genus2(_) => {
            let mut v = Vec::with_capacity(81);
            for &a1 in &THIRDS {
                for &a2 in &THIRDS {
                    for &b1 in &THIRDS {
                        for &b2 in &THIRDS {
                            v.push((vec![a1, a2, b1, b2], a1 * b1 + a2 * b2));
                        }
                    }
                }
            }
            v
        }
    };
    let cubes = terms
        .par_iter()
        .map(|(c, _)| -> Result<Complex64> {
            let v = match input {
                CubeSumInput::Genus1(tau) => theta_char_g1(CharPair::new(rat(c[0], 3), rat(c[1], 3)), ZERO, *tau, tol)?,
                CubeSumInput::Genus2(tau) => theta_char_g2(
                    CharQuad::new([rat(c[0], 3), rat(c[1], 3)], [rat(c[2], 3), rat(c[3], 3)]),
                    [ZERO, ZERO],
                    tau,
                    tol,
                )?,
            };
            Ok(v.powu(3))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut minus = CompensatedSum::new();
    let mut plus = CompensatedSum::new();
    for ((_, dot), cube) in terms.iter().zip(&cubes) {
        // 3·a'·a'' = dot/3
        minus.add(cube * unit_phase(rat(-dot, 3)));
        plus.add(cube * unit_phase(rat(*dot, 3)));
    }
    let zero_cube = cubes[0];
    Ok((minus.value(), plus.value(), zero_cube, terms.len()))
}

/// `3·[0;0]³ = Σ e(−3a'a'')[a';a'']³` (nine terms) or
/// `9·[00;00]³ = Σ e(−3a'·a'')[a'₁a'₂;a''₁a''₂]³` (eighty-one terms), with
/// `a', a'' ∈ {0, ⅓, ⅔}` and `e(x) = e^{2πix}`.
///
/// `phase` selects the sign in the exponent; the residual under the other
/// sign is recorded as a note.
pub fn cube_sum_identity(input: CubeSumInput, phase: CubePhase, tol: &Tolerance, accept: f64) -> Result<IdentityReport> {
    let (minus, plus, zero_cube, count) = cube_sums(&input, tol)?;
    let (id, mult) = match input {
        CubeSumInput::Genus1(_) => ("thetaR3.g1", 3.0),
        CubeSumInput::Genus2(_) => ("thetaR3.g2", 9.0),
    };
    let lhs = zero_cube * mult;
    let (chosen, other, other_name) = match phase {
        CubePhase::Printed => (minus, plus, "residual_conjugate_phase"),
        CubePhase::Conjugate => (plus, minus, "residual_printed_phase"),
    };
    let other_res = (lhs - other).norm();
    let mut report = IdentityReport::from_values(id, lhs, chosen, accept)
        .note("terms", count as f64)
        .note(other_name, other_res);
    if phase == CubePhase::Printed && !report.passed && other_res < accept {
        report = report.note("finding", "the sum holds with e(+3a'·a''), not with the printed e(-3a'·a'')");
    }
    Ok(report)
}
