//! Identity reports shared by every verifier.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

/// A typed parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(#[serde(serialize_with = "ser_complex")] Complex64),
    Rational(#[serde(serialize_with = "ser_display")] Rational64),
    Text(String),
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_complex(*z))
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// `re+imi` / `re-imi` with shortest round-trip digits.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(n) => write!(f, "{n}"),
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::Complex(z) => f.write_str(&format_complex(*z)),
            ParamValue::Rational(r) => write!(f, "{r}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<Complex64> for ParamValue {
    fn from(v: Complex64) -> Self {
        ParamValue::Complex(v)
    }
}

impl From<Rational64> for ParamValue {
    fn from(v: Rational64) -> Self {
        ParamValue::Rational(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

/// Named parameter bindings, ordered by name.
pub type Params = BTreeMap<String, ParamValue>;

/// One side of an identity: a number, or a digest for exact series.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Side {
    Value(#[serde(serialize_with = "ser_complex_obj")] Complex64),
    Digest(String),
    Missing,
}

fn ser_complex_obj<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(2))?;
    m.serialize_entry("re", &finite_or_none(z.re))?;
    m.serialize_entry("im", &finite_or_none(z.im))?;
    m.end()
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Extra per-report data: sub-residuals, measured constants, findings.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Note {
    Real(f64),
    Complex(#[serde(serialize_with = "ser_complex_obj")] Complex64),
    Text(String),
}

impl From<f64> for Note {
    fn from(v: f64) -> Self {
        Note::Real(v)
    }
}

impl From<Complex64> for Note {
    fn from(v: Complex64) -> Self {
        Note::Complex(v)
    }
}

impl From<String> for Note {
    fn from(v: String) -> Self {
        Note::Text(v)
    }
}

impl From<&str> for Note {
    fn from(v: &str) -> Self {
        Note::Text(v.to_string())
    }
}

/// Outcome of a check once the catalog's expectation is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Failed as expected.
    Xfail,
    /// Passed although a failure was expected; counts as unexpected.
    Xpass,
}

impl Verdict {
    pub fn is_success(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Xfail)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Xfail => "XFAIL",
            Verdict::Xpass => "XPASS",
        })
    }
}

/// Both sides of a checked identity. `passed ⇔ residual < tolerance` holds
/// by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_id: String,
    pub params: Params,
    pub lhs: Side,
    pub rhs: Side,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub expect_fail: bool,
    pub notes: BTreeMap<String, Note>,
    pub error: Option<String>,
}

impl IdentityReport {
    pub fn new(id: impl Into<String>, lhs: Side, rhs: Side, residual: f64, tolerance: f64) -> Self {
        Self {
            identity_id: id.into(),
            params: Params::new(),
            lhs,
            rhs,
            residual,
            tolerance,
            passed: residual < tolerance,
            expect_fail: false,
            notes: BTreeMap::new(),
            error: None,
        }
    }

    /// Report comparing two numbers by `|lhs − rhs|`.
    pub fn from_values(id: impl Into<String>, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let residual = (lhs - rhs).norm();
        Self::new(id, Side::Value(lhs), Side::Value(rhs), residual, tolerance)
    }

    /// Failed report standing in for an evaluation error.
    pub fn from_error(id: impl Into<String>, err: impl fmt::Display, tolerance: f64) -> Self {
        let mut r = Self::new(id, Side::Missing, Side::Missing, f64::INFINITY, tolerance);
        r.error = Some(err.to_string());
        r
    }

    pub fn with_param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_params(mut self, params: &Params) -> Self {
        self.params.extend(params.iter().map(|(k, v)| (k.clone(), v.clone())));
        self
    }

    pub fn note(mut self, key: &str, value: impl Into<Note>) -> Self {
        self.notes.insert(key.to_string(), value.into());
        self
    }

    /// Replace the residual with a larger one (e.g. the max over sub-checks).
    pub fn fold_residual(mut self, residual: f64) -> Self {
        if !(residual <= self.residual) {
            self.residual = residual;
        }
        self.passed = self.residual < self.tolerance;
        self
    }

    /// Re-judge against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.residual < tolerance;
        self
    }

    pub fn verdict(&self) -> Verdict {
        match (self.expect_fail, self.passed) {
            (false, true) => Verdict::Pass,
            (false, false) => Verdict::Fail,
            // an error or a non-finite residual is never an expected failure
            (true, false) if self.error.is_none() && self.residual.is_finite() => Verdict::Xfail,
            (true, false) => Verdict::Fail,
            (true, true) => Verdict::Xpass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_tracks_residual() {
        let r = IdentityReport::from_values("x", Complex64::new(1.0, 0.0), Complex64::new(1.0, 1e-12), 1e-10);
        assert!(r.passed);
        let r = r.fold_residual(1.0);
        assert!(!r.passed);
        assert_eq!(r.verdict(), Verdict::Fail);
    }

    #[test]
    fn verdicts_honour_expectation() {
        let mut r = IdentityReport::new("x", Side::Missing, Side::Missing, 0.5, 1e-3);
        r.expect_fail = true;
        assert_eq!(r.verdict(), Verdict::Xfail);
        let mut e = IdentityReport::from_error("x", "boom", 1e-3);
        e.expect_fail = true;
        assert_eq!(e.verdict(), Verdict::Fail);
        let mut p = IdentityReport::new("x", Side::Missing, Side::Missing, 0.0, 1e-3);
        p.expect_fail = true;
        assert_eq!(p.verdict(), Verdict::Xpass);
        assert!(!Verdict::Xpass.is_success());
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(0.3, 1.2)), "0.3+1.2i");
        assert_eq!(format_complex(Complex64::new(0.0, -1.0)), "0-1i");
    }
}
