//! Catalog of runnable identity checks.
//!
//! Each entry carries a parameter schema, a default grid of bindings, an
//! acceptance tolerance and whether a failure is expected. [`run_entry`]
//! evaluates the grid in parallel and returns reports in grid order.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::characteristic::{rat, CharPair};
use crate::cubic::{self, Abc, CubePhase, CubeSumInput};
use crate::double_product::{self, G2Constant, ProductKind};
use crate::error::{Error, Result};
use crate::genus1::{reduce_characteristic, shift_characteristic, theta_char_g1, theta_const, TauPoint};
use crate::genus2::{cubic_period, PeriodMatrix2};
use crate::landen::{self, FkCase};
use crate::numeric::Tolerance;
use crate::qexact::{self, FormalId, ProductFamily, SeriesDefinition};
use crate::report::{IdentityReport, ParamValue, Params, Side};

/// Tolerance used for series truncation inside every check.
pub const EVAL_EPS: f64 = 1e-15;

/// Type of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Int,
    Real,
    Complex,
    Rational,
    Text,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::Real => "real",
            ParamKind::Complex => "complex",
            ParamKind::Rational => "rational",
            ParamKind::Text => "text",
        }
    }

    /// Convert a value to this kind where that loses nothing.
    pub fn coerce(self, v: &ParamValue) -> Option<ParamValue> {
        use ParamValue as V;
        Some(match (self, v) {
            (ParamKind::Int, V::Int(n)) => V::Int(*n),
            (ParamKind::Real, V::Int(n)) => V::Real(*n as f64),
            (ParamKind::Real, V::Real(x)) => V::Real(*x),
            (ParamKind::Real, V::Complex(z)) if z.im == 0.0 => V::Real(z.re),
            (ParamKind::Complex, V::Int(n)) => V::Complex(Complex64::new(*n as f64, 0.0)),
            (ParamKind::Complex, V::Real(x)) => V::Complex(Complex64::new(*x, 0.0)),
            (ParamKind::Complex, V::Complex(z)) => V::Complex(*z),
            (ParamKind::Rational, V::Int(n)) => V::Rational(Rational64::from_integer(*n)),
            (ParamKind::Rational, V::Rational(r)) => V::Rational(*r),
            (ParamKind::Text, V::Text(s)) => V::Text(s.clone()),
            _ => return None,
        })
    }

    /// Parse command-line text as this kind.
    pub fn parse(self, text: &str) -> Result<ParamValue> {
        let bad = || Error::Schema(format!("cannot parse {text:?} as {}", self.name()));
        Ok(match self {
            ParamKind::Int => ParamValue::Int(text.parse().map_err(|_| bad())?),
            ParamKind::Real => ParamValue::Real(parse_real(text).ok_or_else(bad)?),
            ParamKind::Complex => ParamValue::Complex(parse_complex(text).ok_or_else(bad)?),
            ParamKind::Rational => ParamValue::Rational(parse_rational(text).ok_or_else(bad)?),
            ParamKind::Text => ParamValue::Text(text.to_string()),
        })
    }
}

fn parse_real(s: &str) -> Option<f64> {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace()) {
        return None;
    }
    let x: f64 = s.parse().ok()?;
    x.is_finite().then_some(x)
}

/// Parse `a`, `bi`, `a+bi` or `a-bi` (no spaces). A bare `i` is `0+1i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(s).map(|x| Complex64::new(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(t),
    };
    match split {
        Some(k) => Some(Complex64::new(parse_real(&body[..k])?, imag(&body[k..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

/// Parse `n` or `n/d` with `d ≠ 0`.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.parse().ok()?, d.parse().ok()?);
            (d != 0).then(|| Rational64::new(n, d))
        }
        None => s.parse().ok().map(Rational64::from_integer),
    }
}

/// One parameter of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
}

/// Whether a check is expected to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    ExpectedFail,
}

/// Settings passed to every runner.
#[derive(Debug, Clone, Copy)]
pub struct RunContext {
    pub eval: Tolerance,
    pub accept: f64,
}

type Runner = Box<dyn Fn(&Params, &RunContext) -> Result<IdentityReport> + Send + Sync>;

/// A catalog entry.
pub struct IdentityEntry {
    pub id: String,
    /// The identity being checked, as a formula.
    pub anchor: String,
    pub schema: Vec<ParamSpec>,
    pub default_grid: Vec<Params>,
    pub tolerance: f64,
    pub expected: Expectation,
    runner: Runner,
}

impl std::fmt::Debug for IdentityEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityEntry")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .field("schema", &self.schema)
            .field("grid_points", &self.default_grid.len())
            .field("tolerance", &self.tolerance)
            .field("expected", &self.expected)
            .finish()
    }
}

impl IdentityEntry {
    /// `name:kind` pairs joined by commas.
    pub fn schema_summary(&self) -> String {
        self.schema
            .iter()
            .map(|p| format!("{}:{}", p.name, p.kind.name()))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn param_kind(&self, name: &str) -> Option<ParamKind> {
        self.schema.iter().find(|p| p.name == name).map(|p| p.kind)
    }
}

/// Catalog listing row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySummary {
    pub id: String,
    pub anchor: String,
    pub schema: String,
}

// ---------------------------------------------------------------------------
// parameter access

fn value<'a>(p: &'a Params, key: &str) -> Result<&'a ParamValue> {
    p.get(key).ok_or_else(|| Error::Schema(format!("missing parameter {key:?}")))
}

fn complex(p: &Params, key: &str) -> Result<Complex64> {
    match ParamKind::Complex.coerce(value(p, key)?) {
        Some(ParamValue::Complex(z)) => Ok(z),
        _ => Err(Error::Schema(format!("{key} must be complex"))),
    }
}

fn int(p: &Params, key: &str) -> Result<i64> {
    match value(p, key)? {
        ParamValue::Int(n) => Ok(*n),
        _ => Err(Error::Schema(format!("{key} must be an integer"))),
    }
}

fn rational(p: &Params, key: &str) -> Result<Rational64> {
    match ParamKind::Rational.coerce(value(p, key)?) {
        Some(ParamValue::Rational(r)) => Ok(r),
        _ => Err(Error::Schema(format!("{key} must be rational"))),
    }
}

fn tau(p: &Params, key: &str) -> Result<TauPoint> {
    TauPoint::new(complex(p, key)?)
}

fn order(p: &Params) -> Result<u32> {
    let n = int(p, "order")?;
    u32::try_from(n).map_err(|_| Error::Schema(format!("order must be positive (got {n})")))
}

// ---------------------------------------------------------------------------
// catalog construction

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tau_grid() -> [Complex64; 3] {
    [c(0.0, 1.0), c(0.0, 1.5), c(0.3, 1.2)]
}

fn bind(pairs: &[(&str, ParamValue)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn spec(list: &[(&'static str, ParamKind)]) -> Vec<ParamSpec> {
    list.iter().map(|&(name, kind)| ParamSpec { name, kind }).collect()
}

struct Builder(Vec<IdentityEntry>);

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn add(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        schema: &[(&'static str, ParamKind)],
        grid: Vec<Params>,
        tolerance: f64,
        expected: Expectation,
        runner: impl Fn(&Params, &RunContext) -> Result<IdentityReport> + Send + Sync + 'static,
    ) {
        self.0.push(IdentityEntry {
            id: id.into(),
            anchor: anchor.into(),
            schema: spec(schema),
            default_grid: grid,
            tolerance,
            expected,
            runner: Box::new(runner),
        });
    }
}

fn pair_report(id: &str, pair: (Complex64, Complex64), accept: f64) -> IdentityReport {
    IdentityReport::from_values(id, pair.0, pair.1, accept)
}

fn formal_report(id: FormalId, ord: u32) -> Result<IdentityReport> {
    let out = qexact::formal_verify(id, ord)?;
    let digest = |side: &str| Side::Digest(format!("{side} of {} to q^{}", id.name(), out.compared_below));
    let diff: f64 = out.max_abs_difference.to_string().parse().unwrap_or(f64::INFINITY);
    let mut r = IdentityReport::new(id.name(), digest("lhs"), digest("rhs"), diff, 0.5)
        .note("compared_below", out.compared_below.to_string());
    if let Some(m) = out.first_mismatch {
        r = r.note("first_mismatch", m.to_string());
    }
    Ok(r)
}

fn build() -> Vec<IdentityEntry> {
    use Expectation::{ExpectedFail, Pass};
    use ParamKind as K;
    let mut b = Builder(Vec::new());

    let landen_grid = || -> Vec<Params> {
        tau_grid()
            .iter()
            .flat_map(|&t| {
                [c(0.1, 0.0), c(0.07, 0.02)].map(|u| bind(&[("tau", t.into()), ("u", u.into())]))
            })
            .collect()
    };
    let tau_only = || -> Vec<Params> { tau_grid().iter().map(|&t| bind(&[("tau", t.into())])).collect() };

    for p in 2..=7u32 {
        b.add(
            format!("landen.p{p}"),
            format!("θ₄({p}u,{p}τ)/∏_{{k<{p}}}θ₄(u+k/{p},τ) = ∏(1−q^{{{}n}})/(1−q^{{2n}})^{p} = η({p}τ)/η(τ)^{p}", 2 * p),
            &[("tau", K::Complex), ("u", K::Complex)],
            landen_grid(),
            if p >= 7 { 1e-9 } else { 1e-10 },
            Pass,
            move |ps, cx| {
                let (t, u) = (tau(ps, "tau")?, complex(ps, "u")?);
                let lhs = landen::landen_ratio(p, u, t, &cx.eval)?;
                let rhs = landen::landen_rhs(p, t, &cx.eval)?;
                Ok(IdentityReport::from_values("", lhs, rhs, cx.accept))
            },
        );
    }
    for p in 2..=5u32 {
        let num = if p % 2 == 1 { "θ₃" } else { "θ₄" };
        b.add(
            format!("landen.parity.p{p}"),
            format!("{num}({p}u,{p}τ)/∏_{{k<{p}}}θ₃(u+k/{p},τ) = ∏(1−q^{{{}n}})/(1−q^{{2n}})^{p}", 2 * p),
            &[("tau", K::Complex), ("u", K::Complex)],
            landen_grid(),
            1e-10,
            Pass,
            move |ps, cx| {
                let (t, u) = (tau(ps, "tau")?, complex(ps, "u")?);
                let lhs = landen::landen_parity(p, u, t, &cx.eval)?;
                let rhs = landen::landen_rhs(p, t, &cx.eval)?;
                Ok(IdentityReport::from_values("", lhs, rhs, cx.accept))
            },
        );
    }
    b.add(
        "landens3.theta2",
        "∏(1−q^{6n})/(1−q^{2n})³ = θ₄(0,3τ)/∏θ₄(k/3,τ) = θ₃(0,3τ)/∏θ₃(k/3,τ) = c·θ₂(0,3τ)/∏θ₂(k/3,τ); printed c = 4, measured c = −1",
        &[("tau", K::Complex)],
        tau_only(),
        1e-10,
        Pass,
        |ps, cx| landen::landens3_theta2(tau(ps, "tau")?, &cx.eval, cx.accept),
    );
    b.add(
        "eta.quotient",
        "∏(1−q^{2pn})/(1−q^{2n})^p = η(pτ)/η(τ)^p, q = e^{πiτ}, eta nome e^{2πiτ}",
        &[("p", K::Int), ("tau", K::Complex)],
        (1..=7i64)
            .flat_map(|p| tau_grid().map(|t| bind(&[("p", p.into()), ("tau", t.into())])))
            .collect(),
        1e-10,
        Pass,
        |ps, cx| {
            let p = int(ps, "p")?;
            let p = u32::try_from(p).ok().filter(|p| (1..=24).contains(p)).ok_or_else(|| Error::Schema("p must lie in 1..=24".into()))?;
            landen::eta_quotient_check(p, tau(ps, "tau")?, &cx.eval, cx.accept)
        },
    );
    for p in [3u32, 5, 7] {
        b.add(
            format!("ratio.p{p}"),
            format!("θ₄(0,{p}τ)/θ₃(0,{p}τ) = [0;½]/[0;1] · (∏_{{odd j<{p}}}[0;j/{}] / ∏_{{k≤{}}}[0;k/{p}])²", 2 * p, (p - 1) / 2),
            &[("tau", K::Complex)],
            tau_only(),
            if p >= 7 { 1e-9 } else { 1e-10 },
            Pass,
            move |ps, cx| landen::ratio_ell(p, tau(ps, "tau")?, &cx.eval, cx.accept),
        );
    }
    for case in FkCase::ALL {
        let (p, a1, a2) = case.parts();
        b.add(
            case.id(),
            format!("[{a1}/{p};1]({p}τ)/[{a2}/{p};1]({p}τ) = e^{{4πi/{p}}} ∏_{{odd j<{}}} [{a1}/{p};j/{p}](τ)/[{a2}/{p};j/{p}](τ); holds with e^{{−4πi/{p}}}", 2 * p),
            &[("tau", K::Complex)],
            tau_only(),
            1e-9,
            ExpectedFail,
            move |ps, cx| landen::fk_ratio(case, tau(ps, "tau")?, &cx.eval, cx.accept),
        );
    }
    b.add(
        "modular3",
        "θ₄(0,τ)θ₄(0,3τ) + θ₂(0,τ)θ₂(0,3τ) = θ₃(0,τ)θ₃(0,3τ)",
        &[("tau", K::Complex)],
        tau_only(),
        1e-11,
        Pass,
        |ps, cx| landen::modular3_residual(tau(ps, "tau")?, &cx.eval, cx.accept),
    );
    b.add(
        "theta13.numeric",
        "∏(1+q^{2n−1})²(1+q^{6n−3})² − ∏(1−q^{2n−1})²(1−q^{6n−3})² = 4q∏(1+q^{2n})²(1+q^{6n})²",
        &[("q", K::Complex)],
        [0.1, 0.3, 0.5].iter().map(|&q| bind(&[("q", c(q, 0.0).into())])).collect(),
        1e-10,
        Pass,
        |ps, cx| landen::theta13_residual(complex(ps, "q")?, &cx.eval, cx.accept),
    );
    b.add(
        "agm.gauss",
        "A = (a+b)/2, B = √(ab) with a = θ₃²(0,τ), b = θ₄²(0,τ) gives A = θ₃²(0,2τ), B = θ₄²(0,2τ)",
        &[("tau", K::Complex)],
        tau_only(),
        1e-10,
        Pass,
        |ps, cx| landen::agm_theta_check(tau(ps, "tau")?, &cx.eval, cx.accept),
    );
    b.add(
        "agm.chain",
        "k Gauss AGM steps from (θ₃²(0,τ), θ₄²(0,τ)) give (θ₃²(0,2^kτ), θ₄²(0,2^kτ))",
        &[("tau", K::Complex), ("steps", K::Int)],
        tau_grid().iter().map(|&t| bind(&[("tau", t.into()), ("steps", 5i64.into())])).collect(),
        1e-9,
        Pass,
        |ps, cx| {
            let steps = u32::try_from(int(ps, "steps")?).ok().filter(|s| (1..=20).contains(s)).ok_or_else(|| Error::Schema("steps must lie in 1..=20".into()))?;
            landen::agm_chain(tau(ps, "tau")?, steps, &cx.eval, cx.accept)
        },
    );
    b.add(
        "shift.characteristic",
        "θ[r;s](u+aτ+b,τ) = e[−½a²τ − a(u+s+b)]·θ[r+a;s+b](u,τ)",
        &[("alpha", K::Rational), ("beta", K::Rational), ("a", K::Rational), ("b", K::Rational), ("u", K::Complex), ("tau", K::Complex)],
        [(rat(1, 5), 0.0), (rat(3, 5), 0.0), (rat(1, 3), 0.1)]
            .iter()
            .map(|&(a, u)| {
                bind(&[
                    ("alpha", rat(0, 1).into()),
                    ("beta", rat(1, 2).into()),
                    ("a", a.into()),
                    ("b", rat(1, 2).into()),
                    ("u", c(u, 0.0).into()),
                    ("tau", c(0.0, 1.2).into()),
                ])
            })
            .collect(),
        1e-10,
        Pass,
        |ps, cx| {
            let ch = CharPair::new(rational(ps, "alpha")?, rational(ps, "beta")?);
            let (a, bb) = (rational(ps, "a")?, rational(ps, "b")?);
            let (u, t) = (complex(ps, "u")?, tau(ps, "tau")?);
            let af = *a.numer() as f64 / *a.denom() as f64;
            let bf = *bb.numer() as f64 / *bb.denom() as f64;
            let lhs = theta_char_g1(ch, u + t.value() * af + bf, t, &cx.eval)?;
            let (phase, new) = shift_characteristic(ch, a, bb, u, t);
            let rhs = phase * theta_char_g1(new, u, t, &cx.eval)?;
            Ok(IdentityReport::from_values("", lhs, rhs, cx.accept))
        },
    );
    b.add(
        "reduce.characteristic",
        "[α;β+1] = e[α][α;β], [α+1;β] = [α;β], [α;β] = [−α;−β] at u = 0",
        &[("alpha", K::Rational), ("beta", K::Rational), ("tau", K::Complex)],
        [(0, 1, 5, 6), (1, 2, 1, 1), (1, 2, -1, 3), (0, 1, 1, 1), (1, 3, 5, 3), (5, 6, -7, 10)]
            .iter()
            .map(|&(an, ad, bn, bd)| bind(&[("alpha", rat(an, ad).into()), ("beta", rat(bn, bd).into()), ("tau", c(0.1, 1.1).into())]))
            .collect(),
        1e-10,
        Pass,
        |ps, cx| {
            let ch = CharPair::new(rational(ps, "alpha")?, rational(ps, "beta")?);
            let t = tau(ps, "tau")?;
            let (phase, canon) = reduce_characteristic(ch);
            let lhs = theta_const(ch, t, &cx.eval)?;
            let rhs = phase * theta_const(canon, t, &cx.eval)?;
            Ok(IdentityReport::from_values("", lhs, rhs, cx.accept).note("canonical", canon.to_string()))
        },
    );

    let xyww = || -> Vec<Params> {
        [
            (c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0)),
            (c(0.1, 0.0), c(0.05, 0.0), c(0.0, 1.1), c(0.0, 0.8)),
            (c(0.2, 0.05), c(-0.1, 0.0), c(0.1, 0.9), c(0.0, 1.3)),
        ]
        .iter()
        .map(|&(x, y, w1, w2)| bind(&[("x", x.into()), ("y", y.into()), ("w1", w1.into()), ("w2", w2.into())]))
        .collect()
    };
    let xyww_schema = [("x", K::Complex), ("y", K::Complex), ("w1", K::Complex), ("w2", K::Complex)];
    for kind in ProductKind::ALL {
        let (j, l) = (kind.theta_index(), kind.label());
        let (g, sign) = match kind {
            ProductKind::K33 => ("[00;00] + [½½;00]", ""),
            ProductKind::K44 => ("[00;00] − [½½;00]", ""),
            ProductKind::K22 => ("[0½;00] + [½0;00]", ""),
            ProductKind::K11 => ("[0½;00] − [½0;00]", ""),
        };
        b.add(
            format!("dp.split.{l}"),
            format!("θ{j}(x,w₁)θ{j}(y,w₂) = {g}{sign} at ζ = (x+y, x−y), τ = [[w₁+w₂, w₁−w₂],[w₁−w₂, w₁+w₂]]"),
            &xyww_schema,
            xyww(),
            1e-10,
            Pass,
            move |ps, cx| {
                let pair = double_product::double_product_split(kind, complex(ps, "x")?, complex(ps, "y")?, tau(ps, "w1")?, tau(ps, "w2")?, &cx.eval)?;
                Ok(pair_report("", pair, cx.accept))
            },
        );
    }
    for g in G2Constant::ALL {
        let formula = match g {
            G2Constant::Zero => "[00;00](x+y,x−y) = ½{θ₃(x,w₁)θ₃(y,w₂) + θ₄(x,w₁)θ₄(y,w₂)}",
            G2Constant::HalfHalf => "[½½;00](x+y,x−y) = ½{θ₃(x,w₁)θ₃(y,w₂) − θ₄(x,w₁)θ₄(y,w₂)}",
            G2Constant::ZeroHalf => "[0½;00](x+y,x−y) = ½{θ₂(x,w₁)θ₂(y,w₂) + θ₁(x,w₁)θ₁(y,w₂)}",
            G2Constant::HalfZero => "[½0;00](x+y,x−y) = ½{θ₂(x,w₁)θ₂(y,w₂) − θ₁(x,w₁)θ₁(y,w₂)}",
        };
        b.add(
            format!("dp.inverse.{}", g.label()),
            formula,
            &xyww_schema,
            xyww(),
            1e-10,
            Pass,
            move |ps, cx| {
                let pair = double_product::inverse_combine(g, complex(ps, "x")?, complex(ps, "y")?, tau(ps, "w1")?, tau(ps, "w2")?, &cx.eval)?;
                Ok(pair_report("", pair, cx.accept))
            },
        );
    }
    for kind in ProductKind::ALL {
        let formula = match kind {
            ProductKind::K33 => "θ₃(x,w)θ₃(y,w) = θ₃(x+y,2w)θ₃(x−y,2w) + θ₂(x+y,2w)θ₂(x−y,2w)",
            ProductKind::K44 => "θ₄(x,w)θ₄(y,w) = θ₃(x+y,2w)θ₃(x−y,2w) − θ₂(x+y,2w)θ₂(x−y,2w)",
            ProductKind::K22 => "θ₂(x,w)θ₂(y,w) = θ₃(x+y,2w)θ₂(x−y,2w) + θ₂(x+y,2w)θ₃(x−y,2w)",
            ProductKind::K11 => "θ₁(x,w)θ₁(y,w) = θ₃(x+y,2w)θ₂(x−y,2w) − θ₂(x+y,2w)θ₃(x−y,2w)",
        };
        b.add(
            format!("dup.{}", kind.label()),
            formula,
            &[("x", K::Complex), ("y", K::Complex), ("w", K::Complex)],
            [(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)), (c(0.21, 0.05), c(0.21, 0.05), c(0.1, 0.9)), (c(0.3, 0.0), c(-0.12, 0.04), c(0.3, 1.2))]
                .iter()
                .map(|&(x, y, w)| bind(&[("x", x.into()), ("y", y.into()), ("w", w.into())]))
                .collect(),
            1e-10,
            Pass,
            move |ps, cx| {
                let pair = double_product::duplication(kind, complex(ps, "x")?, complex(ps, "y")?, tau(ps, "w")?, &cx.eval)?;
                Ok(pair_report("", pair, cx.accept))
            },
        );
    }
    b.add(
        "dp.landen",
        "θ₄(u,τ)θ₃(u,τ) = θ₄(2u,2τ)θ₄(0,2τ)",
        &[("u", K::Complex), ("tau", K::Complex)],
        [(c(0.0, 0.0), c(0.0, 1.0)), (c(0.13, 0.0), c(0.0, 0.8)), (c(0.1, 0.05), c(0.3, 1.2))]
            .iter()
            .map(|&(u, t)| bind(&[("u", u.into()), ("tau", t.into())]))
            .collect(),
        1e-10,
        Pass,
        |ps, cx| double_product::landen_from_double(complex(ps, "u")?, tau(ps, "tau")?, &cx.eval, cx.accept),
    );
    b.add(
        "dp.general",
        "[α₁α₂;β₁β₂](q,r) = [(α₁+α₂)/2; β₁+β₂](q₁)·[(α₁−α₂)/2; β₁−β₂](q₂) + [(α₁+α₂)/2+½; β₁+β₂](q₁)·[(α₁−α₂)/2+½; β₁−β₂](q₂), q₁ = (qr)², q₂ = (q/r)²",
        &[("alpha1", K::Rational), ("alpha2", K::Rational), ("beta1", K::Rational), ("beta2", K::Rational), ("q", K::Complex), ("r", K::Complex)],
        [
            ((0, 1), (0, 1), (0, 1), (0, 1), c(0.1, 0.0), c(0.1f64.sqrt(), 0.0)),
            ((1, 3), (1, 3), (0, 1), (0, 1), c(0.15, 0.0), c(0.35, 0.0)),
            ((0, 1), (0, 1), (1, 3), (2, 3), c(0.15, 0.0), c(0.35, 0.0)),
            ((1, 6), (5, 6), (1, 2), (-1, 3), c(0.2, 0.1), c(0.5, -0.2)),
        ]
        .iter()
        .map(|&(a1, a2, b1, b2, q, r)| {
            bind(&[
                ("alpha1", rat(a1.0, a1.1).into()),
                ("alpha2", rat(a2.0, a2.1).into()),
                ("beta1", rat(b1.0, b1.1).into()),
                ("beta2", rat(b2.0, b2.1).into()),
                ("q", q.into()),
                ("r", r.into()),
            ])
        })
        .collect(),
        1e-10,
        Pass,
        |ps, cx| {
            let alpha = [rational(ps, "alpha1")?, rational(ps, "alpha2")?];
            let beta = [rational(ps, "beta1")?, rational(ps, "beta2")?];
            let pair = double_product::general_char_split(alpha, beta, complex(ps, "q")?, complex(ps, "r")?, &cx.eval)?;
            Ok(pair_report("", pair, cx.accept))
        },
    );
    b.add(
        "dp.cubic_chars",
        "[½½;00] = [½0;00] = [0½;00] on τ = [[4w,2w],[2w,4w]] via (m,n) = (j+k, −j−1)",
        &[("w", K::Complex)],
        [c(0.0, 1.0), c(0.25, 0.9), c(0.0, 1.5)].iter().map(|&w| bind(&[("w", w.into())])).collect(),
        1e-10,
        Pass,
        |ps, cx| double_product::cubic_char_equality(tau(ps, "w")?, &cx.eval, cx.accept),
    );

    let qs = |list: &[f64]| -> Vec<Params> { list.iter().map(|&q| bind(&[("q", c(q, 0.0).into())])).collect() };
    b.add(
        "cubic.series",
        "a, b, c double sums: default window against a window 10 wider",
        &[("which", K::Text), ("q", K::Complex)],
        ["a", "b", "c"]
            .iter()
            .flat_map(|w| [0.2, 0.5].map(|q| bind(&[("which", (*w).into()), ("q", c(q, 0.0).into())])))
            .collect(),
        1e-12,
        Pass,
        |ps, cx| {
            let which = match value(ps, "which")? {
                ParamValue::Text(s) if s == "a" => Abc::A,
                ParamValue::Text(s) if s == "b" => Abc::B,
                ParamValue::Text(s) if s == "c" => Abc::C,
                _ => return Err(Error::Schema("which must be a, b or c".into())),
            };
            let q = complex(ps, "q")?;
            let w = cubic::default_window(q, None, &cx.eval)?;
            let lhs = cubic::abc_series(which, q, None, w)?;
            let rhs = cubic::abc_series(which, q, None, w + 10)?;
            Ok(IdentityReport::from_values("", lhs, rhs, cx.accept).note("window", w as f64))
        },
    );
    b.add(
        "cubic.links",
        "a(q⁴) = [00;00], b(q⁴) = [00;⅓⅔], c(q⁴) = [⅓⅓;00] on τ = [[4w,2w],[2w,4w]], q = e^{πiw}",
        &[("q", K::Complex)],
        qs(&[0.1, 0.2, 0.3, 0.45, 0.5]),
        1e-9,
        Pass,
        |ps, cx| cubic::abc_theta_links(complex(ps, "q")?, &cx.eval, cx.accept),
    );
    b.add(
        "cubic.bba",
        "a(q⁴) = ½{θ₃(q³)θ₃(q) + θ₄(q³)θ₄(q)}",
        &[("q", K::Complex)],
        qs(&[0.1, 0.2, 0.3, 0.45]),
        1e-10,
        Pass,
        |ps, cx| cubic::bba_check(complex(ps, "q")?, &cx.eval, cx.accept),
    );
    b.add(
        "cubic.bbc",
        "b(q) = (3/2)a(q³) − ½a(q), c(q) = ½a(q^{1/3}) − ½a(q), real q in (0,1)",
        &[("q", K::Complex)],
        qs(&[0.1, 0.2, 0.3, 0.45, 0.6]),
        1e-9,
        Pass,
        |ps, cx| cubic::bbc_check(complex(ps, "q")?, &cx.eval, cx.accept),
    );
    b.add(
        "cubic.identity",
        "a³ = b³ + c³ (r² = q)",
        &[("q", K::Complex)],
        qs(&[0.1, 0.2, 0.3, 0.45]),
        1e-9,
        Pass,
        |ps, cx| cubic::cubic_identity(complex(ps, "q")?, None, &cx.eval, cx.accept),
    );
    b.add(
        "cubic.identity.offdiag",
        "a(q,r)³ = b(q,r)³ + c(q,r)³ fails when r² ≠ q",
        &[("q", K::Complex), ("r", K::Complex)],
        [(0.2, 0.5), (0.3, 0.4), (0.25, 0.7)]
            .iter()
            .map(|&(q, r)| bind(&[("q", c(q, 0.0).into()), ("r", c(r, 0.0).into())]))
            .collect(),
        1e-4,
        ExpectedFail,
        |ps, cx| cubic::cubic_identity(complex(ps, "q")?, Some(complex(ps, "r")?), &cx.eval, cx.accept),
    );
    b.add(
        "cubic.product_forms",
        "a(q,r) = [0;0](q₁)[0;0](q₂) + [½;0](q₁)[½;0](q₂), b = [0;0][0;⅓] − [½;0][½;⅓], c = [⅓;0][0;0] + [⅚;0][½;0]",
        &[("q", K::Complex), ("r", K::Complex)],
        [(c(0.2, 0.0), c(0.5, 0.0)), (c(0.3, 0.0), c(0.3f64.sqrt(), 0.0)), (c(0.2, 0.05), c(0.5, -0.1))]
            .iter()
            .map(|&(q, r)| bind(&[("q", q.into()), ("r", r.into())]))
            .collect(),
        1e-10,
        Pass,
        |ps, cx| cubic::abc_product_forms(complex(ps, "q")?, Some(complex(ps, "r")?), &cx.eval, cx.accept),
    );
    b.add(
        "thetaR3.g1",
        "3·[0;0]³ = Σ_{a',a''∈{0,⅓,⅔}} e(−3a'a'')[a';a'']³; holds with e(+3a'a'')",
        &[("tau", K::Complex)],
        [c(0.0, 1.0), c(0.0, 1.3), c(0.3, 1.2)].iter().map(|&t| bind(&[("tau", t.into())])).collect(),
        1e-10,
        ExpectedFail,
        |ps, cx| cubic::cube_sum_identity(CubeSumInput::Genus1(tau(ps, "tau")?), CubePhase::Printed, &cx.eval, cx.accept),
    );
    b.add(
        "thetaR3.g2",
        "9·[00;00]³ = Σ e(−3a'·a'')[a'₁a'₂;a''₁a''₂]³ over 81 characteristics in thirds; holds with e(+3a'·a'')",
        &[("t11", K::Complex), ("t12", K::Complex), ("t22", K::Complex)],
        {
            let cub = cubic_period(TauPoint::from_parts(0.0, 1.0).expect("valid"));
            [(c(0.0, 1.2), c(0.0, 0.3), c(0.0, 1.5)), (cub.t11(), cub.t12(), cub.t22()), (c(0.2, 1.1), c(-0.1, 0.2), c(0.1, 1.3))]
                .iter()
                .map(|&(a, bb, d)| bind(&[("t11", a.into()), ("t12", bb.into()), ("t22", d.into())]))
                .collect()
        },
        1e-8,
        ExpectedFail,
        |ps, cx| {
            let m = PeriodMatrix2::new(complex(ps, "t11")?, complex(ps, "t12")?, complex(ps, "t22")?)?;
            cubic::cube_sum_identity(CubeSumInput::Genus2(m), CubePhase::Printed, &cx.eval, cx.accept)
        },
    );

    let formal = [
        ("formal.agm2", FormalId::Agm2Cancel, "∏(1−q^{4n})²(1−q^{4n−2})² = ∏(1−q^{2n})², exact coefficients"),
        ("formal.theta13", FormalId::Theta13, "∏(1+q^{2n−1})²(1+q^{6n−3})² − ∏(1−q^{2n−1})²(1−q^{6n−3})² = 4q∏(1+q^{2n})²(1+q^{6n})², exact coefficients"),
        ("formal.quartic", FormalId::Quartic, "θ₃⁴ = θ₄⁴ + θ₂⁴ and ∏(1+q^{2n−1})⁸ − ∏(1−q^{2n−1})⁸ = 16q∏(1+q^{2n})⁸, exact coefficients"),
        ("formal.landen_nd.p2", FormalId::LandenNd(2), "θ₄(2u,2τ)·∏(1−q^{2n})² = θ₄(u,τ)θ₃(u,τ)·∏(1−q^{4n}) in ℤ[z^±][[q]]"),
        ("formal.landen_nd.p3", FormalId::LandenNd(3), "θ₄(3u,3τ)·∏(1−q^{2n})³ = ∏_kθ₄(u+k/3,τ)·∏(1−q^{6n}) in ℤ[z^±][[q]], via (1−y)(1−ωy)(1−ω²y) = 1−y³"),
        ("formal.cubic", FormalId::Cubic, "a³ = b³ + c³ for the one-parameter series, exact coefficients in q^{1/3}"),
    ];
    for (id, fid, anchor) in formal {
        b.add(
            id,
            anchor,
            &[("order", K::Int)],
            vec![bind(&[("order", 200i64.into())])],
            0.5,
            Pass,
            move |ps, _cx| formal_report(fid, order(ps)?),
        );
    }
    b.add(
        "formal.product_families",
        "product expansions of θ₂, θ₃, θ₄ (and the (q,z) forms) equal their defining sums, exact coefficients",
        &[("family", K::Text), ("order", K::Int)],
        ["theta2", "theta3", "theta4", "theta3z", "theta4z"]
            .iter()
            .map(|f| bind(&[("family", (*f).into()), ("order", 100i64.into())]))
            .collect(),
        0.5,
        Pass,
        |ps, _cx| {
            let ord = order(ps)?;
            let (fam, def) = match value(ps, "family")? {
                ParamValue::Text(s) => match s.as_str() {
                    "theta2" => (ProductFamily::Theta2, SeriesDefinition::Theta2),
                    "theta3" => (ProductFamily::Theta3, SeriesDefinition::Theta3),
                    "theta4" => (ProductFamily::Theta4, SeriesDefinition::Theta4),
                    "theta3z" => (ProductFamily::Theta3Z, SeriesDefinition::Theta3Z),
                    "theta4z" => (ProductFamily::Theta4Z, SeriesDefinition::Theta4Z),
                    other => return Err(Error::Schema(format!("unknown family {other:?}"))),
                },
                _ => return Err(Error::Schema("family must be text".into())),
            };
            if ord > qexact::FORMAL_ORDER_CAP {
                return Err(Error::Domain(format!("order must be at most {}", qexact::FORMAL_ORDER_CAP)));
            }
            let prod = qexact::expand_product(fam, ord)?;
            let sum = qexact::theta_series(def, 1, ord);
            let d = prod.sub(&sum);
            let diff = d.terms().map(|(_, c)| c.to_string().trim_start_matches('-').parse::<f64>().unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
            let mut r = IdentityReport::new(
                "",
                Side::Digest(format!("product to q^{}", d.order_exponent())),
                Side::Digest(format!("sum to q^{}", d.order_exponent())),
                diff,
                0.5,
            );
            if let Some(m) = qexact::first_mismatch(&prod, &sum) {
                r = r.note("first_mismatch", m.to_string());
            }
            Ok(r)
        },
    );

    b.0.sort_by(|x, y| x.id.cmp(&y.id));
    b.0
}

/// The catalog, sorted by id.
pub fn catalog() -> &'static [IdentityEntry] {
    static CATALOG: OnceLock<Vec<IdentityEntry>> = OnceLock::new();
    CATALOG.get_or_init(build)
}

/// Look up an entry by id.
pub fn entry(id: &str) -> Result<&'static IdentityEntry> {
    catalog()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Entries whose id contains `filter`, sorted by id.
pub fn list_entries(filter: Option<&str>) -> Vec<EntrySummary> {
    catalog()
        .iter()
        .filter(|e| filter.is_none_or(|f| e.id.contains(f)))
        .map(|e| EntrySummary {
            id: e.id.clone(),
            anchor: e.anchor.clone(),
            schema: e.schema_summary(),
        })
        .collect()
}

/// Check overrides against the schema, coercing numeric kinds.
pub fn check_overrides(entry: &IdentityEntry, overrides: &Params) -> Result<Params> {
    overrides
        .iter()
        .map(|(k, v)| {
            let kind = entry
                .param_kind(k)
                .ok_or_else(|| Error::Schema(format!("{} has no parameter {k:?}", entry.id)))?;
            let v = kind
                .coerce(v)
                .ok_or_else(|| Error::Schema(format!("{k} expects {}, got {v}", kind.name())))?;
            Ok((k.clone(), v))
        })
        .collect()
}

/// Run every grid point of `id` with `overrides` applied. Bindings that
/// become identical after overriding are run once. Evaluation errors are
/// captured per point as failed reports.
pub fn run_entry(id: &str, overrides: &Params, tol: Option<f64>) -> Result<Vec<IdentityReport>> {
    let e = entry(id)?;
    let overrides = check_overrides(e, overrides)?;
    let accept = match tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::InvalidTolerance(t)),
        None => e.tolerance,
    };
    let mut grid: Vec<Params> = Vec::new();
    for point in &e.default_grid {
        let mut p = point.clone();
        p.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        if !grid.contains(&p) {
            grid.push(p);
        }
    }
    let ctx = RunContext {
        eval: Tolerance::new(EVAL_EPS)?,
        accept,
    };
    let expect_fail = e.expected == Expectation::ExpectedFail;
    Ok(grid
        .par_iter()
        .map(|p| {
            let mut r = match (e.runner)(p, &ctx) {
                Ok(r) => r,
                Err(err) => IdentityReport::from_error("", err, accept),
            };
            r.identity_id = e.id.clone();
            r.expect_fail = expect_fail;
            r.with_params(p)
        })
        .collect())
}

/// Run every entry with its defaults, in catalog order.
pub fn run_all() -> BTreeMap<String, Vec<IdentityReport>> {
    catalog()
        .iter()
        .map(|e| {
            let reports = run_entry(&e.id, &Params::new(), None).expect("catalog entries run with their defaults");
            (e.id.clone(), reports)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0+1i"), Some(c(0.0, 1.0)));
        assert_eq!(parse_complex("0-1i"), Some(c(0.0, -1.0)));
        assert_eq!(parse_complex("-0.5+1.2i"), Some(c(-0.5, 1.2)));
        assert_eq!(parse_complex("1e-3-2e-1i"), Some(c(1e-3, -0.2)));
        assert_eq!(parse_complex("2.5"), Some(c(2.5, 0.0)));
        assert_eq!(parse_complex("1.5i"), Some(c(0.0, 1.5)));
        assert_eq!(parse_complex("i"), Some(c(0.0, 1.0)));
        for bad in ["", "1+", "1 + 2i", "abc", "1+2j", "1++2i", "nan", "inf+1i"] {
            assert_eq!(parse_complex(bad), None, "{bad}");
        }
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("1/3"), Some(rat(1, 3)));
        assert_eq!(parse_rational("-4/6"), Some(rat(-2, 3)));
        assert_eq!(parse_rational("2"), Some(rat(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn catalog_invariants() {
        let cat = catalog();
        assert!(cat.len() >= 25);
        for w in cat.windows(2) {
            assert!(w[0].id < w[1].id, "ids must be unique and sorted");
        }
        for e in cat {
            assert!(!e.anchor.is_empty(), "{}", e.id);
            assert!(!e.default_grid.is_empty(), "{}", e.id);
            for p in &e.default_grid {
                for k in p.keys() {
                    assert!(e.param_kind(k).is_some(), "{}: {k}", e.id);
                }
                assert_eq!(p.len(), e.schema.len(), "{}", e.id);
            }
        }
    }

    #[test]
    fn listing() {
        let ids: Vec<_> = list_entries(Some("landen")).into_iter().map(|s| s.id).collect();
        for p in 2..=7 {
            assert!(ids.contains(&format!("landen.p{p}")));
        }
        assert!(ids.contains(&"landens3.theta2".to_string()));
        assert!(ids.iter().any(|i| i.starts_with("landen.parity.")));
        assert!(list_entries(Some("zz")).is_empty());
        assert_eq!(list_entries(Some("fk")).len(), 3);
    }

    #[test]
    fn landen_p3_defaults() {
        let reports = run_entry("landen.p3", &Params::new(), None).unwrap();
        assert_eq!(reports.len(), 6);
        assert!(reports.iter().all(|r| r.passed && r.identity_id == "landen.p3"));
    }

    #[test]
    fn unknown_and_bad_overrides() {
        assert!(matches!(run_entry("nosuch", &Params::new(), None), Err(Error::UnknownIdentity(_))));
        let mut o = Params::new();
        o.insert("zeta".into(), ParamValue::Int(1));
        assert!(matches!(run_entry("landen.p3", &o, None), Err(Error::Schema(_))));
        let mut o = Params::new();
        o.insert("tau".into(), ParamValue::Text("x".into()));
        assert!(matches!(run_entry("landen.p3", &o, None), Err(Error::Schema(_))));
    }

    #[test]
    fn overrides_collapse_grid() {
        let mut o = Params::new();
        o.insert("tau".into(), ParamValue::Complex(c(0.0, 1.1)));
        let reports = run_entry("landen.p2", &o, None).unwrap();
        assert_eq!(reports.len(), 2);
    }

    #[test]
    fn errors_are_captured_per_point() {
        let mut o = Params::new();
        o.insert("tau".into(), ParamValue::Complex(c(0.0, -1.0)));
        let reports = run_entry("modular3", &o, None).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].error.as_deref().unwrap().contains("Im(tau) must be positive"));
        assert!(!reports[0].passed);
    }

    #[test]
    fn offdiag_is_expected_failure() {
        let reports = run_entry("cubic.identity.offdiag", &Params::new(), None).unwrap();
        assert!(reports.iter().all(|r| r.verdict() == crate::report::Verdict::Xfail), "{reports:?}");
    }

    #[test]
    fn deterministic() {
        let a = run_entry("dp.general", &Params::new(), None).unwrap();
        let b = run_entry("dp.general", &Params::new(), None).unwrap();
        let bits = |v: &[IdentityReport]| v.iter().map(|r| r.residual.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}
