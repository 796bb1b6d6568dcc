//! `theta-lab` command line: `eval`, `verify` and `list`.
//!
//! [`run`] does all the work and returns the exit code with the captured
//! output, so the binary and the tests share one path.
//!
//! Exit codes: 0 success, 1 an unexpected verification failure, 2 a usage or
//! parse error (including unknown ids), 3 a domain error during `eval`.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::json;

use theta_lab::cubic::{abc_series_auto, Abc};
use theta_lab::genus1::{dedekind_eta, theta_char_g1, theta_j};
use theta_lab::genus2::theta_char_g2;
use theta_lab::landen::{landen_ratio, landen_rhs};
use theta_lab::registry::{self, ParamKind};
use theta_lab::{CharPair, CharQuad, Error, IdentityReport, Params, PeriodMatrix2, TauPoint, Tolerance};

#[derive(Debug, Parser)]
#[command(name = "theta-lab", version, about = "Evaluate theta functions and verify identities between them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a function, e.g. `eval theta3 u=0 tau=0+1i`
    Eval(EvalArgs),
    /// Verify catalog entries
    Verify(VerifyArgs),
    /// List catalog entries
    List {
        /// Keep ids containing this substring
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// theta1..theta4, theta_char_g1, theta_char_g2, eta, a, b, c, landen_ratio, landen_rhs
    function: String,
    /// Arguments as key=value
    args: Vec<String>,
    /// Truncation tolerance (default 1e-15)
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Catalog id
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    id: Option<String>,
    /// Parameter overrides as key=value
    overrides: Vec<String>,
    /// Verify every entry
    #[arg(long)]
    all: bool,
    /// One JSON object per line
    #[arg(long)]
    json: bool,
    /// Acceptance tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Series order for formal.* entries
    #[arg(long)]
    order: Option<i64>,
}

/// Exit code plus everything written to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: 0, stdout, stderr: String::new() }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Self { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

/// Run the command line `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match cli.command {
        Command::Eval(a) => eval(&a),
        Command::Verify(a) => verify(&a),
        Command::List { filter } => list(filter.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// eval

enum EvalError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for EvalError {
    fn from(e: Error) -> Self {
        EvalError::Domain(e)
    }
}

struct KeyValues(Vec<(String, String)>);

impl KeyValues {
    fn parse(args: &[String]) -> Result<Self, String> {
        let mut out: Vec<(String, String)> = Vec::new();
        for a in args {
            let (k, v) = a.split_once('=').ok_or_else(|| format!("expected key=value, got {a:?}"))?;
            if k.is_empty() {
                return Err(format!("empty key in {a:?}"));
            }
            if out.iter().any(|(seen, _)| seen == k) {
                return Err(format!("{k} given twice"));
            }
            out.push((k.to_string(), v.to_string()));
        }
        Ok(Self(out))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn complex(&self, key: &str, default: Option<Complex64>) -> Result<Complex64, EvalError> {
        match self.raw(key) {
            Some(v) => registry::parse_complex(v).ok_or_else(|| EvalError::Usage(format!("cannot parse {key}={v:?} as complex"))),
            None => default.ok_or_else(|| EvalError::Usage(format!("missing argument {key}"))),
        }
    }

    fn rational(&self, key: &str, default: Option<Rational64>) -> Result<Rational64, EvalError> {
        match self.raw(key) {
            Some(v) => registry::parse_rational(v).ok_or_else(|| EvalError::Usage(format!("cannot parse {key}={v:?} as rational"))),
            None => default.ok_or_else(|| EvalError::Usage(format!("missing argument {key}"))),
        }
    }

    fn uint(&self, key: &str) -> Result<u32, EvalError> {
        let v = self.raw(key).ok_or_else(|| EvalError::Usage(format!("missing argument {key}")))?;
        v.parse().map_err(|_| EvalError::Usage(format!("cannot parse {key}={v:?} as a non-negative integer")))
    }

    fn tau(&self, key: &str) -> Result<TauPoint, EvalError> {
        Ok(TauPoint::new(self.complex(key, None)?)?)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), EvalError> {
        match self.0.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(EvalError::Usage(format!("unexpected argument {k} (expected {})", allowed.join(", ")))),
            None => Ok(()),
        }
    }
}

const FUNCTIONS: &[&str] = &[
    "theta1", "theta2", "theta3", "theta4", "theta_char_g1", "theta_char_g2", "eta", "a", "b", "c", "landen_ratio", "landen_rhs",
];

fn zero() -> Option<Complex64> {
    Some(Complex64::new(0.0, 0.0))
}

fn evaluate(function: &str, kv: &KeyValues, tol: &Tolerance) -> Result<Complex64, EvalError> {
    let zr = Some(Rational64::from_integer(0));
    match function {
        "theta1" | "theta2" | "theta3" | "theta4" => {
            kv.check_keys(&["u", "tau"])?;
            let j = function.as_bytes()[5] - b'0';
            Ok(theta_j(j, kv.complex("u", zero())?, kv.tau("tau")?, tol)?)
        }
        "theta_char_g1" => {
            kv.check_keys(&["alpha", "beta", "u", "tau"])?;
            let ch = CharPair::new(kv.rational("alpha", zr)?, kv.rational("beta", zr)?);
            Ok(theta_char_g1(ch, kv.complex("u", zero())?, kv.tau("tau")?, tol)?)
        }
        "theta_char_g2" => {
            kv.check_keys(&["alpha1", "alpha2", "beta1", "beta2", "u1", "u2", "t11", "t12", "t22"])?;
            let ch = CharQuad::new(
                [kv.rational("alpha1", zr)?, kv.rational("alpha2", zr)?],
                [kv.rational("beta1", zr)?, kv.rational("beta2", zr)?],
            );
            let m = PeriodMatrix2::new(kv.complex("t11", None)?, kv.complex("t12", zero())?, kv.complex("t22", None)?)?;
            Ok(theta_char_g2(ch, [kv.complex("u1", zero())?, kv.complex("u2", zero())?], &m, tol)?)
        }
        "eta" => {
            kv.check_keys(&["tau"])?;
            Ok(dedekind_eta(kv.tau("tau")?, tol)?)
        }
        "a" | "b" | "c" => {
            kv.check_keys(&["q", "r"])?;
            let which = match function {
                "a" => Abc::A,
                "b" => Abc::B,
                _ => Abc::C,
            };
            let r = match kv.raw("r") {
                Some(_) => Some(kv.complex("r", None)?),
                None => None,
            };
            Ok(abc_series_auto(which, kv.complex("q", None)?, r, tol)?)
        }
        "landen_ratio" => {
            kv.check_keys(&["p", "u", "tau"])?;
            Ok(landen_ratio(kv.uint("p")?, kv.complex("u", zero())?, kv.tau("tau")?, tol)?)
        }
        "landen_rhs" => {
            kv.check_keys(&["p", "tau"])?;
            Ok(landen_rhs(kv.uint("p")?, kv.tau("tau")?, tol)?)
        }
        _ => Err(EvalError::Usage(format!("unknown function {function:?} (expected one of {})", FUNCTIONS.join(", ")))),
    }
}

/// `{:.15}` with negative zero printed as zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.15}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn eval(a: &EvalArgs) -> Outcome {
    let mut kv = match KeyValues::parse(&a.args) {
        Ok(kv) => kv,
        Err(msg) => return Outcome::usage(msg),
    };
    if let Some(t) = &a.tau {
        if kv.raw("tau").is_some() {
            return Outcome::usage("tau given both as --tau and tau=");
        }
        kv.0.push(("tau".into(), t.clone()));
    }
    // fifteen printed decimals should all be meaningful
    let tol = match Tolerance::new(a.tol.unwrap_or(1e-15)) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(e),
    };
    match evaluate(&a.function, &kv, &tol) {
        Ok(z) if z.re.is_finite() && z.im.is_finite() => Outcome::ok(format!("{}\t{}\n", fixed(z.re), fixed(z.im))),
        Ok(z) => Outcome { code: 3, stdout: String::new(), stderr: format!("error: non-finite result {z}\n") },
        Err(EvalError::Usage(msg)) => Outcome::usage(msg),
        Err(EvalError::Domain(e)) => Outcome { code: 3, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

// ---------------------------------------------------------------------------
// verify

fn format_params(p: &Params) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn report_line(r: &IdentityReport) -> String {
    format!("{}\t{}\t{:.3e}\t{}", r.identity_id, format_params(&r.params), r.residual, r.verdict())
}

fn report_json(r: &IdentityReport, anchor: &str) -> String {
    let mut obj = json!({
        "id": r.identity_id,
        "params": r.params,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "residual": r.residual,
        "tolerance": r.tolerance,
        "verdict": r.verdict(),
        "paper_anchor": anchor,
    });
    if !r.notes.is_empty() {
        obj["notes"] = json!(r.notes);
    }
    if let Some(e) = &r.error {
        obj["error"] = json!(e);
    }
    obj.to_string()
}

/// Overrides for one entry. Flags and `key=value` pairs naming a parameter
/// the entry lacks are an error for a single id and skipped under `--all`.
fn overrides_for(entry: &registry::IdentityEntry, a: &VerifyArgs, strict: bool) -> Result<Params, String> {
    let mut raw: Vec<(String, String)> = Vec::new();
    if let Some(t) = &a.tau {
        raw.push(("tau".into(), t.clone()));
    }
    if let Some(o) = a.order {
        raw.push(("order".into(), o.to_string()));
    }
    raw.extend(KeyValues::parse(&a.overrides)?.0);
    let mut out = Params::new();
    for (k, v) in raw {
        let Some(kind) = entry.param_kind(&k) else {
            if strict {
                return Err(format!("{} has no parameter {k:?} (parameters: {})", entry.id, entry.schema_summary()));
            }
            continue;
        };
        if out.contains_key(&k) {
            return Err(format!("{k} given twice"));
        }
        let value = kind.parse(&v).map_err(|e| e.to_string())?;
        out.insert(k, value);
    }
    Ok(out)
}

fn verify(a: &VerifyArgs) -> Outcome {
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Outcome::usage(format!("--tol must be positive and finite (got {t})"));
        }
    }
    if let Some(t) = &a.tau {
        if ParamKind::Complex.parse(t).is_err() {
            return Outcome::usage(format!("cannot parse --tau {t:?} as complex"));
        }
    }
    if let Err(msg) = KeyValues::parse(&a.overrides) {
        return Outcome::usage(msg);
    }
    let entries: Vec<&registry::IdentityEntry> = match &a.id {
        Some(id) => match registry::entry(id) {
            Ok(e) => vec![e],
            Err(e) => return Outcome::usage(e),
        },
        None => registry::catalog().iter().collect(),
    };
    let strict = !a.all;
    let mut stdout = String::new();
    let mut all_ok = true;
    for e in entries {
        let overrides = match overrides_for(e, a, strict) {
            Ok(o) => o,
            Err(msg) => return Outcome::usage(msg),
        };
        let reports = match registry::run_entry(&e.id, &overrides, a.tol) {
            Ok(r) => r,
            Err(err @ (Error::Schema(_) | Error::UnknownIdentity(_) | Error::InvalidTolerance(_))) => return Outcome::usage(err),
            Err(err) => return Outcome { code: 1, stdout, stderr: format!("error: {err}\n") },
        };
        for r in &reports {
            all_ok &= r.verdict().is_success();
            stdout.push_str(&if a.json { report_json(r, &e.anchor) } else { report_line(r) });
            stdout.push('\n');
        }
    }
    Outcome { code: if all_ok { 0 } else { 1 }, stdout, stderr: String::new() }
}

// ---------------------------------------------------------------------------
// list

fn list(filter: Option<&str>) -> Outcome {
    let mut out = String::new();
    for s in registry::list_entries(filter) {
        out.push_str(&format!("{}\t{}\t{}\n", s.id, s.schema, s.anchor));
    }
    Outcome::ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use theta_lab::ParamValue;

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(fixed(-0.0), "0.000000000000000");
        assert_eq!(fixed(-1e-20), "0.000000000000000");
        assert_eq!(fixed(-0.5), "-0.500000000000000");
    }

    #[test]
    fn key_values() {
        let kv = KeyValues::parse(&["u=0".into(), "tau=0+1i".into()]).unwrap();
        assert_eq!(kv.raw("tau"), Some("0+1i"));
        assert!(KeyValues::parse(&["u".into()]).is_err());
        assert!(KeyValues::parse(&["=1".into()]).is_err());
        assert!(KeyValues::parse(&["u=1".into(), "u=2".into()]).is_err());
    }

    #[test]
    fn param_formatting() {
        let mut p = Params::new();
        p.insert("tau".into(), ParamValue::Complex(Complex64::new(0.3, 1.2)));
        p.insert("p".into(), ParamValue::Int(3));
        assert_eq!(format_params(&p), "p=3,tau=0.3+1.2i");
    }
}
