//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p theta-lab-cli --test acceptance`.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theta_lab::cubic::{self, CubePhase, CubeSumInput};
use theta_lab::double_product::{self, G2Constant, ProductKind};
use theta_lab::genus2::cubic_period;
use theta_lab::landen::{self, DenominatorFamily, FkCase};
use theta_lab::qexact::{formal_verify, FormalId};
use theta_lab::registry;
use theta_lab::report::{Note, Verdict};
use theta_lab::{IdentityReport, Params, PeriodMatrix2, SymmetricTau, TauPoint, Tolerance};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tol() -> Tolerance {
    Tolerance::new(1e-15).unwrap()
}

fn grid() -> Vec<TauPoint> {
    [c(0.0, 1.0), c(0.0, 1.5), c(0.3, 1.2)].into_iter().map(|t| TauPoint::new(t).unwrap()).collect()
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x7e7a_0000 + criterion)
}

fn real_note(r: &IdentityReport, key: &str) -> f64 {
    match r.notes.get(key) {
        Some(Note::Real(x)) => *x,
        _ => f64::NAN,
    }
}

fn judge(ok: bool, summary: String) -> Outcome {
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn landen_sweeps(ps: &[u32], family: DenominatorFamily) -> Result<(f64, f64), String> {
    let (mut worst, mut stdev) = (0.0f64, 0.0f64);
    for &p in ps {
        for tau in grid() {
            let samples = landen::u_samples(p, tau, 20, family);
            let r = landen::landen_sweep(p, tau, &samples, family, &tol(), 1e-9).map_err(|e| format!("p={p}: {e}"))?;
            worst = worst.max(real_note(&r, "max_abs_deviation"));
            stdev = stdev.max(real_note(&r, "stdev_over_u"));
        }
    }
    Ok((worst, stdev))
}

fn c1() -> Outcome {
    let start = Instant::now();
    let (worst, stdev) = landen_sweeps(&[2, 3, 5, 7], DenominatorFamily::Theta4)?;
    let secs = start.elapsed().as_secs_f64();
    judge(
        worst < 1e-9 && stdev < 1e-9 && secs < 5.0,
        format!("Landen p in {{2,3,5,7}}, 3 tau x 20 u: max residual {worst:.2e}, max stdev {stdev:.2e}, {secs:.2}s"),
    )
}

fn c2() -> Outcome {
    let (worst, stdev) = landen_sweeps(&[2, 3, 4, 5], DenominatorFamily::Theta3)?;
    judge(
        worst < 1e-9 && stdev < 1e-9,
        format!("parity variant p in {{2,3,4,5}}: max residual {worst:.2e}, max stdev {stdev:.2e}"),
    )
}

fn c3() -> Outcome {
    let start = Instant::now();
    let mut failed = Vec::new();
    for id in [FormalId::Agm2Cancel, FormalId::Theta13, FormalId::Quartic, FormalId::LandenNd(2), FormalId::LandenNd(3)] {
        let out = formal_verify(id, 200).map_err(|e| format!("{}: {e}", id.name()))?;
        if !out.passed || out.first_mismatch.is_some() {
            failed.push(format!("{} (first mismatch {:?})", id.name(), out.first_mismatch));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    judge(
        failed.is_empty() && secs < 10.0,
        format!("formal order 200, 5 identities: mismatching {:?}, {secs:.2}s", failed),
    )
}

fn c4() -> Outcome {
    let mut worst = 0.0f64;
    for tau in grid() {
        let r = landen::modular3_residual(tau, &tol(), 1e-11).map_err(|e| e.to_string())?;
        worst = worst.max(r.residual);
    }
    judge(worst < 1e-11, format!("degree-3 modular equation: max residual {worst:.2e}"))
}

fn c5() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut ratio_worst = 0.0f64;
    for p in [3, 5, 7] {
        for tau in grid() {
            let r = landen::ratio_ell(p, tau, &tol(), 1e-9).map_err(|e| e.to_string())?;
            ratio_worst = ratio_worst.max(r.residual);
            ok &= r.passed;
        }
    }
    lines.push(format!("ratio p=3,5,7 max residual {ratio_worst:.2e}"));
    for case in FkCase::ALL {
        let (mut worst, mut conj) = (0.0f64, 0.0f64);
        let mut turns = f64::NAN;
        for tau in grid() {
            let r = landen::fk_ratio(case, tau, &tol(), 1e-9).map_err(|e| e.to_string())?;
            worst = worst.max(r.residual);
            conj = conj.max(real_note(&r, "residual_conjugate_phase"));
            turns = real_note(&r, "measured_phase_turns");
            ok &= r.passed;
        }
        lines.push(format!(
            "{} residual {worst:.2e} (phase discrepancy: measured {turns:.6} turns, printed {:.6}; conjugate phase residual {conj:.2e})",
            case.id(),
            2.0 / case.parts().0 as f64,
        ));
    }
    judge(ok, lines.join("; "))
}

fn random_point(g: &mut ChaCha8Rng) -> Complex64 {
    c(g.gen_range(-0.5..0.5), g.gen_range(-0.2..0.2))
}

fn random_tau(g: &mut ChaCha8Rng, im_lo: f64, im_hi: f64) -> TauPoint {
    TauPoint::from_parts(g.gen_range(-0.5..0.5), g.gen_range(im_lo..im_hi)).unwrap()
}

fn c6() -> Outcome {
    let mut g = rng(6);
    let (mut split, mut inverse, mut round) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..30 {
        let (x, y) = (random_point(&mut g), random_point(&mut g));
        let (w1, w2) = (random_tau(&mut g, 0.8, 1.5), random_tau(&mut g, 0.8, 1.5));
        let st = SymmetricTau::from_w(w1, w2);
        let mut products = [c(0.0, 0.0); 4];
        for (k, kind) in ProductKind::ALL.into_iter().enumerate() {
            let (lhs, rhs) = double_product::double_product_split(kind, x, y, w1, w2, &tol()).map_err(|e| e.to_string())?;
            split = split.max((lhs - rhs).norm());
            products[k] = lhs;
        }
        let p = |kind: ProductKind| products[ProductKind::ALL.iter().position(|&k| k == kind).unwrap()];
        for gc in G2Constant::ALL {
            let (lhs, rhs) = double_product::inverse_combine(gc, x, y, w1, w2, &tol()).map_err(|e| e.to_string())?;
            inverse = inverse.max((lhs - rhs).norm());
            let rebuilt = match gc {
                G2Constant::Zero => (p(ProductKind::K33) + p(ProductKind::K44)) * 0.5,
                G2Constant::HalfHalf => (p(ProductKind::K33) - p(ProductKind::K44)) * 0.5,
                G2Constant::ZeroHalf => (p(ProductKind::K22) + p(ProductKind::K11)) * 0.5,
                G2Constant::HalfZero => (p(ProductKind::K22) - p(ProductKind::K11)) * 0.5,
            };
            let direct = double_product::g2_value(gc, x, y, &st, &tol()).map_err(|e| e.to_string())?;
            round = round.max((rebuilt - direct).norm());
        }
    }
    judge(
        split < 1e-10 && inverse < 1e-10 && round < 1e-9,
        format!("30 random points: split {split:.2e}, inverse {inverse:.2e}, round trip {round:.2e}"),
    )
}

fn c7() -> Outcome {
    let mut g = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (x, y) = (random_point(&mut g), random_point(&mut g));
        let w = random_tau(&mut g, 0.8, 1.5);
        for kind in ProductKind::ALL {
            let (lhs, rhs) = double_product::duplication(kind, x, y, w, &tol()).map_err(|e| e.to_string())?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    judge(worst < 1e-10, format!("duplication, 4 kinds x 20 random points: max residual {worst:.2e}"))
}

/// Plain double sum for a genus-2 theta constant on `[[τ₀,τ₁],[τ₁,τ₀]]`.
fn brute_g2(alpha: [f64; 2], beta: [f64; 2], tau0: Complex64, tau1: Complex64) -> Complex64 {
    let i = c(0.0, 1.0);
    let mut s = c(0.0, 0.0);
    for m in -40..=40 {
        for n in -40..=40 {
            let a = m as f64 + alpha[0];
            let b = n as f64 + alpha[1];
            let quad = tau0 * (a * a + b * b) + tau1 * (2.0 * a * b);
            s += (i * PI * quad + i * 2.0 * PI * (a * beta[0] + b * beta[1])).exp();
        }
    }
    s
}

fn c8() -> Outcome {
    let mut g = rng(8);
    let ratio = |g: &mut ChaCha8Rng| {
        let d = g.gen_range(1..=6i64);
        Rational64::new(g.gen_range(-d..=d), d)
    };
    let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let alpha = [ratio(&mut g), ratio(&mut g)];
        let beta = [ratio(&mut g), ratio(&mut g)];
        let qa = g.gen_range(0.1..0.45f64);
        // |qr| and |q/r| both at most ½
        let ra = (2.0 * qa).powf(1.0 - g.gen_range(0.0..2.0f64));
        let q = Complex64::from_polar(qa, g.gen_range(-PI..PI));
        let r = Complex64::from_polar(ra, g.gen_range(-PI..PI));
        let st = SymmetricTau::from_nomes(q, r).map_err(|e| e.to_string())?;
        let (lhs, rhs) = double_product::general_char_split(alpha, beta, q, r, &tol()).map_err(|e| e.to_string())?;
        let oracle = brute_g2([f(alpha[0]), f(alpha[1])], [f(beta[0]), f(beta[1])], st.tau0(), st.tau1());
        worst = worst.max((lhs - oracle).norm()).max((rhs - oracle).norm());
    }
    judge(worst < 1e-9, format!("general characteristic split, 20 random cases vs brute double sum: max residual {worst:.2e}"))
}

fn c9() -> Outcome {
    let mut worst = 0.0f64;
    for q in [0.1, 0.2, 0.3, 0.45] {
        let q = c(q, 0.0);
        let t = tol();
        for r in [
            cubic::abc_theta_links(q, &t, 1e-9),
            cubic::bba_check(q, &t, 1e-9),
            cubic::bbc_check(q, &t, 1e-9),
            cubic::cubic_identity(q, None, &t, 1e-9),
        ] {
            worst = worst.max(r.map_err(|e| e.to_string())?.residual);
        }
    }
    let off = registry::run_entry("cubic.identity.offdiag", &Params::new(), None).map_err(|e| e.to_string())?;
    let min_off = off.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let all_xfail = off.iter().all(|r| r.verdict() == Verdict::Xfail);
    judge(
        worst < 1e-9 && min_off > 1e-4 && all_xfail,
        format!("cubic suite max residual {worst:.2e}; r^2 != q smallest residual {min_off:.2e}, all XFAIL: {all_xfail}"),
    )
}

fn c10() -> Outcome {
    let mut g = rng(10);
    let mut ok = true;
    let (mut g1, mut g1c) = (0.0f64, 0.0f64);
    for tau in [TauPoint::from_parts(0.0, 1.0).unwrap(), TauPoint::from_parts(0.0, 1.3).unwrap()] {
        let r = cubic::cube_sum_identity(CubeSumInput::Genus1(tau), CubePhase::Printed, &tol(), 1e-10).map_err(|e| e.to_string())?;
        g1 = g1.max(r.residual);
        g1c = g1c.max(real_note(&r, "residual_conjugate_phase"));
        ok &= r.passed;
    }
    let mut mats = vec![cubic_period(TauPoint::from_parts(0.0, 1.0).unwrap())];
    while mats.len() < 3 {
        let st = SymmetricTau::from_w(random_tau(&mut g, 0.4, 0.9), random_tau(&mut g, 0.4, 0.9));
        let m: PeriodMatrix2 = st.matrix();
        if m.lambda_min() >= 0.8 {
            mats.push(m);
        }
    }
    let (mut g2, mut g2c) = (0.0f64, 0.0f64);
    for m in mats {
        let r = cubic::cube_sum_identity(CubeSumInput::Genus2(m), CubePhase::Printed, &tol(), 1e-8).map_err(|e| e.to_string())?;
        g2 = g2.max(r.residual);
        g2c = g2c.max(real_note(&r, "residual_conjugate_phase"));
        ok &= r.passed;
    }
    judge(
        ok,
        format!(
            "cube sums with e(-3a'a''): genus 1 residual {g1:.2e}, genus 2 residual {g2:.2e}; with e(+3a'a''): {g1c:.2e}, {g2c:.2e}"
        ),
    )
}

fn c11() -> Outcome {
    let mut worst = 0.0f64;
    for w in [c(0.0, 1.0), c(0.25, 0.9), c(0.0, 1.5)] {
        let r = double_product::cubic_char_equality(TauPoint::new(w).unwrap(), &tol(), 1e-10).map_err(|e| e.to_string())?;
        worst = worst.max(r.residual);
    }
    let bij = double_product::cubic_bijection_check(12);
    judge(
        worst < 1e-10 && bij == Ok(625),
        format!("cubic-matrix characteristics max pairwise residual {worst:.2e}; bijection on |j|,|k|<=12: {bij:?}"),
    )
}

fn c12() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_theta-lab"))
        .args(["verify", "--all"])
        .output()
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let lines = out.stdout.iter().filter(|&&b| b == b'\n').count();
    judge(
        out.status.code() == Some(0) && secs < 60.0,
        format!("verify --all: exit {:?}, {lines} reports, {secs:.2}s", out.status.code()),
    )
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let criteria: [(u32, fn() -> Outcome); 12] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
        (12, c12),
    ];
    let mut failures = 0;
    for (n, run) in criteria {
        match run() {
            Ok(s) => println!("PASS criterion {n:>2}: {s}"),
            Err(s) => {
                failures += 1;
                println!("FAIL criterion {n:>2}: {s}");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
