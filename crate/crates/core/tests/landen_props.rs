use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use theta_lab::genus1::theta_j;
use theta_lab::landen::{
    agm_chain, eta_quotient_check, fk_ratio, landen_parity, landen_ratio, landen_rhs, landen_rhs_eta,
    landen_rhs_product, theta13_residual, FkCase,
};
use theta_lab::report::Note;
use theta_lab::{Error, TauPoint, Tolerance};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tol() -> Tolerance {
    Tolerance::new(1e-15).unwrap()
}

/// `∏(1−q^{2pn})/(1−q^{2n})^p` by plain multiplication to 400 factors.
fn rhs_oracle(p: u32, tau: Complex64) -> Complex64 {
    let q = (c(0.0, PI) * tau).exp();
    let one = c(1.0, 0.0);
    let mut acc = one;
    for n in 1..=400 {
        acc *= (one - q.powu(2 * p * n)) / (one - q.powu(2 * n)).powu(p);
    }
    acc
}

/// Distance from `u` to the nearest zero of `θ(u + k/p)` for the family
/// whose zeros sit at `offset − k/p` modulo the lattice.
fn zero_distance(u: Complex64, p: u32, tau: Complex64, offset: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..p {
        let z = offset - k as f64 / p as f64;
        for m in -3..=3 {
            for n in -2..=2 {
                best = best.min((u - z - m as f64 - tau * n as f64).norm());
            }
        }
    }
    best
}

fn random_us(seed: u64, p: u32, tau: Complex64, offset: Complex64) -> Vec<Complex64> {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < 20 {
        let u = c(g.gen_range(-1.0..1.0), g.gen_range(-0.45..0.45) * tau.im);
        if zero_distance(u, p, tau, offset) > 0.05 {
            out.push(u);
        }
    }
    out
}

fn stdev(v: &[Complex64]) -> f64 {
    let mean = v.iter().sum::<Complex64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / v.len() as f64).sqrt()
}

#[test]
fn landen_ratio_is_constant_in_u() {
    let tau = TauPoint::from_parts(0.0, 1.0).unwrap();
    let t = tau.value();
    for p in 2..=5u32 {
        let rhs = landen_rhs(p, tau, &tol()).unwrap();
        let oracle = rhs_oracle(p, t);
        assert!((rhs - oracle).norm() < 1e-12, "p={p}");

        let vals: Vec<_> = random_us(p as u64, p, t, t * 0.5)
            .into_iter()
            .map(|u| landen_ratio(p, u, tau, &tol()).unwrap())
            .collect();
        assert!(stdev(&vals) < 1e-9, "p={p}");
        assert!(vals.iter().all(|v| (v - oracle).norm() < 1e-9), "p={p}");

        let vals: Vec<_> = random_us(100 + p as u64, p, t, (t + 1.0) * 0.5)
            .into_iter()
            .map(|u| landen_parity(p, u, tau, &tol()).unwrap())
            .collect();
        assert!(stdev(&vals) < 1e-9, "parity p={p}");
        assert!(vals.iter().all(|v| (v - oracle).norm() < 1e-9), "parity p={p}");
    }
}

#[test]
fn eta_path_agrees_with_product() {
    for t in [c(0.0, 1.0), c(0.0, 1.5), c(0.3, 1.2)] {
        let tau = TauPoint::new(t).unwrap();
        for p in 1..=7 {
            let a = landen_rhs_product(p, tau, &tol()).unwrap();
            let b = landen_rhs_eta(p, tau, &tol()).unwrap();
            assert!((a - b).norm() < 1e-10, "p={p} tau={t}");
            assert!(eta_quotient_check(p, tau, &tol(), 1e-10).unwrap().passed);
        }
    }
}

#[test]
fn agm_chain_does_not_drift() {
    for t in [c(0.0, 1.0), c(0.0, 1.5), c(0.3, 1.2)] {
        let r = agm_chain(TauPoint::new(t).unwrap(), 5, &tol(), 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn theta13_product_identity() {
    for q in [0.1, 0.3] {
        let r = theta13_residual(c(q, 0.0), &tol(), 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn fk_cases_hold_with_conjugate_phase() {
    let tau = TauPoint::from_parts(0.0, 1.0).unwrap();
    for case in FkCase::ALL {
        let r = fk_ratio(case, tau, &tol(), 1e-9).unwrap();
        assert!(!r.passed, "{}", case.id());
        let conj = match r.notes["residual_conjugate_phase"] {
            Note::Real(x) => x,
            _ => unreachable!(),
        };
        assert!(conj < 1e-9, "{}: {conj}", case.id());
    }
}

#[test]
fn zero_denominator_is_reported() {
    let tau = TauPoint::from_parts(0.0, 1.0).unwrap();
    // θ₄ vanishes at u = τ/2
    let err = landen_ratio(3, tau.value() * 0.5, tau, &tol()).unwrap_err();
    assert!(matches!(err, Error::NearZeroDenominator { .. }), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn landen_matches_oracle(p in 2u32..=7, re in -0.5f64..0.5, im in 0.8f64..1.5, ur in -0.5f64..0.5, ui in -0.2f64..0.2) {
        let tau = TauPoint::from_parts(re, im).unwrap();
        let u = c(ur, ui);
        prop_assume!(zero_distance(u, p, tau.value(), tau.value() * 0.5) > 0.05);
        let lhs = landen_ratio(p, u, tau, &tol()).unwrap();
        let oracle = rhs_oracle(p, tau.value());
        prop_assert!((lhs - oracle).norm() < 1e-9 * oracle.norm().max(1.0), "{} vs {}", lhs, oracle);
    }

    #[test]
    fn theta_squares_follow_gauss_agm(re in -0.5f64..0.5, im in 0.6f64..1.5) {
        let tau = TauPoint::from_parts(re, im).unwrap();
        let z = c(0.0, 0.0);
        let t = |j, tau| theta_j(j, z, tau, &tol()).unwrap();
        let (a, b) = (t(3, tau).powi(2), t(4, tau).powi(2));
        let tau2 = tau.scaled(2.0);
        prop_assert!(((a + b) * 0.5 - t(3, tau2).powi(2)).norm() < 1e-12);
        prop_assert!(((a * b) - t(4, tau2).powi(4)).norm() < 1e-12);
    }
}
