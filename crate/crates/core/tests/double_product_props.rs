use num_complex::Complex64;
use proptest::prelude::*;
use theta_lab::cubic::{abc_series_auto, Abc};
use theta_lab::double_product::{
    double_product_split, duplication, g2_value, general_char_split, inverse_combine, G2Constant, ProductKind,
};
use theta_lab::genus1::theta_j;
use theta_lab::genus2::theta_char_g2;
use theta_lab::{rat, CharQuad, SymmetricTau, TauPoint, Tolerance};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tol() -> Tolerance {
    Tolerance::new(1e-12).unwrap()
}

fn point() -> impl Strategy<Value = Complex64> {
    (-0.5f64..0.5, -0.2f64..0.2).prop_map(|(a, b)| c(a, b))
}

fn tau() -> impl Strategy<Value = TauPoint> {
    (-0.5f64..0.5, 0.8f64..1.5).prop_map(|(a, b)| TauPoint::from_parts(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn split_then_inverse_reconstructs(x in point(), y in point(), w1 in tau(), w2 in tau()) {
        let mut prod = std::collections::HashMap::new();
        for kind in ProductKind::ALL {
            let (lhs, rhs) = double_product_split(kind, x, y, w1, w2, &tol()).unwrap();
            prop_assert!((lhs - rhs).norm() < 10.0 * tol().eps());
            prod.insert(kind.label(), lhs);
        }
        let st = SymmetricTau::from_w(w1, w2);
        for g in G2Constant::ALL {
            let (a, b, sign) = match g {
                G2Constant::Zero => ("33", "44", 1.0),
                G2Constant::HalfHalf => ("33", "44", -1.0),
                G2Constant::ZeroHalf => ("22", "11", 1.0),
                G2Constant::HalfZero => ("22", "11", -1.0),
            };
            let rebuilt = (prod[a] + prod[b] * sign) * 0.5;
            let direct = g2_value(g, x, y, &st, &tol()).unwrap();
            prop_assert!((rebuilt - direct).norm() < 10.0 * tol().eps(), "{}", g.label());
            let (lhs, rhs) = inverse_combine(g, x, y, w1, w2, &tol()).unwrap();
            prop_assert!((lhs - rhs).norm() < 10.0 * tol().eps());
        }
    }

    #[test]
    fn duplication_holds(x in point(), y in point(), w in tau()) {
        for kind in ProductKind::ALL {
            let (lhs, rhs) = duplication(kind, x, y, w, &tol()).unwrap();
            prop_assert!((lhs - rhs).norm() < 10.0 * tol().eps(), "{}", kind.label());
        }
    }

    #[test]
    fn parity_sign_under_unit_shift(z1 in point(), z2 in point(), w1 in tau(), w2 in tau()) {
        let m = SymmetricTau::from_w(w1, w2).matrix();
        let h = rat(1, 2);
        let z = rat(0, 1);
        let at = |ch, a| theta_char_g2(ch, [a, z2], &m, &tol()).unwrap();
        let hh = CharQuad::top(h, h);
        let zz = CharQuad::top(z, z);
        prop_assert!((at(hh, z1 + 1.0) + at(hh, z1)).norm() < 4.0 * tol().eps());
        prop_assert!((at(zz, z1 + 1.0) - at(zz, z1)).norm() < 4.0 * tol().eps());
    }

    #[test]
    fn diagonal_degeneration(q in 0.05f64..0.6) {
        // r² = q, all-zero characteristic: the one-parameter a(q) and the
        // half-sum of θ₃θ₃ + θ₄θ₄ at w₁, w₂
        let r = q.sqrt();
        let zero = [rat(0, 1); 2];
        let (lhs, rhs) = general_char_split(zero, zero, c(q, 0.0), c(r, 0.0), &tol()).unwrap();
        let st = SymmetricTau::from_nomes(c(q, 0.0), c(r, 0.0)).unwrap();
        let o = c(0.0, 0.0);
        let t = |j, w| theta_j(j, o, w, &tol()).unwrap();
        let half = (t(3, st.w1()) * t(3, st.w2()) + t(4, st.w1()) * t(4, st.w2())) * 0.5;
        let a = abc_series_auto(Abc::A, c(q, 0.0), None, &Tolerance::new(1e-15).unwrap()).unwrap();
        prop_assert!((lhs - half).norm() < 10.0 * tol().eps());
        prop_assert!((rhs - half).norm() < 10.0 * tol().eps());
        prop_assert!((a - half).norm() < 10.0 * tol().eps());
    }
}

#[test]
fn s_duplication() {
    for s in [0.1, 0.3, 0.5] {
        let w = TauPoint::from_nome(c(s, 0.0)).unwrap();
        let w4 = w.scaled(4.0);
        let o = c(0.0, 0.0);
        let t = |j, w| theta_j(j, o, w, &tol()).unwrap();
        assert!((t(3, w) - (t(3, w4) + t(2, w4))).norm() < tol().eps(), "s={s}");
        assert!((t(4, w) - (t(3, w4) - t(2, w4))).norm() < tol().eps(), "s={s}");
    }
}
