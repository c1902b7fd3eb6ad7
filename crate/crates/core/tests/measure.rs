mod common;

use std::f64::consts::{LN_2, PI};

use approx::assert_abs_diff_eq;
use common::{expr, interval, iv, oracle_lp, oracle_pairing};
use proptest::prelude::*;
use sepcov::measure::{
    check_functional_equality, integral, lp_norm, pairing, Equality, Exponent, FunctionExpr, Method, Region, SupportSet,
};

#[test]
fn pairing_examples() {
    let s = FunctionExpr::sin(1.0);
    let c = FunctionExpr::cos(1.0);
    let v = pairing(&s, &s, &iv(0.0, PI)).unwrap();
    assert_abs_diff_eq!(v.value, PI / 2.0, epsilon = 1e-14);
    assert_eq!(v.method, Method::ClosedForm);
    assert_eq!(v.abs_err, 0.0);
    assert_abs_diff_eq!(oracle_pairing(&s, &s, &iv(0.0, PI)), PI / 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(pairing(&s, &c, &iv(0.0, 2.0 * PI)).unwrap().value, 0.0, epsilon = 1e-15);
    let inv = FunctionExpr::power(-1);
    assert_abs_diff_eq!(
        pairing(&inv, &FunctionExpr::constant(1.0), &iv(1.0, 2.0)).unwrap().value,
        LN_2,
        epsilon = 1e-15
    );
}

#[test]
fn pairing_on_half_line() {
    let inv2 = FunctionExpr::power(-2);
    let v = pairing(&inv2, &FunctionExpr::constant(3.0), &SupportSet::half_line(2.0).unwrap()).unwrap();
    assert_abs_diff_eq!(v.value, 1.5, epsilon = 1e-15);
    let bad = pairing(&FunctionExpr::power(-1), &FunctionExpr::constant(1.0), &SupportSet::half_line(1.0).unwrap());
    assert!(matches!(bad, Err(sepcov::Error::NonIntegrable(_))));
    let trig = pairing(&inv2, &FunctionExpr::sin(1.0), &SupportSet::half_line(1.0).unwrap());
    assert!(matches!(trig, Err(sepcov::Error::NonIntegrable(_))));
}

#[test]
fn mixed_atoms_fall_back_to_quadrature() {
    let u = &FunctionExpr::power(1) * &FunctionExpr::sin(2.0);
    let v = FunctionExpr::power(-1);
    let set = iv(0.5, 2.5);
    let q = pairing(&u, &v, &set).unwrap();
    // t sin(2t) / t = sin(2t) reduces to a closed form, so force a genuine
    // mixture instead.
    let w = &FunctionExpr::power(2) + &FunctionExpr::constant(1.0);
    let r = pairing(&FunctionExpr::sin(2.0), &w.product(&FunctionExpr::power(-1)), &set).unwrap();
    assert_abs_diff_eq!(q.value, oracle_pairing(&u, &v, &set), epsilon = 1e-11);
    assert_abs_diff_eq!(
        r.value,
        oracle_pairing(&FunctionExpr::sin(2.0), &w.product(&FunctionExpr::power(-1)), &set),
        epsilon = 1e-11
    );
    assert!(r.abs_err <= 1e-12);
}

#[test]
fn lp_norm_examples() {
    let one = FunctionExpr::constant(1.0);
    assert_abs_diff_eq!(lp_norm(&one, &iv(0.0, 3.0), Exponent::TWO).unwrap(), 3f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(
        lp_norm(&FunctionExpr::sin(1.0), &iv(0.0, PI), Exponent::INFINITY).unwrap(),
        1.0,
        epsilon = 1e-12
    );
    let half = SupportSet::half_line(1.0).unwrap();
    assert_abs_diff_eq!(lp_norm(&FunctionExpr::power(-1), &half, Exponent::TWO).unwrap(), 1.0, epsilon = 1e-14);
    // Truncated oracle: ∫_1^T t^{-2} = 1 − 1/T.
    let trunc = oracle_lp(&FunctionExpr::power(-1), &iv(1.0, 10.0), 2.0);
    assert_abs_diff_eq!(trunc * trunc, 0.9, epsilon = 1e-12);
    let lib = lp_norm(&FunctionExpr::power(-1), &iv(1.0, 10.0), Exponent::TWO).unwrap();
    assert_abs_diff_eq!(lib, trunc, epsilon = 1e-12);
    assert!(lp_norm(&FunctionExpr::power(-1), &half, Exponent::ONE).is_err());
}

#[test]
fn lp_norms_match_oracle_for_odd_exponents() {
    let u = &FunctionExpr::sin(3.0) - &FunctionExpr::power(1).scaled(0.4);
    let set = iv(0.2, 2.9);
    for p in [1.0, 1.5, 3.0, 4.0] {
        let got = lp_norm(&u, &set, Exponent::new(p).unwrap()).unwrap();
        assert_abs_diff_eq!(got, oracle_lp(&u, &set, p), epsilon = 1e-9);
    }
}

#[test]
fn integral_of_constant() {
    assert_abs_diff_eq!(integral(&FunctionExpr::constant(2.0), &iv(1.0, 4.0)).unwrap().value, 6.0, epsilon = 1e-15);
}

#[test]
fn functional_equality_examples() {
    let s = FunctionExpr::sin(1.0);
    assert!(check_functional_equality(&s, &s, &iv(0.0, PI), &iv(0.0, PI)).unwrap().holds());
    match check_functional_equality(&s, &s, &iv(0.0, 2.0 * PI), &iv(0.0, PI)).unwrap() {
        Equality::Unequal { region, witness, residual, .. } => {
            assert_eq!(region, Region::FirstOnly);
            assert_eq!(witness, iv(PI, 2.0 * PI));
            assert_abs_diff_eq!(residual, (PI / 2.0).sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(residual, oracle_lp(&s, &iv(PI, 2.0 * PI), 2.0), epsilon = 1e-10);
        }
        other => panic!("expected unequal, got {other:?}"),
    }
    let t = FunctionExpr::power(1);
    let zero = &t - &t;
    assert!(check_functional_equality(&FunctionExpr::zero(), &zero, &iv(0.0, 1.0), &iv(2.0, 3.0)).unwrap().holds());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_symmetric(u in expr(true), v in expr(true), set in interval()) {
        let a = pairing(&u, &v, &set).unwrap().value;
        let b = pairing(&v, &u, &set).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pairing_is_bilinear(u in expr(true), w in expr(true), v in expr(true), set in interval(), c in -3.0..3.0f64) {
        let lhs = pairing(&FunctionExpr::linear_combination([(c, &u), (1.0, &w)]), &v, &set).unwrap().value;
        let rhs = c * pairing(&u, &v, &set).unwrap().value + pairing(&w, &v, &set).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn hoelder_inequality(u in expr(true), v in expr(true), set in interval(), pi in 0usize..4) {
        let p = [Exponent::ONE, Exponent::TWO, Exponent::new(3.0).unwrap(), Exponent::INFINITY][pi];
        let lhs = pairing(&u, &v, &set).unwrap().value.abs();
        let rhs = lp_norm(&u, &set, p).unwrap() * lp_norm(&v, &set, p.conjugate()).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12, "{} > {}", lhs, rhs);
    }

    #[test]
    fn pairing_matches_simpson_oracle(u in expr(false), v in expr(false), set in interval()) {
        let got = pairing(&u, &v, &set).unwrap().value;
        let want = oracle_pairing(&u, &v, &set);
        prop_assert!((got - want).abs() <= 1e-10, "{} vs {}", got, want);
    }

    #[test]
    fn windowed_pairing_matches_oracle(u in expr(false), v in expr(false), set in interval(), w in interval()) {
        let uw = u.windowed(&w);
        let got = pairing(&uw, &v, &set).unwrap().value;
        let want = oracle_pairing(&uw, &v, &set);
        prop_assert!((got - want).abs() <= 1e-10, "{} vs {}", got, want);
    }

    #[test]
    fn lp_norm_is_homogeneous(u in expr(true), set in interval(), c in -4.0..4.0f64, pi in 0usize..3) {
        let p = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY][pi];
        let a = lp_norm(&u.scaled(c), &set, p).unwrap();
        let b = c.abs() * lp_norm(&u, &set, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
    }
}
