mod common;

use std::f64::consts::{LN_2, PI};

use approx::assert_abs_diff_eq;
use common::{iv, rng};
use proptest::prelude::*;
use sepcov::families::{self, FamilyId, FamilyParams, LaurentFamilyParams, TrigFamilyParams};
use sepcov::measure::Exponent;
use sepcov::normest::{empirical_norm, hoelder_bound, norm_report, schur_bound, BoundMethod};
use sepcov::random::random_operator;
use sepcov::{FunctionExpr, SeparableOperator};

fn projector() -> SeparableOperator {
    let unit = iv(0.0, 1.0);
    SeparableOperator::rank_one(
        FunctionExpr::constant(1.0).windowed(&unit),
        FunctionExpr::constant(1.0),
        unit,
        Exponent::TWO,
    )
    .unwrap()
}

#[test]
fn hoelder_bound_of_t4_sequence_member() {
    let p = TrigFamilyParams::default();
    let fam = families::family_t4(&p, Exponent::TWO).unwrap();
    let tpl = fam.a_n.unwrap();
    for (theta, exp) in
        [(0.25, Exponent::TWO), (-3.0, Exponent::new(3.0).unwrap()), (0.5, Exponent::ONE), (2.0, Exponent::INFINITY)]
    {
        let an = tpl.instantiate(theta).unwrap().with_exponent(exp);
        let b = hoelder_bound(&an, exp).unwrap().upper;
        let crude = theta.abs() * families::lambda_tilde(&p, exp);
        assert!(b <= crude * (1.0 + 1e-12), "{b} > {crude}");
        if exp == Exponent::TWO {
            // ‖sin‖₂ ‖cos‖₂ = π/2 on [0, π].
            assert_abs_diff_eq!(b, theta.abs() * PI / 2.0, epsilon = 1e-14);
        }
        if exp == Exponent::ONE {
            // ‖sin‖₁ ‖cos‖_∞ = 2.
            assert_abs_diff_eq!(b, theta.abs() * 2.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn zero_operator_bounds() {
    let z = SeparableOperator::zero(iv(0.0, 1.0), Exponent::TWO);
    assert_eq!(hoelder_bound(&z, Exponent::TWO).unwrap().upper, 0.0);
    assert_eq!(schur_bound(&z, Exponent::TWO).unwrap().upper, 0.0);
    assert_eq!(empirical_norm(&z, Exponent::TWO, 10, 0).unwrap(), 0.0);
}

#[test]
fn laurent_hoelder_bound() {
    for (gamma, alpha, p) in [(1.0, 1.0, 2.0), (-0.3, 0.25, 2.0), (2.0, 0.5, 4.0)] {
        let params = LaurentFamilyParams { gamma_a2: gamma, gamma_b2: 1.0, alpha, p: Exponent::new(p).unwrap() };
        let fam = families::family_laurent(&params).unwrap();
        let h = hoelder_bound(&fam.a, params.p).unwrap().upper;
        let crude = gamma.abs() * alpha.powf((1.0 - p) / p) / (p - 1.0).powf(1.0 / p) * (1.0 + 2.0 * LN_2);
        assert!(h <= crude * (1.0 + 1e-12), "{h} > {crude}");
        // The left factor norm is exact: ‖1/t‖_{L_p[α,∞)} = α^{(1−p)/p}/(p−1)^{1/p}.
        let right = sepcov::measure::lp_norm(&fam.a.terms()[0].right, fam.a.support(), params.p.conjugate()).unwrap();
        assert_abs_diff_eq!(h, alpha.powf((1.0 - p) / p) / (p - 1.0).powf(1.0 / p) * right, epsilon = 1e-12);
    }
}

#[test]
fn schur_bound_examples() {
    let pr = projector();
    assert_abs_diff_eq!(schur_bound(&pr, Exponent::TWO).unwrap().upper, 1.0, epsilon = 1e-12);
    let mut r = rng(8);
    for id in FamilyId::TRIG {
        let p = loop {
            let p = sepcov::random::random_trig_params(&mut r);
            if families::trig_thetas(id, &p).is_ok() {
                break p;
            }
        };
        let (ta, _) = families::trig_thetas(id, &p).unwrap();
        let fam = families::build(id, &FamilyParams::Trig(p), Exponent::TWO).unwrap();
        let s = schur_bound(&fam.a, Exponent::TWO).unwrap().upper;
        let sum: f64 = ta.iter().map(|x| x.abs()).sum();
        let cap = (p.beta1 - p.alpha1).max(p.beta - p.alpha) * sum;
        assert!(s <= cap * (1.0 + 1e-9), "{id}: {s} > {cap}");
    }
}

#[test]
fn empirical_examples() {
    let pr = projector();
    let e = empirical_norm(&pr, Exponent::TWO, 50, 3).unwrap();
    assert!((0.98..=1.0 + 1e-12).contains(&e));
    let rep = norm_report(&pr, Exponent::TWO, 50, 3).unwrap();
    assert!(rep.empirical_lower.unwrap() <= rep.upper + 1e-9);
    assert!(matches!(rep.method, BoundMethod::Hoelder | BoundMethod::Schur));
    assert_eq!(empirical_norm(&pr, Exponent::TWO, 50, 3).unwrap(), e);
}

#[test]
fn rank_one_hoelder_bound_is_tight_at_two() {
    let g = iv(0.5, 2.0);
    let mut r = rng(12);
    for _ in 0..5 {
        let a = random_operator(&mut r, 1, &g, &g, Exponent::TWO);
        let h = hoelder_bound(&a, Exponent::TWO).unwrap().upper;
        let e = empirical_norm(&a, Exponent::TWO, 200, 4).unwrap();
        assert!(e <= h * (1.0 + 1e-9) && e >= 0.98 * h, "{e} vs {h}");
    }
}

#[test]
fn laurent_schur_bound_is_unavailable() {
    let fam = families::family_laurent(&LaurentFamilyParams::default()).unwrap();
    assert!(schur_bound(&fam.a, Exponent::TWO).is_err());
    assert!(norm_report(&fam.a, Exponent::TWO, 20, 0).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hoelder_is_homogeneous(seed in any::<u64>(), c in -5.0..5.0f64, pi in 0usize..3) {
        let p = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY][pi];
        let g = iv(0.4, 2.2);
        let a = random_operator(&mut rng(seed), 3, &g, &g, p);
        let lhs = hoelder_bound(&a.scaled(c), p).unwrap().upper;
        let rhs = c.abs() * hoelder_bound(&a.merged(), p).unwrap().upper;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn empirical_is_dominated(seed in any::<u64>(), pi in 0usize..3) {
        let p = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY][pi];
        let g = iv(0.4, 2.2);
        let a = random_operator(&mut rng(seed), 3, &g, &g, p);
        let e = empirical_norm(&a, p, 20, seed).unwrap();
        let h = hoelder_bound(&a, p).unwrap().upper;
        let s = schur_bound(&a, p).unwrap().upper;
        prop_assert!(e <= h.min(s) + 1e-9, "{} vs {} / {}", e, h, s);
    }
}
