mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use common::{iv, rng};
use proptest::prelude::*;
use sepcov::families::{family_laurent, family_t4, LaurentFamilyParams, TrigFamilyParams};
use sepcov::measure::{pairing_windowed, Exponent};
use sepcov::random::{random_expr, random_operator};
use sepcov::{Error, FunctionExpr, KernelTerm, PolynomialSpec, SeparableOperator, SupportSet};

fn unit_projector() -> SeparableOperator {
    let unit = iv(0.0, 1.0);
    SeparableOperator::rank_one(
        FunctionExpr::constant(1.0).windowed(&unit),
        FunctionExpr::constant(1.0),
        unit,
        Exponent::TWO,
    )
    .unwrap()
}

fn random_op(seed: u64, rank: usize) -> SeparableOperator {
    let mut r = rng(seed);
    let g = iv(0.3, 2.3);
    random_operator(&mut r, rank, &g, &g, Exponent::TWO)
}

fn assert_same(a: &SeparableOperator, b: &SeparableOperator, rtol: f64) {
    let d = a.distance(b).unwrap();
    assert!(d.scalar_diff <= 1e-12, "scalar {}", d.scalar_diff);
    assert!(d.residual <= rtol * d.scale.max(1e-300), "residual {} scale {}", d.residual, d.scale);
}

#[test]
fn apply_examples() {
    let w = iv(0.0, PI);
    let a = SeparableOperator::rank_one(
        FunctionExpr::sin(1.0).windowed(&w),
        FunctionExpr::cos(1.0),
        w.clone(),
        Exponent::TWO,
    )
    .unwrap();
    let y = a.apply(&FunctionExpr::cos(1.0)).unwrap();
    for t in [0.1, 1.0, 2.0, 3.0] {
        assert_abs_diff_eq!(y.eval(t), PI / 2.0 * t.sin(), epsilon = 1e-14);
    }
    assert_eq!(y.eval(4.0), 0.0);
    assert!(a.apply(&FunctionExpr::zero()).unwrap().is_zero());
    let t4 = family_t4(&TrigFamilyParams::default(), Exponent::TWO).unwrap();
    let z = t4.a.apply(&FunctionExpr::sin(1.0)).unwrap();
    assert!(z.max_abs_coef() < 1e-15);
}

#[test]
fn compose_examples() {
    let unit = iv(0.0, 1.0);
    let a = SeparableOperator::rank_one(
        FunctionExpr::constant(1.0).windowed(&unit),
        FunctionExpr::cos(PI),
        unit.clone(),
        Exponent::TWO,
    )
    .unwrap();
    let b = SeparableOperator::rank_one(
        FunctionExpr::constant(1.0).windowed(&unit),
        FunctionExpr::constant(1.0),
        unit.clone(),
        Exponent::TWO,
    )
    .unwrap();
    // ∫_0^1 cos(πs) ds = 0.
    assert!(a.compose(&b).unwrap().kernel_norm().unwrap() < 1e-15);
    let p = unit_projector();
    assert_same(&p.compose(&p).unwrap(), &p, 1e-15);

    let params = TrigFamilyParams::default();
    let t4 = family_t4(&params, Exponent::TWO).unwrap();
    assert!(t4.a.compose(&t4.b).unwrap().kernel_norm().unwrap() < 1e-15);
    // σ₁ θ_A1 θ_B3 = π/2 with the default parameters.
    let ba = t4.b.compose(&t4.a).unwrap();
    let expect = SeparableOperator::rank_one(
        FunctionExpr::sin(1.0).windowed(&iv(0.0, PI)),
        FunctionExpr::cos(1.0).scaled(PI / 2.0),
        iv(0.0, PI),
        Exponent::TWO,
    )
    .unwrap();
    assert_same(&ba, &expect, 1e-14);
}

#[test]
fn power_examples() {
    let a = random_op(3, 3);
    assert_same(&a.power(1).unwrap(), &a, 0.0);
    let q: f64 = 0.7;
    let unit = iv(0.0, 1.0);
    // a = 1, c = 1.4 t, Q(a, c) = 0.7.
    let r1 = SeparableOperator::rank_one(
        FunctionExpr::constant(1.0).windowed(&unit),
        FunctionExpr::power(1).scaled(1.4),
        unit,
        Exponent::TWO,
    )
    .unwrap();
    for m in 1..=6 {
        assert_same(&r1.power(m).unwrap(), &r1.scaled(q.powi(m as i32 - 1)), 1e-14);
    }
    let mut rep = a.clone();
    for _ in 1..4 {
        rep = rep.compose(&a).unwrap();
    }
    assert_same(&a.power(4).unwrap(), &rep, 1e-9);
    let shifted = SeparableOperator::new(1.0, a.terms().to_vec(), a.support().clone(), a.p()).unwrap();
    assert!(matches!(shifted.power(2), Err(Error::ScalarPart(_))));
}

#[test]
fn polynomial_examples() {
    let a = random_op(5, 3);
    assert_same(&a.polynomial(&PolynomialSpec::identity()).unwrap(), &a, 0.0);
    let unit = iv(0.0, 1.0);
    let r1 = SeparableOperator::rank_one(
        FunctionExpr::constant(1.0).windowed(&unit),
        FunctionExpr::power(1).scaled(1.4),
        unit,
        Exponent::TWO,
    )
    .unwrap();
    assert_same(&r1.polynomial(&PolynomialSpec::new(vec![0.0, 0.0, 1.0])).unwrap(), &r1.scaled(0.7), 1e-14);
    let f = PolynomialSpec::new(vec![2.0, -1.0, 0.5]);
    let fa = a.polynomial(&f).unwrap();
    assert_eq!(fa.scalar(), 2.0);
    let direct = SeparableOperator::linear_combination(&[(-1.0, &a), (0.5, &a.compose(&a).unwrap())]).unwrap();
    assert_same(
        &SeparableOperator::new(0.0, fa.terms().to_vec(), fa.support().clone(), fa.p()).unwrap(),
        &direct,
        1e-10,
    );
}

#[test]
fn polynomial_with_scalar_part_uses_compositions() {
    let a = random_op(8, 2);
    let shifted = SeparableOperator::new(0.5, a.terms().to_vec(), a.support().clone(), a.p()).unwrap();
    let f = PolynomialSpec::new(vec![1.0, 2.0, 3.0]);
    let got = shifted.polynomial(&f).unwrap();
    let sq = shifted.compose(&shifted).unwrap();
    let want = SeparableOperator::linear_combination(&[(2.0, &shifted), (3.0, &sq)]).unwrap();
    assert_abs_diff_eq!(got.scalar(), 1.0 + want.scalar(), epsilon = 1e-14);
    assert!(got.kernel_difference(&want).kernel_norm().unwrap() <= 1e-10 * want.kernel_norm().unwrap());
}

#[test]
fn commutator_examples() {
    let a = random_op(11, 3);
    assert!(a.commutator(&a).unwrap().kernel_norm().unwrap() <= 1e-12 * a.kernel_norm().unwrap().powi(2));
    let params =
        TrigFamilyParams { theta_a: [0.8, 0.0, 0.0, 0.0], theta_b: [0.3, 0.0, -1.7, 0.0], ..Default::default() };
    let t4 = family_t4(&params, Exponent::TWO).unwrap();
    let c = t4.a.commutator(&t4.b).unwrap();
    assert_same(&c, &t4.b.compose(&t4.a).unwrap().scaled(-1.0), 1e-15);
    let l =
        family_laurent(&LaurentFamilyParams { gamma_a2: 1.5, gamma_b2: -0.5, alpha: 0.5, p: Exponent::TWO }).unwrap();
    let lc = l.a.commutator(&l.b).unwrap();
    let ln2 = std::f64::consts::LN_2;
    for (t, s) in [(0.7, 1.2), (3.0, 1.9), (10.0, 1.5)] {
        let want = -1.5 * -0.5 * ln2 * (1.0 / t) * (1.0 - 2.0 * ln2 / s);
        assert_abs_diff_eq!(lc.kernel_at(t, s), want, epsilon = 1e-14);
    }
    assert_eq!(lc.kernel_at(0.4, 1.5), 0.0);
    let other = SeparableOperator::zero(iv(0.0, 1.0), Exponent::TWO);
    assert!(matches!(a.commutator(&other), Err(Error::SupportMismatch)));
}

#[test]
fn adjoint_examples() {
    let w = iv(0.0, 2.0);
    let g = iv(1.0, 3.0);
    let a = SeparableOperator::rank_one(
        FunctionExpr::sin(1.0).windowed(&w),
        FunctionExpr::power(1),
        g.clone(),
        Exponent::new(3.0).unwrap(),
    )
    .unwrap();
    let s = a.adjoint();
    assert_eq!(s.support(), &w);
    assert_abs_diff_eq!(s.p().value(), 1.5, epsilon = 1e-15);
    for (t, u) in [(1.5, 0.5), (2.5, 1.0), (1.2, 1.9)] {
        assert_abs_diff_eq!(s.kernel_at(t, u), a.kernel_at(u, t), epsilon = 1e-15);
    }
    let back = s.adjoint();
    assert_eq!(back.support(), &g);
    assert_same(&back, &a, 0.0);
}

#[test]
fn adjoint_duality_on_probes() {
    for seed in 0..10 {
        let a = random_op(100 + seed, 4);
        let star = a.adjoint();
        let mut r = rng(seed);
        for _ in 0..5 {
            let x = random_expr(&mut r, 3, true).windowed(a.support());
            let y = random_expr(&mut r, 3, true).windowed(star.support());
            let lhs = pairing_windowed(&a.apply(&x).unwrap(), &y).unwrap().value;
            let rhs = pairing_windowed(&x, &star.apply(&y).unwrap()).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn construction_errors() {
    let g = iv(0.0, 1.0);
    let bad =
        SeparableOperator::rank_one(FunctionExpr::constant(1.0), FunctionExpr::constant(1.0), g.clone(), Exponent::TWO);
    assert!(matches!(bad, Err(Error::UnwindowedLeftFactor)));
    let half = SupportSet::half_line(1.0).unwrap();
    let heavy = SeparableOperator::kernel(
        vec![KernelTerm::new(FunctionExpr::constant(1.0).windowed(&half), FunctionExpr::constant(1.0))],
        g,
        Exponent::TWO,
    );
    assert!(heavy.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_matches_repeated_composition(seed in any::<u64>(), rank in 1usize..=4, m in 1u32..=5) {
        let a = random_op(seed, rank);
        let mut rep = a.clone();
        for _ in 1..m {
            rep = a.compose(&rep).unwrap();
        }
        let d = a.power(m).unwrap().distance(&rep).unwrap();
        prop_assert!(d.residual <= 1e-9 * d.scale.max(1e-300), "{:?}", d);
    }

    #[test]
    fn compose_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (random_op(s1, 3), random_op(s2, 3), random_op(s3, 3));
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        let d = left.distance(&right).unwrap();
        prop_assert!(d.residual <= 1e-9 * d.scale.max(1e-300));
    }

    #[test]
    fn polynomial_is_additive(seed in any::<u64>(), f in prop::collection::vec(-2.0..2.0f64, 1..4), g in prop::collection::vec(-2.0..2.0f64, 1..4)) {
        let a = random_op(seed, 3);
        let n = f.len().max(g.len());
        let sum: Vec<f64> = (0..n).map(|i| f.get(i).unwrap_or(&0.0) + g.get(i).unwrap_or(&0.0)).collect();
        let lhs = a.polynomial(&PolynomialSpec::new(sum)).unwrap();
        let rhs = a.polynomial(&PolynomialSpec::new(f)).unwrap().add(&a.polynomial(&PolynomialSpec::new(g)).unwrap());
        let d = lhs.distance(&rhs).unwrap();
        prop_assert!(d.scalar_diff <= 1e-12);
        prop_assert!(d.residual <= 1e-12 * d.scale.max(1.0));
    }

    #[test]
    fn commutator_is_antisymmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_op(s1, 3), random_op(s2, 3));
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert_eq!(ab.merged(), ba.scaled(-1.0).merged());
    }

    #[test]
    fn adjoint_reverses_products(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_op(s1, 3), random_op(s2, 3));
        let lhs = a.compose(&b).unwrap().adjoint();
        let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
        let d = lhs.distance(&rhs).unwrap();
        prop_assert!(d.residual <= 1e-10 * d.scale.max(1e-300), "{:?}", d);
    }
}
