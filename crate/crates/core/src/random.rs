//! Seeded generators for random expressions, operators, polynomials and
//! family parameters. Used by the test suites and by property checks.

use rand::Rng;

use crate::commrel::RelationSpec;
use crate::families::{LaurentFamilyParams, TrigFamilyParams};
use crate::measure::{Exponent, FunctionExpr, SupportSet, Trig};
use crate::sepop::{KernelTerm, PolynomialSpec, SeparableOperator};

/// A random combination of `n` atoms from `1, t, t², sin(kt), cos(kt)`
/// (`k = 1, 2, 3`), plus `1/t`, `1/t²` when `origin_free`.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, n: usize, origin_free: bool) -> FunctionExpr {
    let mut parts = Vec::with_capacity(n);
    for _ in 0..n {
        let c = rng.gen_range(-1.0..=1.0);
        let pick = rng.gen_range(0..if origin_free { 11 } else { 9 });
        let (k, trig) = match pick {
            0 => (0, Trig::One),
            1 => (1, Trig::One),
            2 => (2, Trig::One),
            3..=5 => (0, Trig::Sin((pick - 2) as f64)),
            6..=8 => (0, Trig::Cos((pick - 5) as f64)),
            9 => (-1, Trig::One),
            _ => (-2, Trig::One),
        };
        parts.push(FunctionExpr::atom(c, k, trig));
    }
    FunctionExpr::linear_combination(parts.iter().map(|e| (1.0, e)))
}

/// `[lo, lo + len]` with `lo ∈ [0.2, 1.5]`, `len ∈ [0.5, 2]`.
pub fn random_interval<R: Rng + ?Sized>(rng: &mut R) -> SupportSet {
    let lo = rng.gen_range(0.2..1.5);
    let len = rng.gen_range(0.5..2.0);
    SupportSet::interval(lo, lo + len).expect("valid interval")
}

/// Random kernel operator of rank `1..=max_rank` on `support`, with left
/// factors windowed by `window`.
pub fn random_operator<R: Rng + ?Sized>(
    rng: &mut R,
    max_rank: usize,
    support: &SupportSet,
    window: &SupportSet,
    p: Exponent,
) -> SeparableOperator {
    let rank = rng.gen_range(1..=max_rank);
    let origin_free = support.hull().is_some_and(|(lo, _)| lo > 0.0) && window.hull().is_some_and(|(lo, _)| lo > 0.0);
    let terms = (0..rank)
        .map(|_| {
            let nl = rng.gen_range(1..=3);
            let nr = rng.gen_range(1..=3);
            KernelTerm::new(random_expr(rng, nl, origin_free).windowed(window), random_expr(rng, nr, origin_free))
        })
        .collect();
    SeparableOperator::kernel(terms, support.clone(), p).expect("random factors are bounded on bounded sets")
}

/// Polynomial of degree `0..=max_degree` with coefficients in `[−1, 1]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, max_degree: usize) -> PolynomialSpec {
    let d = rng.gen_range(0..=max_degree);
    let mut c: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    if c[d] == 0.0 {
        c[d] = 0.5;
    }
    PolynomialSpec::new(c)
}

/// Admissible trigonometric family parameters: either `ω(β₁ − α₁)/π` or
/// `ω(β₁ + α₁)/π` is a small integer.
pub fn random_trig_params<R: Rng + ?Sized>(rng: &mut R) -> TrigFamilyParams {
    let pi = std::f64::consts::PI;
    let omega = rng.gen_range(0.5..3.0);
    let (alpha1, beta1) = if rng.gen_bool(0.5) {
        let alpha1 = rng.gen_range(-1.0..1.0);
        let k = rng.gen_range(1..=3) as f64;
        (alpha1, alpha1 + k * pi / omega)
    } else {
        // α₁ + β₁ = mπ/ω with length at least 1/2.
        let m = rng.gen_range(1..=4) as f64;
        let mid = 0.5 * m * pi / omega;
        let half = rng.gen_range(0.25..1.5);
        (mid - half, mid + half)
    };
    let theta = |rng: &mut R| {
        let mut v = [0.0; 4];
        for x in &mut v {
            let mag = rng.gen_range(0.2..2.0);
            *x = if rng.gen_bool(0.5) { mag } else { -mag };
        }
        v
    };
    let theta_a = theta(rng);
    let theta_b = theta(rng);
    let dmag = rng.gen_range(0.5..2.0);
    TrigFamilyParams {
        theta_a,
        theta_b,
        omega,
        delta: if rng.gen_bool(0.5) { dmag } else { -dmag },
        alpha: alpha1 - rng.gen_range(0.0..1.0),
        beta: beta1 + rng.gen_range(0.0..1.0),
        alpha1,
        beta1,
    }
}

pub fn random_laurent_params<R: Rng + ?Sized>(rng: &mut R, p: Exponent) -> LaurentFamilyParams {
    LaurentFamilyParams {
        gamma_a2: rng.gen_range(-2.0..2.0),
        gamma_b2: rng.gen_range(-2.0..2.0),
        alpha: rng.gen_range(0.05..=1.0),
        p,
    }
}

/// How a random relation was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    /// Independent random data; the relation almost surely fails.
    Generic,
    /// `B = P(A)` without constant, `H = F`; holds.
    FunctionOfA,
    /// `B = P(A) + C` with `C` living off `G_A`, `H = F`; holds on a
    /// support strictly larger than `G_A`.
    Extended,
    /// `A`, `B` with disjoint factor supports; holds iff `h₀ = f₀`.
    Disjoint,
    /// A holding construction with a small kernel perturbation of `B`.
    Perturbed,
}

/// Random relation spec together with the construction used.
pub fn random_relation<R: Rng + ?Sized>(rng: &mut R, max_degree: usize) -> (RelationKind, RelationSpec) {
    let p = Exponent::TWO;
    let kind = match rng.gen_range(0..5) {
        0 => RelationKind::Generic,
        1 => RelationKind::FunctionOfA,
        2 => RelationKind::Extended,
        3 => RelationKind::Disjoint,
        _ => RelationKind::Perturbed,
    };
    let ga = SupportSet::interval(0.5, 2.0).expect("valid");
    let wa = SupportSet::interval(0.4, 2.0).expect("valid");
    let a = random_operator(rng, 3, &ga, &wa, p);
    let h = random_polynomial(rng, max_degree);
    let function_of_a = |rng: &mut R| -> SeparableOperator {
        let mut c = random_polynomial(rng, max_degree).coeffs().to_vec();
        c.resize(max_degree.max(1) + 1, 0.0);
        c[0] = 0.0;
        c[1] = if c[1] == 0.0 { 1.0 } else { c[1] };
        a.polynomial(&PolynomialSpec::new(c)).expect("polynomial of a valid operator")
    };
    let spec = match kind {
        RelationKind::Generic => {
            let gb = random_interval(rng);
            let b = random_operator(rng, 3, &gb, &wa, p);
            RelationSpec { h, f: random_polynomial(rng, max_degree), a, b }
        }
        RelationKind::FunctionOfA => {
            let b = function_of_a(rng);
            RelationSpec { h: h.clone(), f: h, a, b }
        }
        RelationKind::Extended => {
            let far = SupportSet::interval(5.0, 6.0).expect("valid");
            let gc = SupportSet::interval(2.0, 3.0).expect("valid");
            let c = random_operator(rng, 2, &gc, &far, p);
            let b = function_of_a(rng).add(&c);
            RelationSpec { h: h.clone(), f: h, a, b }
        }
        RelationKind::Disjoint => {
            let far = SupportSet::interval(5.0, 6.0).expect("valid");
            let gb = SupportSet::interval(2.5, 3.5).expect("valid");
            let b = random_operator(rng, 3, &gb, &far, p);
            let mut f = random_polynomial(rng, max_degree).coeffs().to_vec();
            if rng.gen_bool(0.5) {
                f[0] = h.coeff(0);
            }
            RelationSpec { h, f: PolynomialSpec::new(f), a, b }
        }
        RelationKind::Perturbed => {
            let b = function_of_a(rng);
            let eps = 10f64.powf(rng.gen_range(-4.0..-1.0));
            let bump = SeparableOperator::rank_one(
                FunctionExpr::power(1).windowed(&wa),
                FunctionExpr::cos(1.0).scaled(eps),
                ga.clone(),
                p,
            )
            .expect("valid");
            RelationSpec { h: h.clone(), f: h, a, b: b.add(&bump) }
        }
    };
    (kind, spec)
}
