//! Concrete operator pairs satisfying `AB = δ B A²`.
//!
//! The trigonometric families share one shape: the kernel is a combination
//! of `sin(ωt)cos(ωs)`, `cos(ωt)cos(ωs)`, `sin(ωt)sin(ωs)` and
//! `cos(ωt)sin(ωs)` with `t` windowed to `[α, β]` and `s` integrated over
//! `[α₁, β₁]`. They are identified as `T4` … `T10`; `laurent` is the pair
//! with kernels in `1/t` on a half line.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measure::{Exponent, FunctionExpr, SupportSet};
use crate::sepop::{KernelTerm, SeparableOperator};

/// Distance to the nearest integer accepted by the admissibility test.
pub const INTEGER_TOL: f64 = 1e-9;
/// `|σ_i| < SIGMA_GUARD·(β₁ − α₁)` counts as zero.
pub const SIGMA_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FamilyId {
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    Laurent,
}

impl FamilyId {
    pub const ALL: [FamilyId; 8] = [
        FamilyId::T4,
        FamilyId::T5,
        FamilyId::T6,
        FamilyId::T7,
        FamilyId::T8,
        FamilyId::T9,
        FamilyId::T10,
        FamilyId::Laurent,
    ];
    pub const TRIG: [FamilyId; 7] =
        [FamilyId::T4, FamilyId::T5, FamilyId::T6, FamilyId::T7, FamilyId::T8, FamilyId::T9, FamilyId::T10];

    pub fn is_trig(self) -> bool {
        self != FamilyId::Laurent
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::T4 => "T4",
            FamilyId::T5 => "T5",
            FamilyId::T6 => "T6",
            FamilyId::T7 => "T7",
            FamilyId::T8 => "T8",
            FamilyId::T9 => "T9",
            FamilyId::T10 => "T10",
            FamilyId::Laurent => "laurent",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

impl TryFrom<String> for FamilyId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FamilyId> for String {
    fn from(f: FamilyId) -> String {
        f.name().to_string()
    }
}

/// Parameters of the trigonometric families. Entries of `theta_a`/`theta_b`
/// that a family does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigFamilyParams {
    pub theta_a: [f64; 4],
    pub theta_b: [f64; 4],
    pub omega: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha1: f64,
    pub beta1: f64,
}

impl Default for TrigFamilyParams {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        TrigFamilyParams {
            theta_a: [1.0, 1.0, 1.0, 1.0],
            theta_b: [1.0, 1.0, 1.0, 1.0],
            omega: 1.0,
            delta: 1.0,
            alpha: 0.0,
            beta: pi,
            alpha1: 0.0,
            beta1: pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentFamilyParams {
    pub gamma_a2: f64,
    pub gamma_b2: f64,
    pub alpha: f64,
    pub p: Exponent,
}

impl Default for LaurentFamilyParams {
    fn default() -> Self {
        LaurentFamilyParams { gamma_a2: 1.0, gamma_b2: 1.0, alpha: 1.0, p: Exponent::TWO }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    Trig(TrigFamilyParams),
    Laurent(LaurentFamilyParams),
}

/// The parameter replaced by a sequence value in `A_n` or `B_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Slot {
    ThetaA(usize),
    ThetaB(usize),
    GammaA,
    GammaB,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::ThetaA(i) => write!(f, "theta_a{}", i + 1),
            Slot::ThetaB(i) => write!(f, "theta_b{}", i + 1),
            Slot::GammaA => write!(f, "gamma_a2"),
            Slot::GammaB => write!(f, "gamma_b2"),
        }
    }
}

impl FromStr for Slot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown parameter {s:?}"));
        let index = |d: &str| match d.parse::<usize>() {
            Ok(i @ 1..=4) => Ok(i - 1),
            _ => Err(bad()),
        };
        match s.trim() {
            "gamma_a2" => Ok(Slot::GammaA),
            "gamma_b2" => Ok(Slot::GammaB),
            t => {
                if let Some(d) = t.strip_prefix("theta_a") {
                    Ok(Slot::ThetaA(index(d)?))
                } else if let Some(d) = t.strip_prefix("theta_b") {
                    Ok(Slot::ThetaB(index(d)?))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl TryFrom<String> for Slot {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Slot> for String {
    fn from(s: Slot) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// `A_n` or `B_n` as a function of the sequence value.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub family: FamilyId,
    pub params: FamilyParams,
    pub p: Exponent,
    pub side: Side,
    pub slot: Slot,
}

impl Template {
    pub fn instantiate(&self, value: f64) -> Result<SeparableOperator> {
        let params = substitute(self.params, self.slot, value);
        let (a, b) = build_pair(self.family, &params, self.p)?;
        Ok(match self.side {
            Side::A => a,
            Side::B => b,
        })
    }
}

/// `params` with `slot` set to `v`.
pub fn substitute(params: FamilyParams, slot: Slot, v: f64) -> FamilyParams {
    match (params, slot) {
        (FamilyParams::Trig(mut t), Slot::ThetaA(i)) => {
            t.theta_a[i] = v;
            FamilyParams::Trig(t)
        }
        (FamilyParams::Trig(mut t), Slot::ThetaB(i)) => {
            t.theta_b[i] = v;
            FamilyParams::Trig(t)
        }
        (FamilyParams::Laurent(mut l), Slot::GammaA) => {
            l.gamma_a2 = v;
            FamilyParams::Laurent(l)
        }
        (FamilyParams::Laurent(mut l), Slot::GammaB) => {
            l.gamma_b2 = v;
            FamilyParams::Laurent(l)
        }
        (other, _) => other,
    }
}

/// A constructed pair with its sequence templates.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub id: FamilyId,
    pub a: SeparableOperator,
    pub b: SeparableOperator,
    pub a_n: Option<Template>,
    pub b_n: Option<Template>,
    /// `δ` in `AB = δ B A²`.
    pub delta: f64,
}

/// `(σ₁, σ₂) = (∫ sin²(ωs), ∫ cos²(ωs))` over `[α₁, β₁]`.
pub fn sigma(omega: f64, alpha1: f64, beta1: f64) -> (f64, f64) {
    let len = beta1 - alpha1;
    if omega == 0.0 {
        return (0.0, len);
    }
    let s1 = 0.5 * len - (omega * (alpha1 + beta1)).cos() * (omega * len).sin() / (2.0 * omega);
    (s1, len - s1)
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_TOL
}

/// Checks the conditions shared by every trigonometric family and returns
/// `(σ₁, σ₂)`.
pub fn check_trig_admissible(params: &TrigFamilyParams) -> Result<(f64, f64)> {
    let TrigFamilyParams { omega, alpha, beta, alpha1, beta1, .. } = *params;
    for (name, v) in [("omega", omega), ("alpha", alpha), ("beta", beta), ("alpha1", alpha1), ("beta1", beta1)] {
        if !v.is_finite() {
            return Err(Error::InadmissibleParams(format!("{name} must be finite")));
        }
    }
    if !(alpha1 < beta1) {
        return Err(Error::InadmissibleParams("need alpha1 < beta1".into()));
    }
    if !(alpha <= alpha1 && beta >= beta1) {
        return Err(Error::InadmissibleParams("need alpha <= alpha1 and beta >= beta1".into()));
    }
    let pi = std::f64::consts::PI;
    if !(near_integer(omega * (beta1 - alpha1) / pi) || near_integer(omega * (beta1 + alpha1) / pi)) {
        return Err(Error::InadmissibleParams(
            "omega(beta1 - alpha1)/pi or omega(beta1 + alpha1)/pi must be an integer".into(),
        ));
    }
    let (s1, s2) = sigma(omega, alpha1, beta1);
    let guard = SIGMA_GUARD * (beta1 - alpha1);
    if s1.abs() < guard {
        return Err(Error::InadmissibleParams(format!("sigma1 = {s1:e} vanishes")));
    }
    if s2.abs() < guard {
        return Err(Error::InadmissibleParams(format!("sigma2 = {s2:e} vanishes")));
    }
    Ok((s1, s2))
}

/// `Σ θ_i k_i(t, s)` with `k = (sc, cc, ss, cs)`, `t ∈ [α, β]`,
/// `s ∈ [α₁, β₁]`.
pub fn four_theta(theta: [f64; 4], params: &TrigFamilyParams, p: Exponent) -> Result<SeparableOperator> {
    let w = params.omega;
    let window = SupportSet::interval(params.alpha, params.beta)?;
    let support = SupportSet::interval(params.alpha1, params.beta1)?;
    let (sin, cos) = (FunctionExpr::sin(w), FunctionExpr::cos(w));
    let sin_row = FunctionExpr::linear_combination([(theta[0], &cos), (theta[2], &sin)]);
    let cos_row = FunctionExpr::linear_combination([(theta[1], &cos), (theta[3], &sin)]);
    let mut terms = Vec::new();
    if !sin_row.is_zero() {
        terms.push(KernelTerm::new(sin.windowed(&window), sin_row));
    }
    if !cos_row.is_zero() {
        terms.push(KernelTerm::new(cos.windowed(&window), cos_row));
    }
    SeparableOperator::kernel(terms, support, p)
}

/// Kernel coefficients `(sc, cc, ss, cs)` of `AB − BA` for two four-θ
/// operators sharing `[α₁, β₁]`, given `∫ sin cos = 0` there.
pub fn four_theta_commutator(ta: [f64; 4], tb: [f64; 4], s1: f64, s2: f64) -> [f64; 4] {
    let [a1, a2, a3, a4] = ta;
    let [b1, b2, b3, b4] = tb;
    [
        a3 * b1 * s1 - b3 * a1 * s1 + a1 * b2 * s2 - b1 * a2 * s2,
        (b1 * a4 - a1 * b4) * s1,
        (a1 * b4 - b1 * a4) * s2,
        a4 * b3 * s1 - b4 * a3 * s1 + a2 * b4 * s2 - b2 * a4 * s2,
    ]
}

/// Four-θ coefficient vectors of `A` and `B` for a trigonometric family.
pub fn trig_thetas(id: FamilyId, params: &TrigFamilyParams) -> Result<([f64; 4], [f64; 4])> {
    let (s1, s2) = check_trig_admissible(params)?;
    let d = params.delta;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::InadmissibleParams("delta must be non-zero".into()));
    }
    let [a1, a2, _, a4] = params.theta_a;
    let [b1, b2, b3, _] = params.theta_b;
    let out = match id {
        FamilyId::T4 => ([a1, 0.0, 0.0, 0.0], [b1, 0.0, b3, 0.0]),
        FamilyId::T5 => {
            if a1 == 0.0 {
                return Err(Error::InadmissibleParams("theta_a1 must be non-zero".into()));
            }
            ([a1, a2, 1.0 / (d * s1), 0.0], [b1, 0.0, -b1 * (d * s2 * a2 - 1.0) / (d * a1 * s1), 0.0])
        }
        FamilyId::T6 => ([a1, -1.0 / (d * s2), 1.0 / (d * s1), 0.0], [b1, 0.0, b3, 0.0]),
        FamilyId::T7 => ([a1, 1.0 / (d * s2), 1.0 / (d * s1), 0.0], [b1, 2.0 * s1 / s2 * b3, b3, 0.0]),
        FamilyId::T8 => ([a1, a2, d * a2 * a2 * s2 * s2 / s1, 0.0], [b1, 0.0, 0.0, 0.0]),
        FamilyId::T9 => ([0.0, 1.0 / (d * s2), 1.0 / (d * s1), a4], [0.0, b2, 2.0 * s2 * b2 / s1, 0.0]),
        FamilyId::T10 => ([0.0, 1.0 / (d * s2), -1.0 / (d * s1), a4], [0.0, b2, 0.0, 0.0]),
        FamilyId::Laurent => {
            return Err(Error::InvalidArgument("laurent is not a trigonometric family".into()));
        }
    };
    Ok(out)
}

fn sequence_slots(id: FamilyId) -> (Option<Slot>, Option<Slot>) {
    match id {
        FamilyId::T4 => (Some(Slot::ThetaA(0)), Some(Slot::ThetaB(2))),
        FamilyId::T5 => (Some(Slot::ThetaA(1)), Some(Slot::ThetaB(0))),
        FamilyId::T6 => (None, Some(Slot::ThetaB(0))),
        FamilyId::T7 => (Some(Slot::ThetaA(0)), Some(Slot::ThetaB(2))),
        FamilyId::T8 => (Some(Slot::ThetaA(1)), Some(Slot::ThetaB(0))),
        FamilyId::T9 => (Some(Slot::ThetaA(3)), Some(Slot::ThetaB(1))),
        FamilyId::T10 => (Some(Slot::ThetaA(3)), Some(Slot::ThetaB(1))),
        FamilyId::Laurent => (Some(Slot::GammaA), None),
    }
}

/// Current value of a sequence slot.
pub fn slot_value(params: &FamilyParams, slot: Slot) -> f64 {
    match (params, slot) {
        (FamilyParams::Trig(t), Slot::ThetaA(i)) => t.theta_a[i],
        (FamilyParams::Trig(t), Slot::ThetaB(i)) => t.theta_b[i],
        (FamilyParams::Laurent(l), Slot::GammaA) => l.gamma_a2,
        (FamilyParams::Laurent(l), Slot::GammaB) => l.gamma_b2,
        _ => f64::NAN,
    }
}

/// Limits of the `A_n` / `B_n` sequence values under which the limiting
/// operators commute.
pub fn commuting_limits(id: FamilyId, params: &FamilyParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let trig = |p: &FamilyParams| match p {
        FamilyParams::Trig(t) => check_trig_admissible(t).map(|s| (*t, s)),
        FamilyParams::Laurent(_) => Err(Error::InvalidArgument(format!("{id} needs trigonometric parameters"))),
    };
    Ok(match id {
        FamilyId::T4 | FamilyId::T7 | FamilyId::T9 | FamilyId::T10 => (vec![0.0], vec![0.0]),
        FamilyId::T5 => {
            let (t, (_, s2)) = trig(params)?;
            (vec![1.0 / (t.delta * s2)], vec![0.0])
        }
        FamilyId::T6 => {
            let (t, (s1, _)) = trig(params)?;
            (vec![], vec![0.5 * t.delta * t.theta_a[0] * t.theta_b[2] * s1])
        }
        FamilyId::T8 => {
            let (t, (_, s2)) = trig(params)?;
            (vec![0.0, 1.0 / (t.delta * s2)], vec![0.0])
        }
        FamilyId::Laurent => (vec![0.0], vec![]),
    })
}

pub fn check_laurent_admissible(params: &LaurentFamilyParams) -> Result<()> {
    if !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return Err(Error::InadmissibleParams(format!("need 0 < alpha <= 1, got {}", params.alpha)));
    }
    if params.p == Exponent::ONE {
        return Err(Error::InadmissibleParams("laurent family needs p > 1".into()));
    }
    if !(params.gamma_a2.is_finite() && params.gamma_b2.is_finite()) {
        return Err(Error::InadmissibleParams("gammas must be finite".into()));
    }
    Ok(())
}

fn build_pair(id: FamilyId, params: &FamilyParams, p: Exponent) -> Result<(SeparableOperator, SeparableOperator)> {
    match (id, params) {
        (FamilyId::Laurent, FamilyParams::Laurent(l)) => laurent_pair(l),
        (FamilyId::Laurent, _) => Err(Error::InvalidArgument("laurent needs laurent parameters".into())),
        (_, FamilyParams::Trig(t)) => {
            let (ta, tb) = trig_thetas(id, t)?;
            Ok((four_theta(ta, t, p)?, four_theta(tb, t, p)?))
        }
        (_, FamilyParams::Laurent(_)) => Err(Error::InvalidArgument(format!("{id} needs trigonometric parameters"))),
    }
}

fn laurent_pair(l: &LaurentFamilyParams) -> Result<(SeparableOperator, SeparableOperator)> {
    check_laurent_admissible(l)?;
    let window = SupportSet::half_line(l.alpha)?;
    let support = SupportSet::interval(1.0, 2.0)?;
    let left = FunctionExpr::power(-1).windowed(&window);
    let ln2 = std::f64::consts::LN_2;
    let ra = FunctionExpr::linear_combination([
        (l.gamma_a2, &FunctionExpr::constant(1.0)),
        (-2.0 * ln2 * l.gamma_a2, &FunctionExpr::power(-1)),
    ]);
    let rb = FunctionExpr::constant(l.gamma_b2);
    let a = SeparableOperator::kernel(vec![KernelTerm::new(left.clone(), ra)], support.clone(), l.p)?;
    let b = SeparableOperator::kernel(vec![KernelTerm::new(left, rb)], support, l.p)?;
    Ok((a, b))
}

/// Builds any family from its parameters; `p` is ignored for `laurent`,
/// which carries its own exponent.
pub fn build(id: FamilyId, params: &FamilyParams, p: Exponent) -> Result<Family> {
    let p = match params {
        FamilyParams::Laurent(l) => l.p,
        FamilyParams::Trig(_) => p,
    };
    let (a, b) = build_pair(id, params, p)?;
    let (sa, sb) = sequence_slots(id);
    let template = |side, slot| Template { family: id, params: *params, p, side, slot };
    let delta = match params {
        FamilyParams::Trig(t) => t.delta,
        FamilyParams::Laurent(_) => 1.0,
    };
    Ok(Family { id, a, b, a_n: sa.map(|s| template(Side::A, s)), b_n: sb.map(|s| template(Side::B, s)), delta })
}

macro_rules! trig_ctor {
    ($name:ident, $id:expr) => {
        pub fn $name(params: &TrigFamilyParams, p: Exponent) -> Result<Family> {
            build($id, &FamilyParams::Trig(*params), p)
        }
    };
}

trig_ctor!(family_t4, FamilyId::T4);
trig_ctor!(family_t5, FamilyId::T5);
trig_ctor!(family_t6, FamilyId::T6);
trig_ctor!(family_t7, FamilyId::T7);
trig_ctor!(family_t8, FamilyId::T8);
trig_ctor!(family_t9, FamilyId::T9);
trig_ctor!(family_t10, FamilyId::T10);

pub fn family_laurent(params: &LaurentFamilyParams) -> Result<Family> {
    build(FamilyId::Laurent, &FamilyParams::Laurent(*params), params.p)
}

/// `λ̃(p)`: `|β−α|` for `p = 1`, `|β₁−α₁|` for `p = ∞`, otherwise
/// `|β−α|^{1/p} |β₁−α₁|^{1/q}`.
pub fn lambda_tilde(params: &TrigFamilyParams, p: Exponent) -> f64 {
    let outer = (params.beta - params.alpha).abs();
    let inner = (params.beta1 - params.alpha1).abs();
    if p == Exponent::ONE {
        outer
    } else if p.is_infinite() {
        inner
    } else {
        outer.powf(p.reciprocal()) * inner.powf(p.conjugate().reciprocal())
    }
}
