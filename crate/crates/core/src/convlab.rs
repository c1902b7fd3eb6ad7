//! Convergence experiments for operator sequences `A_n`, `B_n`.
//!
//! A sequence parameter follows one of the closed forms `c`, `c/n`, `c/n^2`
//! or `c + c'/n`. The anchor `c` may also be written `L` (or `L2`) for the
//! family's first (second) commuting limit of that slot.
//!
//! Commutator convergence does not force the sequence itself to converge.
//! With `C_m = diag((-1)^m, 1)` realised as a rank-2 kernel on `[0, 1]`, every
//! `C_m` commutes with `D = diag(1, 2)` while `C_m` oscillates:
//!
//! ```
//! use sepcov::{FunctionExpr, KernelTerm, SeparableOperator, SupportSet, measure::Exponent};
//!
//! let unit = SupportSet::interval(0.0, 1.0).unwrap();
//! let e1 = FunctionExpr::constant(1.0);
//! let e2 = &FunctionExpr::power(1).scaled(2.0 * 3f64.sqrt()) - &FunctionExpr::constant(3f64.sqrt());
//! let diag = |x: f64, y: f64| {
//!     SeparableOperator::kernel(
//!         vec![
//!             KernelTerm::new(e1.windowed(&unit), e1.scaled(x)),
//!             KernelTerm::new(e2.windowed(&unit), e2.scaled(y)),
//!         ],
//!         unit.clone(),
//!         Exponent::TWO,
//!     )
//!     .unwrap()
//! };
//! let d = diag(1.0, 2.0);
//! for m in 0..4 {
//!     let c = diag(if m % 2 == 0 { 1.0 } else { -1.0 }, 1.0);
//!     assert!(c.commutator(&d).unwrap().kernel_norm().unwrap() < 1e-12);
//! }
//! let gap = diag(1.0, 1.0).kernel_difference(&diag(-1.0, 1.0)).kernel_norm().unwrap();
//! assert!((gap - 2.0).abs() < 1e-12);
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::families::{self, commuting_limits, lambda_tilde, FamilyId, FamilyParams, Slot, Template};
use crate::measure::Exponent;
use crate::normest::{empirical_norm, hoelder_bound};
use crate::sepop::SeparableOperator;

/// Probes per empirical commutator norm.
pub const PROBES: u64 = 50;
/// A decaying trace must lose this factor between its first and last row.
pub const DECAY_FACTOR: f64 = 50.0;
/// Required log-log slope of a decaying trace.
pub const SLOPE_MAX: f64 = -0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    Value(f64),
    /// Index into the commuting limits of the slot.
    Limit(usize),
}

/// `anchor + coef / n^order`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Sequence {
    pub anchor: Anchor,
    pub coef: f64,
    pub order: u32,
}

impl Sequence {
    pub fn constant(c: f64) -> Self {
        Sequence { anchor: Anchor::Value(c), coef: 0.0, order: 0 }
    }

    pub fn harmonic(c: f64) -> Self {
        Sequence { anchor: Anchor::Value(0.0), coef: c, order: 1 }
    }

    pub fn inverse_square(c: f64) -> Self {
        Sequence { anchor: Anchor::Value(0.0), coef: c, order: 2 }
    }

    pub fn affine(c: f64, c1: f64) -> Self {
        Sequence { anchor: Anchor::Value(c), coef: c1, order: 1 }
    }

    fn anchor_value(&self, limits: &[f64]) -> Result<f64> {
        match self.anchor {
            Anchor::Value(v) => Ok(v),
            Anchor::Limit(i) => limits
                .get(i)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("no commuting limit L{} for this slot", i + 1))),
        }
    }

    /// The `n`-th value; `limits` resolves an `L` anchor.
    pub fn value(&self, n: usize, limits: &[f64]) -> Result<f64> {
        let base = self.anchor_value(limits)?;
        Ok(if self.order == 0 { base } else { base + self.coef / (n as f64).powi(self.order as i32) })
    }

    pub fn limit(&self, limits: &[f64]) -> Result<f64> {
        self.anchor_value(limits)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let anchor = match self.anchor {
            Anchor::Value(v) => format!("{v}"),
            Anchor::Limit(0) => "L".to_string(),
            Anchor::Limit(i) => format!("L{}", i + 1),
        };
        let tail = match self.order {
            1 => "/n",
            _ => "/n^2",
        };
        match (self.anchor, self.order) {
            (_, 0) => write!(f, "{anchor}"),
            (Anchor::Value(v), _) if v == 0.0 => write!(f, "{}{tail}", self.coef),
            _ if self.coef < 0.0 => write!(f, "{anchor} - {}{tail}", -self.coef),
            _ => write!(f, "{anchor} + {}{tail}", self.coef),
        }
    }
}

fn parse_anchor(s: &str) -> Result<Anchor> {
    let bad = || Error::Config(format!("bad sequence constant `{s}`"));
    match s {
        "L" | "L1" => Ok(Anchor::Limit(0)),
        "L2" => Ok(Anchor::Limit(1)),
        _ => s.parse::<f64>().map(Anchor::Value).map_err(|_| bad()),
    }
}

/// Position of a top-level `+` or `-` that joins two terms, skipping a
/// leading sign and exponent signs.
fn split_sum(s: &str) -> Option<(usize, char)> {
    let b = s.as_bytes();
    (1..b.len()).rev().find_map(|i| {
        let c = b[i] as char;
        let after_exp = matches!(b[i - 1], b'e' | b'E');
        ((c == '+' || c == '-') && !after_exp).then_some((i, c))
    })
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Config(format!("bad sequence `{s}`; expected c, c/n, c/n^2 or c + c'/n"));
        let (body, order) = if let Some(b) = s.strip_suffix("/n^2").or_else(|| s.strip_suffix("/n²")) {
            (b, 2)
        } else if let Some(b) = s.strip_suffix("/n") {
            (b, 1)
        } else {
            return Ok(Sequence { anchor: parse_anchor(&s)?, coef: 0.0, order: 0 });
        };
        if body.is_empty() {
            return Err(bad());
        }
        if let Some((i, sign)) = split_sum(body) {
            let anchor = parse_anchor(&body[..i])?;
            let c1: f64 = body[i + 1..].parse().map_err(|_| bad())?;
            let coef = if sign == '-' { -c1 } else { c1 };
            return Ok(Sequence { anchor, coef, order });
        }
        let coef: f64 = body.parse().map_err(|_| bad())?;
        Ok(Sequence { anchor: Anchor::Value(0.0), coef, order })
    }
}

impl TryFrom<String> for Sequence {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Sequence> for String {
    fn from(s: Sequence) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub family: FamilyId,
    pub params: FamilyParams,
    /// Drives `A_n`.
    pub theta_seq: Option<Sequence>,
    /// Drives `B_n`.
    pub sigma_seq: Option<Sequence>,
    pub n_max: usize,
    pub p: Exponent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub bound_diff: f64,
    pub bound_comm: f64,
    pub empirical_comm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    /// Least-squares slope of `log bound_comm` against `log n`; `None` with
    /// fewer than two positive bounds.
    pub slope: Option<f64>,
}

impl ConvergenceTrace {
    fn from_rows(rows: Vec<TraceRow>) -> Self {
        let slope = fit_slope(rows.iter().map(|r| (r.n as f64, r.bound_comm)));
        ConvergenceTrace { rows, slope }
    }

    pub fn first(&self) -> Option<f64> {
        self.rows.first().map(|r| r.bound_comm)
    }

    pub fn last(&self) -> Option<f64> {
        self.rows.last().map(|r| r.bound_comm)
    }

    /// Decay to zero at finite `n`: the last bound is below `tol`, or it is
    /// below `first / 50` with a log-log slope of at most `-0.9`.
    pub fn converges(&self, tol: f64) -> bool {
        decays(&self.rows.iter().map(|r| r.bound_comm).collect::<Vec<_>>(), self.slope, tol)
    }
}

fn decays(bounds: &[f64], slope: Option<f64>, tol: f64) -> bool {
    let (Some(&first), Some(&last)) = (bounds.first(), bounds.last()) else {
        return false;
    };
    last <= tol || (last <= first / DECAY_FACTOR && slope.is_some_and(|s| s <= SLOPE_MAX))
}

fn fit_slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.filter(|&(x, y)| x > 0.0 && y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Side<'a> {
    template: Option<&'a Template>,
    seq: Option<Sequence>,
    limits: Vec<f64>,
    base: &'a SeparableOperator,
}

impl Side<'_> {
    fn at(&self, n: usize) -> Result<SeparableOperator> {
        match (self.template, self.seq) {
            (Some(t), Some(s)) => t.instantiate(s.value(n, &self.limits)?),
            _ => Ok(self.base.clone()),
        }
    }

    fn limit(&self) -> Result<SeparableOperator> {
        match (self.template, self.seq) {
            (Some(t), Some(s)) => t.instantiate(s.limit(&self.limits)?),
            _ => Ok(self.base.clone()),
        }
    }
}

fn hoelder(op: &SeparableOperator, p: Exponent) -> Result<f64> {
    Ok(hoelder_bound(op, p)?.upper)
}

/// Builds `A_n`, `B_n` for `n = 1..=n_max` and records the Hölder bound of
/// `(A_n − Ã) + (B_n − B̃)`, the Hölder bound of the exact commutator
/// `[A_n, B_n]` and its empirical norm over [`PROBES`] probes.
pub fn run_sequence(spec: &SequenceSpec, seed: u64) -> Result<ConvergenceTrace> {
    if spec.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }
    let fam = families::build(spec.family, &spec.params, spec.p)?;
    let p = fam.a.p();
    let (la, lb) = commuting_limits(spec.family, &spec.params)?;
    for (seq, tpl, name) in [(&spec.theta_seq, &fam.a_n, "A_n"), (&spec.sigma_seq, &fam.b_n, "B_n")] {
        if seq.is_some() && tpl.is_none() {
            return Err(Error::InvalidArgument(format!("{} has no {name} sequence", spec.family)));
        }
    }
    let a = Side { template: fam.a_n.as_ref(), seq: spec.theta_seq, limits: la, base: &fam.a };
    let b = Side { template: fam.b_n.as_ref(), seq: spec.sigma_seq, limits: lb, base: &fam.b };
    let (a_lim, b_lim) = (a.limit()?, b.limit()?);
    let mut rows = Vec::with_capacity(spec.n_max);
    for n in 1..=spec.n_max {
        let (an, bn) = (a.at(n)?, b.at(n)?);
        let bound_diff = hoelder(&an.kernel_difference(&a_lim), p)? + hoelder(&bn.kernel_difference(&b_lim), p)?;
        let comm = an.commutator(&bn)?;
        rows.push(TraceRow {
            n,
            bound_diff,
            bound_comm: hoelder(&comm, p)?,
            empirical_comm: empirical_norm(&comm, p, PROBES, seed)?,
        });
    }
    Ok(ConvergenceTrace::from_rows(rows))
}

/// Outcome of a commutator-convergence check. The equivalence holds when
/// both sides agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitVerdict {
    /// The commutator bounds along the sequence decay to zero.
    pub sequence_converges: bool,
    /// The limits commute.
    pub limit_commutes: bool,
    pub final_bound: f64,
    /// Kernel norm of the limit commutator.
    pub limit_residual: f64,
    pub scale: f64,
    /// Hölder bound of the last `‖C_m − C‖ + ‖D_m − D‖`.
    pub approach: f64,
}

impl LimitVerdict {
    pub fn holds(&self) -> bool {
        self.sequence_converges == self.limit_commutes
    }
}

/// `[C_m, D] → 0` iff `[C, D] = 0`.
pub fn check_lemma_one_sided(
    c_seq: &[SeparableOperator],
    d: &SeparableOperator,
    c_limit: &SeparableOperator,
    tol: f64,
) -> Result<LimitVerdict> {
    let d_seq = vec![d.clone(); c_seq.len()];
    check_lemma_two_sided(c_seq, &d_seq, c_limit, d, tol)
}

/// `[C_m, D_m] → 0` iff `[C, D] = 0`.
pub fn check_lemma_two_sided(
    c_seq: &[SeparableOperator],
    d_seq: &[SeparableOperator],
    c_limit: &SeparableOperator,
    d_limit: &SeparableOperator,
    tol: f64,
) -> Result<LimitVerdict> {
    if c_seq.is_empty() || c_seq.len() != d_seq.len() {
        return Err(Error::InvalidArgument("sequences must be non-empty and of equal length".into()));
    }
    let p = c_limit.p();
    let mut bounds = Vec::with_capacity(c_seq.len());
    for (c, d) in c_seq.iter().zip(d_seq) {
        bounds.push(hoelder(&c.commutator(d)?, p)?);
    }
    let last = c_seq.len() - 1;
    let approach =
        hoelder(&c_seq[last].kernel_difference(c_limit), p)? + hoelder(&d_seq[last].kernel_difference(d_limit), p)?;
    let limit_residual = c_limit.commutator(d_limit)?.kernel_norm()?;
    let scale = (c_limit.kernel_norm()? * d_limit.kernel_norm()?)
        .max(c_seq[0].kernel_norm()? * d_seq[0].kernel_norm()?)
        .max(f64::MIN_POSITIVE);
    let slope = fit_slope(bounds.iter().enumerate().map(|(i, &b)| ((i + 1) as f64, b)));
    Ok(LimitVerdict {
        sequence_converges: decays(&bounds, slope, tol * scale),
        limit_commutes: limit_residual <= tol * scale,
        final_bound: bounds[last],
        limit_residual,
        scale,
        approach,
    })
}

/// Upper bound on `‖[A, B]‖_p` from the family's closed-form commutator:
/// `Σ|coef| · λ̃` for the trigonometric families and
/// `|γ_A γ_B| ln 2 · ‖1/t‖_{L_p[α,∞)} · (1 + 2 ln 2)` for `laurent`.
pub fn commutator_coefficient_bound(family: FamilyId, params: &FamilyParams, p: Exponent) -> Result<f64> {
    match params {
        FamilyParams::Trig(t) => {
            let (s1, s2) = families::check_trig_admissible(t)?;
            let (ta, tb) = families::trig_thetas(family, t)?;
            let c = families::four_theta_commutator(ta, tb, s1, s2);
            Ok(c.iter().map(|x| x.abs()).sum::<f64>() * lambda_tilde(t, p))
        }
        FamilyParams::Laurent(l) => {
            families::check_laurent_admissible(l)?;
            let ln2 = std::f64::consts::LN_2;
            let p = l.p;
            let left = if p.is_infinite() {
                1.0 / l.alpha
            } else {
                let pv = p.value();
                l.alpha.powf((1.0 - pv) / pv) / (pv - 1.0).powf(1.0 / pv)
            };
            Ok((l.gamma_a2 * l.gamma_b2).abs() * ln2 * left * (1.0 + 2.0 * ln2))
        }
    }
}

/// Evaluates [`commutator_coefficient_bound`] along `slot = path(k)`,
/// `k = 1..=steps`. `bound_diff` holds `|path(k) − lim path|`, and
/// `empirical_comm` the empirical norm of the exact commutator.
pub fn parameter_limit_scan(
    family: FamilyId,
    params: &FamilyParams,
    slot: Slot,
    path: Sequence,
    steps: usize,
    p: Exponent,
    seed: u64,
) -> Result<ConvergenceTrace> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let limits = slot_limits(family, params, slot)?;
    let target = path.limit(&limits)?;
    let mut rows = Vec::with_capacity(steps);
    for k in 1..=steps {
        let v = path.value(k, &limits)?;
        let at = families::substitute(*params, slot, v);
        let fam = families::build(family, &at, p)?;
        let comm = fam.a.commutator(&fam.b)?;
        rows.push(TraceRow {
            n: k,
            bound_diff: (v - target).abs(),
            bound_comm: commutator_coefficient_bound(family, &at, p)?,
            empirical_comm: empirical_norm(&comm, fam.a.p(), PROBES, seed)?,
        });
    }
    Ok(ConvergenceTrace::from_rows(rows))
}

fn slot_limits(family: FamilyId, params: &FamilyParams, slot: Slot) -> Result<Vec<f64>> {
    let fam = families::build(family, params, Exponent::TWO)?;
    let (la, lb) = commuting_limits(family, params)?;
    if fam.a_n.as_ref().is_some_and(|t| t.slot == slot) {
        Ok(la)
    } else if fam.b_n.as_ref().is_some_and(|t| t.slot == slot) {
        Ok(lb)
    } else {
        Ok(Vec::new())
    }
}
