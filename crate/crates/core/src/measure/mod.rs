//! Supports, symbolic functions, pairings `Q_Λ(u, v) = ∫_Λ u v` and `L_p`
//! norms.
//!
//! Integrals are computed in closed form whenever the integrand reduces to
//! pure powers or pure trigonometric atoms. Everything else falls back to
//! adaptive Gauss–Kronrod quadrature. Unbounded pieces only admit power
//! atoms, which are integrated in closed form.

mod exponent;
mod expr;
pub mod quadrature;
mod support;

pub use exponent::Exponent;
pub use expr::{BasisFn, FunctionExpr, Monomial, Term, Trig};
pub use support::{Interval, SupportSet};

pub(crate) use support::meet;

use crate::error::{Error, Result};

/// Relative tolerance used by [`check_functional_equality`].
pub const EQUALITY_RTOL: f64 = 1e-9;
/// Grid resolution for `p = ∞` searches.
pub const SUP_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingValue {
    pub value: f64,
    pub method: Method,
    pub abs_err: f64,
}

impl PairingValue {
    fn zero() -> Self {
        PairingValue { value: 0.0, method: Method::ClosedForm, abs_err: 0.0 }
    }

    fn accumulate(&mut self, other: PairingValue) {
        self.value += other.value;
        self.abs_err += other.abs_err;
        if other.method == Method::Quadrature {
            self.method = Method::Quadrature;
        }
    }
}

/// `∫_a^b t^k trig(t) dt` for a single atom.
pub fn integrate_monomial(m: Monomial, a: f64, b: f64) -> Result<PairingValue> {
    let closed = |value: f64| Ok(PairingValue { value, method: Method::ClosedForm, abs_err: 0.0 });
    let k = m.power;
    if b.is_infinite() {
        return match m.trig {
            Trig::One if k <= -2 && a > 0.0 => closed(a.powi(k + 1) / -f64::from(k + 1)),
            Trig::One => Err(Error::NonIntegrable(format!("t^{k} on [{a}, inf)"))),
            _ => Err(Error::NonIntegrable(format!("trigonometric atom {m} on unbounded piece [{a}, inf)"))),
        };
    }
    if a == b {
        return closed(0.0);
    }
    if k < 0 && a <= 0.0 && b >= 0.0 {
        return Err(Error::NonIntegrable(format!("t^{k} on [{a}, {b}] meets the origin")));
    }
    match (m.trig, k) {
        (Trig::One, -1) => closed((b / a).ln()),
        (Trig::One, _) => {
            let e = k + 1;
            closed((b.powi(e) - a.powi(e)) / f64::from(e))
        }
        (Trig::Sin(w), 0) => closed(2.0 * (0.5 * w * (a + b)).sin() * (0.5 * w * (b - a)).sin() / w),
        (Trig::Cos(w), 0) => closed(2.0 * (0.5 * w * (a + b)).cos() * (0.5 * w * (b - a)).sin() / w),
        _ => {
            let q = quadrature::integrate(|t| m.eval(t), a, b)?;
            Ok(PairingValue { value: q.value, method: Method::Quadrature, abs_err: q.abs_err })
        }
    }
}

fn integrate_over(m: Monomial, set: &SupportSet) -> Result<PairingValue> {
    let mut acc = PairingValue::zero();
    for p in set.pieces() {
        acc.accumulate(integrate_monomial(m, p.lo, p.hi)?);
    }
    Ok(acc)
}

fn pair_impl(u: &FunctionExpr, v: &FunctionExpr, lambda: Option<&SupportSet>) -> Result<PairingValue> {
    // Fixed operand order makes the pairing exactly symmetric.
    let (u, v) = if u.cmp_key(v) == std::cmp::Ordering::Greater { (v, u) } else { (u, v) };
    let mut acc = PairingValue::zero();
    for x in u.terms() {
        for y in v.terms() {
            let w = meet(meet(x.basis.window.as_ref(), y.basis.window.as_ref()).as_ref(), lambda);
            let Some(w) = w else {
                return Err(Error::NonIntegrable("integration over the whole line".into()));
            };
            if w.is_empty() {
                continue;
            }
            for (c, mono) in x.basis.mono.product(y.basis.mono) {
                let mut part = integrate_over(mono, &w)?;
                let s = c * x.coef * y.coef;
                part.value *= s;
                part.abs_err *= s.abs();
                acc.accumulate(part);
            }
        }
    }
    Ok(acc)
}

/// `Q_Λ(u, v) = ∫_Λ u(t) v(t) dt`.
pub fn pairing(u: &FunctionExpr, v: &FunctionExpr, lambda: &SupportSet) -> Result<PairingValue> {
    pair_impl(u, v, Some(lambda))
}

/// `∫ u v` over the whole line; the windows of `u` and `v` bound the domain.
pub fn pairing_windowed(u: &FunctionExpr, v: &FunctionExpr) -> Result<PairingValue> {
    pair_impl(u, v, None)
}

/// `∫_Λ u`, the pairing with the constant one.
pub fn integral(u: &FunctionExpr, lambda: &SupportSet) -> Result<PairingValue> {
    pair_impl(u, &FunctionExpr::constant(1.0), Some(lambda))
}

/// `‖u‖_{L_p(Λ)}`.
pub fn lp_norm(u: &FunctionExpr, lambda: &SupportSet, p: Exponent) -> Result<f64> {
    norm_impl(u, Some(lambda), p)
}

/// `‖u‖_{L_p(ℝ)}`, with the windows of `u` bounding the domain.
pub fn lp_norm_windowed(u: &FunctionExpr, p: Exponent) -> Result<f64> {
    norm_impl(u, None, p)
}

/// Locally active atoms on an elementary piece with no window breakpoints.
fn local_atoms(u: &FunctionExpr, probe: f64) -> Vec<(f64, Monomial)> {
    let mut out: Vec<(f64, Monomial)> = Vec::new();
    for t in u.terms() {
        if t.basis.window.as_ref().is_none_or(|w| w.contains(probe)) {
            match out.iter_mut().find(|(_, m)| m.cmp_key(&t.basis.mono).is_eq()) {
                Some(slot) => slot.0 += t.coef,
                None => out.push((t.coef, t.basis.mono)),
            }
        }
    }
    out.retain(|(c, _)| *c != 0.0);
    out
}

fn eval_atoms(atoms: &[(f64, Monomial)], t: f64) -> f64 {
    atoms.iter().map(|(c, m)| c * m.eval(t)).sum()
}

fn elementary_pieces(u: &FunctionExpr, lambda: Option<&SupportSet>) -> Result<Vec<Interval>> {
    let domain = match (u.window_hull(), lambda) {
        (Some(h), Some(l)) => h.intersect(l),
        (Some(h), None) => h,
        (None, Some(l)) => l.clone(),
        (None, None) => {
            return Err(Error::NonIntegrable("norm over the whole line".into()));
        }
    };
    Ok(domain.split_at(&u.breakpoints()))
}

fn norm_impl(u: &FunctionExpr, lambda: Option<&SupportSet>, p: Exponent) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    if p == Exponent::TWO {
        let sq = pair_impl(u, u, lambda)?.value;
        return Ok(sq.max(0.0).sqrt());
    }
    let pieces = elementary_pieces(u, lambda)?;
    if p.is_infinite() {
        let mut best: f64 = 0.0;
        for piece in pieces {
            let probe = if piece.hi.is_finite() { 0.5 * (piece.lo + piece.hi) } else { piece.lo + 1.0 };
            let atoms = local_atoms(u, probe);
            if !atoms.is_empty() {
                best = best.max(sup_abs(&atoms, piece)?);
            }
        }
        return Ok(best);
    }
    let pv = p.value();
    let mut total = 0.0;
    for piece in pieces {
        let probe = if piece.hi.is_finite() { 0.5 * (piece.lo + piece.hi) } else { piece.lo + 1.0 };
        let atoms = local_atoms(u, probe);
        if !atoms.is_empty() {
            total += integral_abs_pow(&atoms, piece, pv)?;
        }
    }
    Ok(total.powf(1.0 / pv))
}

fn check_origin(atoms: &[(f64, Monomial)], piece: Interval) -> Result<()> {
    if atoms.iter().any(|(_, m)| m.power < 0) && piece.lo <= 0.0 && piece.hi >= 0.0 {
        return Err(Error::NonIntegrable(format!("negative power on [{}, {}] meets the origin", piece.lo, piece.hi)));
    }
    Ok(())
}

/// Powers-only atoms on `[a, ∞)` rewritten through `t = a/x`, `x ∈ (0, 1]`.
/// Returns the polynomial `x ↦ Σ c a^k x^{-k}` as (coef, power) pairs and the
/// leading (least negative) power of `t`.
fn unbounded_atoms(atoms: &[(f64, Monomial)], a: f64) -> Result<(Vec<(f64, i32)>, i32)> {
    if atoms.iter().any(|(_, m)| m.trig != Trig::One) {
        return Err(Error::NonIntegrable(format!("trigonometric atom on unbounded piece [{a}, inf)")));
    }
    if a <= 0.0 && atoms.iter().any(|(_, m)| m.power != 0) {
        return Err(Error::NonIntegrable(format!("unbounded piece [{a}, inf) must start right of the origin")));
    }
    let lead = atoms.iter().map(|(_, m)| m.power).max().expect("non-empty");
    let poly = atoms.iter().map(|(c, m)| (c * a.powi(m.power), -m.power)).collect();
    Ok((poly, lead))
}

fn sup_abs(atoms: &[(f64, Monomial)], piece: Interval) -> Result<f64> {
    check_origin(atoms, piece)?;
    if piece.hi.is_infinite() {
        let (poly, lead) = unbounded_atoms(atoms, piece.lo)?;
        if lead > 0 {
            return Err(Error::NotInSpace(format!("t^{lead} is unbounded on [{}, inf)", piece.lo)));
        }
        let g = |x: f64| poly.iter().map(|&(c, k)| c * x.powi(k)).sum::<f64>().abs();
        return Ok(grid_golden_max(&g, 0.0, 1.0));
    }
    let (a, b) = (piece.lo, piece.hi);
    let f = |t: f64| eval_atoms(atoms, t).abs();
    if let [(c, m)] = atoms {
        match m.trig {
            Trig::One => return Ok(f(a).max(f(b))),
            Trig::Sin(w) | Trig::Cos(w) if m.power == 0 => {
                let shift = if matches!(m.trig, Trig::Sin(_)) { 0.5 } else { 0.0 };
                let first = ((w * a / std::f64::consts::PI) - shift).ceil();
                let peak = (first + shift) * std::f64::consts::PI / w;
                if peak <= b {
                    return Ok(c.abs());
                }
                return Ok(f(a).max(f(b)));
            }
            _ => {}
        }
    }
    Ok(grid_golden_max(&f, a, b))
}

fn grid_golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let n = SUP_GRID;
    let h = (b - a) / n as f64;
    let mut best_i = 0;
    let mut best = f(a);
    for i in 1..=n {
        let x = if i == n { b } else { a + h * i as f64 };
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = a + h * best_i.saturating_sub(1) as f64;
    let hi = (a + h * (best_i + 1) as f64).min(b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x0, mut x1) = (lo, hi);
    let mut c = x1 - g * (x1 - x0);
    let mut d = x0 + g * (x1 - x0);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (x1 - x0).abs() <= 1e-15 * (1.0 + x0.abs()) {
            break;
        }
        if fc > fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - g * (x1 - x0);
            fc = f(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + g * (x1 - x0);
            fd = f(d);
        }
    }
    best.max(fc).max(fd)
}

/// `∫_{piece} |Σ atoms|^p`.
fn integral_abs_pow(atoms: &[(f64, Monomial)], piece: Interval, p: f64) -> Result<f64> {
    check_origin(atoms, piece)?;
    if let [(c, m)] = atoms {
        if m.trig == Trig::One {
            return power_abs_pow(*c, m.power, piece, p);
        }
    }
    if piece.hi.is_infinite() {
        let a = piece.lo;
        let (poly, lead) = unbounded_atoms(atoms, a)?;
        if f64::from(lead) * p >= -1.0 {
            return Err(Error::NotInSpace(format!("leading power t^{lead} not in L_{p} on [{a}, inf)")));
        }
        let g = |x: f64| {
            let v: f64 = poly.iter().map(|&(c, k)| c * x.powi(k)).sum();
            v.abs().powf(p) * a / (x * x)
        };
        return Ok(quadrature::integrate(g, 0.0, 1.0)?.value);
    }
    let f = |t: f64| eval_atoms(atoms, t).abs().powf(p);
    let mut total = 0.0;
    let cuts = sign_changes(atoms, piece.lo, piece.hi);
    let mut lo = piece.lo;
    for c in cuts.into_iter().chain(std::iter::once(piece.hi)) {
        total += quadrature::integrate(f, lo, c)?.value;
        lo = c;
    }
    Ok(total)
}

/// `∫ |c t^k|^p` over a piece, in closed form.
fn power_abs_pow(c: f64, k: i32, piece: Interval, p: f64) -> Result<f64> {
    let e = f64::from(k) * p;
    let cp = c.abs().powf(p);
    // ∫_x^y s^e ds for 0 ≤ x < y.
    let pos = |x: f64, y: f64| -> Result<f64> {
        if y.is_infinite() {
            if e < -1.0 && x > 0.0 {
                return Ok(x.powf(e + 1.0) / -(e + 1.0));
            }
            return Err(Error::NotInSpace(format!("t^{k} not in L_{p} on [{x}, inf)")));
        }
        if e == -1.0 {
            Ok((y / x).ln())
        } else {
            Ok((y.powf(e + 1.0) - x.powf(e + 1.0)) / (e + 1.0))
        }
    };
    let (a, b) = (piece.lo, piece.hi);
    let v = if a >= 0.0 {
        pos(a, b)?
    } else if b <= 0.0 {
        pos(-b, -a)?
    } else {
        pos(0.0, -a)? + pos(0.0, b)?
    };
    Ok(cp * v)
}

fn sign_changes(atoms: &[(f64, Monomial)], a: f64, b: f64) -> Vec<f64> {
    const N: usize = 256;
    let f = |t: f64| eval_atoms(atoms, t);
    let h = (b - a) / N as f64;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=N {
        let x1 = if i == N { b } else { a + h * i as f64 };
        let f1 = f(x1);
        if f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) && i < N {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || mid == lo || mid == hi {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Where two functions were compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `G = G1 ∩ G2`, where `f = g` is required.
    Common,
    /// `G1 \ G`, where `f = 0` is required.
    FirstOnly,
    /// `G2 \ G`, where `g = 0` is required.
    SecondOnly,
}

/// Outcome of [`check_functional_equality`].
#[derive(Debug, Clone, PartialEq)]
pub enum Equality {
    Equal {
        /// `L_2` residuals on `G`, `G1 \ G`, `G2 \ G`.
        residuals: [f64; 3],
        scale: f64,
    },
    Unequal {
        residuals: [f64; 3],
        scale: f64,
        /// The sub-domain with the largest offending residual.
        region: Region,
        witness: SupportSet,
        residual: f64,
    },
}

impl Equality {
    pub fn holds(&self) -> bool {
        matches!(self, Equality::Equal { .. })
    }
}

/// Decides whether `∫_{G1} f x = ∫_{G2} g x` for every `x`, i.e. whether
/// `f = g` a.e. on `G = G1 ∩ G2`, `f = 0` a.e. on `G1 \ G` and `g = 0` a.e.
/// on `G2 \ G`. Each condition is tested in `L_2` against
/// [`EQUALITY_RTOL`] times `max(‖f‖_{G1}, ‖g‖_{G2})`.
pub fn check_functional_equality(
    f: &FunctionExpr,
    g: &FunctionExpr,
    g1: &SupportSet,
    g2: &SupportSet,
) -> Result<Equality> {
    let common = g1.intersect(g2);
    let first = g1.difference(&common);
    let second = g2.difference(&common);
    let l2 = |u: &FunctionExpr, set: &SupportSet| -> Result<f64> {
        if set.is_empty() || u.is_zero() {
            Ok(0.0)
        } else {
            lp_norm(u, set, Exponent::TWO)
        }
    };
    let residuals = [l2(&(f - g), &common)?, l2(f, &first)?, l2(g, &second)?];
    let scale = l2(f, g1)?.max(l2(g, g2)?);
    let bound = EQUALITY_RTOL * scale;
    let worst = (0..3).filter(|&i| residuals[i] > bound).max_by(|&i, &j| residuals[i].total_cmp(&residuals[j]));
    Ok(match worst {
        None => Equality::Equal { residuals, scale },
        Some(i) => {
            let (region, witness) = match i {
                0 => (Region::Common, common),
                1 => (Region::FirstOnly, first),
                _ => (Region::SecondOnly, second),
            };
            Equality::Unequal { residuals, scale, region, witness, residual: residuals[i] }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> SupportSet {
        SupportSet::interval(a, b).unwrap()
    }

    #[test]
    fn trig_closed_forms() {
        let l = iv(0.3, 2.2);
        let s = integral(&FunctionExpr::sin(1.7), &l).unwrap();
        assert_eq!(s.method, Method::ClosedForm);
        let exact = ((1.7f64 * 0.3).cos() - (1.7f64 * 2.2).cos()) / 1.7;
        assert!((s.value - exact).abs() < 1e-15);
    }

    #[test]
    fn sin_cos_orthogonal_on_half_period_multiple() {
        let w = 2.0;
        let l = iv(0.4, 0.4 + std::f64::consts::PI / w);
        let q = pairing(&FunctionExpr::sin(w), &FunctionExpr::cos(w), &l).unwrap();
        assert!(q.value.abs() < 1e-15);
    }

    #[test]
    fn unbounded_power_closed_form() {
        let l = SupportSet::half_line(2.0).unwrap();
        let q = pairing(&FunctionExpr::power(-1), &FunctionExpr::power(-2), &l).unwrap();
        assert!((q.value - 1.0 / 8.0).abs() < 1e-16);
        assert!(matches!(integral(&FunctionExpr::power(-1), &l), Err(Error::NonIntegrable(_))));
        assert!(matches!(integral(&FunctionExpr::sin(1.0), &l), Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn origin_singularity_rejected() {
        let l = iv(-1.0, 1.0);
        assert!(matches!(integral(&FunctionExpr::power(-2), &l), Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn mixed_atoms_use_quadrature() {
        let l = iv(0.0, 1.0);
        let u = &FunctionExpr::power(1) * &FunctionExpr::sin(3.0);
        let q = integral(&u, &l).unwrap();
        assert_eq!(q.method, Method::Quadrature);
        let exact = ((3.0f64).sin() - 3.0 * (3.0f64).cos()) / 9.0;
        assert!((q.value - exact).abs() < 1e-13);
        assert!(q.abs_err <= 1e-12);
    }

    #[test]
    fn norms_of_simple_functions() {
        let l = iv(0.0, 1.0);
        let t = FunctionExpr::power(1);
        assert!((lp_norm(&t, &l, Exponent::ONE).unwrap() - 0.5).abs() < 1e-15);
        assert!((lp_norm(&t, &l, Exponent::TWO).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&t, &l, Exponent::INFINITY).unwrap(), 1.0);
        let p3 = Exponent::new(3.0).unwrap();
        assert!((lp_norm(&t, &l, p3).unwrap() - 0.25f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_with_interior_peak() {
        let l = iv(0.0, 1.0);
        let u = &FunctionExpr::power(1) - &FunctionExpr::power(2);
        assert!((lp_norm(&u, &l, Exponent::INFINITY).unwrap() - 0.25).abs() < 1e-14);
        let s = FunctionExpr::sin(1.0).scaled(-3.0);
        assert_eq!(lp_norm(&s, &iv(0.0, 2.0), Exponent::INFINITY).unwrap(), 3.0);
        assert!((lp_norm(&s, &iv(0.0, 1.0), Exponent::INFINITY).unwrap() - 3.0 * 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn l1_norm_across_sign_change() {
        let l = iv(0.0, std::f64::consts::PI);
        let u = FunctionExpr::cos(1.0);
        assert!((lp_norm(&u, &l, Exponent::ONE).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_norms() {
        let l = SupportSet::half_line(0.5).unwrap();
        let u = FunctionExpr::power(-1);
        assert!((lp_norm(&u, &l, Exponent::TWO).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&u, &l, Exponent::INFINITY).unwrap(), 2.0);
        assert!(lp_norm(&u, &l, Exponent::ONE).is_err());
        let v = &FunctionExpr::power(-1) + &FunctionExpr::power(-2);
        let p3 = Exponent::new(3.0).unwrap();
        // ∫_{1/2}^∞ (1/t + 1/t²)³ = 1/(2a²) + 3/(3a³)... evaluated for a = 1/2.
        let a: f64 = 0.5;
        let exact = 1.0 / (2.0 * a * a) + 3.0 / (3.0 * a.powi(3)) + 3.0 / (4.0 * a.powi(4)) + 1.0 / (5.0 * a.powi(5));
        assert!((lp_norm(&v, &l, p3).unwrap().powi(3) - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn equality_identical() {
        let l = iv(0.0, std::f64::consts::PI);
        let u = FunctionExpr::sin(1.0);
        let same = &(&u + &FunctionExpr::power(1)) - &FunctionExpr::power(1);
        assert!(check_functional_equality(&u, &same, &l, &l).unwrap().holds());
    }

    #[test]
    fn equality_witness_outside_common_part() {
        let pi = std::f64::consts::PI;
        let u = FunctionExpr::sin(1.0);
        match check_functional_equality(&u, &u, &iv(0.0, 2.0 * pi), &iv(0.0, pi)).unwrap() {
            Equality::Unequal { region, witness, residual, .. } => {
                assert_eq!(region, Region::FirstOnly);
                assert_eq!(witness, iv(pi, 2.0 * pi));
                assert!((residual - (pi / 2.0).sqrt()).abs() < 1e-14);
            }
            other => panic!("expected inequality, got {other:?}"),
        }
    }

    #[test]
    fn equality_of_vanishing_functions() {
        let z = &FunctionExpr::power(1) - &FunctionExpr::power(1);
        assert!(check_functional_equality(&FunctionExpr::zero(), &z, &iv(0.0, 1.0), &iv(2.0, 3.0)).unwrap().holds());
    }
}
