//! Operator-norm estimates on `L_p`.
//!
//! * [`hoelder_bound`]: `|λ| + Σ ‖a_i‖_p ‖c_i‖_q`, rigorous.
//! * [`schur_bound`]: `|λ| + max(sup_t ∫|K| ds, sup_s ∫|K| dt)`, with the
//!   suprema located by grid search and golden-section refinement.
//! * [`empirical_norm`]: `max ‖Ax‖_p / ‖x‖_p` over seeded random probes, a
//!   lower estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::measure::{lp_norm, lp_norm_windowed, Exponent, FunctionExpr, Interval, Monomial, SupportSet, Trig};
use crate::sepop::SeparableOperator;

/// Probe dictionary size.
pub const DICTIONARY_SIZE: usize = 8;
const SCHUR_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Hoelder,
    Schur,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    pub p: Exponent,
    pub upper: f64,
    pub method: BoundMethod,
    pub empirical_lower: Option<f64>,
}

pub fn hoelder_bound(a: &SeparableOperator, p: Exponent) -> Result<NormBound> {
    let q = p.conjugate();
    let mut upper = a.scalar().abs();
    for k in a.terms() {
        upper += lp_norm_windowed(&k.left, p)? * lp_norm(&k.right, a.support(), q)?;
    }
    Ok(NormBound { p, upper, method: BoundMethod::Hoelder, empirical_lower: None })
}

pub fn schur_bound(a: &SeparableOperator, p: Exponent) -> Result<NormBound> {
    let m = a.merged();
    let lefts: Vec<&FunctionExpr> = m.terms().iter().map(|k| &k.left).collect();
    let rights: Vec<&FunctionExpr> = m.terms().iter().map(|k| &k.right).collect();
    let row = sup_section_l1(&lefts, &rights, Some(m.support()))?;
    let col = sup_section_l1(&rights, &lefts, None)?;
    if !row.is_finite() || !col.is_finite() {
        return Err(Error::NonIntegrable("kernel sections are not uniformly integrable".into()));
    }
    Ok(NormBound { p, upper: a.scalar().abs() + row.max(col), method: BoundMethod::Schur, empirical_lower: None })
}

/// `sup_x ∫ |Σ_i f_i(x) g_i(y)| dy`, the integral taken over `domain` (or the
/// windows of the `g_i`), the supremum over the windows of the `f_i`.
fn sup_section_l1(f: &[&FunctionExpr], g: &[&FunctionExpr], domain: Option<&SupportSet>) -> Result<f64> {
    if f.is_empty() {
        return Ok(0.0);
    }
    let mut hull = SupportSet::empty();
    let mut cuts = Vec::new();
    for e in f {
        hull = hull.union(&e.window_hull().ok_or(Error::UnwindowedLeftFactor)?);
        cuts.extend(e.breakpoints());
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let section = |x: f64| -> Result<f64> {
        let e = FunctionExpr::linear_combination(f.iter().zip(g).map(|(fi, gi)| (fi.eval(x), *gi)));
        match domain {
            Some(d) => lp_norm(&e, d, Exponent::ONE),
            None => lp_norm_windowed(&e, Exponent::ONE),
        }
    };
    let mut best: f64 = 0.0;
    for piece in hull.split_at(&cuts) {
        best = best.max(sup_on_piece(&section, piece)?);
    }
    Ok(best)
}

fn sup_on_piece<F: Fn(f64) -> Result<f64>>(h: &F, piece: Interval) -> Result<f64> {
    // Interior points only: windows overlap at the endpoints.
    let map: Box<dyn Fn(f64) -> f64> = if piece.hi.is_finite() {
        let (a, b) = (piece.lo, piece.hi);
        Box::new(move |u| a + u * (b - a))
    } else {
        let a = piece.lo;
        if a <= 0.0 {
            return Err(Error::NonIntegrable("unbounded section domain must start right of the origin".into()));
        }
        Box::new(move |u| a / (1.0 - u))
    };
    let n = SCHUR_GRID;
    let eps = 1e-9;
    let mut best = f64::NEG_INFINITY;
    let mut best_u = 0.5;
    for i in 0..=n {
        let u = eps + (1.0 - 2.0 * eps) * i as f64 / n as f64;
        let v = h(map(u))?;
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let step = (1.0 - 2.0 * eps) / n as f64;
    let (mut lo, mut hi) = ((best_u - step).max(eps), (best_u + step).min(1.0 - eps));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (h(map(c))?, h(map(d))?);
    for _ in 0..60 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = h(map(c))?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = h(map(d))?;
        }
    }
    best = best.max(fc).max(fd);
    if piece.hi.is_finite() {
        let (a, b) = (piece.lo, piece.hi);
        let off = ((b - a) * 1e-14).max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
        if 2.0 * off < b - a {
            best = best.max(h(a + off)?).max(h(b - off)?);
        }
    }
    Ok(best)
}

/// Atoms used to build random probes on `support`.
pub fn probe_dictionary(a: &SeparableOperator) -> Vec<Monomial> {
    let mut dict: Vec<Monomial> = Vec::new();
    let bounded = a.support().is_bounded();
    let push = |m: Monomial, dict: &mut Vec<Monomial>| {
        if dict.len() < DICTIONARY_SIZE && !dict.iter().any(|d| d.cmp_key(&m).is_eq()) {
            dict.push(m);
        }
    };
    for k in a.merged().terms() {
        for t in k.right.terms() {
            if bounded || (t.basis.mono.trig == Trig::One && t.basis.mono.power <= -2) {
                push(t.basis.mono, &mut dict);
            }
        }
    }
    let fill: Vec<Monomial> = if bounded {
        let (lo, hi) = a.support().hull().expect("non-empty support");
        let origin_free = lo > 0.0 || hi < 0.0;
        let mut v = vec![
            Monomial::ONE,
            Monomial { power: 1, trig: Trig::One },
            Monomial { power: 0, trig: Trig::Sin(1.0) },
            Monomial { power: 0, trig: Trig::Cos(1.0) },
            Monomial { power: 2, trig: Trig::One },
            Monomial { power: 0, trig: Trig::Sin(2.0) },
            Monomial { power: 0, trig: Trig::Cos(2.0) },
            Monomial { power: 3, trig: Trig::One },
        ];
        if origin_free {
            v.insert(2, Monomial { power: -1, trig: Trig::One });
        }
        v
    } else {
        (2..=2 + DICTIONARY_SIZE as i32).map(|k| Monomial { power: -k, trig: Trig::One }).collect()
    };
    for m in fill {
        push(m, &mut dict);
    }
    dict
}

/// Probe number `trial`: the first probes are the right factors of the
/// canonical form, the rest are random dictionary combinations with
/// coefficients uniform in `[−1, 1]` drawn from stream `trial`.
pub fn probe(a: &SeparableOperator, dict: &[Monomial], seed: u64, trial: u64) -> FunctionExpr {
    let m = a.merged();
    if (trial as usize) < m.terms().len() {
        return m.terms()[trial as usize].right.clone();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let parts: Vec<FunctionExpr> =
        dict.iter().map(|mono| FunctionExpr::atom(rng.gen_range(-1.0..=1.0), mono.power, mono.trig)).collect();
    FunctionExpr::linear_combination(parts.iter().map(|e| (1.0, e))).windowed(a.support())
}

/// `max ‖Ax‖_p / ‖x‖_p` over `trials` deterministic probes.
pub fn empirical_norm(a: &SeparableOperator, p: Exponent, trials: u64, seed: u64) -> Result<f64> {
    let dict = probe_dictionary(a);
    let mut best: f64 = 0.0;
    for trial in 0..trials {
        let x = probe(a, &dict, seed, trial);
        let nx = lp_norm_windowed(&x, p)?;
        if !(nx > 0.0) || !nx.is_finite() {
            continue;
        }
        let y = a.apply(&x)?;
        let ny = lp_norm_windowed(&y, p)?;
        best = best.max(ny / nx);
    }
    Ok(best)
}

/// Best available upper bound together with an empirical lower estimate.
pub fn norm_report(a: &SeparableOperator, p: Exponent, trials: u64, seed: u64) -> Result<NormBound> {
    let h = hoelder_bound(a, p)?;
    let mut best = h;
    if let Ok(s) = schur_bound(a, p) {
        if s.upper < best.upper {
            best = s;
        }
    }
    best.empirical_lower = Some(empirical_norm(a, p, trials, seed)?);
    Ok(best)
}
