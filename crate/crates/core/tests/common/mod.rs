#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sepcov::measure::Trig;
use sepcov::{FunctionExpr, SupportSet};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn iv(lo: f64, hi: f64) -> SupportSet {
    SupportSet::interval(lo, hi).unwrap()
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `∫_set u v` by Simpson on each bounded piece, split at window edges so
/// the integrand is smooth on every panel run.
pub fn oracle_pairing(u: &FunctionExpr, v: &FunctionExpr, set: &SupportSet) -> f64 {
    let mut cuts: Vec<f64> = u.breakpoints();
    cuts.extend(v.breakpoints());
    let mut total = 0.0;
    for piece in set.pieces() {
        assert!(piece.is_bounded(), "oracle handles bounded sets only");
        let mut pts = vec![piece.lo];
        pts.extend(cuts.iter().copied().filter(|&c| c > piece.lo && c < piece.hi));
        pts.push(piece.hi);
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            // Evaluate strictly inside the panel run so half-open windows
            // do not leak their edge values.
            let eps = (b - a) * 1e-12;
            let f = |t: f64| {
                let t = t.clamp(a + eps, b - eps);
                u.eval(t) * v.eval(t)
            };
            total += simpson(f, a, b, 20_000);
        }
    }
    total
}

pub fn oracle_lp(u: &FunctionExpr, set: &SupportSet, p: f64) -> f64 {
    let mut total = 0.0;
    let cuts = u.breakpoints();
    for piece in set.pieces() {
        let mut pts = vec![piece.lo];
        pts.extend(cuts.iter().copied().filter(|&c| c > piece.lo && c < piece.hi));
        pts.push(piece.hi);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let eps = (b - a) * 1e-12;
            let f = |t: f64| u.eval(t.clamp(a + eps, b - eps));
            let mut nodes = vec![a];
            nodes.extend(sign_changes(&f, a, b));
            nodes.push(b);
            for z in nodes.windows(2) {
                total += simpson(|t| f(t).abs().powf(p), z[0], z[1], 20_000);
            }
        }
    }
    total.powf(1.0 / p)
}

/// Roots of `f` on `[a, b]` located by a scan and bisection.
fn sign_changes(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
    let n = 4000;
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        let (mut lo, mut hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        if f(lo).signum() * f(hi).signum() >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() * f(mid).signum() <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs() {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

fn atom(coef: f64, pick: usize) -> FunctionExpr {
    let (k, trig) = match pick {
        0 => (0, Trig::One),
        1 => (1, Trig::One),
        2 => (2, Trig::One),
        3 => (0, Trig::Sin(1.0)),
        4 => (0, Trig::Cos(1.0)),
        5 => (0, Trig::Sin(2.5)),
        6 => (0, Trig::Cos(3.0)),
        7 => (1, Trig::Sin(2.0)),
        _ => (-1, Trig::One),
    };
    FunctionExpr::atom(coef, k, trig)
}

/// Random trig/power combinations; `1/t` only appears when `origin_free`.
pub fn expr(origin_free: bool) -> impl Strategy<Value = FunctionExpr> {
    let top: usize = if origin_free { 9 } else { 8 };
    prop::collection::vec((-2.0..2.0f64, 0..top), 1..4).prop_map(|parts| {
        let atoms: Vec<FunctionExpr> = parts.into_iter().map(|(c, k)| atom(c, k)).collect();
        FunctionExpr::linear_combination(atoms.iter().map(|e| (1.0, e)))
    })
}

/// Intervals inside `[0.1, 4.1]`.
pub fn interval() -> impl Strategy<Value = SupportSet> {
    (0.1..2.0f64, 0.3..2.0f64).prop_map(|(lo, len)| iv(lo, lo + len))
}
