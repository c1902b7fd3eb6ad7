//! Adaptive Gauss–Kronrod (7/15) quadrature with global bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const ABS_TOL: f64 = 1e-12;
pub const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 200_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: f64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = (fc * WGK[7]).abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * h;
    let resabs = resabs * h.abs();
    let err = ((kron - gauss) * h).abs();
    Panel { a, b, depth, value, err, resabs }
}

/// Integrates `f` over the finite interval `[a, b]` to absolute tolerance
/// [`ABS_TOL`] (or to the rounding floor of the integrand, whichever is larger).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<QuadOutcome> {
    integrate_tol(f, a, b, ABS_TOL)
}

pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadOutcome> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonIntegrable(format!("quadrature needs a finite interval, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadOutcome { value: 0.0, abs_err: 0.0 });
    }
    let first = gk15(&f, a, b, 0);
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut err = first.err;
    let mut resabs = first.resabs;
    heap.push(first);
    loop {
        let floor = 64.0 * f64::EPSILON * resabs;
        if err <= tol.max(floor) {
            break;
        }
        if !total.is_finite() {
            return Err(Error::QuadratureDidNotConverge { lo: a, hi: b, err });
        }
        let worst = heap.pop().expect("heap never empties");
        if worst.depth >= MAX_DEPTH || heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureDidNotConverge { lo: a, hi: b, err });
        }
        let m = 0.5 * (worst.a + worst.b);
        let left = gk15(&f, worst.a, m, worst.depth + 1);
        let right = gk15(&f, m, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed drift from the running updates.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().map(|p| p.value).sum();
    let abs_err = panels.iter().map(|p| p.err).sum();
    Ok(QuadOutcome { value, abs_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|t| t.powi(5) - 3.0 * t * t, -1.0, 2.0).unwrap();
        assert!((r.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|t| (7.0 * t).sin() * t, 0.0, 3.0).unwrap();
        let exact = ((7.0f64 * 3.0).sin() - 21.0 * (21.0f64).cos()) / 49.0;
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn kink_converges() {
        let r = integrate(|t: f64| (t - 0.3).abs(), 0.0, 1.0).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12);
    }

    #[test]
    fn singular_reports_failure() {
        assert!(integrate(|t: f64| 1.0 / t, 0.0, 1.0).is_err());
    }
}
