use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::support::{meet, SupportSet};

/// Trigonometric factor of an atom. Frequencies are kept strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trig {
    One,
    Sin(f64),
    Cos(f64),
}

impl Trig {
    fn rank(self) -> u8 {
        match self {
            Trig::One => 0,
            Trig::Sin(_) => 1,
            Trig::Cos(_) => 2,
        }
    }

    fn freq(self) -> f64 {
        match self {
            Trig::One => 0.0,
            Trig::Sin(w) | Trig::Cos(w) => w,
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Trig::One => 1.0,
            Trig::Sin(w) => (w * t).sin(),
            Trig::Cos(w) => (w * t).cos(),
        }
    }
}

/// `t^power · trig(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub power: i32,
    pub trig: Trig,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { power: 0, trig: Trig::One };

    pub fn eval(&self, t: f64) -> f64 {
        let base = if self.power == 0 { 1.0 } else { t.powi(self.power) };
        base * self.trig.eval(t)
    }

    /// Normalises `coef · t^power · trig` so that frequencies are positive.
    /// Returns `None` when the atom vanishes identically.
    pub(crate) fn normalised(coef: f64, power: i32, trig: Trig) -> Option<(f64, Monomial)> {
        let (c, trig) = match trig {
            Trig::One => (coef, Trig::One),
            Trig::Sin(w) if w == 0.0 => return None,
            Trig::Sin(w) if w < 0.0 => (-coef, Trig::Sin(-w)),
            Trig::Cos(w) if w == 0.0 => (coef, Trig::One),
            Trig::Cos(w) if w < 0.0 => (coef, Trig::Cos(-w)),
            other => (coef, other),
        };
        Some((c, Monomial { power, trig }))
    }

    /// Product of two atoms expanded by the product-to-sum identities.
    pub(crate) fn product(self, other: Monomial) -> Vec<(f64, Monomial)> {
        let k = self.power + other.power;
        let (x, y) =
            if self.trig.rank() <= other.trig.rank() { (self.trig, other.trig) } else { (other.trig, self.trig) };
        let raw: Vec<(f64, Trig)> = match (x, y) {
            (Trig::One, t) => vec![(1.0, t)],
            (Trig::Sin(a), Trig::Sin(b)) => vec![(0.5, Trig::Cos(a - b)), (-0.5, Trig::Cos(a + b))],
            (Trig::Cos(a), Trig::Cos(b)) => vec![(0.5, Trig::Cos(a - b)), (0.5, Trig::Cos(a + b))],
            (Trig::Sin(a), Trig::Cos(b)) => vec![(0.5, Trig::Sin(a + b)), (0.5, Trig::Sin(a - b))],
            _ => unreachable!("ordered by rank"),
        };
        raw.into_iter().filter_map(|(c, t)| Monomial::normalised(c, k, t)).collect()
    }

    pub(crate) fn cmp_key(&self, other: &Monomial) -> Ordering {
        self.power
            .cmp(&other.power)
            .then(self.trig.rank().cmp(&other.trig.rank()))
            .then(self.trig.freq().total_cmp(&other.trig.freq()))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trig = match self.trig {
            Trig::One => None,
            Trig::Sin(w) => Some(format!("sin({w}t)")),
            Trig::Cos(w) => Some(format!("cos({w}t)")),
        };
        match (self.power, trig) {
            (0, None) => write!(f, "1"),
            (0, Some(s)) => write!(f, "{s}"),
            (1, None) => write!(f, "t"),
            (k, None) => write!(f, "t^{k}"),
            (1, Some(s)) => write!(f, "t·{s}"),
            (k, Some(s)) => write!(f, "t^{k}·{s}"),
        }
    }
}

/// An atom restricted to an optional window (`None` means the whole line).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFn {
    pub mono: Monomial,
    pub window: Option<SupportSet>,
}

impl BasisFn {
    pub fn eval(&self, t: f64) -> f64 {
        match &self.window {
            Some(w) if !w.contains(t) => 0.0,
            _ => self.mono.eval(t),
        }
    }

    pub(crate) fn cmp_key(&self, other: &BasisFn) -> Ordering {
        let w = match (&self.window, &other.window) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp_key(b),
        };
        w.then_with(|| self.mono.cmp_key(&other.mono))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub basis: BasisFn,
}

/// A finite linear combination of windowed atoms `t^k`, `sin(ωt)`, `cos(ωt)`
/// and their products.
///
/// Expressions are always kept in canonical form: terms are sorted by basis
/// function, like bases are merged and exact zeros are dropped. Two
/// expressions built from the same atoms therefore compare term by term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FunctionExpr {
    terms: Vec<Term>,
}

impl FunctionExpr {
    pub fn zero() -> Self {
        FunctionExpr::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::atom(c, 0, Trig::One)
    }

    pub fn sin(omega: f64) -> Self {
        Self::atom(1.0, 0, Trig::Sin(omega))
    }

    pub fn cos(omega: f64) -> Self {
        Self::atom(1.0, 0, Trig::Cos(omega))
    }

    pub fn power(k: i32) -> Self {
        Self::atom(1.0, k, Trig::One)
    }

    /// `coef · t^power · trig(t)` on the whole line.
    pub fn atom(coef: f64, power: i32, trig: Trig) -> Self {
        let terms = Monomial::normalised(coef, power, trig)
            .map(|(c, mono)| Term { coef: c, basis: BasisFn { mono, window: None } })
            .into_iter()
            .collect();
        Self::from_terms(terms)
    }

    pub fn basis(b: BasisFn) -> Self {
        Self::from_terms(vec![Term { coef: 1.0, basis: b }])
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut e = FunctionExpr { terms };
        e.canonicalise();
        e
    }

    fn canonicalise(&mut self) {
        self.terms.retain(|t| t.coef != 0.0 && !t.basis.window.as_ref().is_some_and(SupportSet::is_empty));
        self.terms.sort_by(|a, b| a.basis.cmp_key(&b.basis));
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match out.last_mut() {
                Some(last) if last.basis.cmp_key(&t.basis) == Ordering::Equal => last.coef += t.coef,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coef != 0.0);
        self.terms = out;
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term carries a window.
    pub fn is_windowed(&self) -> bool {
        self.terms.iter().all(|t| t.basis.window.is_some())
    }

    /// Union of the term windows, or `None` if some term is unwindowed.
    pub fn window_hull(&self) -> Option<SupportSet> {
        let mut acc = SupportSet::empty();
        for t in &self.terms {
            acc = acc.union(t.basis.window.as_ref()?);
        }
        Some(acc)
    }

    /// Sorted finite endpoints of all term windows.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.terms.iter().filter_map(|t| t.basis.window.as_ref()).flat_map(SupportSet::breakpoints).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|x| x.coef * x.basis.eval(t)).sum()
    }

    /// Multiplies by the indicator of `set`.
    pub fn windowed(&self, set: &SupportSet) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coef: t.coef,
                basis: BasisFn { mono: t.basis.mono, window: meet(t.basis.window.as_ref(), Some(set)) },
            })
            .collect();
        Self::from_terms(terms)
    }

    /// Rewrites every window as a union of elementary intervals cut at
    /// `cuts` (sorted). The function is unchanged; only its representation
    /// is refined so that pieces shared with other expressions merge.
    pub fn refined(&self, cuts: &[f64]) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match &t.basis.window {
                None => terms.push(t.clone()),
                Some(w) => {
                    for piece in w.split_at(cuts) {
                        let window = SupportSet::from_intervals(vec![piece]).expect("valid piece");
                        terms.push(Term { coef: t.coef, basis: BasisFn { mono: t.basis.mono, window: Some(window) } });
                    }
                }
            }
        }
        Self::from_terms(terms)
    }

    pub fn scaled(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|t| Term { coef: c * t.coef, basis: t.basis.clone() }).collect();
        Self::from_terms(terms)
    }

    /// `Σ c_i · e_i`, merged in one pass.
    pub fn linear_combination<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a FunctionExpr)>,
    {
        let mut terms = Vec::new();
        for (c, e) in parts {
            if c == 0.0 {
                continue;
            }
            terms.extend(e.terms.iter().map(|t| Term { coef: c * t.coef, basis: t.basis.clone() }));
        }
        Self::from_terms(terms)
    }

    /// Pointwise product.
    pub fn product(&self, other: &FunctionExpr) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                let window = meet(x.basis.window.as_ref(), y.basis.window.as_ref());
                if window.as_ref().is_some_and(SupportSet::is_empty) {
                    continue;
                }
                for (c, mono) in x.basis.mono.product(y.basis.mono) {
                    terms.push(Term { coef: c * x.coef * y.coef, basis: BasisFn { mono, window: window.clone() } });
                }
            }
        }
        Self::from_terms(terms)
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coef.abs()))
    }

    pub(crate) fn cmp_key(&self, other: &FunctionExpr) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = a.basis.cmp_key(&b.basis).then(a.coef.total_cmp(&b.coef));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl From<BasisFn> for FunctionExpr {
    fn from(b: BasisFn) -> Self {
        FunctionExpr::basis(b)
    }
}

impl Add for &FunctionExpr {
    type Output = FunctionExpr;
    fn add(self, rhs: &FunctionExpr) -> FunctionExpr {
        FunctionExpr::linear_combination([(1.0, self), (1.0, rhs)])
    }
}

impl Sub for &FunctionExpr {
    type Output = FunctionExpr;
    fn sub(self, rhs: &FunctionExpr) -> FunctionExpr {
        FunctionExpr::linear_combination([(1.0, self), (-1.0, rhs)])
    }
}

impl Mul for &FunctionExpr {
    type Output = FunctionExpr;
    fn mul(self, rhs: &FunctionExpr) -> FunctionExpr {
        self.product(rhs)
    }
}

impl Mul<&FunctionExpr> for f64 {
    type Output = FunctionExpr;
    fn mul(self, rhs: &FunctionExpr) -> FunctionExpr {
        rhs.scaled(self)
    }
}

impl Neg for &FunctionExpr {
    type Output = FunctionExpr;
    fn neg(self) -> FunctionExpr {
        self.scaled(-1.0)
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}", t.coef, t.basis.mono)?;
            if let Some(w) = &t.basis.window {
                write!(f, "·1{w}")?;
            }
        }
        Ok(())
    }
}
