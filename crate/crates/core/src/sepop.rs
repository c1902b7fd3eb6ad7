//! Separable-kernel operators `A x(t) = λ x(t) + Σ_i a_i(t) ∫_{G_A} c_i(s) x(s) ds`.
//!
//! Left factors carry their own windows; right factors are stored already
//! multiplied by the indicator of the support `G_A`. Operations return
//! operators in canonical form: one term per distinct windowed left atom,
//! which keeps ranks bounded under composition and turns cancellation
//! between operators into exact coefficient arithmetic.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::measure::{
    lp_norm, lp_norm_windowed, pairing, pairing_windowed, BasisFn, Exponent, FunctionExpr, SupportSet,
};

/// Relative tolerance for kernel equality.
pub const KERNEL_RTOL: f64 = 1e-9;
/// Absolute tolerance for the scalar parts in operator equality.
pub const SCALAR_ATOL: f64 = 1e-12;

/// One rank-one piece `a(t) c(s)` of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTerm {
    pub left: FunctionExpr,
    pub right: FunctionExpr,
}

impl KernelTerm {
    pub fn new(left: FunctionExpr, right: FunctionExpr) -> Self {
        KernelTerm { left, right }
    }
}

/// `F(z) = f_0 + f_1 z + … + f_d z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSpec {
    coeffs: Vec<f64>,
}

impl PolynomialSpec {
    /// Coefficients in increasing degree. Trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        PolynomialSpec { coeffs }
    }

    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `δ z^d`.
    pub fn monomial(delta: f64, d: usize) -> Self {
        let mut c = vec![0.0; d + 1];
        c[d] = delta;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

impl fmt::Display for PolynomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| match j {
                0 => format!("{c}"),
                1 => format!("{c}·z"),
                _ => format!("{c}·z^{j}"),
            })
            .collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

/// Scalar and kernel discrepancies between two operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorDistance {
    pub scalar_diff: f64,
    /// `‖K_A − K_B‖` in `L_2` of the product domain.
    pub residual: f64,
    /// `max(‖K_A‖, ‖K_B‖)`.
    pub scale: f64,
}

impl OperatorDistance {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else if self.residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, rtol: f64) -> bool {
        self.scalar_diff <= SCALAR_ATOL && self.residual <= rtol * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableOperator {
    scalar: f64,
    terms: Vec<KernelTerm>,
    support: SupportSet,
    p: Exponent,
}

impl SeparableOperator {
    /// Builds and validates `scalar·I + Σ left_i ⊗ right_i` on `L_p`.
    ///
    /// Every left factor must be windowed and lie in `L_p`; every right
    /// factor must lie in `L_q(support)`. Vanishing terms are dropped.
    pub fn new(scalar: f64, terms: Vec<KernelTerm>, support: SupportSet, p: Exponent) -> Result<Self> {
        let q = p.conjugate();
        for t in &terms {
            if !t.left.is_windowed() {
                return Err(Error::UnwindowedLeftFactor);
            }
            let nl = lp_norm_windowed(&t.left, p).map_err(|e| not_in_space("left", &t.left, p, e))?;
            if !nl.is_finite() {
                return Err(Error::NotInSpace(format!("left factor {} has infinite L_{p} norm", t.left)));
            }
            let nr = lp_norm(&t.right, &support, q).map_err(|e| not_in_space("right", &t.right, q, e))?;
            if !nr.is_finite() {
                return Err(Error::NotInSpace(format!("right factor {} has infinite L_{q} norm", t.right)));
            }
        }
        let terms = terms
            .into_iter()
            .map(|t| KernelTerm { left: t.left, right: t.right.windowed(&support) })
            .filter(|t| !t.left.is_zero() && !t.right.is_zero())
            .collect();
        Ok(SeparableOperator { scalar, terms, support, p })
    }

    pub fn kernel(terms: Vec<KernelTerm>, support: SupportSet, p: Exponent) -> Result<Self> {
        Self::new(0.0, terms, support, p)
    }

    pub fn rank_one(left: FunctionExpr, right: FunctionExpr, support: SupportSet, p: Exponent) -> Result<Self> {
        Self::new(0.0, vec![KernelTerm::new(left, right)], support, p)
    }

    pub fn scalar_identity(scalar: f64, support: SupportSet, p: Exponent) -> Self {
        SeparableOperator { scalar, terms: Vec::new(), support, p }
    }

    pub fn zero(support: SupportSet, p: Exponent) -> Self {
        Self::scalar_identity(0.0, support, p)
    }

    /// Kernel operator without membership checks; right factors must
    /// already be windowed by `support`.
    pub(crate) fn from_terms_unchecked(terms: Vec<KernelTerm>, support: SupportSet, p: Exponent) -> Self {
        Self::raw(0.0, terms, support, p)
    }

    /// Unchecked constructor for results of operations on valid operators.
    fn raw(scalar: f64, terms: Vec<KernelTerm>, support: SupportSet, p: Exponent) -> Self {
        SeparableOperator { scalar, terms, support, p }
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// Same operator regarded on a different `L_p`.
    pub fn with_exponent(&self, p: Exponent) -> Self {
        SeparableOperator { p, ..self.clone() }
    }

    /// `K(t, s) = Σ a_i(t) c_i(s)`.
    pub fn kernel_at(&self, t: f64, s: f64) -> f64 {
        self.terms.iter().map(|k| k.left.eval(t) * k.right.eval(s)).sum()
    }

    /// Canonical form: one term per distinct windowed left atom, with unit
    /// coefficient, sorted. Zero rows are dropped.
    pub fn merged(&self) -> Self {
        SeparableOperator { terms: canonical_rows(&self.terms), ..self.clone() }
    }

    fn refined(&self, left_cuts: &[f64], right_cuts: &[f64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|k| KernelTerm { left: k.left.refined(left_cuts), right: k.right.refined(right_cuts) })
            .collect();
        SeparableOperator { terms, ..self.clone() }
    }

    /// Canonical form over windows refined at the operator's own breakpoints.
    pub fn normalised(&self) -> Self {
        let (lc, rc) = common_cuts(&[self]);
        self.refined(&lc, &rc).merged()
    }

    pub fn apply(&self, x: &FunctionExpr) -> Result<FunctionExpr> {
        let mut coefs = Vec::with_capacity(self.terms.len());
        for k in &self.terms {
            coefs.push(pairing(&k.right, x, &self.support)?.value);
        }
        let parts =
            std::iter::once((self.scalar, x)).chain(coefs.iter().copied().zip(self.terms.iter().map(|k| &k.left)));
        Ok(FunctionExpr::linear_combination(parts))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SeparableOperator) -> Result<Self> {
        let a = self.merged();
        let b = other.merged();
        let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
        for ka in &a.terms {
            let mut w = Vec::with_capacity(b.terms.len());
            for kb in &b.terms {
                w.push(pairing(&ka.right, &kb.left, &a.support)?.value);
            }
            let right = FunctionExpr::linear_combination(w.iter().copied().zip(b.terms.iter().map(|k| &k.right)));
            terms.push(KernelTerm { left: ka.left.clone(), right });
        }
        if b.scalar != 0.0 {
            terms.extend(a.terms.iter().map(|k| KernelTerm { left: k.left.clone(), right: k.right.scaled(b.scalar) }));
        }
        if a.scalar != 0.0 {
            terms.extend(b.terms.iter().map(|k| KernelTerm { left: k.left.clone(), right: k.right.scaled(a.scalar) }));
        }
        let support = joint_support(&a.support, &b.support);
        Ok(Self::raw(a.scalar * b.scalar, canonical_rows(&terms), support, a.p))
    }

    /// Gram matrix `G[i][j] = Q_{G_A}(a_j, c_i)` of the canonical form.
    pub fn gram(&self) -> Result<DMatrix<f64>> {
        let l = self.terms.len();
        let mut g = DMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                g[(i, j)] = pairing(&self.terms[j].left, &self.terms[i].right, &self.support)?.value;
            }
        }
        Ok(g)
    }

    /// `A^m` for a pure kernel operator through the Gram matrix.
    pub fn power(&self, m: u32) -> Result<Self> {
        if self.scalar != 0.0 {
            return Err(Error::ScalarPart(self.scalar));
        }
        if m == 0 {
            return Ok(Self::scalar_identity(1.0, self.support.clone(), self.p));
        }
        let a = self.merged();
        let g = a.gram()?;
        let w = matrix_power(&g, m - 1);
        Ok(a.with_coefficients(0.0, &w))
    }

    /// `F(A) = f_0 I + Σ_{j≥1} f_j A^j`.
    pub fn polynomial(&self, f: &PolynomialSpec) -> Result<Self> {
        if self.scalar != 0.0 {
            // Horner with full compositions.
            let mut acc =
                Self::scalar_identity(f.coeffs().last().copied().unwrap_or(0.0), self.support.clone(), self.p);
            for c in f.coeffs().iter().rev().skip(1) {
                acc = acc.compose(self)?;
                acc.scalar += c;
            }
            return Ok(acc);
        }
        let a = self.merged();
        let g = a.gram()?;
        Ok(a.with_coefficients(f.coeff(0), &polynomial_weights(f, &g)))
    }

    /// Terms `a_i ⊗ Σ_j w[i][j] c_j` over the current (canonical) terms.
    fn with_coefficients(&self, scalar: f64, w: &DMatrix<f64>) -> Self {
        let terms: Vec<KernelTerm> = (0..self.terms.len())
            .map(|i| KernelTerm {
                left: self.terms[i].left.clone(),
                right: FunctionExpr::linear_combination(
                    (0..self.terms.len()).map(|j| (w[(i, j)], &self.terms[j].right)),
                ),
            })
            .collect();
        Self::raw(scalar, canonical_rows(&terms), self.support.clone(), self.p)
    }

    /// `Σ c_k A_k` over operators on the same `L_p`.
    pub fn linear_combination(parts: &[(f64, &SeparableOperator)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidArgument("empty linear combination".into()));
        };
        let mut support = first.support.clone();
        let mut scalar = 0.0;
        let mut terms = Vec::new();
        for (c, op) in parts {
            if op.support != support {
                support = support.union(&op.support);
            }
            scalar += c * op.scalar;
            terms.extend(op.terms.iter().map(|k| KernelTerm { left: k.left.clone(), right: k.right.scaled(*c) }));
        }
        Ok(Self::raw(scalar, canonical_rows(&terms), support, first.p))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::linear_combination(&[(c, self)]).expect("non-empty")
    }

    pub fn add(&self, other: &SeparableOperator) -> Self {
        Self::linear_combination(&[(1.0, self), (1.0, other)]).expect("non-empty")
    }

    pub fn sub(&self, other: &SeparableOperator) -> Self {
        Self::linear_combination(&[(1.0, self), (-1.0, other)]).expect("non-empty")
    }

    /// `[A, B] = AB − BA`; both operators must share a support.
    pub fn commutator(&self, other: &SeparableOperator) -> Result<Self> {
        if self.support != other.support {
            return Err(Error::SupportMismatch);
        }
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        Ok(ab.kernel_difference(&ba))
    }

    /// The adjoint on `L_q`: `K*(t, s) = K(s, t)`.
    pub fn adjoint(&self) -> Self {
        let mut support = SupportSet::empty();
        for k in &self.terms {
            if let Some(w) = k.left.window_hull() {
                support = support.union(&w);
            }
        }
        if self.terms.is_empty() {
            support = self.support.clone();
        }
        let terms: Vec<KernelTerm> =
            self.terms.iter().map(|k| KernelTerm { left: k.right.clone(), right: k.left.clone() }).collect();
        Self::raw(self.scalar, canonical_rows(&terms), support, self.p.conjugate())
    }

    /// `∫∫ K_A K_B` over the product domain.
    pub fn kernel_inner(&self, other: &SeparableOperator) -> Result<f64> {
        let mut acc = 0.0;
        for x in &self.terms {
            for y in &other.terms {
                let l = pairing_windowed(&x.left, &y.left)?.value;
                if l == 0.0 {
                    continue;
                }
                acc += l * pairing_windowed(&x.right, &y.right)?.value;
            }
        }
        Ok(acc)
    }

    /// `‖K‖` in `L_2` of the product domain.
    pub fn kernel_norm(&self) -> Result<f64> {
        let m = self.merged();
        Ok(m.kernel_inner(&m)?.max(0.0).sqrt())
    }

    /// Kernel of `self − other` with windows refined to a common partition,
    /// so that coinciding pieces cancel exactly.
    pub fn kernel_difference(&self, other: &SeparableOperator) -> Self {
        let (lc, rc) = common_cuts(&[self, other]);
        let a = self.refined(&lc, &rc);
        let b = other.refined(&lc, &rc);
        a.sub(&b)
    }

    pub fn distance(&self, other: &SeparableOperator) -> Result<OperatorDistance> {
        let d = self.kernel_difference(other);
        Ok(OperatorDistance {
            scalar_diff: (self.scalar - other.scalar).abs(),
            residual: d.kernel_norm()?,
            scale: self.kernel_norm()?.max(other.kernel_norm()?),
        })
    }

    /// Operator equality: scalars within [`SCALAR_ATOL`] and kernels within
    /// [`KERNEL_RTOL`] relative to the larger kernel norm.
    pub fn approx_eq(&self, other: &SeparableOperator) -> Result<bool> {
        Ok(self.distance(other)?.within(KERNEL_RTOL))
    }

    /// Restricts the integration variable to `set` (kernel only).
    pub fn restrict_right(&self, set: &SupportSet) -> Self {
        let terms: Vec<KernelTerm> =
            self.terms.iter().map(|k| KernelTerm { left: k.left.clone(), right: k.right.windowed(set) }).collect();
        Self::raw(0.0, canonical_rows(&terms), self.support.intersect(set), self.p)
    }
}

impl fmt::Display for SeparableOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·I", self.scalar)?;
        for k in &self.terms {
            write!(f, " + ({}) ⊗ ({})", k.left, k.right)?;
        }
        write!(f, " on L_{}, G = {}", self.p, self.support)
    }
}

fn not_in_space(side: &str, e: &FunctionExpr, p: Exponent, err: Error) -> Error {
    Error::NotInSpace(format!("{side} factor {e} is not in L_{p}: {err}"))
}

fn joint_support(a: &SupportSet, b: &SupportSet) -> SupportSet {
    if a == b {
        a.clone()
    } else {
        a.union(b)
    }
}

fn common_cuts(ops: &[&SeparableOperator]) -> (Vec<f64>, Vec<f64>) {
    let mut lc = Vec::new();
    let mut rc = Vec::new();
    for op in ops {
        for k in &op.terms {
            lc.extend(k.left.breakpoints());
            rc.extend(k.right.breakpoints());
        }
    }
    for v in [&mut lc, &mut rc] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    (lc, rc)
}

/// Regroups terms by windowed left atom: `Σ_i (Σ_p α_ip φ_p) ⊗ c_i` becomes
/// `Σ_p φ_p ⊗ (Σ_i α_ip c_i)`.
fn canonical_rows(terms: &[KernelTerm]) -> Vec<KernelTerm> {
    let mut rows: Vec<(BasisFn, f64, usize)> = Vec::new();
    for (i, k) in terms.iter().enumerate() {
        for t in k.left.terms() {
            rows.push((t.basis.clone(), t.coef, i));
        }
    }
    rows.sort_by(|x, y| x.0.cmp_key(&y.0).then(x.2.cmp(&y.2)));
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let mut end = start + 1;
        while end < rows.len() && rows[end].0.cmp_key(&rows[start].0) == Ordering::Equal {
            end += 1;
        }
        let right = FunctionExpr::linear_combination(rows[start..end].iter().map(|(_, c, i)| (*c, &terms[*i].right)));
        if !right.is_zero() {
            out.push(KernelTerm { left: FunctionExpr::basis(rows[start].0.clone()), right });
        }
        start = end;
    }
    out
}

pub(crate) fn matrix_power(g: &DMatrix<f64>, m: u32) -> DMatrix<f64> {
    let mut out = DMatrix::identity(g.nrows(), g.ncols());
    for _ in 0..m {
        out = &out * g;
    }
    out
}

/// `W = Σ_{j≥1} f_j G^{j−1}`.
pub(crate) fn polynomial_weights(f: &PolynomialSpec, g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let mut w = DMatrix::zeros(n, n);
    let mut pow = DMatrix::identity(n, n);
    for j in 1..=f.degree() {
        if j > 1 {
            pow = &pow * g;
        }
        w += &pow * f.coeff(j);
    }
    w
}
