use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sepcov::commrel::{self, RelationReport, RelationSpec};
use sepcov::convlab::{self, Sequence, SequenceSpec};
use sepcov::families::{self, FamilyId, FamilyParams, LaurentFamilyParams, TrigFamilyParams};
use sepcov::measure::Trig;
use sepcov::normest;
use sepcov::{Exponent, FunctionExpr, KernelTerm, PolynomialSpec, SeparableOperator, SupportSet};

create_exception!(sepcov_py, SepcovError, PyValueError);

fn err(e: sepcov::Error) -> PyErr {
    SepcovError::new_err(e.to_string())
}

fn exponent(p: f64) -> PyResult<Exponent> {
    Exponent::new(p).map_err(err)
}

fn support(pieces: &[(f64, f64)]) -> PyResult<SupportSet> {
    SupportSet::from_pairs(pieces).map_err(err)
}

/// `(coef, power, trig, omega)` with `trig` one of `""`, `"sin"`, `"cos"`.
type Atom = (f64, i32, String, f64);

fn expr(atoms: &[Atom]) -> PyResult<FunctionExpr> {
    let mut parts = Vec::with_capacity(atoms.len());
    for (coef, power, trig, omega) in atoms {
        let trig = match trig.as_str() {
            "" | "1" | "one" => Trig::One,
            "sin" => Trig::Sin(*omega),
            "cos" => Trig::Cos(*omega),
            other => return Err(SepcovError::new_err(format!("unknown trig factor {other:?}"))),
        };
        parts.push(FunctionExpr::atom(*coef, *power, trig));
    }
    Ok(FunctionExpr::linear_combination(parts.iter().map(|e| (1.0, e))))
}

/// Operator `scalar·I + Σ left_i ⊗ right_i` on `L_p(support)`.
#[pyclass(name = "Operator", module = "sepcov_py", frozen)]
struct PyOperator(SeparableOperator);

#[pymethods]
impl PyOperator {
    /// `terms` is a list of `(left_atoms, window, right_atoms)`; `window`
    /// and `support` are lists of `(lo, hi)` pieces.
    #[new]
    #[pyo3(signature = (terms, support_pieces, p = 2.0, scalar = 0.0))]
    fn new(
        terms: Vec<(Vec<Atom>, Vec<(f64, f64)>, Vec<Atom>)>,
        support_pieces: Vec<(f64, f64)>,
        p: f64,
        scalar: f64,
    ) -> PyResult<Self> {
        let mut ks = Vec::with_capacity(terms.len());
        for (left, window, right) in &terms {
            ks.push(KernelTerm::new(expr(left)?.windowed(&support(window)?), expr(right)?));
        }
        SeparableOperator::new(scalar, ks, support(&support_pieces)?, exponent(p)?).map(Self).map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn scalar(&self) -> f64 {
        self.0.scalar()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p().value()
    }

    #[getter]
    fn support(&self) -> Vec<(f64, f64)> {
        self.0.support().pieces().iter().map(|i| (i.lo, i.hi)).collect()
    }

    fn kernel_at(&self, t: f64, s: f64) -> f64 {
        self.0.kernel_at(t, s)
    }

    /// Values of `A x` at `points` for `x` given as atoms.
    fn apply(&self, x: Vec<Atom>, points: Vec<f64>) -> PyResult<Vec<f64>> {
        let y = self.0.apply(&expr(&x)?.windowed(self.0.support())).map_err(err)?;
        Ok(points.into_iter().map(|t| y.eval(t)).collect())
    }

    fn compose(&self, other: &PyOperator) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(err)
    }

    fn power(&self, m: u32) -> PyResult<Self> {
        self.0.power(m).map(Self).map_err(err)
    }

    /// `Σ c_j A^j` for `coeffs = [c_0, c_1, ...]`.
    fn polynomial(&self, coeffs: Vec<f64>) -> PyResult<Self> {
        self.0.polynomial(&PolynomialSpec::new(coeffs)).map(Self).map_err(err)
    }

    fn commutator(&self, other: &PyOperator) -> PyResult<Self> {
        self.0.commutator(&other.0).map(Self).map_err(err)
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn kernel_norm(&self) -> PyResult<f64> {
        self.0.kernel_norm().map_err(err)
    }

    /// Relative kernel distance in `L_2` of the product domain.
    fn distance(&self, other: &PyOperator) -> PyResult<f64> {
        Ok(self.0.distance(&other.0).map_err(err)?.relative())
    }

    fn hoelder_bound(&self) -> PyResult<f64> {
        Ok(normest::hoelder_bound(&self.0, self.0.p()).map_err(err)?.upper)
    }

    fn schur_bound(&self) -> PyResult<f64> {
        Ok(normest::schur_bound(&self.0, self.0.p()).map_err(err)?.upper)
    }

    #[pyo3(signature = (trials = 100, seed = 0))]
    fn empirical_norm(&self, trials: u64, seed: u64) -> PyResult<f64> {
        normest::empirical_norm(&self.0, self.0.p(), trials, seed).map_err(err)
    }

    fn __add__(&self, other: &PyOperator) -> Self {
        Self(self.0.add(&other.0))
    }

    fn __sub__(&self, other: &PyOperator) -> Self {
        Self(self.0.sub(&other.0))
    }

    fn __mul__(&self, c: f64) -> Self {
        Self(self.0.scaled(c))
    }

    fn __rmul__(&self, c: f64) -> Self {
        Self(self.0.scaled(c))
    }

    fn __matmul__(&self, other: &PyOperator) -> PyResult<Self> {
        self.compose(other)
    }

    fn __repr__(&self) -> String {
        format!("Operator(rank={}, scalar={}, p={})", self.0.rank(), self.0.scalar(), self.0.p())
    }
}

#[pyclass(name = "RelationReport", module = "sepcov_py", frozen, get_all)]
struct PyRelationReport {
    holds: bool,
    residuals: [f64; 3],
    direct_residual: f64,
    scale: f64,
    borderline: bool,
    violated: Option<usize>,
}

impl From<RelationReport> for PyRelationReport {
    fn from(r: RelationReport) -> Self {
        PyRelationReport {
            holds: r.holds,
            residuals: r.residuals,
            direct_residual: r.direct_residual,
            scale: r.scale,
            borderline: r.borderline,
            violated: r.violated(),
        }
    }
}

#[pymethods]
impl PyRelationReport {
    fn __bool__(&self) -> bool {
        self.holds
    }

    fn __repr__(&self) -> String {
        format!("RelationReport(holds={}, residuals={:?}, violated={:?})", self.holds, self.residuals, self.violated)
    }
}

/// Checks `H(A) B = B F(A)`.
#[pyfunction]
#[pyo3(signature = (h, f, a, b, tol = commrel::DEFAULT_TOL))]
fn verify_two_sided(h: Vec<f64>, f: Vec<f64>, a: &PyOperator, b: &PyOperator, tol: f64) -> PyResult<PyRelationReport> {
    let spec = RelationSpec { h: PolynomialSpec::new(h), f: PolynomialSpec::new(f), a: a.0.clone(), b: b.0.clone() };
    commrel::verify_two_sided(&spec, tol).map(Into::into).map_err(err)
}

/// Checks `A B = B F(A)`.
#[pyfunction]
#[pyo3(signature = (a, b, f, tol = commrel::DEFAULT_TOL))]
fn verify_covariance(a: &PyOperator, b: &PyOperator, f: Vec<f64>, tol: f64) -> PyResult<PyRelationReport> {
    commrel::verify_covariance(&a.0, &b.0, &PolynomialSpec::new(f), tol).map(Into::into).map_err(err)
}

/// Checks `B A = H(A) B`.
#[pyfunction]
#[pyo3(signature = (a, b, h, tol = commrel::DEFAULT_TOL))]
fn verify_reciprocal(a: &PyOperator, b: &PyOperator, h: Vec<f64>, tol: f64) -> PyResult<PyRelationReport> {
    commrel::verify_reciprocal(&a.0, &b.0, &PolynomialSpec::new(h), tol).map(Into::into).map_err(err)
}

/// Checks `A B = δ B A^d`.
#[pyfunction]
#[pyo3(signature = (a, b, delta, d = 2, tol = commrel::DEFAULT_TOL))]
fn verify_monomial(a: &PyOperator, b: &PyOperator, delta: f64, d: usize, tol: f64) -> PyResult<PyRelationReport> {
    commrel::verify_monomial(&a.0, &b.0, delta, d, tol).map(Into::into).map_err(err)
}

#[pyfunction]
fn sigma(omega: f64, alpha1: f64, beta1: f64) -> (f64, f64) {
    families::sigma(omega, alpha1, beta1)
}

#[allow(clippy::too_many_arguments)]
fn family_params(
    id: FamilyId,
    p: Exponent,
    theta_a: Option<[f64; 4]>,
    theta_b: Option<[f64; 4]>,
    omega: Option<f64>,
    delta: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    alpha1: Option<f64>,
    beta1: Option<f64>,
    gamma_a2: Option<f64>,
    gamma_b2: Option<f64>,
) -> FamilyParams {
    if id == FamilyId::Laurent {
        let d = LaurentFamilyParams::default();
        return FamilyParams::Laurent(LaurentFamilyParams {
            gamma_a2: gamma_a2.unwrap_or(d.gamma_a2),
            gamma_b2: gamma_b2.unwrap_or(d.gamma_b2),
            alpha: alpha.unwrap_or(d.alpha),
            p,
        });
    }
    let d = TrigFamilyParams::default();
    FamilyParams::Trig(TrigFamilyParams {
        theta_a: theta_a.unwrap_or(d.theta_a),
        theta_b: theta_b.unwrap_or(d.theta_b),
        omega: omega.unwrap_or(d.omega),
        delta: delta.unwrap_or(d.delta),
        alpha: alpha.unwrap_or(d.alpha),
        beta: beta.unwrap_or(d.beta),
        alpha1: alpha1.unwrap_or(d.alpha1),
        beta1: beta1.unwrap_or(d.beta1),
    })
}

fn family_id(name: &str) -> PyResult<FamilyId> {
    name.parse().map_err(err)
}

/// Builds a named family and returns `(A, B, delta)`.
#[pyfunction]
#[pyo3(signature = (
    name, p = 2.0, theta_a = None, theta_b = None, omega = None, delta = None, alpha = None,
    beta = None, alpha1 = None, beta1 = None, gamma_a2 = None, gamma_b2 = None,
))]
#[allow(clippy::too_many_arguments)]
fn family(
    name: &str,
    p: f64,
    theta_a: Option<[f64; 4]>,
    theta_b: Option<[f64; 4]>,
    omega: Option<f64>,
    delta: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    alpha1: Option<f64>,
    beta1: Option<f64>,
    gamma_a2: Option<f64>,
    gamma_b2: Option<f64>,
) -> PyResult<(PyOperator, PyOperator, f64)> {
    let id = family_id(name)?;
    let p = exponent(p)?;
    let params = family_params(id, p, theta_a, theta_b, omega, delta, alpha, beta, alpha1, beta1, gamma_a2, gamma_b2);
    let fam = families::build(id, &params, p).map_err(err)?;
    Ok((PyOperator(fam.a), PyOperator(fam.b), fam.delta))
}

/// Runs a family sequence with default parameters and returns
/// `(rows, slope)`, each row `(n, bound_diff, bound_comm, empirical_comm)`.
#[pyfunction]
#[pyo3(signature = (name, theta = None, sigma = None, n_max = 64, p = 2.0, seed = 0))]
fn run_sequence(
    name: &str,
    theta: Option<&str>,
    sigma: Option<&str>,
    n_max: usize,
    p: f64,
    seed: u64,
) -> PyResult<(Vec<(usize, f64, f64, f64)>, Option<f64>)> {
    let id = family_id(name)?;
    let p = exponent(p)?;
    let seq = |s: Option<&str>| s.map(str::parse::<Sequence>).transpose().map_err(err);
    let params = family_params(id, p, None, None, None, None, None, None, None, None, None, None);
    let spec = SequenceSpec { family: id, params, theta_seq: seq(theta)?, sigma_seq: seq(sigma)?, n_max, p };
    let tr = convlab::run_sequence(&spec, seed).map_err(err)?;
    let rows = tr.rows.iter().map(|r| (r.n, r.bound_diff, r.bound_comm, r.empirical_comm)).collect();
    Ok((rows, tr.slope))
}

#[pymodule]
fn sepcov_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SepcovError", m.py().get_type::<SepcovError>())?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyRelationReport>()?;
    m.add_function(wrap_pyfunction!(verify_two_sided, m)?)?;
    m.add_function(wrap_pyfunction!(verify_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(verify_reciprocal, m)?)?;
    m.add_function(wrap_pyfunction!(verify_monomial, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(run_sequence, m)?)?;
    Ok(())
}
