//! TOML run configuration.
//!
//! ```toml
//! command = "verify"        # verify | norms | family-check | converge | scan
//! p = "2"                   # 1, 2, ... or "inf"
//! tol = 1e-9
//! seed = 0
//! out = "out"
//! h = [0.0, 1.0]            # optional, coefficients from the constant up
//! f = [0.0, 0.0, 1.0]
//!
//! [family]                  # either a family reference ...
//! id = "T4"
//! theta_a = [1.0, 1.0, 1.0, 1.0]
//!
//! [operators]               # ... or inline kernels
//! support = [[0.0, 1.0]]
//! [[operators.a]]
//! left = [{ coef = 1.0, trig = "sin", omega = 2.0 }]
//! window = [[0.0, 1.0]]
//! right = [{ power = 1 }]
//!
//! [sequence]                # converge
//! theta = "1/n"
//! n_max = 64
//!
//! [scan]                    # scan
//! slot = "theta_b3"
//! path = "1/n"
//! steps = 32
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::convlab::Sequence;
use crate::error::{Error, Result};
use crate::families::{self, Family, FamilyId, FamilyParams, LaurentFamilyParams, Slot, TrigFamilyParams};
use crate::measure::{Exponent, FunctionExpr, SupportSet, Trig};
use crate::sepop::{KernelTerm, PolynomialSpec, SeparableOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Norms,
    FamilyCheck,
    Converge,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Norms => "norms",
            Command::FamilyCheck => "family-check",
            Command::Converge => "converge",
            Command::Scan => "scan",
        }
    }
}

fn default_p() -> Exponent {
    Exponent::TWO
}

fn default_tol() -> f64 {
    1e-9
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_probes() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_p")]
    pub p: Exponent,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Probes for empirical norms.
    #[serde(default = "default_probes")]
    pub probes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<OperatorsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub id: Option<FamilyId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_a: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_b: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_a2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_b2: Option<f64>,
    /// Adds `ε cos(ωt) cos(ωs)` to `B` for `s ∈ [β₁, β₁ + 1]`, outside the
    /// support of `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    #[default]
    One,
    Sin,
    Cos,
}

fn one() -> f64 {
    1.0
}

/// `coef · t^power · trig(omega t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default = "one")]
    pub coef: f64,
    #[serde(default)]
    pub power: i32,
    #[serde(default)]
    pub trig: TrigKind,
    #[serde(default = "one")]
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub left: Vec<AtomConfig>,
    /// Window of the left factor, as a list of `[lo, hi]` pieces.
    pub window: Vec<[f64; 2]>,
    pub right: Vec<AtomConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorsConfig {
    /// Support of `A`, and of `B` unless `support_b` is given.
    pub support: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_b: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub a: Vec<TermConfig>,
    #[serde(default)]
    pub b: Vec<TermConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Sequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Sequence>,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub slot: Slot,
    pub path: Sequence,
    pub steps: usize,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(config_err)
    }

    /// Schema checks that do not need any numerics.
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(config_err(format!("tol must be positive, got {}", self.tol)));
        }
        if self.family.is_some() && self.operators.is_some() {
            return Err(config_err("give either [family] or [operators], not both"));
        }
        let needs_family = matches!(self.command, Command::FamilyCheck | Command::Converge | Command::Scan);
        if needs_family && self.family.as_ref().and_then(|f| f.id).is_none() {
            return Err(config_err(format!("{} needs [family] with an id", self.command.name())));
        }
        if !needs_family && self.family.is_none() && self.operators.is_none() {
            return Err(config_err(format!("{} needs [family] or [operators]", self.command.name())));
        }
        match (self.command, &self.sequence, &self.scan) {
            (Command::Converge, None, _) => return Err(config_err("converge needs [sequence]")),
            (Command::Converge, Some(s), _) if s.n_max == 0 => return Err(config_err("n_max must be positive")),
            (Command::Scan, _, None) => return Err(config_err("scan needs [scan]")),
            (Command::Scan, _, Some(s)) if s.steps == 0 => return Err(config_err("steps must be positive")),
            _ => {}
        }
        Ok(())
    }

    pub fn family_id(&self) -> Result<FamilyId> {
        self.family.as_ref().and_then(|f| f.id).ok_or_else(|| config_err("[family] needs an id"))
    }

    pub fn family_params(&self) -> Result<FamilyParams> {
        let fc = self.family.as_ref().ok_or_else(|| config_err("missing [family]"))?;
        let id = self.family_id()?;
        let trig_keys = [fc.theta_a.is_some(), fc.theta_b.is_some(), fc.omega.is_some(), fc.delta.is_some()];
        let trig_keys = trig_keys.into_iter().chain([fc.beta.is_some(), fc.alpha1.is_some(), fc.beta1.is_some()]);
        if id == FamilyId::Laurent {
            if trig_keys.into_iter().any(|b| b) {
                return Err(config_err("laurent takes gamma_a2, gamma_b2 and alpha only"));
            }
            let d = LaurentFamilyParams::default();
            return Ok(FamilyParams::Laurent(LaurentFamilyParams {
                gamma_a2: fc.gamma_a2.unwrap_or(d.gamma_a2),
                gamma_b2: fc.gamma_b2.unwrap_or(d.gamma_b2),
                alpha: fc.alpha.unwrap_or(d.alpha),
                p: self.p,
            }));
        }
        if fc.gamma_a2.is_some() || fc.gamma_b2.is_some() {
            return Err(config_err(format!("{id} does not take gamma parameters")));
        }
        let d = TrigFamilyParams::default();
        Ok(FamilyParams::Trig(TrigFamilyParams {
            theta_a: fc.theta_a.unwrap_or(d.theta_a),
            theta_b: fc.theta_b.unwrap_or(d.theta_b),
            omega: fc.omega.unwrap_or(d.omega),
            delta: fc.delta.unwrap_or(d.delta),
            alpha: fc.alpha.unwrap_or(d.alpha),
            beta: fc.beta.unwrap_or(d.beta),
            alpha1: fc.alpha1.unwrap_or(d.alpha1),
            beta1: fc.beta1.unwrap_or(d.beta1),
        }))
    }

    pub fn build_family(&self) -> Result<Family> {
        families::build(self.family_id()?, &self.family_params()?, self.p)
    }

    /// `A` and `B` from either source, with the optional perturbation of `B`.
    pub fn operators(&self) -> Result<(SeparableOperator, SeparableOperator, Option<f64>)> {
        if let Some(ops) = &self.operators {
            let ga = support(&ops.support)?;
            let gb = match &ops.support_b {
                Some(s) => support(s)?,
                None => ga.clone(),
            };
            let a = SeparableOperator::kernel(terms(&ops.a)?, ga, self.p)?;
            let b = SeparableOperator::kernel(terms(&ops.b)?, gb, self.p)?;
            return Ok((a, b, None));
        }
        let fam = self.build_family()?;
        let eps = self.family.as_ref().and_then(|f| f.perturb).unwrap_or(0.0);
        if eps == 0.0 {
            return Ok((fam.a, fam.b, Some(fam.delta)));
        }
        let FamilyParams::Trig(t) = self.family_params()? else {
            return Err(config_err("perturb applies to trigonometric families only"));
        };
        let extended = SupportSet::interval(t.alpha1, t.beta1 + 1.0)?;
        let window = SupportSet::interval(t.alpha, t.beta)?;
        let beyond = SupportSet::interval(t.beta1, t.beta1 + 1.0)?;
        let mut ks = fam.b.terms().to_vec();
        ks.push(KernelTerm::new(
            FunctionExpr::cos(t.omega).windowed(&window),
            FunctionExpr::cos(t.omega).scaled(eps).windowed(&beyond),
        ));
        let b = SeparableOperator::kernel(ks, extended, self.p)?;
        Ok((fam.a, b, Some(fam.delta)))
    }

    /// `(H, F)`: given coefficients, else `z` and `δ z²` for a family, else
    /// `z` and `z`.
    pub fn polynomials(&self, delta: Option<f64>) -> (PolynomialSpec, PolynomialSpec) {
        let h = self.h.clone().map(PolynomialSpec::new).unwrap_or_else(PolynomialSpec::identity);
        let f = match (&self.f, delta) {
            (Some(c), _) => PolynomialSpec::new(c.clone()),
            (None, Some(d)) => PolynomialSpec::monomial(d, 2),
            (None, None) => PolynomialSpec::identity(),
        };
        (h, f)
    }
}

fn support(pieces: &[[f64; 2]]) -> Result<SupportSet> {
    SupportSet::from_pairs(&pieces.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>())
}

fn atoms(list: &[AtomConfig]) -> FunctionExpr {
    let parts: Vec<FunctionExpr> = list
        .iter()
        .map(|a| {
            let trig = match a.trig {
                TrigKind::One => Trig::One,
                TrigKind::Sin => Trig::Sin(a.omega),
                TrigKind::Cos => Trig::Cos(a.omega),
            };
            FunctionExpr::atom(a.coef, a.power, trig)
        })
        .collect();
    FunctionExpr::linear_combination(parts.iter().map(|e| (1.0, e)))
}

fn terms(list: &[TermConfig]) -> Result<Vec<KernelTerm>> {
    list.iter().map(|t| Ok(KernelTerm::new(atoms(&t.left).windowed(&support(&t.window)?), atoms(&t.right)))).collect()
}
