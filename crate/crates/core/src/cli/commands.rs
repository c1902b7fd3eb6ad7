use crate::commrel::{verify_monomial, verify_two_sided, RelationSpec};
use crate::convlab::{parameter_limit_scan, run_sequence, ConvergenceTrace, SequenceSpec};
use crate::error::{Error, Result};
use crate::normest::{empirical_norm, hoelder_bound, norm_report, schur_bound};
use crate::sepop::SeparableOperator;

use super::config::{Command, RunConfig};
use super::output::{csv, num, short, trace_csv, trace_plot, write_atomic, Report};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Result of a command: exit status and the flat report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub report: Report,
}

const CONDITIONS: [&str; 3] = [
    "kernel identity on the common support",
    "B F(A) vanishes on the part of the support of A outside B's",
    "H(A) B vanishes on the part of the support of B outside A's",
];

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Verify => cmd_verify(cfg),
        Command::Norms => cmd_norms(cfg),
        Command::FamilyCheck => cmd_family_check(cfg),
        Command::Converge => cmd_converge(cfg),
        Command::Scan => cmd_scan(cfg),
    }
}

fn header(cfg: &RunConfig) -> Report {
    let mut r = Report::default();
    r.push("command", cfg.command.name());
    r.push("p", cfg.p);
    r.push_f64("tol", cfg.tol);
    r.push("seed", cfg.seed);
    r
}

fn finish(cfg: &RunConfig, report: Report, status: i32, files: &[(&str, String)]) -> Result<Outcome> {
    for (name, body) in files {
        write_atomic(&cfg.out, name, body)?;
    }
    write_atomic(&cfg.out, "report.txt", &report.render())?;
    Ok(Outcome { status, report })
}

fn best_bound(op: &SeparableOperator, cfg: &RunConfig) -> Result<(f64, f64)> {
    let b = norm_report(op, op.p(), cfg.probes, cfg.seed)?;
    Ok((b.upper, b.empirical_lower.unwrap_or(0.0)))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let (a, b, delta) = cfg.operators()?;
    let (h, f) = cfg.polynomials(delta);
    let rep = verify_two_sided(&RelationSpec { h, f, a: a.clone(), b: b.clone() }, cfg.tol)?;
    let (na, ea) = best_bound(&a, cfg)?;
    let (nb, eb) = best_bound(&b, cfg)?;
    let mut r = header(cfg);
    r.push("holds", rep.holds);
    for (i, v) in rep.residuals.iter().enumerate() {
        r.push_f64(&format!("residual_{}", i + 1), *v);
    }
    r.push_f64("direct_residual", rep.direct_residual);
    r.push_f64("scale", rep.scale);
    r.push("borderline", rep.borderline);
    match rep.violated() {
        Some(i) => {
            r.push("violated", i);
            r.push("violated_condition", CONDITIONS[i - 1]);
        }
        None => {
            r.push("violated", "");
            r.push("violated_condition", "");
        }
    }
    r.push_f64("norm_a_upper", na);
    r.push_f64("norm_a_empirical", ea);
    r.push_f64("norm_b_upper", nb);
    r.push_f64("norm_b_empirical", eb);
    let row = vec![
        rep.holds.to_string(),
        num(rep.residuals[0]),
        num(rep.residuals[1]),
        num(rep.residuals[2]),
        num(rep.scale),
        num(na),
        num(nb),
    ];
    let table = csv(&["holds", "residual_1", "residual_2", "residual_3", "scale", "norm_a", "norm_b"], &[row]);
    let status = if rep.holds { EXIT_HOLDS } else { EXIT_FAILS };
    finish(cfg, r, status, &[("verify.csv", table)])
}

pub fn cmd_norms(cfg: &RunConfig) -> Result<Outcome> {
    let (a, b, _) = cfg.operators()?;
    let mut r = header(cfg);
    let mut rows = Vec::new();
    let mut dominated = true;
    for (name, op) in [("a", &a), ("b", &b)] {
        let p = op.p();
        let h = hoelder_bound(op, p)?.upper;
        let s = schur_bound(op, p).ok().map(|s| s.upper);
        let e = empirical_norm(op, p, cfg.probes, cfg.seed)?;
        let best = s.map_or(h, |s| s.min(h));
        dominated &= e <= best * (1.0 + cfg.tol) + cfg.tol;
        r.push_f64(&format!("{name}_hoelder"), h);
        r.push(&format!("{name}_schur"), s.map(short).unwrap_or_default());
        r.push_f64(&format!("{name}_empirical"), e);
        rows.push(vec![name.to_string(), p.to_string(), num(h), s.map(num).unwrap_or_default(), num(e)]);
    }
    r.push("dominated", dominated);
    let table = csv(&["operator", "p", "hoelder", "schur", "empirical"], &rows);
    finish(cfg, r, if dominated { EXIT_HOLDS } else { EXIT_FAILS }, &[("norms.csv", table)])
}

pub fn cmd_family_check(cfg: &RunConfig) -> Result<Outcome> {
    let (a, b, delta) = cfg.operators()?;
    let delta = delta.ok_or_else(|| Error::Config("family-check needs [family]".into()))?;
    let rep = verify_monomial(&a, &b, delta, 2, cfg.tol)?;
    let comm = a.commutator(&b).map(|c| c.kernel_norm()).unwrap_or(Ok(f64::NAN))?;
    let mut r = header(cfg);
    r.push("family", cfg.family_id()?);
    r.push_f64("delta", delta);
    r.push("holds", rep.holds);
    let rel = rep.relative_residuals();
    for (i, v) in rel.iter().enumerate() {
        r.push_f64(&format!("relative_residual_{}", i + 1), *v);
    }
    r.push_f64("commutator_norm", comm);
    let row =
        vec![cfg.family_id()?.to_string(), rep.holds.to_string(), num(rel[0]), num(rel[1]), num(rel[2]), num(comm)];
    let table = csv(&["family", "holds", "residual_1", "residual_2", "residual_3", "commutator_norm"], &[row]);
    finish(cfg, r, if rep.holds { EXIT_HOLDS } else { EXIT_FAILS }, &[("family_check.csv", table)])
}

fn trace_report(cfg: &RunConfig, trace: &ConvergenceTrace) -> Report {
    let mut r = header(cfg);
    r.push("rows", trace.rows.len());
    r.push_f64("first", trace.first().unwrap_or(f64::NAN));
    r.push_f64("last", trace.last().unwrap_or(f64::NAN));
    r.push("slope", trace.slope.map(short).unwrap_or_default());
    r.push("converges", trace.converges(cfg.tol));
    r
}

pub fn cmd_converge(cfg: &RunConfig) -> Result<Outcome> {
    let seq = cfg.sequence.as_ref().ok_or_else(|| Error::Config("missing [sequence]".into()))?;
    let spec = SequenceSpec {
        family: cfg.family_id()?,
        params: cfg.family_params()?,
        theta_seq: seq.theta,
        sigma_seq: seq.sigma,
        n_max: seq.n_max,
        p: cfg.p,
    };
    let trace = run_sequence(&spec, cfg.seed)?;
    let r = trace_report(cfg, &trace);
    finish(cfg, r, EXIT_HOLDS, &[("converge.csv", trace_csv(&trace)), ("converge.dat", trace_plot(&trace))])
}

pub fn cmd_scan(cfg: &RunConfig) -> Result<Outcome> {
    let sc = cfg.scan.as_ref().ok_or_else(|| Error::Config("missing [scan]".into()))?;
    let trace =
        parameter_limit_scan(cfg.family_id()?, &cfg.family_params()?, sc.slot, sc.path, sc.steps, cfg.p, cfg.seed)?;
    let mut r = trace_report(cfg, &trace);
    r.push("slot", sc.slot);
    r.push("path", sc.path);
    finish(cfg, r, EXIT_HOLDS, &[("scan.csv", trace_csv(&trace)), ("scan.dat", trace_plot(&trace))])
}
