//! Command-line front end.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::measure::Exponent;

pub use commands::{execute, Outcome, EXIT_CONFIG, EXIT_FAILS, EXIT_HOLDS};
pub use config::{
    AtomConfig, Command, FamilyConfig, OperatorsConfig, RunConfig, ScanConfig, SequenceConfig, TermConfig, TrigKind,
};
pub use output::{num, trace_csv, trace_plot, write_atomic, Report};

/// Verify commutation relations between separable integral operators.
#[derive(Debug, Parser)]
#[command(name = "sepcov", version)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Exponent: 1, 2, ... or inf.
    #[arg(long)]
    pub p: Option<Exponent>,
}

impl Cli {
    /// Loads the config and applies flag overrides.
    pub fn load(&self) -> crate::Result<RunConfig> {
        let text = std::fs::read_to_string(&self.config)?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| crate::Error::Config(e.to_string()))?;
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(p) = self.p {
            cfg.p = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the tool and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_HOLDS };
        }
    };
    let cfg = match cli.load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match execute(&cfg) {
        Ok(out) => {
            print!("{}", out.report.render());
            if out.status == EXIT_FAILS {
                if let Some(c) = out.report.get("violated_condition").filter(|c| !c.is_empty()) {
                    eprintln!("relation fails: condition {} ({c})", out.report.get("violated").unwrap_or("?"));
                }
            }
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
