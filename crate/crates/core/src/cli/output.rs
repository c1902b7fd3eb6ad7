//! Report, CSV and plot-data emission. Files are written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::convlab::ConvergenceTrace;
use crate::error::Result;

/// Ordered `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report(pub Vec<(String, String)>);

impl Report {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, short(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Shortest round-trip form, scientific outside `[1e-4, 1e15)`.
pub fn short(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Fixed 17-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn trace_csv(trace: &ConvergenceTrace) -> String {
    let rows: Vec<Vec<String>> = trace
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.bound_diff), num(r.bound_comm), num(r.empirical_comm)])
        .collect();
    csv(&["n", "bound_diff", "bound_comm", "empirical_comm"], &rows)
}

/// Whitespace-separated `n bound_comm` columns with a `#` header line.
pub fn trace_plot(trace: &ConvergenceTrace) -> String {
    let mut out = String::from("# n bound_comm\n");
    for r in &trace.rows {
        let _ = writeln!(out, "{} {}", r.n, num(r.bound_comm));
    }
    out
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}
