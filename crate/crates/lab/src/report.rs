//! Versioned JSON reports and CSV tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, Settings};
use crate::error::LabError;

pub const SCHEMA: &str = "nslab.report/1";

/// One asserted invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// `|value - target| <= tol`.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check::new(name, (value - target).abs() <= tol, format!("{value} vs {target} ± {tol}"))
    }

    /// `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, value <= bound, format!("{value:e} <= {bound:e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn write<W: Write>(&self, w: W) -> Result<(), LabError> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub passed: bool,
    pub first_failure: Option<String>,
    pub settings: Value,
    pub checks: Vec<Check>,
    pub data: Value,
}

/// Result of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub table: Table,
}

impl Outcome {
    pub fn new(command: &'static str, settings: &Settings, checks: Vec<Check>, data: Value, table: Table) -> Self {
        let first_failure = checks.iter().find(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail));
        Outcome {
            report: Report {
                schema: SCHEMA,
                command,
                passed: first_failure.is_none(),
                first_failure,
                settings: serde_json::to_value(settings).unwrap_or(Value::Null),
                checks,
                data,
            },
            table,
        }
    }

    pub fn passed(&self) -> bool {
        self.report.passed
    }

    pub fn json(&self) -> Result<String, LabError> {
        let mut s = serde_json::to_string_pretty(&self.report)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes the report in `format` to `out` or stdout. With CSV and an
    /// output path, the JSON report goes next to the table with extension
    /// `.json`.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>, LabError> {
        let mut written = Vec::new();
        match (format, out) {
            (Format::Json, Some(p)) => {
                std::fs::write(p, self.json()?).map_err(|e| io_at(p, e))?;
                written.push(p.to_path_buf());
            }
            (Format::Json, None) => std::io::stdout().write_all(self.json()?.as_bytes())?,
            (Format::Csv, Some(p)) => {
                let f = std::fs::File::create(p).map_err(|e| io_at(p, e))?;
                self.table.write(f)?;
                written.push(p.to_path_buf());
                let side = if p.extension().is_some_and(|e| e == "json") {
                    p.with_extension("report.json")
                } else {
                    p.with_extension("json")
                };
                std::fs::write(&side, self.json()?).map_err(|e| io_at(&side, e))?;
                written.push(side);
            }
            (Format::Csv, None) => self.table.write(std::io::stdout().lock())?,
        }
        Ok(written)
    }
}

fn io_at(p: &Path, e: std::io::Error) -> LabError {
    LabError::Input(format!("{}: {e}", p.display()))
}

/// Shortest round-trip decimal text of a float.
pub fn num(v: f64) -> String {
    format!("{v}")
}
