//! Run settings: TOML file values, per-command sections and command-line
//! flags, merged in that order.
//!
//! ```toml
//! seed = 7
//! jobs = 2
//!
//! [neck-sim]
//! T = "4..12"
//! ladder = [2, 3]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A number, a list, or a range `a..b` / `a..b:step` (inclusive).
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    One(f64),
    List(Vec<f64>),
    Text(String),
}

impl NumberSpec {
    pub fn values(&self, what: &str) -> Result<Vec<f64>, LabError> {
        match self {
            NumberSpec::One(v) => Ok(vec![*v]),
            NumberSpec::List(v) => Ok(v.clone()),
            NumberSpec::Text(s) => parse_numbers(s, what),
        }
    }
}

/// Parses `4..12`, `4..12:0.5`, `2,3,4` or `8`.
pub fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>, LabError> {
    let bad = |msg: &str| LabError::Input(format!("--{what} `{s}`: {msg}"));
    let num = |t: &str| -> Result<f64, LabError> {
        let v: f64 = t.trim().parse().map_err(|_| bad(&format!("`{}` is not a number", t.trim())))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("values must be finite"))
        }
    };
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, st)) => (num(h)?, num(st)?),
            None => (num(rest)?, 1.0),
        };
        let lo = num(lo)?;
        if !(step > 0.0) || hi < lo {
            return Err(bad("need lo <= hi and a positive step"));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err(bad("too many values"));
        }
        return Ok((0..=n).map(|k| lo + step * k as f64).collect());
    }
    let vals = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err(bad("empty list"));
    }
    Ok(vals)
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub fixture: Option<String>,
    pub grid: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<NumberSpec>,
    pub ladder: Option<NumberSpec>,
    pub eps: Option<NumberSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub fixture: Option<String>,
    pub grid: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<NumberSpec>,
    pub ladder: Option<NumberSpec>,
    pub eps: Option<NumberSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub verify_near_symplectic: Option<Section>,
    pub verify_near_contact: Option<Section>,
    pub overtwisted: Option<Section>,
    pub neck_sim: Option<Section>,
    pub resolution_sweep: Option<Section>,
    pub period_jacobian: Option<Section>,
    pub all: Option<Section>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            LabError::Input(m) => LabError::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, LabError> {
        toml::from_str(text).map_err(|e| {
            let loc = e
                .span()
                .map(|s| {
                    let line = text[..s.start].matches('\n').count() + 1;
                    let col = s.start - text[..s.start].rfind('\n').map_or(0, |p| p + 1) + 1;
                    format!("line {line}, column {col}: ")
                })
                .unwrap_or_default();
            LabError::Input(format!("{loc}{}", e.message()))
        })
    }

    fn base(&self) -> Section {
        Section {
            fixture: self.fixture.clone(),
            grid: self.grid,
            t: self.t.clone(),
            ladder: self.ladder.clone(),
            eps: self.eps.clone(),
            out: self.out.clone(),
            format: self.format,
            seed: self.seed,
            jobs: self.jobs,
        }
    }

    fn section(&self, command: &str) -> Option<&Section> {
        match command {
            "verify-near-symplectic" => self.verify_near_symplectic.as_ref(),
            "verify-near-contact" => self.verify_near_contact.as_ref(),
            "overtwisted" => self.overtwisted.as_ref(),
            "neck-sim" => self.neck_sim.as_ref(),
            "resolution-sweep" => self.resolution_sweep.as_ref(),
            "period-jacobian" => self.period_jacobian.as_ref(),
            "all" => self.all.as_ref(),
            _ => None,
        }
    }
}

impl Section {
    /// Values in `over` replace those in `self`.
    pub fn overlay(self, over: Section) -> Section {
        Section {
            fixture: over.fixture.or(self.fixture),
            grid: over.grid.or(self.grid),
            t: over.t.or(self.t),
            ladder: over.ladder.or(self.ladder),
            eps: over.eps.or(self.eps),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            seed: over.seed.or(self.seed),
            jobs: over.jobs.or(self.jobs),
        }
    }
}

/// Fully merged settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub fixture: Option<String>,
    pub grid: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<Vec<f64>>,
    pub ladder: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Settings {
    pub fn resolve(command: &str, file: Option<&FileConfig>, flags: Section) -> Result<Self, LabError> {
        let mut merged = Section::default();
        if let Some(f) = file {
            merged = merged.overlay(f.base());
            if let Some(s) = f.section(command) {
                merged = merged.overlay(s.clone());
            }
        }
        let m = merged.overlay(flags);
        if m.grid == Some(0) {
            return Err(LabError::Input("--grid must be positive".into()));
        }
        if m.jobs == Some(0) {
            return Err(LabError::Input("--jobs must be positive".into()));
        }
        Ok(Settings {
            fixture: m.fixture,
            grid: m.grid,
            t: m.t.map(|s| s.values("T")).transpose()?,
            ladder: m.ladder.map(|s| s.values("ladder")).transpose()?,
            eps: m.eps.map(|s| s.values("eps")).transpose()?,
            out: m.out,
            format: m.format.unwrap_or_default(),
            seed: m.seed.unwrap_or(0),
            jobs: m.jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_numbers("4..12", "T").unwrap(), (4..=12).map(f64::from).collect::<Vec<_>>());
        assert_eq!(parse_numbers("1..2:0.5", "T").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_numbers("2, 3", "ladder").unwrap(), vec![2.0, 3.0]);
        assert!(parse_numbers("5..4", "T").is_err());
        assert!(parse_numbers("a", "T").is_err());
    }

    #[test]
    fn flags_override_sections_override_file() {
        let f = FileConfig::parse("seed = 3\nladder = [2, 3]\n[neck-sim]\nseed = 5\nT = \"4..6\"\n").unwrap();
        let s = Settings::resolve("neck-sim", Some(&f), Section::default()).unwrap();
        assert_eq!((s.seed, s.t.clone()), (5, Some(vec![4.0, 5.0, 6.0])));
        assert_eq!(s.ladder, Some(vec![2.0, 3.0]));
        let o = Settings::resolve("overtwisted", Some(&f), Section::default()).unwrap();
        assert_eq!(o.seed, 3);
        let flags = Section {
            seed: Some(9),
            ..Section::default()
        };
        assert_eq!(Settings::resolve("neck-sim", Some(&f), flags).unwrap().seed, 9);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let e = FileConfig::parse("seed = 1\nsede = 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(FileConfig::parse("[neck-sim]\nladdr = [2]\n").is_err());
    }
}
