//! Named fixtures and fixture files.

use std::path::Path;

use nslab_core::contact::saddle_differential;
use nslab_core::fixtures as fx;
use nslab_core::nearsym::build_model_form;
use nslab_core::neck::{CapOperator, ModeBasis};
use nslab_core::{PolyForm, PolyScalar, Rational};

use crate::error::LabError;
use crate::format::parse_form;

pub const NEAR_SYMPLECTIC: &[&str] = &["model-eps0", "model-eps1", "model-eps<q>", "model-cutoff"];
pub const NEAR_CONTACT: &[&str] = &["all", "standard-contact", "twist-minus", "twist-plus", "twist-cubic", "saddle"];
pub const OVERTWISTED: &[&str] = &["overtwisted", "overtwisted-uncompensated"];
pub const CAPS: &[&str] = &["generic-caps", "identity-caps"];
pub const RESOLUTION: &[&str] = &["model-p0.7", "model-p<x>"];
pub const FAMILIES: &[&str] = &["generic", "identity", "redundant", "<family>:<n>"];

fn unknown(name: &str, known: &[&str]) -> LabError {
    LabError::Input(format!("unknown fixture `{name}`; known: {}, or a fixture file path", known.join(", ")))
}

/// Reads a fixture file and checks its shape.
pub fn load_form(path: &Path, dim: usize, degree: usize) -> Result<PolyForm, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Input(format!("{}: {e}", path.display())))?;
    let w = parse_form(&text).map_err(|source| LabError::Fixture {
        path: path.display().to_string(),
        source,
    })?;
    if w.dim() != dim || w.degree() != degree {
        return Err(LabError::Input(format!(
            "{}: expected a {degree}-form on R^{dim}, found a {}-form on R^{}",
            path.display(),
            w.degree(),
            w.dim()
        )));
    }
    Ok(w)
}

fn is_path(name: &str) -> bool {
    Path::new(name).is_file()
}

pub enum NearSymplecticFixture {
    Form { name: String, form: PolyForm, model_eps: Option<Rational> },
    Cutoff,
}

pub fn near_symplectic(name: &str) -> Result<NearSymplecticFixture, LabError> {
    if name == "model-cutoff" {
        return Ok(NearSymplecticFixture::Cutoff);
    }
    if let Some(q) = name.strip_prefix("model-eps") {
        let eps: Rational = q.parse().map_err(|_| unknown(name, NEAR_SYMPLECTIC))?;
        let form = build_model_form(&eps).map_err(|e| LabError::Input(format!("{name}: {e}")))?;
        return Ok(NearSymplecticFixture::Form {
            name: name.to_string(),
            form,
            model_eps: Some(eps),
        });
    }
    if is_path(name) {
        let form = load_form(Path::new(name), 4, 2)?;
        return Ok(NearSymplecticFixture::Form {
            name: name.to_string(),
            form,
            model_eps: None,
        });
    }
    Err(unknown(name, NEAR_SYMPLECTIC))
}

pub fn near_contact(name: &str) -> Result<Vec<(String, PolyForm)>, LabError> {
    let all: Vec<(String, PolyForm)> = fx::near_contact_fixtures()
        .into_iter()
        .map(|(n, f)| (n.to_string(), f))
        .collect();
    match name {
        "all" => Ok(all),
        "saddle" => Ok(vec![(name.to_string(), saddle_differential())]),
        _ => {
            if let Some(hit) = all.iter().find(|(n, _)| n == name) {
                return Ok(vec![hit.clone()]);
            }
            if is_path(name) {
                return Ok(vec![(name.to_string(), load_form(Path::new(name), 3, 1)?)]);
            }
            Err(unknown(name, NEAR_CONTACT))
        }
    }
}

pub fn overtwisted(name: &str) -> Result<(PolyForm, PolyScalar), LabError> {
    match name {
        "overtwisted" => Ok((fx::overtwisted_mu(), fx::overtwisted_c())),
        "overtwisted-uncompensated" => Ok((fx::overtwisted_mu_uncompensated(), fx::overtwisted_c())),
        _ => Err(unknown(name, OVERTWISTED)),
    }
}

pub fn ladder(values: Option<&[f64]>) -> Result<ModeBasis, LabError> {
    match values {
        None => Ok(ModeBasis::default_ladder()),
        Some(v) => ModeBasis::from_values(v, 3).map_err(|e| LabError::Input(format!("--ladder: {e}"))),
    }
}

/// Left and right caps.
pub fn caps(name: &str, basis: &ModeBasis) -> Result<(CapOperator, CapOperator), LabError> {
    match name {
        "generic-caps" => Ok((fx::generic_cap(basis, 0.0), fx::generic_cap(basis, 1.0))),
        "identity-caps" => {
            let c = CapOperator::scaled_identity(basis, 0.8).map_err(|e| LabError::Input(e.to_string()))?;
            Ok((c.clone(), c))
        }
        _ => Err(unknown(name, CAPS)),
    }
}

/// Parameter `p` of the model potential.
pub fn resolution(name: &str) -> Result<f64, LabError> {
    name.strip_prefix("model-p")
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|p| p.is_finite() && *p > 0.0)
        .ok_or_else(|| unknown(name, RESOLUTION))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Generic,
    Identity,
    Redundant,
}

pub fn family(name: &str) -> Result<(FamilyKind, usize), LabError> {
    let (kind, n) = match name.split_once(':') {
        Some((k, n)) => (k, n.parse::<usize>().ok().filter(|&n| (1..=8).contains(&n)).ok_or_else(|| unknown(name, FAMILIES))?),
        None => (name, 1),
    };
    let kind = match kind {
        "generic" => FamilyKind::Generic,
        "identity" => FamilyKind::Identity,
        "redundant" => FamilyKind::Redundant,
        _ => return Err(unknown(name, FAMILIES)),
    };
    Ok((kind, n))
}
