//! Homotopy invariants of near-contact forms with a common zero set:
//! zero indices and the orientation of `λ∧dλ`.

use alloc::vec::Vec;

use serde::Serialize;

use super::interpolation::fibonacci_sphere;
use super::verify::Compiled;
use super::{zero_index, ContactError};
use crate::form::PolyForm;
use crate::numeric::norm;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Obstruction {
    Index { point: [f64; 3], left: i8, right: i8 },
    Orientation { left: i8, right: i8 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "first", rename_all = "kebab-case")]
pub enum ObstructionVerdict {
    ObstructionFree,
    Obstructed(Obstruction),
}

/// Sign of `λ∧dλ` at points of punctured spheres of radius `0.05` about
/// each zero, or about the origin when there are none: `±1` or `0` if mixed.
fn sampled_orientation(c: &Compiled, zeros: &[[f64; 3]]) -> i8 {
    let centres: Vec<[f64; 3]> = if zeros.is_empty() {
        alloc::vec![[0.0; 3]]
    } else {
        zeros.to_vec()
    };
    let mut sign = 0i8;
    for z in &centres {
        for d in fibonacci_sphere(64) {
            let p = [z[0] + 0.05 * d[0], z[1] + 0.05 * d[1], z[2] + 0.05 * d[2]];
            let v = c.f.eval(&p);
            let s = if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            };
            if s == 0 || (sign != 0 && s != sign) {
                return 0;
            }
            sign = s;
        }
    }
    sign
}

/// Compares indices at each listed zero, then the orientation of `λ∧dλ`,
/// and returns the first failing datum.
pub fn homotopy_obstructions(
    lam: &PolyForm,
    lam_prime: &PolyForm,
    zeros: &[[f64; 3]],
) -> Result<ObstructionVerdict, ContactError> {
    let a = Compiled::new(lam)?;
    let b = Compiled::new(lam_prime)?;
    for z in zeros {
        if norm(&a.value(z)) > 1e-9 || norm(&b.value(z)) > 1e-9 {
            return Err(ContactError::ZeroSetMismatch { point: *z });
        }
    }
    for z in zeros {
        let left = zero_index(lam, z)?;
        let right = zero_index(lam_prime, z)?;
        if left != right {
            return Ok(ObstructionVerdict::Obstructed(Obstruction::Index { point: *z, left, right }));
        }
    }
    let left = sampled_orientation(&a, zeros);
    let right = sampled_orientation(&b, zeros);
    if left == 0 || left != right {
        return Ok(ObstructionVerdict::Obstructed(Obstruction::Orientation { left, right }));
    }
    Ok(ObstructionVerdict::ObstructionFree)
}
