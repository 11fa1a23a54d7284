use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::NeckError;
use crate::form::PolyForm;
use crate::frame::self_dual_basis;
use crate::poly::{PolyScalar, Rational};

/// Sorted ladder of decay rates `λ` with multiplicities. The lowest rung is
/// `λ = 2` with the three amplitudes of `ω1, ω2, ω3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeBasis {
    rungs: Vec<(f64, usize)>,
    synthetic: bool,
}

impl ModeBasis {
    pub fn new(rungs: Vec<(f64, usize)>, synthetic: bool) -> Result<Self, NeckError> {
        match rungs.first() {
            Some(&(l, m)) if l == 2.0 && m == 3 => {}
            Some(&(l, _)) if l == 2.0 => return Err(NeckError::InvalidLadder("λ = 2 must have multiplicity 3")),
            _ => return Err(NeckError::InvalidLadder("lowest rung must be λ = 2")),
        }
        for w in rungs.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(NeckError::InvalidLadder("rungs must be strictly increasing"));
            }
        }
        if rungs.iter().any(|&(l, m)| !l.is_finite() || m == 0) {
            return Err(NeckError::InvalidLadder("rungs need finite λ and positive multiplicity"));
        }
        Ok(ModeBasis { rungs, synthetic })
    }

    /// `{2, 3, 4}` with multiplicities `{3, 3, 3}`.
    pub fn default_ladder() -> Self {
        Self::new(vec![(2.0, 3), (3.0, 3), (4.0, 3)], true).expect("valid")
    }

    /// `λ = 2` followed by the given rungs, each of multiplicity `m`.
    pub fn from_values(values: &[f64], m: usize) -> Result<Self, NeckError> {
        let mut rungs = Vec::with_capacity(values.len());
        for &v in values {
            rungs.push((v, if v == 2.0 { 3 } else { m }));
        }
        Self::new(rungs, true)
    }

    pub fn rungs(&self) -> &[(f64, usize)] {
        &self.rungs
    }

    pub fn is_synthetic(&self) -> bool {
        self.synthetic
    }

    /// Total number of amplitudes.
    pub fn dim(&self) -> usize {
        self.rungs.iter().map(|r| r.1).sum()
    }

    /// Smallest ladder value above 2.
    pub fn gap(&self) -> Option<f64> {
        self.rungs.get(1).map(|r| r.0)
    }

    /// `λ` of every flat amplitude index.
    pub fn rates(&self) -> Vec<f64> {
        self.rungs
            .iter()
            .flat_map(|&(l, m)| core::iter::repeat(l).take(m))
            .collect()
    }

    /// Flat index range of the rung with rate `lambda`.
    pub fn range(&self, lambda: f64) -> Option<core::ops::Range<usize>> {
        let mut start = 0;
        for &(l, m) in &self.rungs {
            if l == lambda {
                return Some(start..start + m);
            }
            start += m;
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    IncreasingT,
    DecreasingT,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeVector {
    pub amplitudes: Vec<f64>,
    pub direction: Direction,
}

impl ModeVector {
    pub fn new(basis: &ModeBasis, amplitudes: Vec<f64>, direction: Direction) -> Result<Self, NeckError> {
        if amplitudes.len() != basis.dim() {
            return Err(NeckError::DimensionMismatch {
                expected: basis.dim(),
                got: amplitudes.len(),
            });
        }
        if let Some(i) = amplitudes.iter().position(|a| !a.is_finite()) {
            return Err(NeckError::NotFinite(i));
        }
        Ok(ModeVector { amplitudes, direction })
    }

    pub fn zero(basis: &ModeBasis) -> Self {
        ModeVector {
            amplitudes: vec![0.0; basis.dim()],
            direction: Direction::IncreasingT,
        }
    }

    /// Pure lowest mode `a1 ω1 + a2 ω2 + a3 ω3`.
    pub fn lowest(basis: &ModeBasis, a: [f64; 3]) -> Self {
        let mut v = Self::zero(basis);
        v.amplitudes[..3].copy_from_slice(&a);
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowDecay {
    pub at_q1: f64,
    pub at_q1_plus_s: f64,
    /// `0` for the zero vector.
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `‖ψ‖²_{0,[s,s+1]} = Σ_λ |a_λ|²/λ · e^{-2λs}(1 - e^{-2λ})`.
fn window_sq(rates: &[f64], a: &[f64], s: f64) -> f64 {
    rates
        .iter()
        .zip(a)
        .map(|(&l, &x)| x * x / l * libm::exp(-2.0 * l * s) * -libm::expm1(-2.0 * l))
        .sum()
}

/// Unit-window `L²` norms at `Q1` and `Q1 + s`.
pub fn mode_decay(basis: &ModeBasis, psi: &ModeVector, s: f64) -> Result<WindowDecay, NeckError> {
    if psi.direction != Direction::IncreasingT {
        return Err(NeckError::WrongDirection);
    }
    if psi.amplitudes.len() != basis.dim() {
        return Err(NeckError::DimensionMismatch {
            expected: basis.dim(),
            got: psi.amplitudes.len(),
        });
    }
    if !(s >= 0.0) {
        return Err(NeckError::InvalidConfig("window shift must be non-negative"));
    }
    let rates = basis.rates();
    let n0 = libm::sqrt(window_sq(&rates, &psi.amplitudes, 0.0));
    let ns = libm::sqrt(window_sq(&rates, &psi.amplitudes, s));
    let ratio = if n0 > 0.0 { ns / n0 } else { 0.0 };
    let bound = libm::exp(-2.0 * s);
    Ok(WindowDecay {
        at_q1: n0,
        at_q1_plus_s: ns,
        ratio,
        bound,
        holds: ratio <= bound * (1.0 + 1e-14),
    })
}

/// `(a1, a2, a3)`.
pub fn lowest_mode_projection(psi: &ModeVector) -> [f64; 3] {
    [psi.amplitudes[0], psi.amplitudes[1], psi.amplitudes[2]]
}

/// `a1 ω1 + a2 ω2 + a3 ω3` on flat R⁴.
pub fn lowest_mode_form(a: &[Rational; 3]) -> PolyForm {
    let mut out = PolyForm::zero(4, 2).expect("valid");
    for (w, c) in self_dual_basis().iter().zip(a) {
        out = out
            .add(&w.mul_scalar(&PolyScalar::constant(4, c.clone())).expect("same dim"))
            .expect("same shape");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::FlatFrame;
    use crate::poly::{int, rat};

    #[test]
    fn ladder_validation() {
        assert!(ModeBasis::new(vec![(3.0, 1)], true).is_err());
        assert!(ModeBasis::new(vec![(2.0, 2)], true).is_err());
        assert!(ModeBasis::new(vec![(2.0, 3), (2.0, 1)], true).is_err());
        let b = ModeBasis::default_ladder();
        assert_eq!(b.dim(), 9);
        assert_eq!(b.gap(), Some(3.0));
        assert_eq!(b.range(3.0), Some(3..6));
    }

    #[test]
    fn lowest_mode_equality() {
        let b = ModeBasis::default_ladder();
        let d = mode_decay(&b, &ModeVector::lowest(&b, [0.3, -1.0, 2.0]), 1.0).unwrap();
        assert!((d.ratio - libm::exp(-2.0)).abs() < 1e-15);
        let z = mode_decay(&b, &ModeVector::zero(&b), 1.0).unwrap();
        assert_eq!((z.at_q1, z.at_q1_plus_s), (0.0, 0.0));
    }

    #[test]
    fn pairing_with_omega1_is_twice_a1() {
        let a = [rat(3, 7), int(-2), rat(1, 5)];
        let psi = lowest_mode_form(&a);
        let w1 = &self_dual_basis()[0];
        let p = FlatFrame::standard(4).unwrap().inner(&psi, w1).unwrap();
        assert_eq!(p, PolyScalar::constant(4, rat(6, 7)));
    }
}
