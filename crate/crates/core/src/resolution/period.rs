use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::Serialize;

use super::ResolutionError;
use crate::fit::{fit_decay_rate, DecayFitReport};
use crate::linalg::svd_sorted;
use crate::neck::{iterate_neck, transport, CapOperator, ModeBasis, ModeVector, NeckConfig};

/// The resolved end: its cap operator and the period functional
/// `x ↦ 2A·x_{ω_α} + Σ_{λ>2} h_j x_j` on incoming amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolutionCap {
    pub area: f64,
    /// Which of `ω1, ω2, ω3` is the Kähler form of the resolution.
    pub kahler_index: usize,
    /// Weights of the `λ > 2` amplitudes; entries 0..3 are ignored.
    pub higher: Vec<f64>,
    pub cap: CapOperator,
}

impl ResolutionCap {
    pub fn new(area: f64, kahler_index: usize, higher: Vec<f64>, cap: CapOperator) -> Result<Self, ResolutionError> {
        if !(area > 0.0) {
            return Err(ResolutionError::NonPositiveArea(area));
        }
        if kahler_index > 2 {
            return Err(ResolutionError::InvalidParameter("Kähler index must be 0, 1 or 2"));
        }
        if higher.len() != cap.dim() {
            return Err(ResolutionError::InvalidParameter("higher weights must match the cap dimension"));
        }
        Ok(ResolutionCap {
            area,
            kahler_index,
            higher,
            cap,
        })
    }

    pub fn with_kahler_index(&self, alpha: usize) -> Self {
        ResolutionCap {
            kahler_index: alpha,
            ..self.clone()
        }
    }

    pub fn functional(&self, x: &[f64]) -> f64 {
        2.0 * self.area * x[self.kahler_index] + self.higher.iter().zip(x).skip(3).map(|(h, v)| h * v).sum::<f64>()
    }
}

fn resolved_config(cfg: &NeckConfig, res: &ResolutionCap) -> Result<NeckConfig, ResolutionError> {
    let out = NeckConfig {
        cap_right: res.cap.clone(),
        ..cfg.clone()
    };
    out.validate()?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalSample {
    pub t: f64,
    /// `∫_C u`.
    pub value: f64,
    /// `2A·a_α·e^{-2T}`.
    pub leading: f64,
    /// `value - leading`, summed without cancellation.
    pub remainder: f64,
}

/// `∫_C u` for the neck limit with the resolved cap on the right.
pub fn exceptional_value(cfg: &NeckConfig, res: &ResolutionCap, psi: &ModeVector) -> Result<ExceptionalSample, ResolutionError> {
    let cfg = resolved_config(cfg, res)?;
    let run = iterate_neck(&cfg, psi, 64)?;
    let arriving = transport(&cfg.basis, &run.limit_left, cfg.t);
    let d = cfg.basis.dim();
    let mut correction = vec![0.0; d];
    for it in run.iterates.iter().skip(2).step_by(2) {
        for (c, v) in correction.iter_mut().zip(&it.amplitudes) {
            *c += v;
        }
    }
    let e2 = libm::exp(-2.0 * cfg.t);
    let a = psi.amplitudes[res.kahler_index];
    let leading = 2.0 * res.area * a * e2;
    let remainder = 2.0 * res.area * correction[res.kahler_index] * e2
        + res.higher.iter().zip(&arriving).skip(3).map(|(h, v)| h * v).sum::<f64>();
    Ok(ExceptionalSample {
        t: cfg.t,
        value: res.functional(&arriving),
        leading,
        remainder,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalSweep {
    pub samples: Vec<ExceptionalSample>,
    /// Fit of `|∫_C u|`.
    pub fit: DecayFitReport,
    /// `log |2A a_α|`, absent when `a_α = 0`.
    pub expected_intercept: Option<f64>,
    /// Fit of `|remainder|`, absent when it vanishes identically.
    pub remainder_fit: Option<DecayFitReport>,
}

impl ExceptionalSweep {
    pub fn from_samples(samples: Vec<ExceptionalSample>, res: &ResolutionCap, psi: &ModeVector) -> Result<Self, ResolutionError> {
        let vals: Vec<_> = samples.iter().map(|s| (s.t, s.value.abs())).collect();
        let rems: Vec<_> = samples.iter().map(|s| (s.t, s.remainder.abs())).collect();
        let a = psi.amplitudes[res.kahler_index];
        Ok(ExceptionalSweep {
            fit: fit_decay_rate(&vals)?,
            expected_intercept: (a != 0.0).then(|| libm::log((2.0 * res.area * a).abs())),
            remainder_fit: if rems.iter().all(|r| r.1 == 0.0) {
                None
            } else {
                Some(fit_decay_rate(&rems)?)
            },
            samples,
        })
    }
}

pub fn exceptional_integral(
    cfg: &NeckConfig,
    res: &ResolutionCap,
    psi: &ModeVector,
    ts: &[f64],
) -> Result<ExceptionalSweep, ResolutionError> {
    let samples = ts
        .iter()
        .map(|&t| exceptional_value(&cfg.with_t(t)?, res, psi))
        .collect::<Result<Vec<_>, _>>()?;
    ExceptionalSweep::from_samples(samples, res, psi)
}

/// `s ∈ R^{3n} ↦` incoming data `ψ_i(s)` at each of `n` orbifold points:
/// lowest amplitudes `a_i = (M s)_i + q·(s_{3i}², s_{3i+1}², s_{3i+2}²)` and
/// higher amplitudes `κ·s_{3i + (j mod 3)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodFamily {
    pub n: usize,
    pub basis: ModeBasis,
    /// Row-major `3n × 3n`.
    pub linear: Vec<f64>,
    pub quadratic: f64,
    pub higher_coupling: f64,
}

impl PeriodFamily {
    pub fn new(n: usize, basis: ModeBasis, linear: Vec<f64>, quadratic: f64, higher_coupling: f64) -> Result<Self, ResolutionError> {
        if n == 0 || linear.len() != 9 * n * n {
            return Err(ResolutionError::InvalidParameter("linear part must be 3n × 3n with n ≥ 1"));
        }
        Ok(PeriodFamily {
            n,
            basis,
            linear,
            quadratic,
            higher_coupling,
        })
    }

    /// `a_i = s_i`, nothing else.
    pub fn identity(n: usize, basis: ModeBasis) -> Self {
        let d = 3 * n;
        let linear = (0..d * d).map(|k| if k / d == k % d { 1.0 } else { 0.0 }).collect();
        PeriodFamily::new(n, basis, linear, 0.0, 0.0).expect("square")
    }

    /// `I + S/10` with `|S_kl| ≤ 1`, plus quadratic and higher-mode terms.
    pub fn generic(n: usize, basis: ModeBasis) -> Self {
        let d = 3 * n;
        let linear = (0..d * d)
            .map(|k| {
                let (r, c) = (k / d, k % d);
                let diag = if r == c { 1.0 } else { 0.0 };
                diag + 0.1 * libm::sin(1.3 * r as f64 + 2.1 * c as f64 + 0.4)
            })
            .collect();
        PeriodFamily::new(n, basis, linear, 0.5, 0.7).expect("square")
    }

    /// Depends on `s_0 + s_1` only through its first two columns.
    pub fn redundant(n: usize, basis: ModeBasis) -> Self {
        let mut f = Self::generic(n, basis);
        let d = 3 * n;
        for r in 0..d {
            f.linear[r * d + 1] = f.linear[r * d];
        }
        f
    }

    pub fn dim(&self) -> usize {
        3 * self.n
    }

    pub fn eval(&self, s: &[f64]) -> Vec<ModeVector> {
        let d = self.dim();
        (0..self.n)
            .map(|i| {
                let mut v = ModeVector::zero(&self.basis);
                for alpha in 0..3 {
                    let row = 3 * i + alpha;
                    let lin: f64 = (0..d).map(|k| self.linear[row * d + k] * s[k]).sum();
                    v.amplitudes[alpha] = lin + self.quadratic * s[row] * s[row];
                }
                for j in 3..v.amplitudes.len() {
                    v.amplitudes[j] = self.higher_coupling * s[3 * i + j % 3];
                }
                v
            })
            .collect()
    }

    /// The same family with point `i` renamed `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let d = self.dim();
        let idx = |k: usize| 3 * perm[k / 3] + k % 3;
        let mut linear = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                linear[idx(r) * d + idx(c)] = self.linear[r * d + c];
            }
        }
        PeriodFamily { linear, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianReport {
    pub t: f64,
    pub h: f64,
    /// Row `3i + α`, column `k`: `∂ ∫_{C_α} u_i / ∂ s_k`.
    pub matrix: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub sigma_min: f64,
    /// `1e-3 · e^{-2T} · A`.
    pub threshold: f64,
    /// `2A e^{-2T}`.
    pub leading_scale: f64,
    pub nonsingular: bool,
}

fn periods(family: &PeriodFamily, cfg: &NeckConfig, res: &ResolutionCap, s: &[f64]) -> Result<Vec<f64>, ResolutionError> {
    let cfg = resolved_config(cfg, res)?;
    let mut out = Vec::with_capacity(family.dim());
    for psi in family.eval(s) {
        let run = iterate_neck(&cfg, &psi, 64)?;
        let arriving = transport(&cfg.basis, &run.limit_left, cfg.t);
        for alpha in 0..3 {
            out.push(res.with_kahler_index(alpha).functional(&arriving));
        }
    }
    Ok(out)
}

/// Central-difference Jacobian of `s ↦ (∫_{C_α} u_{i,s})` at `s = 0`.
pub fn period_jacobian(
    family: &PeriodFamily,
    cfg: &NeckConfig,
    res: &ResolutionCap,
    h: f64,
) -> Result<JacobianReport, ResolutionError> {
    if !(h > 0.0) {
        return Err(ResolutionError::InvalidParameter("step must be positive"));
    }
    if family.basis != cfg.basis {
        return Err(ResolutionError::InvalidParameter("family and neck use different ladders"));
    }
    let d = family.dim();
    let mut m = DMatrix::zeros(d, d);
    for k in 0..d {
        let mut sp = vec![0.0; d];
        let mut sm = vec![0.0; d];
        sp[k] = h;
        sm[k] = -h;
        let (pp, pm) = (periods(family, cfg, res, &sp)?, periods(family, cfg, res, &sm)?);
        for r in 0..d {
            m[(r, k)] = (pp[r] - pm[r]) / (2.0 * h);
        }
    }
    let sv = svd_sorted(&m).1;
    let sigma_min = *sv.last().expect("non-empty");
    let e2 = libm::exp(-2.0 * cfg.t);
    let threshold = 1e-3 * e2 * res.area;
    let report = JacobianReport {
        t: cfg.t,
        h,
        matrix: (0..d).map(|r| (0..d).map(|c| m[(r, c)]).collect()).collect(),
        singular_values: sv,
        sigma_min,
        threshold,
        leading_scale: 2.0 * res.area * e2,
        nonsingular: sigma_min > threshold,
    };
    if !report.nonsingular {
        return Err(ResolutionError::SingularJacobian { sigma_min, threshold });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(t: f64, zero: bool) -> (NeckConfig, ResolutionCap) {
        let b = ModeBasis::from_values(&[2.0, 3.0], 2).unwrap();
        let cap = if zero {
            CapOperator::zero(&b)
        } else {
            CapOperator::scaled_identity(&b, 0.8).unwrap()
        };
        let cfg = NeckConfig::new(t, b.clone(), cap.clone(), cap.clone()).unwrap();
        let higher = if zero { vec![0.0; 5] } else { vec![0.5; 5] };
        (cfg, ResolutionCap::new(2.0, 0, higher, cap).unwrap())
    }

    #[test]
    fn zero_caps_give_leading_term_exactly() {
        let (cfg, res) = setup(5.0, true);
        let psi = ModeVector::lowest(&cfg.basis, [1.0, 0.3, -0.2]);
        let s = exceptional_value(&cfg, &res, &psi).unwrap();
        assert!((s.value / (4.0 * libm::exp(-10.0)) - 1.0).abs() < 1e-14);
        assert_eq!(s.remainder, 0.0);
    }

    #[test]
    fn kahler_direction_only() {
        let (cfg, res) = setup(5.0, true);
        let psi = ModeVector::lowest(&cfg.basis, [0.0, 1.0, 1.0]);
        assert_eq!(exceptional_value(&cfg, &res, &psi).unwrap().value, 0.0);
    }

    #[test]
    fn identity_family_jacobian() {
        let (cfg, res) = setup(8.0, true);
        let fam = PeriodFamily::identity(1, cfg.basis.clone());
        let j = period_jacobian(&fam, &cfg, &res, 1e-4).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { j.leading_scale } else { 0.0 };
                assert!((j.matrix[r][c] - want).abs() <= 1e-8 * j.leading_scale);
            }
        }
    }

    #[test]
    fn redundant_family_is_singular() {
        let (cfg, res) = setup(8.0, false);
        let fam = PeriodFamily::redundant(1, cfg.basis.clone());
        assert!(matches!(
            period_jacobian(&fam, &cfg, &res, 1e-4),
            Err(ResolutionError::SingularJacobian { .. })
        ));
    }
}
