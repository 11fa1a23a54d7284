use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{CapOperator, Direction, ModeBasis, ModeVector, NeckError};
use crate::fit::{fit_decay_rate, DecayFitReport};
use crate::linalg::solve;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeckConfig {
    pub t: f64,
    pub basis: ModeBasis,
    pub cap_left: CapOperator,
    pub cap_right: CapOperator,
    /// Width of the collars `P1`, `P2`.
    pub collar: f64,
    /// Modes with `λ > truncation` are dropped.
    pub truncation: f64,
    /// Sobolev weight `(1 + λ²)^k`.
    pub sobolev_k: u32,
}

impl NeckConfig {
    pub fn new(t: f64, basis: ModeBasis, cap_left: CapOperator, cap_right: CapOperator) -> Result<Self, NeckError> {
        let truncation = basis.rungs().last().expect("non-empty").0;
        let cfg = NeckConfig {
            t,
            basis,
            cap_left,
            cap_right,
            collar: 1.0,
            truncation,
            sobolev_k: 2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), NeckError> {
        if !(self.t >= 2.0) || !self.t.is_finite() {
            return Err(NeckError::InvalidConfig("T must be at least 2"));
        }
        if !(self.collar > 0.0) {
            return Err(NeckError::InvalidConfig("collar width must be positive"));
        }
        if !(self.truncation >= self.basis.gap().unwrap_or(2.0)) {
            return Err(NeckError::InvalidConfig("truncation must retain the gap mode"));
        }
        for cap in [&self.cap_left, &self.cap_right] {
            if cap.dim() != self.basis.dim() {
                return Err(NeckError::DimensionMismatch {
                    expected: self.basis.dim(),
                    got: cap.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn with_t(&self, t: f64) -> Result<Self, NeckError> {
        let cfg = NeckConfig { t, ..self.clone() };
        cfg.validate()?;
        Ok(cfg)
    }

    fn mask(&self) -> Vec<bool> {
        self.basis.rates().iter().map(|&l| l <= self.truncation).collect()
    }

    /// Squared-norm weight of each amplitude: Sobolev weight times
    /// `1 + ∫_0^L 2e^{-2λt} dt` (cap plus neck with both collars).
    pub fn norm_weights(&self) -> Vec<f64> {
        let len = self.t + 2.0 * self.collar;
        self.basis
            .rates()
            .iter()
            .map(|&l| libm::pow(1.0 + l * l, self.sobolev_k as f64) * (1.0 - libm::expm1(-2.0 * l * len) / l))
            .collect()
    }

    /// `C` with `‖u^{(i+1)}‖ ≤ C e^{-2T} ‖u^{(i)}‖`.
    pub fn contraction_constant(&self) -> f64 {
        let w = self.norm_weights();
        let (lo, hi) = w.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &x| (a.min(x), b.max(x)));
        self.cap_left.bound().max(self.cap_right.bound()) * libm::sqrt(hi / lo)
    }

    pub fn ratio_bound(&self) -> f64 {
        self.contraction_constant() * libm::exp(-2.0 * self.t)
    }
}

/// `x_λ ↦ x_λ e^{-λt}`.
pub fn transport(basis: &ModeBasis, x: &[f64], t: f64) -> Vec<f64> {
    basis.rates().iter().zip(x).map(|(&l, &v)| v * libm::exp(-l * t)).collect()
}

fn weighted_norm(w: &[f64], x: &[f64]) -> f64 {
    libm::sqrt(w.iter().zip(x).map(|(w, x)| w * x * x).sum())
}

fn add_into(acc: &mut [f64], x: &[f64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeckResult {
    pub t: f64,
    /// `u^{(1)}, u^{(2)}, …` as amplitudes at their source end.
    pub iterates: Vec<ModeVector>,
    pub per_iterate_norms: Vec<f64>,
    /// Sum of left-sourced iterates.
    pub limit_left: Vec<f64>,
    /// Sum of right-sourced iterates.
    pub limit_right: Vec<f64>,
    pub u_norm: f64,
    /// `‖u - u^{(1)}‖`.
    pub tail1: f64,
    /// `‖u - u^{(1)} - u^{(2)}‖`.
    pub tail2: f64,
    pub contraction: f64,
    pub ratio_bound: f64,
    pub contraction_within_bound: bool,
    pub fixed_point_residual: f64,
    pub converged: bool,
}

fn check_input(cfg: &NeckConfig, psi: &ModeVector) -> Result<Vec<f64>, NeckError> {
    cfg.validate()?;
    if psi.direction != Direction::IncreasingT {
        return Err(NeckError::WrongDirection);
    }
    let v = ModeVector::new(&cfg.basis, psi.amplitudes.clone(), psi.direction)?;
    let mask = cfg.mask();
    Ok(v.amplitudes.iter().zip(&mask).map(|(&a, &m)| if m { a } else { 0.0 }).collect())
}

/// Runs `v^{(1)} = ψ`, `v^{(i+1)} = Cap · transport(v^{(i)})` with caps
/// alternating right, left, right, …
pub fn iterate_neck(cfg: &NeckConfig, psi: &ModeVector, max_iters: usize) -> Result<NeckResult, NeckError> {
    if max_iters < 2 {
        return Err(NeckError::InvalidConfig("need at least two iterations"));
    }
    let a = check_input(cfg, psi)?;
    let ratio_bound = cfg.ratio_bound();
    if ratio_bound >= 1.0 {
        return Err(NeckError::NoConvergence { t: cfg.t, ratio_bound });
    }
    let mask = cfg.mask();
    let right = cfg.cap_right.masked(&mask);
    let left = cfg.cap_left.masked(&mask);
    let w = cfg.norm_weights();

    let mut xs = vec![a.clone()];
    let mut converged = false;
    while xs.len() < max_iters {
        let i = xs.len();
        let cap = if i % 2 == 1 { &right } else { &left };
        let next = cap.apply(&transport(&cfg.basis, &xs[i - 1], cfg.t));
        let n = weighted_norm(&w, &next);
        let anchor = xs.get(2).map(|x| weighted_norm(&w, x)).unwrap_or(f64::INFINITY);
        xs.push(next);
        if n == 0.0 || (xs.len() > 3 && n <= 1e-17 * anchor) {
            converged = true;
            break;
        }
    }

    let norms: Vec<f64> = xs.iter().map(|x| weighted_norm(&w, x)).collect();
    let contraction = norms
        .windows(2)
        .filter(|p| p[0] > 0.0)
        .map(|p| p[1] / p[0])
        .fold(0.0, f64::max);

    let d = cfg.basis.dim();
    let mut ul = vec![0.0; d];
    let mut ur = vec![0.0; d];
    let mut tail_l = vec![0.0; d];
    let mut tail_r = vec![0.0; d];
    let mut tail2_r = vec![0.0; d];
    for (k, x) in xs.iter().enumerate() {
        if k % 2 == 0 {
            add_into(&mut ul, x);
            if k >= 2 {
                add_into(&mut tail_l, x);
            }
        } else {
            add_into(&mut ur, x);
            add_into(&mut tail_r, x);
            if k >= 3 {
                add_into(&mut tail2_r, x);
            }
        }
    }
    let pair = |l: &[f64], r: &[f64]| libm::sqrt(weighted_norm(&w, l).powi(2) + weighted_norm(&w, r).powi(2));

    let back_l = left.apply(&transport(&cfg.basis, &ur, cfg.t));
    let back_r = right.apply(&transport(&cfg.basis, &ul, cfg.t));
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let residual = (0..d)
        .map(|k| (ul[k] - a[k] - back_l[k]).abs().max((ur[k] - back_r[k]).abs()))
        .fold(0.0, f64::max)
        / scale;

    let iterates = xs
        .into_iter()
        .enumerate()
        .map(|(k, amplitudes)| ModeVector {
            amplitudes,
            direction: if k % 2 == 0 { Direction::IncreasingT } else { Direction::DecreasingT },
        })
        .collect();
    Ok(NeckResult {
        t: cfg.t,
        iterates,
        per_iterate_norms: norms,
        u_norm: pair(&ul, &ur),
        tail1: pair(&tail_l, &tail_r),
        tail2: pair(&tail_l, &tail2_r),
        limit_left: ul,
        limit_right: ur,
        contraction,
        ratio_bound,
        contraction_within_bound: contraction <= ratio_bound * (1.0 + 1e-12),
        fixed_point_residual: residual,
        converged,
    })
}

/// Solves `(I - L E R E) U_L = a`, `U_R = R E U_L` directly.
pub fn direct_solve(cfg: &NeckConfig, psi: &ModeVector) -> Result<(Vec<f64>, Vec<f64>), NeckError> {
    let a = check_input(cfg, psi)?;
    let mask = cfg.mask();
    let d = cfg.basis.dim();
    let e = DMatrix::from_diagonal(&DVector::from_vec(transport(&cfg.basis, &vec![1.0; d], cfg.t)));
    let l = cfg.cap_left.masked(&mask).to_dmatrix();
    let r = cfg.cap_right.masked(&mask).to_dmatrix();
    let m = DMatrix::identity(d, d) - &l * &e * &r * &e;
    let ul = solve(&m, &DVector::from_vec(a)).ok_or(NeckError::SingularSystem)?;
    let ur = &r * &e * &ul;
    Ok((ul.iter().copied().collect(), ur.iter().copied().collect()))
}

/// Smallest `T` in `ts` whose a-priori contraction bound is below 1.
pub fn first_contracting_t(cfg: &NeckConfig, ts: &[f64]) -> Option<f64> {
    ts.iter()
        .copied()
        .filter(|&t| cfg.with_t(t).map(|c| c.ratio_bound() < 1.0).unwrap_or(false))
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.min(t))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeckSample {
    pub t: f64,
    pub u_norm: f64,
    pub tail1: f64,
    pub tail2: f64,
    pub contraction: f64,
    pub ratio_bound: f64,
    pub iterations: usize,
    pub per_iterate_norms: Vec<f64>,
    /// `max |U - U_direct|` over both ends.
    pub direct_error: f64,
}

impl NeckSample {
    pub fn run(cfg: &NeckConfig, psi: &ModeVector, max_iters: usize) -> Result<Self, NeckError> {
        let res = iterate_neck(cfg, psi, max_iters)?;
        let (dl, dr) = direct_solve(cfg, psi)?;
        let direct_error = res
            .limit_left
            .iter()
            .zip(&dl)
            .chain(res.limit_right.iter().zip(&dr))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        Ok(NeckSample {
            t: res.t,
            u_norm: res.u_norm,
            tail1: res.tail1,
            tail2: res.tail2,
            contraction: res.contraction,
            ratio_bound: res.ratio_bound,
            iterations: res.iterates.len(),
            per_iterate_norms: res.per_iterate_norms,
            direct_error,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeckSweep {
    pub samples: Vec<NeckSample>,
    /// `None` when a tail vanishes identically.
    pub tail1_fit: Option<DecayFitReport>,
    pub tail2_fit: Option<DecayFitReport>,
    pub max_direct_error: f64,
}

fn optional_fit(samples: &[(f64, f64)]) -> Result<Option<DecayFitReport>, NeckError> {
    if samples.iter().all(|s| s.1 == 0.0) {
        return Ok(None);
    }
    Ok(Some(fit_decay_rate(samples)?))
}

impl NeckSweep {
    pub fn from_samples(samples: Vec<NeckSample>) -> Result<Self, NeckError> {
        let t1: Vec<_> = samples.iter().map(|s| (s.t, s.tail1)).collect();
        let t2: Vec<_> = samples.iter().map(|s| (s.t, s.tail2)).collect();
        Ok(NeckSweep {
            tail1_fit: optional_fit(&t1)?,
            tail2_fit: optional_fit(&t2)?,
            max_direct_error: samples.iter().map(|s| s.direct_error).fold(0.0, f64::max),
            samples,
        })
    }
}

pub fn neck_sweep(cfg: &NeckConfig, psi: &ModeVector, ts: &[f64], max_iters: usize) -> Result<NeckSweep, NeckError> {
    let samples = ts
        .iter()
        .map(|&t| NeckSample::run(&cfg.with_t(t)?, psi, max_iters))
        .collect::<Result<Vec<_>, _>>()?;
    NeckSweep::from_samples(samples)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondTermSplit {
    pub t: f64,
    /// `v^{(2)}` from the `λ = 2` part of `ψ`.
    pub lowest: Vec<f64>,
    /// `v^{(2)}` from the `λ > 2` part of `ψ`.
    pub higher: Vec<f64>,
    pub lowest_norm: f64,
    pub higher_norm: f64,
    /// Norm of the contribution of each source rung.
    pub by_source: Vec<(f64, f64)>,
}

/// Splits `u^{(2)} = Σ_λ u^{(2)}_λ` by the rung of `ψ` it comes from.
pub fn second_term_split(cfg: &NeckConfig, psi: &ModeVector) -> Result<SecondTermSplit, NeckError> {
    let a = check_input(cfg, psi)?;
    let mask = cfg.mask();
    let right = cfg.cap_right.masked(&mask);
    let w = cfg.norm_weights();
    let d = cfg.basis.dim();
    let mut lowest = vec![0.0; d];
    let mut higher = vec![0.0; d];
    let mut by_source = Vec::new();
    for &(l, _) in cfg.basis.rungs() {
        let range = cfg.basis.range(l).expect("own rung");
        let mut src = vec![0.0; d];
        src[range.clone()].copy_from_slice(&a[range]);
        let part = right.apply(&transport(&cfg.basis, &src, cfg.t));
        by_source.push((l, weighted_norm(&w, &part)));
        add_into(if l == 2.0 { &mut lowest } else { &mut higher }, &part);
    }
    Ok(SecondTermSplit {
        t: cfg.t,
        lowest_norm: weighted_norm(&w, &lowest),
        higher_norm: weighted_norm(&w, &higher),
        lowest,
        higher,
        by_source,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondTermSweep {
    pub samples: Vec<SecondTermSplit>,
    pub lowest_fit: Option<DecayFitReport>,
    pub higher_fit: Option<DecayFitReport>,
}

impl SecondTermSweep {
    pub fn from_samples(samples: Vec<SecondTermSplit>) -> Result<Self, NeckError> {
        let lo: Vec<_> = samples.iter().map(|s| (s.t, s.lowest_norm)).collect();
        let hi: Vec<_> = samples.iter().map(|s| (s.t, s.higher_norm)).collect();
        Ok(SecondTermSweep {
            lowest_fit: optional_fit(&lo)?,
            higher_fit: optional_fit(&hi)?,
            samples,
        })
    }

    pub fn run(cfg: &NeckConfig, psi: &ModeVector, ts: &[f64]) -> Result<Self, NeckError> {
        let samples = ts
            .iter()
            .map(|&t| second_term_split(&cfg.with_t(t)?, psi))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_samples(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: f64, s: f64) -> NeckConfig {
        let b = ModeBasis::from_values(&[2.0, 3.0], 2).unwrap();
        let c = CapOperator::scaled_identity(&b, s).unwrap();
        NeckConfig::new(t, b, c.clone(), c).unwrap()
    }

    #[test]
    fn zero_caps_give_single_term() {
        let b = ModeBasis::default_ladder();
        let c = NeckConfig::new(5.0, b.clone(), CapOperator::zero(&b), CapOperator::zero(&b)).unwrap();
        let psi = ModeVector::new(&b, (0..9).map(|k| k as f64 - 3.0).collect(), Direction::IncreasingT).unwrap();
        let r = iterate_neck(&c, &psi, 10).unwrap();
        assert_eq!(r.tail1, 0.0);
        assert_eq!(r.limit_left, psi.amplitudes);
        assert!(r.limit_right.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn identity_caps_match_direct_solve() {
        let c = cfg(6.0, 1.0);
        let psi = ModeVector::new(&c.basis, vec![1.0, -0.5, 0.25, 2.0, 1.0], Direction::IncreasingT).unwrap();
        let r = iterate_neck(&c, &psi, 64).unwrap();
        assert!(r.converged);
        assert!(r.contraction < 1.0 && r.contraction_within_bound);
        assert!((r.contraction / libm::exp(-12.0) - 1.0).abs() < 0.6);
        let (l, rr) = direct_solve(&c, &psi).unwrap();
        for (x, y) in r.limit_left.iter().zip(&l).chain(r.limit_right.iter().zip(&rr)) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(r.fixed_point_residual < 1e-14);
    }

    #[test]
    fn large_caps_at_short_neck_do_not_converge() {
        let c = cfg(2.0, 100.0);
        let psi = ModeVector::lowest(&c.basis, [1.0, 0.0, 0.0]);
        assert!(matches!(iterate_neck(&c, &psi, 10), Err(NeckError::NoConvergence { .. })));
        assert_eq!(first_contracting_t(&c, &[2.0, 3.0, 4.0, 5.0]), Some(3.0));
    }
}
