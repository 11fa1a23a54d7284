//! The cut-off perturbation `ω_ε = d(λ + ερμ)` of the model form, with a
//! radial profile `ρ` that is a smootherstep in `log r`.

use alloc::vec::Vec;

use serde::Serialize;

use super::model::{build_model_form, line_slopes};
use super::verify::liouville_primitive;
use super::zeroset::{extract_zero_set, ContinuationOptions, CurveEnd, Grid4};
use super::NearSymError;
use crate::form::PolyForm;
use crate::frame::self_dual_basis;
use crate::numeric::{norm, pfaffian, NumForm, TwoFormField, PAIRS4};
use crate::poly::int;

/// `ρ = 1` for `r ≤ r_in`, `ρ = 0` for `r ≥ r_out`, smootherstep in `log r`
/// between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub r_in: f64,
    pub r_out: f64,
}

impl Default for RadialProfile {
    fn default() -> Self {
        RadialProfile { r_in: 1.0, r_out: 2.0 }
    }
}

impl RadialProfile {
    fn log_width(&self) -> f64 {
        libm::log(self.r_out / self.r_in)
    }

    fn s(&self, r: f64) -> f64 {
        libm::log(r / self.r_in) / self.log_width()
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r_in {
            return 1.0;
        }
        if r >= self.r_out {
            return 0.0;
        }
        let s = self.s(r);
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }

    /// `(ρ', ρ'')` in `r`.
    pub fn derivatives(&self, r: f64) -> (f64, f64) {
        if r <= self.r_in || r >= self.r_out {
            return (0.0, 0.0);
        }
        let s = self.s(r);
        let l = self.log_width();
        let d1 = 30.0 * s * s * (1.0 - s) * (1.0 - s);
        let d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
        (-d1 / (r * l), -d2 / (r * r * l * l) + d1 / (r * r * l))
    }

    /// Gradient and Hessian of `x ↦ ρ(|x|)` on R^4.
    fn grad_hess(&self, x: &[f64; 4]) -> (f64, [f64; 4], [[f64; 4]; 4]) {
        let r = norm(x);
        let rho = self.value(r);
        let (d1, d2) = self.derivatives(r);
        if d1 == 0.0 && d2 == 0.0 {
            return (rho, [0.0; 4], [[0.0; 4]; 4]);
        }
        let g = x.map(|v| d1 * v / r);
        let mut h = [[0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let xx = x[i] * x[k] / (r * r);
                let delta = if i == k { 1.0 } else { 0.0 };
                h[i][k] = d2 * xx + d1 * (delta - xx) / r;
            }
        }
        (rho, g, h)
    }
}

/// `ω_ε = dλ + ε(dρ∧μ + ρ dμ)` evaluated pointwise with an analytic
/// Jacobian.
#[derive(Clone, Debug)]
pub struct CutoffForm {
    pub eps: f64,
    pub profile: RadialProfile,
    omega: NumForm,
    mu: NumForm,
    dmu: NumForm,
}

impl CutoffForm {
    pub fn new(lambda: &PolyForm, mu: &PolyForm, profile: RadialProfile, eps: f64) -> Result<Self, NearSymError> {
        for f in [lambda, mu] {
            if f.dim() != 4 || f.degree() != 1 {
                return Err(crate::error::FormError::WrongDegree {
                    expected: 1,
                    got: f.degree(),
                }
                .into());
            }
        }
        if !(eps > 0.0) {
            return Err(NearSymError::NegativeEps);
        }
        Ok(CutoffForm {
            eps,
            profile,
            omega: NumForm::new(&lambda.exterior_d()?),
            mu: NumForm::new(mu),
            dmu: NumForm::new(&mu.exterior_d()?),
        })
    }

    /// `dλ + ε dμ`, the form on `{ρ = 1}`.
    pub fn inner_form(&self, x: &[f64; 4]) -> [f64; 6] {
        let a = self.omega.value(x);
        let b = self.dmu.value(x);
        core::array::from_fn(|k| a[k] + self.eps * b[k])
    }

    /// `dλ`, the form on `{ρ = 0}`.
    pub fn outer_form(&self, x: &[f64; 4]) -> [f64; 6] {
        self.omega.value(x)
    }

    /// Maximum of `|dω_ε|` over the components `(i, j, k)`, from the
    /// analytic Jacobian.
    pub fn closedness_residual(&self, x: &[f64; 4]) -> f64 {
        let j = self.jacobian(x);
        let idx = |a: usize, b: usize| PAIRS4.iter().position(|&p| p == (a, b)).expect("ordered pair");
        let mut worst = 0.0_f64;
        for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            let v = j[idx(b, c)][a] - j[idx(a, c)][b] + j[idx(a, b)][c];
            worst = worst.max(v.abs());
        }
        worst
    }
}

impl TwoFormField for CutoffForm {
    fn value(&self, x: &[f64; 4]) -> [f64; 6] {
        let (rho, g, _) = self.profile.grad_hess(x);
        let w = self.omega.value(x);
        let m = self.mu.eval(x);
        let dm = self.dmu.value(x);
        core::array::from_fn(|k| {
            let (i, j) = PAIRS4[k];
            w[k] + self.eps * (g[i] * m[j] - g[j] * m[i] + rho * dm[k])
        })
    }

    fn jacobian(&self, x: &[f64; 4]) -> [[f64; 4]; 6] {
        let (rho, g, h) = self.profile.grad_hess(x);
        let jw = self.omega.jacobian(x);
        let m = self.mu.eval(x);
        let jm = self.mu.jacobian(x);
        let dm = self.dmu.value(x);
        let jdm = self.dmu.jacobian(x);
        core::array::from_fn(|k| {
            let (i, j) = PAIRS4[k];
            core::array::from_fn(|c| {
                jw[k][c]
                    + self.eps
                        * (h[i][c] * m[j] + g[i] * jm[j][c] - h[j][c] * m[i] - g[j] * jm[i][c]
                            + g[c] * dm[k]
                            + rho * jdm[k][c])
            })
        })
    }
}

/// `λ = ¼ι_E ω` for the model form at `ε = 0` and `μ = ½ι_E ω₃`.
pub fn model_primitives() -> Result<(PolyForm, PolyForm), NearSymError> {
    let lambda = liouville_primitive(&build_model_form(&int(0))?)?;
    let [_, _, w3] = self_dual_basis();
    Ok((lambda, liouville_primitive(&w3)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffOptions {
    pub antipodal_pairs: usize,
    pub sample_radius: f64,
    pub wedge_grid: Grid4,
    /// Samples per ray along the unperturbed zero lines inside the shell.
    pub line_samples: usize,
    pub zero_grid: Grid4,
    pub continuation: ContinuationOptions,
    pub expected_components: usize,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        CutoffOptions {
            antipodal_pairs: 1000,
            sample_radius: 3.0,
            wedge_grid: Grid4 { lo: -3.0, hi: 3.0, n: 13 },
            line_samples: 200,
            zero_grid: Grid4 { lo: -3.0, hi: 3.0, n: 13 },
            continuation: ContinuationOptions::default(),
            expected_components: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeCheck {
    pub points: usize,
    pub min_value: f64,
    pub first_negative: Option<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub points: usize,
    pub ends: [CurveEnd; 2],
    pub non_compact: bool,
    pub max_radius: f64,
    pub min_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffReport {
    pub eps: f64,
    pub profile: RadialProfile,
    pub antipodal_pairs: usize,
    pub antipodal_residual: f64,
    /// `max |ω_ε - (dλ + ε dμ)|` on samples with `r ≤ r_in`.
    pub inner_residual: f64,
    /// `max |ω_ε - dλ|` on samples with `r ≥ r_out`.
    pub outer_residual: f64,
    pub closedness_residual: f64,
    /// `max |ρ' - finite difference|` across the shell.
    pub profile_derivative_error: f64,
    pub wedge: WedgeCheck,
    pub components: Vec<ComponentSummary>,
    pub expected_components: usize,
}

impl CutoffReport {
    /// First failing condition, in the order near-symplectic, component count.
    pub fn verdict(&self) -> Result<(), NearSymError> {
        if let Some(p) = self.wedge.first_negative {
            return Err(NearSymError::NearSymplecticFailure {
                point: p,
                reason: "ω_ε∧ω_ε < 0",
            });
        }
        if self.components.len() != self.expected_components {
            return Err(NearSymError::ComponentCountMismatch {
                expected: self.expected_components,
                found: self.components.len(),
            });
        }
        Ok(())
    }
}

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points in `[-radius, radius]^4`.
pub fn halton_points(n: usize, radius: f64) -> Vec<[f64; 4]> {
    (1..=n)
        .map(|i| [2, 3, 5, 7].map(|b| radius * (2.0 * halton(i, b) - 1.0)))
        .collect()
}

fn max_diff(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Builds `ω_ε` and collects antipodal, region, closedness, positivity and
/// zero-set data. Use [`CutoffReport::verdict`] for the pass/fail decision.
pub fn cutoff_perturb(
    lambda: &PolyForm,
    mu: &PolyForm,
    profile: RadialProfile,
    eps: f64,
    opts: &CutoffOptions,
) -> Result<CutoffReport, NearSymError> {
    let form = CutoffForm::new(lambda, mu, profile, eps)?;
    let samples = halton_points(opts.antipodal_pairs, opts.sample_radius);
    let mut antipodal = 0.0_f64;
    let mut inner = 0.0_f64;
    let mut outer = 0.0_f64;
    let mut closed = 0.0_f64;
    for x in &samples {
        let v = form.value(x);
        antipodal = antipodal.max(max_diff(&v, &form.value(&x.map(|c| -c))));
        let r = norm(x);
        if r <= profile.r_in {
            inner = inner.max(max_diff(&v, &form.inner_form(x)));
        } else if r >= profile.r_out {
            outer = outer.max(max_diff(&v, &form.outer_form(x)));
        }
        closed = closed.max(form.closedness_residual(x));
    }

    let mut deriv_err = 0.0_f64;
    for k in 1..200 {
        let r = profile.r_in * libm::pow(profile.r_out / profile.r_in, k as f64 / 200.0);
        let h = 1e-6 * r;
        let fd = (profile.value(r + h) - profile.value(r - h)) / (2.0 * h);
        deriv_err = deriv_err.max((fd - profile.derivatives(r).0).abs());
    }

    let mut wedge_points: Vec<[f64; 4]> = opts.wedge_grid.points().collect();
    for slope in line_slopes() {
        let n = libm::sqrt(1.0 + slope * slope);
        for k in 0..opts.line_samples {
            let r = profile.r_in + (profile.r_out - profile.r_in) * (k as f64 + 0.5) / opts.line_samples as f64;
            for sign in [1.0, -1.0] {
                wedge_points.push([sign * r / n, 0.0, 0.0, sign * r * slope / n]);
            }
        }
    }
    let mut min_value = f64::INFINITY;
    let mut first_negative = None;
    for p in &wedge_points {
        let w = form.value(p);
        let v = 2.0 * pfaffian(&w);
        let scale = 1.0 + w.iter().map(|c| c * c).sum::<f64>();
        if v < -1e-10 * scale && first_negative.is_none() {
            first_negative = Some(*p);
        }
        min_value = min_value.min(v);
    }

    let curves = extract_zero_set(&form, &opts.zero_grid, &opts.continuation);
    let components = curves
        .iter()
        .map(|c| {
            let radii = c.points.iter().map(|p| norm(p));
            ComponentSummary {
                points: c.points.len(),
                ends: c.ends,
                non_compact: c.is_non_compact(),
                max_radius: radii.clone().fold(0.0, f64::max),
                min_radius: radii.fold(f64::INFINITY, f64::min),
            }
        })
        .collect();

    Ok(CutoffReport {
        eps,
        profile,
        antipodal_pairs: samples.len(),
        antipodal_residual: antipodal,
        inner_residual: inner,
        outer_residual: outer,
        closedness_residual: closed,
        profile_derivative_error: deriv_err,
        wedge: WedgeCheck {
            points: wedge_points.len(),
            min_value,
            first_negative,
        },
        components,
        expected_components: opts.expected_components,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsRange {
    /// Some scanned `ε` produced the expected component count.
    pub found: bool,
    /// Largest such `ε`, refined by bisection against the next failing one.
    pub threshold: Option<f64>,
    pub scanned: Vec<(f64, usize)>,
}

/// Component counts over `ε = 2⁻¹, …, 2⁻ⁿ` and a bisection at the largest
/// passing value.
pub fn locate_two_component_range(
    lambda: &PolyForm,
    mu: &PolyForm,
    profile: RadialProfile,
    levels: u32,
    opts: &CutoffOptions,
) -> Result<EpsRange, NearSymError> {
    let count = |eps: f64| -> Result<usize, NearSymError> {
        let form = CutoffForm::new(lambda, mu, profile, eps)?;
        Ok(extract_zero_set(&form, &opts.zero_grid, &opts.continuation).len())
    };
    let mut scanned = Vec::new();
    let mut threshold = None;
    let mut prev_fail: Option<f64> = None;
    for k in 1..=levels {
        let eps = libm::ldexp(1.0, -(k as i32));
        let c = count(eps)?;
        scanned.push((eps, c));
        if c == opts.expected_components {
            let mut good = eps;
            if let Some(mut bad) = prev_fail {
                for _ in 0..12 {
                    let mid = 0.5 * (good + bad);
                    if count(mid)? == opts.expected_components {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
            }
            threshold = Some(good);
            break;
        }
        prev_fail = Some(eps);
    }
    Ok(EpsRange {
        found: threshold.is_some(),
        threshold,
        scanned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivatives_match_differences() {
        let p = RadialProfile::default();
        for k in 1..50 {
            let r = 1.0 + k as f64 / 50.0;
            let h = 1e-5;
            let (d1, d2) = p.derivatives(r);
            let fd1 = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
            let fd2 = (p.derivatives(r + h).0 - p.derivatives(r - h).0) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-8);
            assert!((d2 - fd2).abs() < 1e-6);
        }
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(2.5), 0.0);
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let (l, m) = model_primitives().unwrap();
        let f = CutoffForm::new(&l, &m, RadialProfile::default(), 0.3).unwrap();
        let x = [0.9, -0.7, 0.4, 0.8];
        let j = f.jacobian(&x);
        for c in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += 1e-6;
            xm[c] -= 1e-6;
            let (vp, vm) = (f.value(&xp), f.value(&xm));
            for k in 0..6 {
                assert!((j[k][c] - (vp[k] - vm[k]) / 2e-6).abs() < 1e-7);
            }
        }
        assert!(f.closedness_residual(&x) < 1e-12);
    }
}
