//! Interpolation between two near-contact forms with matching data at a
//! common zero, cut off in logarithmic radius.

use alloc::vec::Vec;

use num_traits::Zero;
use serde::Serialize;

use super::verify::Compiled;
use super::ContactError;
use crate::form::PolyForm;
use crate::numeric::{norm, NumForm};
use crate::poly::{int, Rational};

/// Radial cutoff with `ρ = 1` on `r ≤ κR`, `ρ = 0` on `r ≥ R` and
/// `∂_r ρ ≥ -δ/r`, where `κ = exp(-1.875/δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogCutoff {
    pub radius: f64,
    pub delta: f64,
}

/// Maximum of the smootherstep derivative `30 s²(1-s)²`.
const SLOPE_MAX: f64 = 1.875;

impl LogCutoff {
    pub fn inner_radius(&self) -> f64 {
        self.radius * libm::exp(-SLOPE_MAX / self.delta)
    }

    fn log_width(&self) -> f64 {
        SLOPE_MAX / self.delta
    }

    pub fn value(&self, r: f64) -> f64 {
        let s = libm::log(r / self.inner_radius()) / self.log_width();
        if s <= 0.0 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
        }
    }

    /// `∂_r ρ`.
    pub fn derivative(&self, r: f64) -> f64 {
        let s = libm::log(r / self.inner_radius()) / self.log_width();
        if s <= 0.0 || s >= 1.0 {
            0.0
        } else {
            -30.0 * s * s * (1.0 - s) * (1.0 - s) / (r * self.log_width())
        }
    }
}

/// Quasi-uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = libm::sqrt(1.0 - z * z);
            let phi = golden * k as f64;
            [r * libm::cos(phi), r * libm::sin(phi), z]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSlice {
    pub t: f64,
    /// `min f_t / r²` over the grid.
    pub min_ratio: f64,
    pub worst_point: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub cutoff: LogCutoff,
    pub halvings: usize,
    /// `min((1-t) f + t f') / r²`, attained at `t ∈ {0, 1}`.
    pub c: f64,
    pub slices: Vec<TimeSlice>,
    /// Largest `c'` with `f_t ≥ c' r²` for every sampled `t`.
    pub c_prime: f64,
    pub radii: usize,
    pub directions: usize,
}

const TIMES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const RADII: usize = 25;
const DIRECTIONS: usize = 400;
const MAX_HALVINGS: usize = 40;

fn jacobian_exact(lam: &PolyForm) -> Result<Vec<Vec<Rational>>, ContactError> {
    let zero = [int(0), int(0), int(0)];
    Ok((0..3)
        .map(|i| {
            let p = lam.component(&[i]);
            (0..3).map(|j| p.partial(j).eval(&zero)).collect()
        })
        .collect())
}

fn det_sign(m: &[Vec<Rational>]) -> i8 {
    let d = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    if d.is_zero() {
        0
    } else if d > Rational::zero() {
        1
    } else {
        -1
    }
}

/// Sign of `λ∧dλ` on a punctured sphere of radius `r`: `±1` when constant,
/// `0` otherwise.
pub fn orientation_sign(c: &Compiled, r: f64) -> i8 {
    let mut pos = false;
    let mut neg = false;
    for d in fibonacci_sphere(DIRECTIONS) {
        let v = c.f.eval(&d.map(|x| r * x));
        pos |= v > 0.0;
        neg |= v < 0.0 || v == 0.0;
    }
    match (pos, neg) {
        (true, false) => 1,
        (false, true) => -1,
        _ => 0,
    }
}

struct Family<'a> {
    lam: &'a Compiled,
    delta: NumForm,
    d_delta: NumForm,
}

impl Family<'_> {
    /// `f_t` for `λ_t = λ + tρΔ`, `dλ_t = dλ + t(dρ∧Δ + ρ dΔ)`.
    fn f_t(&self, cut: &LogCutoff, t: f64, x: &[f64; 3]) -> f64 {
        let r = norm(x);
        let rho = cut.value(r);
        let drho = cut.derivative(r);
        let grad = x.map(|v| drho * v / r);
        let l = self.lam.value(x);
        let dl = self.lam.dlam.eval(x);
        let del = self.delta.eval(x);
        let dd = self.d_delta.eval(x);
        let lt: Vec<f64> = (0..3).map(|i| l[i] + t * rho * del[i]).collect();
        // pairs (0,1), (0,2), (1,2)
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let w: Vec<f64> = pairs
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| dl[k] + t * (grad[i] * del[j] - grad[j] * del[i] + rho * dd[k]))
            .collect();
        lt[0] * w[2] - lt[1] * w[1] + lt[2] * w[0]
    }
}

fn radial_grid(radius: f64) -> Vec<f64> {
    let lo = radius * 1e-4;
    (0..RADII)
        .map(|k| lo * libm::pow(radius / lo, k as f64 / (RADII - 1) as f64))
        .collect()
}

/// Builds `λ_t = λ + tρ(λ' - λ)` and checks `f_t ≥ (c/3) r²` on `B_R` for
/// `t ∈ {0, ¼, ½, ¾, 1}`, halving `R` until the bound holds.
pub fn local_interpolation(
    lam: &PolyForm,
    lam_prime: &PolyForm,
    radius: f64,
    delta: f64,
) -> Result<InterpolationReport, ContactError> {
    let a = Compiled::new(lam)?;
    let b = Compiled::new(lam_prime)?;
    let zero = [int(0), int(0), int(0)];
    for form in [lam, lam_prime] {
        let v = form.evaluate(&zero)?;
        if !v.is_zero() {
            let residual = v.entries.iter().map(|e| crate::poly::rational_to_f64(e).abs()).fold(0.0, f64::max);
            return Err(ContactError::NotAZero { residual });
        }
    }
    let ja = jacobian_exact(lam)?;
    let jb = jacobian_exact(lam_prime)?;
    let (ia, ib) = (det_sign(&ja), det_sign(&jb));
    if ia == 0 || ib == 0 {
        return Err(ContactError::Degenerate);
    }
    if ia != ib {
        return Err(ContactError::IndexMismatch { left: ia, right: ib });
    }
    let (oa, ob) = (orientation_sign(&a, 1e-2), orientation_sign(&b, 1e-2));
    if oa == 0 || ob == 0 || oa != ob {
        return Err(ContactError::OrientationMismatch);
    }
    if ja != jb {
        return Err(ContactError::GradientMismatch);
    }
    let diff = lam_prime.sub(lam)?;
    let fam = Family {
        lam: &a,
        d_delta: NumForm::new(&diff.exterior_d()?),
        delta: NumForm::new(&diff),
    };
    let dirs = fibonacci_sphere(DIRECTIONS);
    let mut cut = LogCutoff { radius, delta };
    let mut last = None;
    for halvings in 0..=MAX_HALVINGS {
        let radii = radial_grid(cut.radius);
        let points: Vec<[f64; 3]> = radii
            .iter()
            .flat_map(|&r| dirs.iter().map(move |d| d.map(|x| r * x)))
            .collect();
        let c = points
            .iter()
            .map(|p| {
                let r2 = p.iter().map(|v| v * v).sum::<f64>();
                a.f.eval(p).min(b.f.eval(p)) / r2
            })
            .fold(f64::INFINITY, f64::min);
        let mut slices = Vec::with_capacity(TIMES.len());
        let mut ok = c > 0.0;
        for &t in &TIMES {
            let mut min_ratio = f64::INFINITY;
            let mut worst = [0.0; 3];
            for p in &points {
                let r2 = p.iter().map(|v| v * v).sum::<f64>();
                let ratio = fam.f_t(&cut, t, p) / r2;
                if ratio < min_ratio {
                    min_ratio = ratio;
                    worst = *p;
                }
            }
            ok &= min_ratio >= c / 3.0;
            slices.push(TimeSlice {
                t,
                min_ratio,
                worst_point: worst,
            });
        }
        if ok {
            let c_prime = slices.iter().map(|s| s.min_ratio).fold(f64::INFINITY, f64::min);
            return Ok(InterpolationReport {
                cutoff: cut,
                halvings,
                c,
                slices,
                c_prime,
                radii: RADII,
                directions: DIRECTIONS,
            });
        }
        let worst = slices
            .iter()
            .min_by(|x, y| x.min_ratio.total_cmp(&y.min_ratio))
            .cloned()
            .expect("five slices");
        last = Some(ContactError::BoundViolated {
            t: worst.t,
            point: worst.worst_point,
            ratio: worst.min_ratio / c,
        });
        cut.radius *= 0.5;
    }
    Err(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_profile() {
        let cut = LogCutoff { radius: 1.0, delta: 0.5 };
        assert_eq!(cut.value(cut.inner_radius() * 0.5), 1.0);
        assert_eq!(cut.value(1.5), 0.0);
        for k in 1..200 {
            let r = cut.inner_radius() * libm::pow(1.0 / cut.inner_radius(), k as f64 / 200.0);
            assert!(r * cut.derivative(r) >= -cut.delta - 1e-12);
            let h = 1e-6 * r;
            let fd = (cut.value(r + h) - cut.value(r - h)) / (2.0 * h);
            assert!((fd - cut.derivative(r)).abs() < 1e-5 / r);
        }
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(50) {
            assert!((norm(&p) - 1.0).abs() < 1e-14);
        }
    }
}
