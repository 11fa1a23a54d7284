//! The quadratic self-dual model form and its explicit zero set.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::NearSymError;
use crate::form::PolyForm;
use crate::frame::self_dual_basis;
use crate::poly::{int, rational_to_f64, PolyScalar, Rational};

fn x(i: usize) -> PolyScalar {
    PolyScalar::var(4, i)
}

/// `H(x1, x4) = 3x1² - x1x4 - x4²`.
pub fn model_h() -> PolyScalar {
    let a = (&x(0) * &x(0)).scale(&int(3));
    let b = &x(0) * &x(3);
    let c = &x(3) * &x(3);
    &(&a - &b) - &c
}

/// `(f1, f2, f3)` with
/// `f1 = 2x1x3 - 2x2x4 - x3x4`, `f2 = -x1(4x2 + x3)`, `f3 = x2² + x3² - H`.
pub fn model_coefficients() -> [PolyScalar; 3] {
    let f1 = &(&(&x(0) * &x(2)).scale(&int(2)) - &(&x(1) * &x(3)).scale(&int(2))) - &(&x(2) * &x(3));
    let f2 = -&(&x(0) * &(&x(1).scale(&int(4)) + &x(2)));
    let f3 = &(&(&x(1) * &x(1)) + &(&x(2) * &x(2))) - &model_h();
    [f1, f2, f3]
}

/// `ω + eps·ω3` with `ω = f1ω1 + f2ω2 + f3ω3`.
pub fn build_model_form(eps: &Rational) -> Result<PolyForm, NearSymError> {
    if eps.is_negative() {
        return Err(NearSymError::NegativeEps);
    }
    let [w1, w2, w3] = self_dual_basis();
    let [f1, f2, f3] = model_coefficients();
    let f3e = &f3 + &PolyScalar::constant(4, eps.clone());
    let w = w1
        .mul_scalar(&f1)?
        .add(&w2.mul_scalar(&f2)?)?
        .add(&w3.mul_scalar(&f3e)?)?;
    Ok(w)
}

/// Recognizes members of the model family and returns their `eps`.
pub fn model_eps(w: &PolyForm) -> Option<Rational> {
    if w.dim() != 4 || w.degree() != 2 {
        return None;
    }
    let eps = w.component(&[0, 3]).constant_term();
    if eps.is_negative() {
        return None;
    }
    let candidate = build_model_form(&eps).ok()?;
    (candidate == *w).then_some(eps)
}

/// Slopes `x4/x1 = (-1 ± √13)/2` of the two zero lines at `eps = 0`.
pub fn line_slopes() -> [f64; 2] {
    let r = libm::sqrt(13.0);
    [(-1.0 - r) / 2.0, (-1.0 + r) / 2.0]
}

/// One connected piece of a zero set.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ZeroComponent {
    /// `s ↦ s·direction`, `s ∈ R`.
    Line { direction: [f64; 4], slope: f64 },
    /// `τ ↦ sign·a·cosh τ·u + b·sinh τ·v` inside the `(x1, x4)` plane.
    HyperbolaBranch {
        eps: f64,
        sign: i8,
        semi_axes: [f64; 2],
        axes: [[f64; 4]; 2],
    },
    SampledArc {
        points: Vec<[f64; 4]>,
        closed: bool,
        non_compact: bool,
    },
}

impl ZeroComponent {
    /// Point and unit tangent at parameter `s`.
    pub fn point_tangent(&self, s: f64) -> ([f64; 4], [f64; 4]) {
        match self {
            ZeroComponent::Line { direction, .. } => (direction.map(|d| s * d), *direction),
            ZeroComponent::HyperbolaBranch {
                sign,
                semi_axes,
                axes,
                ..
            } => {
                let sg = f64::from(*sign);
                let (c, sh) = (libm::cosh(s), libm::sinh(s));
                let mut p = [0.0; 4];
                let mut t = [0.0; 4];
                for k in 0..4 {
                    p[k] = sg * semi_axes[0] * c * axes[0][k] + semi_axes[1] * sh * axes[1][k];
                    t[k] = sg * semi_axes[0] * sh * axes[0][k] + semi_axes[1] * c * axes[1][k];
                }
                let n = crate::numeric::norm(&t);
                (p, t.map(|v| v / n))
            }
            ZeroComponent::SampledArc { points, .. } => {
                let i = (s.max(0.0) as usize).min(points.len() - 1);
                let j = if i + 1 < points.len() { i + 1 } else { i };
                let k = if j == i { i.saturating_sub(1) } else { i };
                let mut t = [0.0; 4];
                for c in 0..4 {
                    t[c] = points[j][c] - points[k][c];
                }
                let n = crate::numeric::norm(&t);
                (points[i], t.map(|v| v / n))
            }
        }
    }

    /// `n` evenly spaced parameter values; lines and branches use
    /// `[-range, range]` (with the origin skipped for lines).
    pub fn sample(&self, n: usize, range: f64) -> Vec<([f64; 4], [f64; 4])> {
        match self {
            ZeroComponent::SampledArc { points, .. } => {
                let m = points.len();
                (0..n.min(m))
                    .map(|k| self.point_tangent(((k * (m - 1)) / (n.min(m) - 1).max(1)) as f64))
                    .collect()
            }
            ZeroComponent::Line { .. } => {
                let half = n / 2;
                let mut v = Vec::with_capacity(n);
                for k in 0..half {
                    let s = range * (k + 1) as f64 / half as f64;
                    v.push(self.point_tangent(-s));
                    v.push(self.point_tangent(s));
                }
                v
            }
            ZeroComponent::HyperbolaBranch { .. } => (0..n)
                .map(|k| {
                    let s = if n == 1 {
                        0.0
                    } else {
                        -range + 2.0 * range * k as f64 / (n - 1) as f64
                    };
                    self.point_tangent(s)
                })
                .collect(),
        }
    }
}

/// Explicit zero set of `build_model_form(eps)`: two lines through the
/// origin for `eps = 0`, two branches of `H = eps` otherwise.
pub fn model_zero_components(eps: &Rational) -> Vec<ZeroComponent> {
    if eps.is_zero() {
        return line_slopes()
            .iter()
            .map(|&t| {
                let n = libm::sqrt(1.0 + t * t);
                ZeroComponent::Line {
                    direction: [1.0 / n, 0.0, 0.0, t / n],
                    slope: t,
                }
            })
            .collect();
    }
    let e = rational_to_f64(eps);
    let r17 = libm::sqrt(17.0);
    let (lp, lm) = (1.0 + r17 / 2.0, 1.0 - r17 / 2.0);
    let up = [1.0, 4.0 - r17];
    let um = [1.0, 4.0 + r17];
    let np = crate::numeric::norm(&up);
    let nm = crate::numeric::norm(&um);
    let axes = [
        [up[0] / np, 0.0, 0.0, up[1] / np],
        [um[0] / nm, 0.0, 0.0, um[1] / nm],
    ];
    let semi = [libm::sqrt(e / lp), libm::sqrt(e / -lm)];
    [1i8, -1]
        .iter()
        .map(|&sign| ZeroComponent::HyperbolaBranch {
            eps: e,
            sign,
            semi_axes: semi,
            axes,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::FlatFrame;
    use crate::poly::rat;

    #[test]
    fn model_is_closed_and_self_dual() {
        let frame = FlatFrame::standard(4).unwrap();
        for eps in [int(0), int(1), rat(1, 7)] {
            let w = build_model_form(&eps).unwrap();
            assert!(w.exterior_d().unwrap().is_zero());
            assert_eq!(frame.hodge_star(&w).unwrap(), w);
            assert_eq!(model_eps(&w), Some(eps));
        }
        assert_eq!(build_model_form(&int(-1)).unwrap_err(), NearSymError::NegativeEps);
    }

    #[test]
    fn f3_value() {
        let [_, _, f3] = model_coefficients();
        assert_eq!(f3.eval(&[int(1), int(0), int(0), int(0)]), int(-3));
    }

    #[test]
    fn branch_points_satisfy_h() {
        let h = model_h();
        for c in model_zero_components(&int(1)) {
            for (p, _) in c.sample(20, 2.0) {
                assert!((h.eval_f64(&p) - 1.0).abs() < 1e-12);
                assert_eq!(p[1], 0.0);
                assert_eq!(p[2], 0.0);
            }
        }
    }
}
