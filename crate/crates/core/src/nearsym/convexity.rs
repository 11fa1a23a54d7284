//! ω-convexity of round spheres: Liouville check, outward transversality,
//! and the induced 1-form pulled back through two stereographic charts.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::cutoff::halton_points;
use super::NearSymError;
use crate::contact::{verify_near_contact, Grid3, NearContactReport};
use crate::form::{PolyForm, VectorFieldPoly};
use crate::numeric::{dot, norm};
use crate::poly::{int, rational_to_f64, PolyScalar, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartReport {
    pub chart: &'static str,
    pub near_contact: NearContactReport,
    /// Zeros mapped back to the sphere.
    pub sphere_zeros: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub radius: f64,
    pub transverse_samples: usize,
    /// `min ⟨V, x⟩ / |x|²` on the samples.
    pub min_radial_component: f64,
    /// `ι_V ω` in the canonical text format.
    pub lambda: String,
    pub charts: Vec<ChartReport>,
}

impl ConvexityReport {
    pub fn zero_count(&self) -> usize {
        self.charts.iter().map(|c| c.sphere_zeros.len()).sum()
    }
}

/// `p(m_1, …, m_n)` for polynomials `m_i` in a common ring.
fn substitute(p: &PolyScalar, maps: &[PolyScalar]) -> PolyScalar {
    let nv = maps[0].num_vars();
    let mut out = PolyScalar::zero(nv);
    for (m, c) in p.terms() {
        let mut t = PolyScalar::constant(nv, c.clone());
        for (i, map) in maps.iter().enumerate() {
            let e = m.exponent(i);
            if e > 0 {
                t = &t * &map.pow(u32::from(e));
            }
        }
        out = &out + &t;
    }
    out
}

/// A stereographic chart `y ↦ N(y)/D(y)` of the sphere of radius `R`.
struct Chart {
    name: &'static str,
    num: [PolyScalar; 4],
    den: PolyScalar,
}

impl Chart {
    fn y(i: usize) -> PolyScalar {
        PolyScalar::var(3, i)
    }

    fn norm_sq() -> PolyScalar {
        (0..3).fold(PolyScalar::zero(3), |acc, i| &acc + &(&Self::y(i) * &Self::y(i)))
    }

    /// `R(2y, |y|² - 1)/(1 + |y|²)`, centred at `-R e4`.
    fn south(r: &Rational) -> Self {
        let two = int(2);
        let s = Self::norm_sq();
        Chart {
            name: "south",
            num: [
                Self::y(0).scale(&two).scale(r),
                Self::y(1).scale(&two).scale(r),
                Self::y(2).scale(&two).scale(r),
                (&s - &PolyScalar::one(3)).scale(r),
            ],
            den: &PolyScalar::one(3) + &s,
        }
    }

    /// `R(2y2, 2y1, 2y3, 1 - |y|²)/(1 + |y|²)`, centred at `R e4`.
    fn north(r: &Rational) -> Self {
        let two = int(2);
        let s = Self::norm_sq();
        Chart {
            name: "north",
            num: [
                Self::y(1).scale(&two).scale(r),
                Self::y(0).scale(&two).scale(r),
                Self::y(2).scale(&two).scale(r),
                (&PolyScalar::one(3) - &s).scale(r),
            ],
            den: &PolyScalar::one(3) + &s,
        }
    }

    /// `D^{m+2} σ*λ` with `m` the maximal coefficient degree of `λ`: a
    /// polynomial 1-form on R^3 with the same near-contact data as `σ*λ`.
    fn pullback(&self, lambda: &PolyForm) -> Result<PolyForm, NearSymError> {
        let m = (0..4).filter_map(|i| lambda.component(&[i]).degree()).max().unwrap_or(0);
        let mut coeffs = vec![PolyScalar::zero(3); 3];
        for i in 0..4 {
            let li = lambda.component(&[i]);
            let mut big = PolyScalar::zero(3);
            for k in 0..=m {
                let part = li.homogeneous_part(k);
                if part.is_zero() {
                    continue;
                }
                big = &big + &(&substitute(&part, &self.num) * &self.den.pow(m - k));
            }
            if big.is_zero() {
                continue;
            }
            for (j, c) in coeffs.iter_mut().enumerate() {
                let dn = &(&self.num[i].partial(j) * &self.den) - &(&self.num[i] * &self.den.partial(j));
                *c = &*c + &(&big * &dn);
            }
        }
        Ok(PolyForm::one_form(coeffs)?)
    }

    fn point(&self, y: &[f64; 3]) -> [f64; 4] {
        let d = self.den.eval_f64(y);
        core::array::from_fn(|i| self.num[i].eval_f64(y) / d)
    }
}

/// Checks `L_V ω = ω` and `⟨V, x⟩ > 0` on the sphere of the given radius,
/// then verifies that `ι_V ω` restricts to a near-contact form, chart by
/// chart, on `|y_i| ≤ 1.2`.
pub fn convexity_check(
    w: &PolyForm,
    v: &VectorFieldPoly,
    radius: &Rational,
    chart_grid: usize,
) -> Result<ConvexityReport, NearSymError> {
    if w.dim() != 4 || w.degree() != 2 || v.dim() != 4 {
        return Err(crate::error::FormError::WrongDegree {
            expected: 2,
            got: w.degree(),
        }
        .into());
    }
    if w.lie_derivative(v)? != *w {
        return Err(NearSymError::NotLiouville);
    }
    let r = rational_to_f64(radius);
    let samples: Vec<[f64; 4]> = halton_points(2000, 1.0)
        .into_iter()
        .filter(|p| norm(p) > 1e-3)
        .map(|p| {
            let n = norm(&p);
            p.map(|c| r * c / n)
        })
        .collect();
    let mut min_radial = f64::INFINITY;
    for p in &samples {
        let vp = v.eval_f64(p);
        let radial = dot(&vp, p) / (r * r);
        if !(radial > 0.0) {
            return Err(NearSymError::NotTransverse { point: *p });
        }
        min_radial = min_radial.min(radial);
    }
    let lambda = w.interior_product(v)?;
    let grid = Grid3 {
        lo: -1.2,
        hi: 1.2,
        n: chart_grid,
    };
    let mut charts = Vec::new();
    for chart in [Chart::south(radius), Chart::north(radius)] {
        let pulled = chart.pullback(&lambda)?;
        let report = verify_near_contact(&pulled, &grid)?;
        let sphere_zeros = report.zeros.iter().map(|z| chart.point(&z.point)).collect();
        charts.push(ChartReport {
            chart: chart.name,
            near_contact: report,
            sphere_zeros,
        });
    }
    Ok(ConvexityReport {
        radius: r,
        transverse_samples: samples.len(),
        min_radial_component: min_radial,
        lambda: lambda.to_string(),
        charts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn chart_points_lie_on_sphere() {
        let r = rat(3, 2);
        for chart in [Chart::south(&r), Chart::north(&r)] {
            for y in [[0.1, -0.4, 0.9], [1.2, 1.2, -1.2], [0.0; 3]] {
                assert!((norm(&chart.point(&y)) - 1.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn substitution_composes() {
        let x = |i| PolyScalar::var(3, i);
        let p = &(&x(0) * &x(1)) + &x(2);
        let q = substitute(&p, &[&x(1) + &x(2), x(0), PolyScalar::one(3)]);
        assert_eq!(q, &(&(&x(1) + &x(2)) * &x(0)) + &PolyScalar::one(3));
    }
}
