//! The orientation form `A(ξ, η) = (∇_ξ ω)(∂_Z, η)` on the normal space of
//! the zero set.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::NearSymError;
use crate::form::{PolyForm, VectorFieldPoly};
use crate::linalg::det3;
use crate::numeric::{dot, norm, two_form_matrix, TwoFormField};
use crate::poly::{rational_to_f64, Rational};

/// Exact data behind an orientation form computed from rational input.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactOrientation {
    /// Mutually orthogonal rational basis of the normal space.
    pub basis: Vec<Vec<Rational>>,
    /// `A(b_i, b_j)` in that basis.
    pub matrix: Vec<Vec<Rational>>,
    /// `Σ A(e_i, e_i)` over an orthonormal frame of the normal space.
    pub trace: Rational,
    pub symmetric: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientationForm {
    pub base_point: [f64; 4],
    pub tangent: [f64; 4],
    /// The tangent orientation for which `det A > 0`.
    pub canonical_tangent: [f64; 4],
    /// `A` in an orthonormal frame of the normal space.
    pub matrix: [[f64; 3]; 3],
    pub trace: f64,
    pub symmetry_residual: f64,
    pub det: f64,
    pub det_sign: i8,
    #[serde(skip)]
    pub exact: Option<ExactOrientation>,
}

/// `M[k][η] = (∂_k ω)(t, η)` on all of R^4.
fn full_matrix(jac: &[[f64; 4]; 6], t: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        let mut dk = [0.0; 6];
        for r in 0..6 {
            dk[r] = jac[r][k];
        }
        let w = two_form_matrix(&dk);
        for (eta, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|a| t[a] * w[a][eta]).sum();
        }
    }
    m
}

/// Orthonormal basis of the orthogonal complement of `t`.
fn normal_frame(t: &[f64; 4]) -> [[f64; 4]; 3] {
    let n = norm(t);
    let u = t.map(|v| v / n);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    let mut basis: Vec<[f64; 4]> = vec![u];
    for &i in &order {
        if basis.len() == 4 {
            break;
        }
        let mut e = [0.0; 4];
        e[i] = 1.0;
        for b in &basis {
            let c = dot(&e, b);
            for k in 0..4 {
                e[k] -= c * b[k];
            }
        }
        let l = norm(&e);
        if l > 1e-8 {
            basis.push(e.map(|v| v / l));
        }
    }
    [basis[1], basis[2], basis[3]]
}

fn build(point: [f64; 4], t: [f64; 4], m: &[[f64; 4]; 4], exact: Option<ExactOrientation>) -> Result<OrientationForm, NearSymError> {
    let frame = normal_frame(&t);
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = (0..4)
                .map(|x| (0..4).map(|y| frame[i][x] * m[x][y] * frame[j][y]).sum::<f64>())
                .sum();
        }
    }
    let mut sym = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            sym = sym.max((a[i][j] - a[j][i]).abs());
        }
    }
    let det = det3(&a);
    let det_sign = match &exact {
        Some(e) => {
            let d = crate::frame::rational_det(&e.matrix);
            if d.is_zero() {
                return Err(NearSymError::DegenerateOrientation);
            }
            if d.is_positive() {
                1
            } else {
                -1
            }
        }
        None => {
            let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
            if det.abs() <= 1e-12 * scale * scale * scale.max(1e-300) || scale == 0.0 {
                return Err(NearSymError::DegenerateOrientation);
            }
            if det > 0.0 {
                1
            } else {
                -1
            }
        }
    };
    let trace = match &exact {
        Some(e) => rational_to_f64(&e.trace),
        None => a[0][0] + a[1][1] + a[2][2],
    };
    let canonical_tangent = if det_sign > 0 { t } else { t.map(|v| -v) };
    Ok(OrientationForm {
        base_point: point,
        tangent: t,
        canonical_tangent,
        matrix: a,
        trace,
        symmetry_residual: sym,
        det,
        det_sign,
        exact,
    })
}

/// Orientation form of a sampled 2-form field at an approximate zero.
/// `tol` bounds both `|ω(x)|` and `|∇_t ω|/|t|`.
pub fn orientation_at<F: TwoFormField + ?Sized>(
    field: &F,
    point: &[f64; 4],
    tangent: &[f64; 4],
    tol: f64,
) -> Result<OrientationForm, NearSymError> {
    let residual = norm(&field.value(point));
    if residual > tol {
        return Err(NearSymError::NotOnZeroSet { residual });
    }
    let jac = field.jacobian(point);
    let tn = norm(tangent);
    let mut dt = [0.0; 6];
    for r in 0..6 {
        dt[r] = dot(&jac[r], tangent) / tn;
    }
    let kres = norm(&dt);
    let scale = jac.iter().flatten().map(|v| v.abs()).fold(1.0, f64::max);
    if kres > tol * scale {
        return Err(NearSymError::TangentNotInKernel { residual: kres });
    }
    let m = full_matrix(&jac, tangent);
    build(*point, *tangent, &m, None)
}

/// Exact orientation form at a rational zero with a rational tangent.
pub fn canonical_orientation(
    w: &PolyForm,
    z_point: &[Rational],
    z_tangent: &[Rational],
) -> Result<OrientationForm, NearSymError> {
    let value = w.evaluate(z_point)?;
    if !value.is_zero() {
        let residual = norm(&value.entries.iter().map(rational_to_f64).collect::<Vec<_>>());
        return Err(NearSymError::NotOnZeroSet { residual });
    }
    let n = w.dim();
    let t_field = VectorFieldPoly::constant(z_tangent)?;
    let along = w.covariant_derivative(&t_field)?.evaluate(z_point)?;
    if !along.is_zero() {
        let residual = norm(&along.entries.iter().map(rational_to_f64).collect::<Vec<_>>());
        return Err(NearSymError::TangentNotInKernel { residual });
    }
    // M[k][η] = Σ_a t_a (∂_k ω)_{aη}
    let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
    for (k, row) in m.iter_mut().enumerate() {
        let dk = w.covariant_derivative(&VectorFieldPoly::coordinate(n, k)?)?.evaluate(z_point)?;
        for (eta, v) in row.iter_mut().enumerate() {
            let mut s = Rational::zero();
            for (a, ta) in z_tangent.iter().enumerate() {
                if !ta.is_zero() {
                    s += ta * dk.get(&[a, eta]);
                }
            }
            *v = s;
        }
    }
    // Orthogonal rational basis of t^⊥ by Gram–Schmidt without normalization.
    let mut ortho: Vec<Vec<Rational>> = vec![z_tangent.to_vec()];
    for i in 0..n {
        if ortho.len() == n {
            break;
        }
        let mut e: Vec<Rational> = (0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect();
        for b in &ortho {
            let num: Rational = e.iter().zip(b).map(|(x, y)| x * y).sum();
            let den: Rational = b.iter().map(|y| y * y).sum();
            let c = num / den;
            for k in 0..n {
                e[k] = &e[k] - &c * &b[k];
            }
        }
        if e.iter().any(|v| !v.is_zero()) {
            ortho.push(e);
        }
    }
    let basis: Vec<Vec<Rational>> = ortho[1..].to_vec();
    let bilinear = |u: &[Rational], v: &[Rational]| -> Rational {
        let mut s = Rational::zero();
        for x in 0..n {
            if u[x].is_zero() {
                continue;
            }
            for y in 0..n {
                if !v[y].is_zero() && !m[x][y].is_zero() {
                    s += &u[x] * &m[x][y] * &v[y];
                }
            }
        }
        s
    };
    let matrix: Vec<Vec<Rational>> = basis
        .iter()
        .map(|u| basis.iter().map(|v| bilinear(u, v)).collect())
        .collect();
    let symmetric = (0..3).all(|i| (0..3).all(|j| matrix[i][j] == matrix[j][i]));
    let mut trace = Rational::zero();
    for (i, b) in basis.iter().enumerate() {
        let nb: Rational = b.iter().map(|y| y * y).sum();
        trace += &matrix[i][i] / nb;
    }
    let point: [f64; 4] = core::array::from_fn(|i| rational_to_f64(&z_point[i]));
    let tangent: [f64; 4] = core::array::from_fn(|i| rational_to_f64(&z_tangent[i]));
    // f64 orthonormal-frame matrix from the same exact basis.
    let norms: Vec<f64> = basis
        .iter()
        .map(|b| libm::sqrt(b.iter().map(|y| rational_to_f64(&(y * y))).sum()))
        .collect();
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = rational_to_f64(&matrix[i][j]) / (norms[i] * norms[j]);
        }
    }
    let exact = ExactOrientation {
        basis,
        matrix,
        trace,
        symmetric,
    };
    let mut out = build(point, tangent, &[[0.0; 4]; 4], Some(exact))?;
    out.matrix = a;
    out.det = det3(&a);
    out.symmetry_residual = {
        let mut s = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                s = s.max((a[i][j] - a[j][i]).abs());
            }
        }
        s
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nearsym::model::build_model_form;
    use crate::poly::int;

    #[test]
    fn exact_orientation_on_hyperbola() {
        let w = build_model_form(&int(1)).unwrap();
        let p = [int(1), int(0), int(0), int(1)];
        // tangent of H = 1 at (1, 1): (∂4 H, -∂1 H) = (-3, -5) in (x1, x4)
        let t = [int(-3), int(0), int(0), int(-5)];
        let o = canonical_orientation(&w, &p, &t).unwrap();
        let e = o.exact.as_ref().unwrap();
        assert!(e.symmetric);
        assert!(e.trace.is_zero());
        let t_neg: Vec<Rational> = t.iter().map(|v| -v.clone()).collect();
        let o2 = canonical_orientation(&w, &p, &t_neg).unwrap();
        assert_eq!(o.det_sign, -o2.det_sign);
        assert_eq!(o.canonical_tangent, o2.canonical_tangent);
    }

    #[test]
    fn rejects_off_zero_and_bad_tangent() {
        let w = build_model_form(&int(1)).unwrap();
        let off = [int(1), int(0), int(0), int(0)];
        let t = [int(0), int(0), int(0), int(1)];
        assert!(matches!(
            canonical_orientation(&w, &off, &t),
            Err(NearSymError::NotOnZeroSet { .. })
        ));
        let p = [int(1), int(0), int(0), int(1)];
        let bad = [int(0), int(1), int(0), int(0)];
        assert!(matches!(
            canonical_orientation(&w, &p, &bad),
            Err(NearSymError::TangentNotInKernel { .. })
        ));
    }
}
