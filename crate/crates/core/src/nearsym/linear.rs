//! Linear self-dual forms vanishing on the `x1`-axis, parametrized by their
//! orientation matrix, and paths between them.

use alloc::vec::Vec;

use num_traits::Zero;
use serde::Serialize;

use super::NearSymError;
use crate::form::PolyForm;
use crate::frame::self_dual_basis;
use crate::linalg::{det3, sym_eigen, to_dmatrix3};
use crate::poly::{PolyScalar, Rational};

/// `ω = Σ f_i ω_i` with `f_i = Σ_ξ A[ξ][i] x_{ξ+2}` (coordinates `x2, x3,
/// x4`). For `∂_Z = ∂_1` its orientation matrix is `A`; the form is closed
/// exactly when `A` is symmetric and traceless.
pub fn form_from_orientation_matrix(a: &[[Rational; 3]; 3]) -> Result<PolyForm, NearSymError> {
    let sym = (0..3).all(|i| (0..3).all(|j| a[i][j] == a[j][i]));
    let trace = &(&a[0][0] + &a[1][1]) + &a[2][2];
    if !sym || !trace.is_zero() {
        return Err(NearSymError::NotClosed);
    }
    let det = &(&(&a[0][0] * &(&(&a[1][1] * &a[2][2]) - &(&a[1][2] * &a[2][1])))
        - &(&a[0][1] * &(&(&a[1][0] * &a[2][2]) - &(&a[1][2] * &a[2][0]))))
        + &(&a[0][2] * &(&(&a[1][0] * &a[2][1]) - &(&a[1][1] * &a[2][0])));
    if det.is_zero() {
        return Err(NearSymError::DegenerateOrientation);
    }
    let basis = self_dual_basis();
    let mut w = PolyForm::zero(4, 2)?;
    for (i, wi) in basis.iter().enumerate() {
        let mut f = PolyScalar::zero(4);
        for (xi, row) in a.iter().enumerate() {
            f = &f + &PolyScalar::var(4, xi + 1).scale(&row[i]);
        }
        w = w.add(&wi.mul_scalar(&f)?)?;
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearPath {
    pub samples: Vec<[[f64; 3]; 3]>,
    pub det_sign: i8,
    pub min_abs_det: f64,
    pub max_trace: f64,
    pub max_asymmetry: f64,
    pub endpoint_error: f64,
}

type Mat3 = [[f64; 3]; 3];

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn transpose(a: &Mat3) -> Mat3 {
    core::array::from_fn(|i| core::array::from_fn(|j| a[j][i]))
}

/// Ascending eigenvalues and a rotation (`det = +1`) of eigenvectors.
fn eigen_so3(a: &Mat3) -> ([f64; 3], Mat3) {
    let (vals, vecs) = sym_eigen(&to_dmatrix3(a));
    let mut r: Mat3 = core::array::from_fn(|i| core::array::from_fn(|j| vecs[(i, j)]));
    if det3(&r) < 0.0 {
        for row in r.iter_mut() {
            row[2] = -row[2];
        }
    }
    ([vals[0], vals[1], vals[2]], r)
}

/// `exp(s·log Q)` for a rotation `Q`, via its axis and angle.
fn rotation_power(q: &Mat3, s: f64) -> Mat3 {
    let tr = q[0][0] + q[1][1] + q[2][2];
    let theta = libm::acos(((tr - 1.0) / 2.0).clamp(-1.0, 1.0));
    let mut axis = [q[2][1] - q[1][2], q[0][2] - q[2][0], q[1][0] - q[0][1]];
    let n = crate::numeric::norm(&axis);
    if theta < 1e-12 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    if n < 1e-9 {
        // θ = π: Q = 2uuᵀ - I
        let k = (0..3).max_by(|&a, &b| q[a][a].total_cmp(&q[b][b])).expect("three");
        let uk = libm::sqrt(((q[k][k] + 1.0) / 2.0).max(0.0));
        axis = core::array::from_fn(|i| if i == k { uk } else { q[i][k] / (2.0 * uk) });
    } else {
        axis = axis.map(|c| c / n);
    }
    let t = s * theta;
    let (c, sn) = (libm::cos(t), libm::sin(t));
    let [x, y, z] = axis;
    [
        [c + x * x * (1.0 - c), x * y * (1.0 - c) - z * sn, x * z * (1.0 - c) + y * sn],
        [y * x * (1.0 - c) + z * sn, c + y * y * (1.0 - c), y * z * (1.0 - c) - x * sn],
        [z * x * (1.0 - c) - y * sn, z * y * (1.0 - c) + x * sn, c + z * z * (1.0 - c)],
    ]
}

fn check_input(a: &Mat3) -> Result<i8, NearSymError> {
    let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let asym = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - a[j][i]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-12 * scale || (a[0][0] + a[1][1] + a[2][2]).abs() > 1e-12 * scale {
        return Err(NearSymError::NotClosed);
    }
    let d = det3(a);
    if d.abs() <= 1e-12 * scale * scale * scale {
        return Err(NearSymError::DegenerateOrientation);
    }
    Ok(if d > 0.0 { 1 } else { -1 })
}

/// Path `R(s) diag(μ(s)) R(s)ᵀ` from `a` to `b` with linearly interpolated
/// sorted eigenvalues and a geodesic in SO(3) between eigenbases, sampled
/// at `n` points. Fails with `NoPath` when `det a` and `det b` differ in
/// sign or a sample degenerates.
pub fn connect_same_sign(a: &Mat3, b: &Mat3, n: usize) -> Result<LinearPath, NearSymError> {
    let sa = check_input(a)?;
    let sb = check_input(b)?;
    if sa != sb {
        return Err(NearSymError::NoPath);
    }
    let (la, ra) = eigen_so3(a);
    let (lb, rb) = eigen_so3(b);
    let q = mul(&transpose(&ra), &rb);
    let mut samples = Vec::with_capacity(n);
    let mut min_abs_det = f64::INFINITY;
    let mut max_trace = 0.0_f64;
    let mut max_asym = 0.0_f64;
    for k in 0..n {
        let s = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
        let r = mul(&ra, &rotation_power(&q, s));
        let mu: [f64; 3] = core::array::from_fn(|i| (1.0 - s) * la[i] + s * lb[i]);
        let d: Mat3 = core::array::from_fn(|i| core::array::from_fn(|j| if i == j { mu[i] } else { 0.0 }));
        let p = mul(&mul(&r, &d), &transpose(&r));
        let det = det3(&p);
        if det == 0.0 || (det > 0.0) != (sa > 0) {
            return Err(NearSymError::NoPath);
        }
        min_abs_det = min_abs_det.min(det.abs());
        max_trace = max_trace.max((p[0][0] + p[1][1] + p[2][2]).abs());
        for i in 0..3 {
            for j in 0..3 {
                max_asym = max_asym.max((p[i][j] - p[j][i]).abs());
            }
        }
        samples.push(p);
    }
    let end_err = |p: &Mat3, t: &Mat3| {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (p[i][j] - t[i][j]).abs())
            .fold(0.0, f64::max)
    };
    let endpoint_error = end_err(&samples[0], a).max(end_err(samples.last().expect("n ≥ 1"), b));
    Ok(LinearPath {
        samples,
        det_sign: sa,
        min_abs_det,
        max_trace,
        max_asymmetry: max_asym,
        endpoint_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nearsym::orientation::canonical_orientation;
    use crate::poly::{int, rat};

    fn sample() -> [[Rational; 3]; 3] {
        [
            [int(1), rat(1, 2), int(0)],
            [rat(1, 2), int(2), int(-1)],
            [int(0), int(-1), int(-3)],
        ]
    }

    #[test]
    fn round_trip_through_orientation() {
        let a = sample();
        let w = form_from_orientation_matrix(&a).unwrap();
        assert!(w.exterior_d().unwrap().is_zero());
        let o = canonical_orientation(&w, &[int(1), int(0), int(0), int(0)], &[int(1), int(0), int(0), int(0)]).unwrap();
        let exact = o.exact.unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(exact.matrix[i][j], a[i][j]);
            }
        }
    }

    #[test]
    fn rejects_non_closed_and_degenerate() {
        let mut a = sample();
        a[0][0] = int(2);
        assert_eq!(form_from_orientation_matrix(&a).unwrap_err(), NearSymError::NotClosed);
        let z = [
            [int(1), int(0), int(0)],
            [int(0), int(-1), int(0)],
            [int(0), int(0), int(0)],
        ];
        assert_eq!(form_from_orientation_matrix(&z).unwrap_err(), NearSymError::DegenerateOrientation);
    }

    #[test]
    fn rotation_power_endpoints() {
        let q = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        let full = rotation_power(&q, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert!((full[i][j] - q[i][j]).abs() < 1e-12);
            }
        }
    }
}
