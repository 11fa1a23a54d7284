//! Verification of the near-contact conditions for a polynomial 1-form on R^3.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::ContactError;
use crate::form::PolyForm;
use crate::linalg::{solve, sym_eigen};
use crate::numeric::{norm, NumForm, NumPoly};
use crate::poly::{PolyScalar, Rational};

/// Uniform grid on `[lo, hi]^3` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid3 {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid3 {
    pub fn coord(&self, k: usize) -> f64 {
        if self.n == 1 {
            return 0.5 * (self.lo + self.hi);
        }
        self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let n = self.n;
        (0..n * n * n).map(move |f| [self.coord(f / (n * n)), self.coord((f / n) % n), self.coord(f % n)])
    }
}

/// Compiled data of a 1-form on R^3: values, Jacobian, `f` with
/// `λ∧dλ = f vol`, and the Hessian of `f`.
pub struct Compiled {
    pub lam: NumForm,
    pub dlam: NumForm,
    pub f: NumPoly,
    pub hess_f: [[NumPoly; 3]; 3],
    pub f_exact: PolyScalar,
}

impl Compiled {
    pub fn new(lam: &PolyForm) -> Result<Self, ContactError> {
        if lam.dim() != 3 || lam.degree() != 1 {
            return Err(ContactError::NotOneFormOnR3);
        }
        let dlam = lam.exterior_d()?;
        let f_exact = lam.wedge(&dlam)?.top_coefficient()?;
        let hess_f = core::array::from_fn(|i| core::array::from_fn(|j| NumPoly::new(&f_exact.partial(i).partial(j))));
        Ok(Compiled {
            lam: NumForm::new(lam),
            dlam: NumForm::new(&dlam),
            f: NumPoly::new(&f_exact),
            hess_f,
            f_exact,
        })
    }

    pub fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        let v = self.lam.eval(x);
        [v[0], v[1], v[2]]
    }

    /// `J[i][j] = ∂_j λ_i`.
    pub fn jacobian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let j = self.lam.jacobian(x);
        core::array::from_fn(|r| [j[r][0], j[r][1], j[r][2]])
    }

    pub fn hessian_f(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        core::array::from_fn(|i| core::array::from_fn(|j| self.hess_f[i][j].eval(x)))
    }
}

fn newton3(c: &Compiled, x0: &[f64; 3]) -> Option<[f64; 3]> {
    let mut x = *x0;
    for _ in 0..60 {
        let v = c.value(&x);
        if norm(&v) <= 1e-14 {
            return Some(x);
        }
        let j = c.jacobian(&x);
        let m = DMatrix::from_fn(3, 3, |r, k| j[r][k]);
        let d = solve(&m, &DVector::from_row_slice(&v))?;
        for i in 0..3 {
            x[i] -= d[i];
        }
        if !x.iter().all(|v| v.is_finite()) || norm(&x) > 1e6 {
            return None;
        }
        if d.norm() < 1e-16 * (1.0 + norm(&x)) {
            break;
        }
    }
    (norm(&c.value(&x)) <= 1e-10).then_some(x)
}

/// Continued-fraction rationalization with bounded denominator.
fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = libm::floor(v);
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a as f64;
        if frac.abs() < 1e-13 {
            break;
        }
        v = 1.0 / frac;
    }
    (k1 != 0).then(|| Rational::new(h1.into(), k1.into()))
}

/// Grid-seeded Newton zeros of `λ`, deduplicated and sorted.
pub fn find_zeros(c: &Compiled, grid: &Grid3) -> Vec<[f64; 3]> {
    let n = grid.n;
    let pts: Vec<[f64; 3]> = grid.points().collect();
    let vals: Vec<f64> = pts
        .iter()
        .map(|p| {
            let v = c.value(p);
            v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
        })
        .collect();
    let mut zeros: Vec<[f64; 3]> = Vec::new();
    for f in 0..pts.len() {
        let idx = [f / (n * n), (f / n) % n, f % n];
        let mut is_min = true;
        for axis in 0..3 {
            for d in [-1i64, 1] {
                let k = idx[axis] as i64 + d;
                if k < 0 || k >= n as i64 {
                    continue;
                }
                let mut j = idx;
                j[axis] = k as usize;
                if vals[(j[0] * n + j[1]) * n + j[2]] < vals[f] {
                    is_min = false;
                }
            }
        }
        if !is_min {
            continue;
        }
        if let Some(z) = newton3(c, &pts[f]) {
            let inside = z.iter().all(|&v| v >= grid.lo - 1e-9 && v <= grid.hi + 1e-9);
            let fresh = zeros.iter().all(|q| norm(&[q[0] - z[0], q[1] - z[1], q[2] - z[2]]) > 1e-7);
            if inside && fresh {
                zeros.push(z);
            }
        }
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    zeros
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactZero {
    pub point: [f64; 3],
    /// The zero was confirmed by exact rational evaluation.
    pub exact: bool,
    pub index: i8,
    pub dlambda_residual: f64,
    pub a_symmetry_residual: f64,
    pub a_eigenvalues: [f64; 3],
    pub hessian_f_eigenvalues: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Positivity {
    pub grid_points: usize,
    pub min_f_off_zeros: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NearContactReport {
    pub zeros: Vec<ContactZero>,
    pub positivity: Positivity,
    /// `+1`: `λ∧dλ` is a positive multiple of the standard volume off the zeros.
    pub orientation: i8,
}

fn eig3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let (v, _) = sym_eigen(&DMatrix::from_fn(3, 3, |i, j| m[i][j]));
    [v[0], v[1], v[2]]
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    crate::linalg::det3(m)
}

/// Analyses one zero; the error variants mirror the near-contact conditions.
fn analyse_zero(lam: &PolyForm, c: &Compiled, z: &[f64; 3]) -> Result<ContactZero, ContactError> {
    let j = c.jacobian(z);
    let scale = j.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let det = det3(&j);
    if scale == 0.0 || det.abs() <= 1e-10 * scale * scale * scale {
        return Err(ContactError::DegenerateZero { point: *z });
    }
    let index = if det > 0.0 { 1 } else { -1 };
    // exact confirmation
    let q: Option<Vec<Rational>> = z.iter().map(|&v| rationalize(v, 10_000)).collect();
    let exact = match q {
        Some(q) => lam.evaluate(&q)?.is_zero(),
        None => false,
    };
    let dres = if exact {
        let q: Vec<Rational> = z.iter().map(|&v| rationalize(v, 10_000).expect("checked")).collect();
        let d = lam.exterior_d()?.evaluate(&q)?;
        if d.is_zero() {
            0.0
        } else {
            d.entries.iter().map(|e| crate::poly::rational_to_f64(e).abs()).fold(0.0, f64::max)
        }
    } else {
        norm(&c.dlam.eval(z))
    };
    if dres > 1e-8 * scale.max(1.0) {
        return Err(ContactError::DlambdaNonzero {
            point: *z,
            residual: dres,
        });
    }
    // A(ξ, η) = ∇_ξ λ(η) = ∂_ξ λ_η = J[η][ξ]
    let a: [[f64; 3]; 3] = core::array::from_fn(|x| core::array::from_fn(|y| j[y][x]));
    let mut sym = 0.0_f64;
    for x in 0..3 {
        for y in 0..3 {
            sym = sym.max((a[x][y] - a[y][x]).abs());
        }
    }
    let a_eig = eig3(&a);
    if a_eig[0] > 0.0 || a_eig[2] < 0.0 {
        return Err(ContactError::DefiniteA { point: *z });
    }
    let h = c.hessian_f(z);
    Ok(ContactZero {
        point: *z,
        exact,
        index,
        dlambda_residual: dres,
        a_symmetry_residual: sym,
        a_eigenvalues: a_eig,
        hessian_f_eigenvalues: eig3(&h),
    })
}

/// Finds the zeros of `λ` on the grid box and checks transversality,
/// `dλ = 0` and indefiniteness of `A` at each zero, positivity of `f` off
/// the zeros, and a nondegenerate minimum of `f` at each zero.
pub fn verify_near_contact(lam: &PolyForm, grid: &Grid3) -> Result<NearContactReport, ContactError> {
    let c = Compiled::new(lam)?;
    let zeros_pts = find_zeros(&c, grid);
    let mut zeros = Vec::with_capacity(zeros_pts.len());
    for z in &zeros_pts {
        zeros.push(analyse_zero(lam, &c, z)?);
    }
    let mut min_f = f64::INFINITY;
    let mut count = 0;
    for p in grid.points() {
        let near_zero = zeros_pts
            .iter()
            .any(|z| norm(&[p[0] - z[0], p[1] - z[1], p[2] - z[2]]) < 1e-9);
        if near_zero {
            continue;
        }
        count += 1;
        let v = c.f.eval(&p);
        if !(v > 0.0) {
            return Err(ContactError::NegativeF { point: p, value: v });
        }
        min_f = min_f.min(v);
    }
    for z in &zeros {
        if z.hessian_f_eigenvalues[0] <= 1e-10 {
            return Err(ContactError::DegenerateMinimum { point: z.point });
        }
    }
    Ok(NearContactReport {
        zeros,
        positivity: Positivity {
            grid_points: count,
            min_f_off_zeros: min_f,
        },
        orientation: 1,
    })
}

/// `sgn det ∇λ(p)` at a transverse zero.
pub fn zero_index(lam: &PolyForm, p: &[f64; 3]) -> Result<i8, ContactError> {
    let c = Compiled::new(lam)?;
    let residual = norm(&c.value(p));
    if residual > 1e-9 {
        return Err(ContactError::NotAZero { residual });
    }
    let j = c.jacobian(p);
    let scale = j.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let det = det3(&j);
    if scale == 0.0 || det.abs() <= 1e-10 * scale * scale * scale {
        return Err(ContactError::Degenerate);
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn x(i: usize) -> PolyScalar {
        PolyScalar::var(3, i)
    }

    fn saddle() -> PolyScalar {
        (&(&(&x(0) * &x(0)) + &(&x(1) * &x(1))) - &(&x(2) * &x(2))).scale(&rat(1, 2))
    }

    #[test]
    fn standard_contact_form_passes() {
        let lam = PolyForm::one_form(alloc::vec![PolyScalar::zero(3), x(0), PolyScalar::one(3)]).unwrap();
        let r = verify_near_contact(&lam, &Grid3 { lo: -1.0, hi: 1.0, n: 9 }).unwrap();
        assert!(r.zeros.is_empty());
        assert_eq!(r.positivity.min_f_off_zeros, 1.0);
    }

    #[test]
    fn exact_differential_fails_positivity() {
        let lam = PolyForm::differential(&saddle()).unwrap();
        let err = verify_near_contact(&lam, &Grid3 { lo: -1.0, hi: 1.0, n: 9 }).unwrap_err();
        assert!(matches!(err, ContactError::NegativeF { .. }));
        assert_eq!(zero_index(&lam, &[0.0; 3]).unwrap(), -1);
        let radial = PolyForm::differential(&(&(&(&x(0) * &x(0)) + &(&x(1) * &x(1))) + &(&x(2) * &x(2))).scale(&rat(1, 2))).unwrap();
        assert_eq!(zero_index(&radial, &[0.0; 3]).unwrap(), 1);
        assert!(matches!(zero_index(&radial, &[1.0, 0.0, 0.0]), Err(ContactError::NotAZero { .. })));
    }

    #[test]
    fn rationalize_small_fractions() {
        assert_eq!(rationalize(0.375, 100), Some(rat(3, 8)));
        assert_eq!(rationalize(-2.0, 100), Some(int(-2)));
    }
}
