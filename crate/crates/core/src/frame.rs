//! Constant metrics, orientations and the Hodge star on flat R^3 and R^4.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::FormError;
use crate::form::{sort_with_sign, subsets, PolyForm};
use crate::poly::{int, PolyScalar, Rational};

/// Determinant of a square rational matrix by fraction-exact elimination.
pub fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..2 * n {
            a[col][c] = &a[col][c] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..2 * n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { int(1) } else { int(0) }).collect())
        .collect()
}

fn minor(m: &[Vec<Rational>], rows: &[usize], cols: &[usize]) -> Rational {
    if rows.is_empty() {
        return Rational::one();
    }
    let sub: Vec<Vec<Rational>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect();
    rational_det(&sub)
}

/// Flat frame: dimension, constant metric and orientation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatFrame {
    dim: usize,
    metric: Vec<Vec<Rational>>,
    metric_inv: Vec<Vec<Rational>>,
    orientation: i8,
}

impl FlatFrame {
    /// Identity metric, standard orientation.
    pub fn standard(dim: usize) -> Result<Self, FormError> {
        Self::new(dim, identity(dim), 1)
    }

    pub fn new(dim: usize, metric: Vec<Vec<Rational>>, orientation: i8) -> Result<Self, FormError> {
        if dim != 3 && dim != 4 {
            return Err(FormError::UnsupportedDimension(dim));
        }
        if orientation != 1 && orientation != -1 {
            return Err(FormError::BadOrientation(orientation));
        }
        if metric.len() != dim || metric.iter().any(|r| r.len() != dim) {
            return Err(FormError::DimensionMismatch {
                left: dim,
                right: metric.len(),
            });
        }
        for i in 0..dim {
            for j in 0..i {
                if metric[i][j] != metric[j][i] {
                    return Err(FormError::NotPositiveDefinite);
                }
            }
        }
        for k in 1..=dim {
            let idx: Vec<usize> = (0..k).collect();
            if !minor(&metric, &idx, &idx).is_positive() {
                return Err(FormError::NotPositiveDefinite);
            }
        }
        let metric_inv = rational_inverse(&metric).ok_or(FormError::NotPositiveDefinite)?;
        Ok(FlatFrame {
            dim,
            metric,
            metric_inv,
            orientation,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &[Vec<Rational>] {
        &self.metric
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn with_orientation(&self, orientation: i8) -> Result<Self, FormError> {
        Self::new(self.dim, self.metric.clone(), orientation)
    }

    /// Hodge star. Exact whenever `sqrt(det g)` is rational; otherwise
    /// `IrrationalVolume`.
    pub fn hodge_star(&self, a: &PolyForm) -> Result<PolyForm, FormError> {
        if a.dim() != self.dim {
            return Err(FormError::DimensionMismatch {
                left: self.dim,
                right: a.dim(),
            });
        }
        let vol = rational_sqrt(&rational_det(&self.metric)).ok_or(FormError::IrrationalVolume)?;
        let k = a.degree();
        let n = self.dim;
        let mut comps = Vec::new();
        for i in subsets(n, k) {
            let mut raised = PolyScalar::zero(n);
            for (kk, coeff) in a.components() {
                let g = minor(&self.metric_inv, &i, kk);
                if !g.is_zero() {
                    raised = &raised + &coeff.scale(&g);
                }
            }
            if raised.is_zero() {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|j| !i.contains(j)).collect();
            let mut seq = i.clone();
            seq.extend_from_slice(&comp);
            let (_, sign) = sort_with_sign(&seq).expect("complementary tuples");
            let factor = &vol * int(i64::from(sign) * i64::from(self.orientation));
            comps.push((comp, raised.scale(&factor)));
        }
        PolyForm::from_components(n, n - k, comps)
    }

    /// Pointwise inner product `<a, b>_g` as a polynomial.
    pub fn inner(&self, a: &PolyForm, b: &PolyForm) -> Result<PolyScalar, FormError> {
        if a.dim() != self.dim || b.dim() != self.dim {
            return Err(FormError::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        if a.degree() != b.degree() {
            return Err(FormError::WrongDegree {
                expected: a.degree(),
                got: b.degree(),
            });
        }
        let mut out = PolyScalar::zero(self.dim);
        for (i, p) in a.components() {
            for (j, q) in b.components() {
                let g = minor(&self.metric_inv, i, j);
                if !g.is_zero() {
                    out = &out + &(p * q).scale(&g);
                }
            }
        }
        Ok(out)
    }

    /// Self-dual part `(a + ⋆a)/2` of a 2-form in dimension 4.
    pub fn self_dual_part(&self, a: &PolyForm) -> Result<PolyForm, FormError> {
        self.require_middle(a)?;
        Ok(a.add(&self.hodge_star(a)?)?.scale(&Rational::new(1.into(), 2.into())))
    }

    /// Anti-self-dual part `(a - ⋆a)/2`.
    pub fn anti_self_dual_part(&self, a: &PolyForm) -> Result<PolyForm, FormError> {
        self.require_middle(a)?;
        Ok(a.sub(&self.hodge_star(a)?)?.scale(&Rational::new(1.into(), 2.into())))
    }

    pub fn is_self_dual(&self, a: &PolyForm) -> Result<bool, FormError> {
        Ok(self.anti_self_dual_part(a)?.is_zero())
    }

    fn require_middle(&self, a: &PolyForm) -> Result<(), FormError> {
        if self.dim != 4 || a.degree() != 2 {
            return Err(FormError::WrongDegree {
                expected: 2,
                got: a.degree(),
            });
        }
        Ok(())
    }
}

/// The standard self-dual basis `ω1 = e12 + e34`, `ω2 = e13 - e24`,
/// `ω3 = e14 + e23` on R^4.
pub fn self_dual_basis() -> [PolyForm; 3] {
    let e = |i: usize, j: usize| PolyForm::basis(4, &[i, j]).expect("valid basis");
    [
        e(0, 1).add(&e(2, 3)).expect("same shape"),
        e(0, 2).sub(&e(1, 3)).expect("same shape"),
        e(0, 3).add(&e(1, 2)).expect("same shape"),
    ]
}

/// The matching anti-self-dual basis `e12 - e34`, `e13 + e24`, `e14 - e23`.
pub fn anti_self_dual_basis() -> [PolyForm; 3] {
    let e = |i: usize, j: usize| PolyForm::basis(4, &[i, j]).expect("valid basis");
    [
        e(0, 1).sub(&e(2, 3)).expect("same shape"),
        e(0, 2).add(&e(1, 3)).expect("same shape"),
        e(0, 3).sub(&e(1, 2)).expect("same shape"),
    ]
}

/// Diagonal rational matrix, a convenience for metrics and pullbacks.
pub fn diagonal(entries: &[Rational]) -> Vec<Vec<Rational>> {
    let n = entries.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { entries[i].clone() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// `c` times the identity.
pub fn scalar_matrix(n: usize, c: &Rational) -> Vec<Vec<Rational>> {
    diagonal(&vec![c.clone(); n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn star_of_basis() {
        let f = FlatFrame::standard(4).unwrap();
        let e12 = PolyForm::basis(4, &[0, 1]).unwrap();
        assert_eq!(f.hodge_star(&e12).unwrap(), PolyForm::basis(4, &[2, 3]).unwrap());
        let e13 = PolyForm::basis(4, &[0, 2]).unwrap();
        assert_eq!(f.hodge_star(&e13).unwrap(), PolyForm::basis(4, &[1, 3]).unwrap().neg());
        let rev = f.with_orientation(-1).unwrap();
        assert_eq!(rev.hodge_star(&e12).unwrap(), PolyForm::basis(4, &[2, 3]).unwrap().neg());
    }

    #[test]
    fn sd_basis_is_self_dual_and_orthogonal() {
        let f = FlatFrame::standard(4).unwrap();
        let b = self_dual_basis();
        for (i, wi) in b.iter().enumerate() {
            assert_eq!(&f.hodge_star(wi).unwrap(), wi);
            for (j, wj) in b.iter().enumerate() {
                let ip = f.inner(wi, wj).unwrap();
                let expect = if i == j { int(2) } else { int(0) };
                assert_eq!(ip, PolyScalar::constant(4, expect));
            }
        }
        for w in anti_self_dual_basis() {
            assert_eq!(f.hodge_star(&w).unwrap(), w.neg());
        }
    }

    #[test]
    fn star_in_three_dimensions() {
        let f = FlatFrame::standard(3).unwrap();
        let dx = PolyForm::basis(3, &[0]).unwrap();
        assert_eq!(f.hodge_star(&dx).unwrap(), PolyForm::basis(3, &[1, 2]).unwrap());
        let dy = PolyForm::basis(3, &[1]).unwrap();
        assert_eq!(f.hodge_star(&dy).unwrap(), PolyForm::basis(3, &[0, 2]).unwrap().neg());
    }

    #[test]
    fn rejects_bad_metrics() {
        let m = diagonal(&[int(1), int(-1), int(1), int(1)]);
        assert_eq!(FlatFrame::new(4, m, 1).unwrap_err(), FormError::NotPositiveDefinite);
        let mut asym = diagonal(&[int(1), int(1), int(1), int(1)]);
        asym[0][1] = rat(1, 2);
        assert_eq!(FlatFrame::new(4, asym, 1).unwrap_err(), FormError::NotPositiveDefinite);
        let two = FlatFrame::new(4, diagonal(&[int(2), int(1), int(1), int(1)]), 1).unwrap();
        let e = PolyForm::basis(4, &[0, 1]).unwrap();
        assert_eq!(two.hodge_star(&e).unwrap_err(), FormError::IrrationalVolume);
    }

    #[test]
    fn star_with_square_determinant_metric() {
        // g = diag(4, 1, 1, 1): orthonormal coframe 2dx1, dx2, dx3, dx4.
        let g = FlatFrame::new(4, diagonal(&[int(4), int(1), int(1), int(1)]), 1).unwrap();
        let e12 = PolyForm::basis(4, &[0, 1]).unwrap();
        // ⋆(2dx1∧dx2) = dx3∧dx4
        assert_eq!(
            g.hodge_star(&e12).unwrap(),
            PolyForm::basis(4, &[2, 3]).unwrap().scale(&rat(1, 2))
        );
        let e34 = PolyForm::basis(4, &[2, 3]).unwrap();
        assert_eq!(g.hodge_star(&e34).unwrap(), e12.scale(&int(2)));
    }

    #[test]
    fn exact_helpers() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        assert_eq!(rational_det(&m), int(1));
        let inv = rational_inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
    }
}
