//! Floating-point evaluation of polynomial forms, with exact symbolic
//! Jacobians compiled alongside the values.

use alloc::vec::Vec;

use crate::form::{subsets, PolyForm};
use crate::poly::{rational_to_f64, PolyScalar, MAX_VARS};

/// Index pairs of 2-forms on R^4 in lexicographic order.
pub const PAIRS4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Polynomial with coefficients rounded to `f64`.
#[derive(Clone, Debug, Default)]
pub struct NumPoly {
    terms: Vec<(f64, [u16; MAX_VARS])>,
}

impl NumPoly {
    pub fn new(p: &PolyScalar) -> Self {
        NumPoly {
            terms: p.terms().map(|(m, c)| (rational_to_f64(c), m.0)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (i, xi) in x.iter().enumerate() {
                match e[i] {
                    0 => {}
                    1 => t *= xi,
                    2 => t *= xi * xi,
                    k => t *= libm::pow(*xi, f64::from(k)),
                }
            }
            total += t;
        }
        total
    }
}

/// Dense numeric image of a `PolyForm`: component values in lexicographic
/// tuple order plus their first partial derivatives.
#[derive(Clone, Debug)]
pub struct NumForm {
    dim: usize,
    degree: usize,
    comps: Vec<NumPoly>,
    partials: Vec<Vec<NumPoly>>,
}

impl NumForm {
    pub fn new(form: &PolyForm) -> Self {
        let dim = form.dim();
        let idx = subsets(dim, form.degree());
        let polys: Vec<PolyScalar> = idx.iter().map(|i| form.component(i)).collect();
        NumForm {
            dim,
            degree: form.degree(),
            comps: polys.iter().map(NumPoly::new).collect(),
            partials: polys
                .iter()
                .map(|p| (0..dim).map(|j| NumPoly::new(&p.partial(j))).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    /// Row `r` holds the gradient of component `r`.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.partials
            .iter()
            .map(|row| row.iter().map(|p| p.eval(x)).collect())
            .collect()
    }
}

/// A smooth 2-form field on R^4 given by its six lexicographic components.
pub trait TwoFormField: Sync {
    fn value(&self, x: &[f64; 4]) -> [f64; 6];
    /// `jac[r][k] = ∂_k w_r`.
    fn jacobian(&self, x: &[f64; 4]) -> [[f64; 4]; 6];
}

impl TwoFormField for NumForm {
    fn value(&self, x: &[f64; 4]) -> [f64; 6] {
        assert!(self.dim == 4 && self.degree == 2, "not a 2-form on R^4");
        let mut out = [0.0; 6];
        for (o, p) in out.iter_mut().zip(&self.comps) {
            *o = p.eval(x);
        }
        out
    }

    fn jacobian(&self, x: &[f64; 4]) -> [[f64; 4]; 6] {
        assert!(self.dim == 4 && self.degree == 2, "not a 2-form on R^4");
        let mut out = [[0.0; 4]; 6];
        for (r, row) in out.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = self.partials[r][k].eval(x);
            }
        }
        out
    }
}

/// `Pf(w) = w12 w34 - w13 w24 + w14 w23`, so that `w ∧ w = 2 Pf(w) vol`.
pub fn pfaffian(w: &[f64; 6]) -> f64 {
    w[0] * w[5] - w[1] * w[4] + w[2] * w[3]
}

/// Coordinates `(<w, ω_i>/2)` on the self-dual basis.
pub fn self_dual_coords(w: &[f64; 6]) -> [f64; 3] {
    [(w[0] + w[5]) / 2.0, (w[1] - w[4]) / 2.0, (w[2] + w[3]) / 2.0]
}

/// Coordinates on the anti-self-dual basis.
pub fn anti_self_dual_coords(w: &[f64; 6]) -> [f64; 3] {
    [(w[0] - w[5]) / 2.0, (w[1] + w[4]) / 2.0, (w[2] - w[3]) / 2.0]
}

/// Antisymmetric matrix of a 2-form: `w(u, v) = uᵀ W v`.
pub fn two_form_matrix(w: &[f64; 6]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (r, &(i, j)) in PAIRS4.iter().enumerate() {
        m[i][j] = w[r];
        m[j][i] = -w[r];
    }
    m
}

pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::self_dual_basis;
    use crate::poly::int;

    #[test]
    fn pfaffian_matches_wedge_square() {
        let [w1, w2, w3] = self_dual_basis();
        let w = w1.add(&w2.scale(&int(2))).unwrap().add(&w3.scale(&int(-3))).unwrap();
        let sq = w.wedge(&w).unwrap().top_coefficient().unwrap().constant_term();
        let v = NumForm::new(&w).value(&[0.3, 0.1, -0.2, 0.5]);
        assert!((2.0 * pfaffian(&v) - rational_to_f64(&sq)).abs() < 1e-12);
        assert_eq!(self_dual_coords(&v), [1.0, 2.0, -3.0]);
        assert_eq!(anti_self_dual_coords(&v), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn compiled_jacobian_is_exact_partial() {
        let p = PolyScalar::var(4, 0) * PolyScalar::var(4, 3);
        let f = PolyForm::from_components(4, 2, [(alloc::vec![0, 1], p)]).unwrap();
        let nf = NumForm::new(&f);
        let j = TwoFormField::jacobian(&nf, &[2.0, 0.0, 0.0, 3.0]);
        assert_eq!(j[0], [3.0, 0.0, 0.0, 2.0]);
    }
}
