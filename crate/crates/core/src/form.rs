//! Differential forms on flat R^n with polynomial coefficients.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::FormError;
use crate::poly::{int, PolyScalar, Rational};

/// Strictly increasing, zero-based index tuple of a basis form.
pub type Indices = Vec<usize>;

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Indices> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Indices, out: &mut Vec<Indices>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Sorts an index sequence, returning the sorted tuple and the sign of the
/// sorting permutation, or `None` if an index repeats.
pub fn sort_with_sign(seq: &[usize]) -> Option<(Indices, i32)> {
    let mut v: Indices = seq.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// A k-form `Σ_I a_I dx_I` on R^n, `n ∈ {3, 4}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyForm {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Indices, PolyScalar>,
}

fn check_dim(dim: usize) -> Result<(), FormError> {
    if dim == 3 || dim == 4 {
        Ok(())
    } else {
        Err(FormError::UnsupportedDimension(dim))
    }
}

fn same_dim(a: usize, b: usize) -> Result<(), FormError> {
    if a == b {
        Ok(())
    } else {
        Err(FormError::DimensionMismatch { left: a, right: b })
    }
}

impl PolyForm {
    pub fn zero(dim: usize, degree: usize) -> Result<Self, FormError> {
        check_dim(dim)?;
        if degree > dim {
            return Err(FormError::DegreeOverflow { degree, dim });
        }
        Ok(PolyForm {
            dim,
            degree,
            comps: BTreeMap::new(),
        })
    }

    /// Builds a form from possibly unsorted index tuples. Tuples are sorted
    /// with sign, repeated indices contribute nothing, and coefficients on
    /// the same tuple are summed.
    pub fn from_components<I>(dim: usize, degree: usize, comps: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Indices, PolyScalar)>,
    {
        let mut f = Self::zero(dim, degree)?;
        for (idx, p) in comps {
            if idx.len() != degree {
                return Err(FormError::WrongTupleLength {
                    expected: degree,
                    got: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(FormError::IndexOutOfRange { index: bad, dim });
            }
            same_dim(dim, p.num_vars())?;
            if let Some((sorted, sign)) = sort_with_sign(&idx) {
                let p = if sign < 0 { -&p } else { p };
                f.insert(sorted, p);
            }
        }
        Ok(f)
    }

    /// Constant basis form `dx_{i1} ∧ ... ∧ dx_{ik}` (zero-based, any order).
    pub fn basis(dim: usize, idx: &[usize]) -> Result<Self, FormError> {
        Self::from_components(dim, idx.len(), [(idx.to_vec(), PolyScalar::one(dim))])
    }

    pub fn scalar(p: PolyScalar) -> Result<Self, FormError> {
        let dim = p.num_vars();
        Self::from_components(dim, 0, [(Vec::new(), p)])
    }

    /// The 1-form `Σ c_i dx_i`.
    pub fn one_form(coeffs: Vec<PolyScalar>) -> Result<Self, FormError> {
        let dim = coeffs.len();
        Self::from_components(dim, 1, coeffs.into_iter().enumerate().map(|(i, p)| (vec![i], p)))
    }

    /// Differential of a function.
    pub fn differential(p: &PolyScalar) -> Result<Self, FormError> {
        Self::scalar(p.clone())?.exterior_d()
    }

    /// Top-degree volume form `dx_1 ∧ ... ∧ dx_n`.
    pub fn volume(dim: usize) -> Result<Self, FormError> {
        Self::basis(dim, &(0..dim).collect::<Vec<_>>())
    }

    fn insert(&mut self, idx: Indices, p: PolyScalar) {
        if p.is_zero() {
            return;
        }
        let entry = self.comps.remove(&idx);
        let total = match entry {
            Some(q) => &q + &p,
            None => p,
        };
        if !total.is_zero() {
            self.comps.insert(idx, total);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Indices, &PolyScalar)> {
        self.comps.iter()
    }

    /// Coefficient on a sorted tuple, zero if absent.
    pub fn component(&self, idx: &[usize]) -> PolyScalar {
        self.comps
            .get(idx)
            .cloned()
            .unwrap_or_else(|| PolyScalar::zero(self.dim))
    }

    /// Coefficient of the top-degree form relative to `dx_1 ∧ ... ∧ dx_n`.
    pub fn top_coefficient(&self) -> Result<PolyScalar, FormError> {
        if self.degree != self.dim {
            return Err(FormError::WrongDegree {
                expected: self.dim,
                got: self.degree,
            });
        }
        Ok(self.component(&(0..self.dim).collect::<Vec<_>>()))
    }

    /// `Some(m)` when every coefficient is homogeneous of the same degree `m`.
    pub fn coefficient_degree(&self) -> Option<u32> {
        let mut degs = self.comps.values().map(PolyScalar::homogeneous_degree);
        let first = degs.next()??;
        for d in degs {
            if d? != first {
                return None;
            }
        }
        Some(first)
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        same_dim(self.dim, other.dim)?;
        if self.degree != other.degree {
            return Err(FormError::WrongDegree {
                expected: self.degree,
                got: other.degree,
            });
        }
        let mut out = self.clone();
        for (idx, p) in &other.comps {
            out.insert(idx.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyForm {
        self.map_coeffs(|p| -p)
    }

    pub fn scale(&self, c: &Rational) -> PolyForm {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_scalar(&self, f: &PolyScalar) -> Result<PolyForm, FormError> {
        same_dim(self.dim, f.num_vars())?;
        Ok(self.map_coeffs(|p| p * f))
    }

    fn map_coeffs<F: Fn(&PolyScalar) -> PolyScalar>(&self, f: F) -> PolyForm {
        let mut out = PolyForm {
            dim: self.dim,
            degree: self.degree,
            comps: BTreeMap::new(),
        };
        for (idx, p) in &self.comps {
            out.insert(idx.clone(), f(p));
        }
        out
    }

    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        same_dim(self.dim, other.dim)?;
        let degree = self.degree + other.degree;
        let mut out = PolyForm::zero(self.dim, degree)?;
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut seq = i.clone();
                seq.extend_from_slice(j);
                if let Some((k, sign)) = sort_with_sign(&seq) {
                    let prod = a * b;
                    out.insert(k, if sign < 0 { -&prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative; the top-degree form maps to the zero form of the
    /// same degree.
    pub fn exterior_d(&self) -> Result<PolyForm, FormError> {
        if self.degree == self.dim {
            return PolyForm::zero(self.dim, self.degree);
        }
        let mut out = PolyForm::zero(self.dim, self.degree + 1)?;
        for (idx, a) in &self.comps {
            for j in 0..self.dim {
                let da = a.partial(j);
                if da.is_zero() {
                    continue;
                }
                let mut seq = vec![j];
                seq.extend_from_slice(idx);
                if let Some((k, sign)) = sort_with_sign(&seq) {
                    out.insert(k, if sign < 0 { -&da } else { da });
                }
            }
        }
        Ok(out)
    }

    /// Contraction `ι_X a`. Contracting a 0-form gives the zero 0-form.
    pub fn interior_product(&self, x: &VectorFieldPoly) -> Result<PolyForm, FormError> {
        same_dim(self.dim, x.dim())?;
        if self.degree == 0 {
            return PolyForm::zero(self.dim, 0);
        }
        let mut out = PolyForm::zero(self.dim, self.degree - 1)?;
        for (idx, a) in &self.comps {
            for p in 0..idx.len() {
                let xi = &x.comps[idx[p]];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let t = a * xi;
                out.insert(rest, if p % 2 == 1 { -&t } else { t });
            }
        }
        Ok(out)
    }

    /// Flat covariant derivative: directional derivative of each coefficient.
    pub fn covariant_derivative(&self, x: &VectorFieldPoly) -> Result<PolyForm, FormError> {
        same_dim(self.dim, x.dim())?;
        Ok(self.map_coeffs(|a| x.apply(a)))
    }

    /// Lie derivative by transport of coefficients and basis covectors:
    /// `L_X(a dx_I) = X(a) dx_I + a Σ_p dx_{i1} ∧ .. ∧ dX_{ip} ∧ .. ∧ dx_{ik}`.
    pub fn lie_derivative(&self, x: &VectorFieldPoly) -> Result<PolyForm, FormError> {
        let mut out = self.covariant_derivative(x)?;
        for (idx, a) in &self.comps {
            for p in 0..idx.len() {
                let xi = &x.comps[idx[p]];
                for j in 0..self.dim {
                    let dxj = xi.partial(j);
                    if dxj.is_zero() {
                        continue;
                    }
                    let mut seq = idx.clone();
                    seq[p] = j;
                    if let Some((k, sign)) = sort_with_sign(&seq) {
                        let t = a * &dxj;
                        out.insert(k, if sign < 0 { -&t } else { t });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Cartan's formula `ι_X da + d ι_X a`.
    pub fn lie_derivative_cartan(&self, x: &VectorFieldPoly) -> Result<PolyForm, FormError> {
        let a = self.exterior_d()?.interior_product(x)?;
        let b = self.interior_product(x)?.exterior_d()?;
        if self.degree == 0 {
            return Ok(a);
        }
        a.add(&b)
    }

    /// Pullback along the linear map `x -> M x` (row-major `M`).
    pub fn pullback_linear(&self, m: &[Vec<Rational>]) -> Result<PolyForm, FormError> {
        same_dim(self.dim, m.len())?;
        for row in m {
            same_dim(self.dim, row.len())?;
        }
        let dphi: Vec<PolyForm> = m
            .iter()
            .map(|row| {
                PolyForm::from_components(
                    self.dim,
                    1,
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| (vec![j], PolyScalar::constant(self.dim, c.clone()))),
                )
            })
            .collect::<Result<_, _>>()?;
        let mut out = PolyForm::zero(self.dim, self.degree)?;
        for (idx, a) in &self.comps {
            let mut basis = PolyForm::scalar(a.compose_linear(m))?;
            for &i in idx {
                basis = basis.wedge(&dphi[i])?;
            }
            out = out.add(&basis)?;
        }
        Ok(out)
    }

    /// Exact evaluation of every coefficient at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<AltTensor, FormError> {
        same_dim(self.dim, point.len())?;
        let entries = subsets(self.dim, self.degree)
            .iter()
            .map(|idx| self.comps.get(idx).map_or_else(Rational::zero, |p| p.eval(point)))
            .collect();
        Ok(AltTensor {
            dim: self.dim,
            degree: self.degree,
            entries,
        })
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Vec<f64> {
        subsets(self.dim, self.degree)
            .iter()
            .map(|idx| self.comps.get(idx).map_or(0.0, |p| p.eval_f64(point)))
            .collect()
    }
}

impl fmt::Display for PolyForm {
    /// One line per nonzero component, `[i,j] : polynomial`, one-based
    /// indices in lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# dim={} deg={}", self.dim, self.degree)?;
        for (idx, p) in &self.comps {
            f.write_str("[")?;
            for (k, i) in idx.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            writeln!(f, "] : {p}")?;
        }
        Ok(())
    }
}

/// Constant alternating tensor: a form evaluated at a point. Entries follow
/// the lexicographic order of increasing index tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AltTensor {
    pub dim: usize,
    pub degree: usize,
    pub entries: Vec<Rational>,
}

impl AltTensor {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Value on a (possibly unsorted) index tuple.
    pub fn get(&self, idx: &[usize]) -> Rational {
        match sort_with_sign(idx) {
            None => Rational::zero(),
            Some((k, sign)) => {
                let pos = subsets(self.dim, self.degree)
                    .iter()
                    .position(|s| *s == k)
                    .expect("tuple within dimension");
                if sign < 0 {
                    -self.entries[pos].clone()
                } else {
                    self.entries[pos].clone()
                }
            }
        }
    }
}

/// Vector field with polynomial components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorFieldPoly {
    comps: Vec<PolyScalar>,
}

impl VectorFieldPoly {
    pub fn new(comps: Vec<PolyScalar>) -> Result<Self, FormError> {
        let dim = comps.len();
        check_dim(dim)?;
        for c in &comps {
            same_dim(dim, c.num_vars())?;
        }
        Ok(VectorFieldPoly { comps })
    }

    /// Euler field `Σ x_i ∂_i`.
    pub fn euler(dim: usize) -> Result<Self, FormError> {
        Self::new((0..dim).map(|i| PolyScalar::var(dim, i)).collect())
    }

    pub fn constant(v: &[Rational]) -> Result<Self, FormError> {
        let dim = v.len();
        Self::new(v.iter().map(|c| PolyScalar::constant(dim, c.clone())).collect())
    }

    /// Coordinate field `∂_i`.
    pub fn coordinate(dim: usize, i: usize) -> Result<Self, FormError> {
        let v: Vec<Rational> = (0..dim).map(|j| if i == j { Rational::one() } else { int(0) }).collect();
        Self::constant(&v)
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[PolyScalar] {
        &self.comps
    }

    pub fn scale(&self, c: &Rational) -> Self {
        VectorFieldPoly {
            comps: self.comps.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Directional derivative `X(f) = Σ X_j ∂_j f`.
    pub fn apply(&self, f: &PolyScalar) -> PolyScalar {
        let mut out = PolyScalar::zero(f.num_vars());
        for (j, xj) in self.comps.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            out = &out + &(xj * &f.partial(j));
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval_f64(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> PolyScalar {
        PolyScalar::var(4, i)
    }

    #[test]
    fn wedge_basis_and_antisymmetry() {
        let dx1 = PolyForm::basis(4, &[0]).unwrap();
        let dx2 = PolyForm::basis(4, &[1]).unwrap();
        let w = dx1.wedge(&dx2).unwrap();
        assert_eq!(w, PolyForm::basis(4, &[0, 1]).unwrap());
        assert_eq!(dx2.wedge(&dx1).unwrap(), w.neg());
        let a = PolyForm::one_form(vec![x(1), x(0), PolyScalar::zero(4), x(3)]).unwrap();
        assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn degree_overflow_rejected() {
        let v = PolyForm::volume(3).unwrap();
        let dx = PolyForm::basis(3, &[0]).unwrap();
        assert_eq!(
            v.wedge(&dx).unwrap_err(),
            FormError::DegreeOverflow { degree: 4, dim: 3 }
        );
        assert!(PolyForm::zero(3, 4).is_err());
    }

    #[test]
    fn standard_contact_form() {
        let n = 3;
        let lam = PolyForm::one_form(vec![
            PolyScalar::zero(n),
            PolyScalar::var(n, 0),
            PolyScalar::one(n),
        ])
        .unwrap();
        let f = lam.wedge(&lam.exterior_d().unwrap()).unwrap();
        assert_eq!(f, PolyForm::volume(3).unwrap());
    }

    #[test]
    fn d_of_monomial_form() {
        let a = PolyForm::from_components(4, 1, [(vec![1], x(0))]).unwrap();
        assert_eq!(a.exterior_d().unwrap(), PolyForm::basis(4, &[0, 1]).unwrap());
    }

    #[test]
    fn euler_contraction() {
        let e = VectorFieldPoly::euler(4).unwrap();
        let w = PolyForm::basis(4, &[0, 1]).unwrap();
        let c = w.interior_product(&e).unwrap();
        let expected = PolyForm::from_components(4, 1, [(vec![1], x(0)), (vec![0], -x(1))]).unwrap();
        assert_eq!(c, expected);
        assert!(c.interior_product(&e).unwrap().is_zero());
    }

    #[test]
    fn covariant_derivative_monomial() {
        let a = PolyForm::from_components(4, 1, [(vec![1], x(0))]).unwrap();
        let d1 = VectorFieldPoly::coordinate(4, 0).unwrap();
        assert_eq!(a.covariant_derivative(&d1).unwrap(), PolyForm::basis(4, &[1]).unwrap());
    }

    #[test]
    fn evaluate_constant_and_alt_get() {
        let w = PolyForm::basis(4, &[0, 1])
            .unwrap()
            .add(&PolyForm::basis(4, &[2, 3]).unwrap())
            .unwrap();
        let t = w.evaluate(&[int(3), int(-1), int(2), int(5)]).unwrap();
        let expect: Vec<Rational> = [1, 0, 0, 0, 0, 1].iter().map(|&v| int(v)).collect();
        assert_eq!(t.entries, expect);
        assert_eq!(t.get(&[1, 0]), int(-1));
        assert_eq!(t.get(&[1, 1]), int(0));
    }

    #[test]
    fn subsets_are_lexicographic() {
        let s = subsets(4, 2);
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
