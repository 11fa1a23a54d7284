//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are keyed by a fixed-width exponent vector; unused variable slots
//! always carry exponent zero. Zero coefficients are never stored, so two
//! polynomials are equal exactly when their term maps are equal.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the symbolic layer.
pub type Rational = BigRational;

/// Largest number of variables a polynomial may carry.
pub const MAX_VARS: usize = 4;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite float to a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exponent vector of a monomial.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0[i]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = [0; MAX_VARS];
        for (k, slot) in e.iter_mut().enumerate() {
            *slot = self.0[k] + other.0[k];
        }
        Monomial(e)
    }

    /// Graded lexicographic order, highest first; this is the canonical
    /// printing order.
    fn grlex_desc(a: &Monomial, b: &Monomial) -> Ordering {
        b.degree().cmp(&a.degree()).then_with(|| b.0.cmp(&a.0))
    }
}

/// Polynomial in `num_vars` variables over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyScalar {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl PolyScalar {
    pub fn zero(num_vars: usize) -> Self {
        assert!(
            (1..=MAX_VARS).contains(&num_vars),
            "polynomials support 1..={MAX_VARS} variables, got {num_vars}"
        );
        PolyScalar {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        Self::monomial(num_vars, Monomial::one(), c)
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Rational::one())
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "variable index {i} out of range");
        Self::monomial(num_vars, Monomial::var(i), Rational::one())
    }

    pub fn monomial(num_vars: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(num_vars);
        assert!(
            m.0[num_vars..].iter().all(|&e| e == 0),
            "monomial uses a variable beyond num_vars"
        );
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = ([u16; MAX_VARS], Rational)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            assert!(e[num_vars..].iter().all(|&x| x == 0));
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `Some(d)` when every term has total degree `d`. The zero polynomial is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        PolyScalar {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        PolyScalar {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    /// Partial derivative with respect to the zero-based variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.0[i] = e - 1;
            out.add_term(m2, c * int(i64::from(e)));
        }
        out
    }

    pub fn gradient(&self) -> Vec<PolyScalar> {
        (0..self.num_vars).map(|i| self.partial(i)).collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.num_vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.num_vars, "point dimension mismatch");
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, xi) in x.iter().enumerate() {
                for _ in 0..m.0[i] {
                    t *= xi;
                }
            }
            total += t;
        }
        total
    }

    /// Floating-point evaluation; coefficients are rounded once.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.num_vars, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = rational_to_f64(c);
                for (i, xi) in x.iter().enumerate() {
                    t *= libm::pow(*xi, f64::from(m.0[i]));
                }
                t
            })
            .sum()
    }

    /// Substitutes `x -> M x`, i.e. returns `p(Mx)`. `matrix` is row-major
    /// with `num_vars` rows and columns.
    pub fn compose_linear(&self, matrix: &[Vec<Rational>]) -> Self {
        let n = self.num_vars;
        assert_eq!(matrix.len(), n);
        let rows: Vec<PolyScalar> = matrix
            .iter()
            .map(|row| {
                assert_eq!(row.len(), n);
                let mut p = Self::zero(n);
                for (j, a) in row.iter().enumerate() {
                    p.add_term(Monomial::var(j), a.clone());
                }
                p
            })
            .collect();
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut t = Self::constant(n, c.clone());
            for (i, row) in rows.iter().enumerate() {
                if m.0[i] > 0 {
                    t = &t * &row.pow(u32::from(m.0[i]));
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds the polynomial in a space with more variables.
    pub fn extend_vars(&self, num_vars: usize) -> Self {
        assert!(num_vars >= self.num_vars && num_vars <= MAX_VARS);
        PolyScalar {
            num_vars,
            terms: self.terms.clone(),
        }
    }

    /// True when the polynomial does not depend on variable `i`.
    pub fn independent_of(&self, i: usize) -> bool {
        self.terms.keys().all(|m| m.0[i] == 0)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.num_vars, other.num_vars,
            "polynomials live in different variable counts"
        );
    }
}

impl Add for &PolyScalar {
    type Output = PolyScalar;
    fn add(self, rhs: &PolyScalar) -> PolyScalar {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &PolyScalar {
    type Output = PolyScalar;
    fn sub(self, rhs: &PolyScalar) -> PolyScalar {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &PolyScalar {
    type Output = PolyScalar;
    fn neg(self) -> PolyScalar {
        PolyScalar {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Mul for &PolyScalar {
    type Output = PolyScalar;
    fn mul(self, rhs: &PolyScalar) -> PolyScalar {
        self.check_same(rhs);
        let mut out = PolyScalar::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for PolyScalar {
            type Output = PolyScalar;
            fn $f(self, rhs: PolyScalar) -> PolyScalar {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PolyScalar {
    type Output = PolyScalar;
    fn neg(self) -> PolyScalar {
        -&self
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for PolyScalar {
    /// Canonical text: graded-lex descending terms, `*` for products, `^`
    /// for powers, e.g. `2*x1*x3 - 2*x2*x4 - x3*x4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| Monomial::grlex_desc(a.0, b.0));
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for i in 0..self.num_vars {
                match m.0[i] {
                    0 => {}
                    1 => factors.push(alloc::format!("x{}", i + 1)),
                    e => factors.push(alloc::format!("x{}^{}", i + 1, e)),
                }
            }
            if factors.is_empty() {
                write_rational(f, &mag)?;
            } else {
                if !mag.is_one() {
                    write_rational(f, &mag)?;
                    f.write_str("*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn x(i: usize) -> PolyScalar {
        PolyScalar::var(4, i)
    }

    #[test]
    fn zero_terms_are_dropped() {
        let p = &x(0) - &x(0);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn partial_of_monomial() {
        let p = &(&x(0) * &x(0)) * &x(2);
        let d = p.partial(0);
        assert_eq!(d, (&x(0) * &x(2)).scale(&int(2)));
        assert!(p.partial(1).is_zero());
    }

    #[test]
    fn canonical_display() {
        let f1 = &(&(&x(0) * &x(2)).scale(&int(2)) - &(&x(1) * &x(3)).scale(&int(2))) - &(&x(2) * &x(3));
        assert_eq!(f1.to_string(), "2*x1*x3 - 2*x2*x4 - x3*x4");
        let q = &(&x(0) * &x(0)).scale(&rat(3, 2)) - &PolyScalar::constant(4, int(1));
        assert_eq!(q.to_string(), "3/2*x1^2 - 1");
        assert_eq!(PolyScalar::zero(3).to_string(), "0");
    }

    #[test]
    fn compose_linear_scales_quadratics() {
        let p = &(&x(0) * &x(0)) + &(&x(1) * &x(3));
        let eps = rat(1, 3);
        let m: Vec<Vec<Rational>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { eps.clone() } else { int(0) }).collect())
            .collect();
        assert_eq!(p.compose_linear(&m), p.scale(&(&eps * &eps)));
    }

    #[test]
    fn exact_eval() {
        let p = &(&x(0) * &x(0)).scale(&int(3)) - &x(3);
        assert_eq!(p.eval(&[int(1), int(0), int(0), rat(1, 2)]), rat(5, 2));
        assert!((p.eval_f64(&[1.0, 0.0, 0.0, 0.5]) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn homogeneity() {
        let p = &(&x(0) * &x(1)) + &(&x(2) * &x(2));
        assert_eq!(p.homogeneous_degree(), Some(2));
        let q = &p + &x(0);
        assert_eq!(q.homogeneous_degree(), None);
        assert_eq!(q.homogeneous_part(1), x(0));
        let _ = vec![0u8];
    }
}
