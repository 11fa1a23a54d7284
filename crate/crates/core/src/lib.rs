#![no_std]
//! Exact exterior calculus on flat R^3 and R^4, near-symplectic and
//! near-contact model forms, and a mode-ladder model of neck stretching.

extern crate alloc;

pub mod error;
pub mod form;
pub mod frame;
pub mod poly;

pub use error::FormError;
pub use form::{AltTensor, Indices, PolyForm, VectorFieldPoly};
pub use frame::{anti_self_dual_basis, self_dual_basis, FlatFrame};
pub use poly::{int, rat, Monomial, PolyScalar, Rational};
pub mod contact;
pub mod fit;
pub mod fixtures;
pub mod linalg;
pub mod nearsym;
pub mod neck;
pub mod resolution;
pub mod numeric;
pub mod ode;
