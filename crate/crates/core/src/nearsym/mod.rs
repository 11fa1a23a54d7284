//! Near-symplectic model forms on R^4: zero sets, transversality,
//! Morse–Bott data, orientation forms, Liouville primitives, cutoff
//! perturbations and ω-convexity.

use thiserror::Error;

use crate::contact::ContactError;
use crate::error::FormError;

pub mod convexity;
pub mod cutoff;
pub mod linear;
pub mod model;
pub mod orientation;
pub mod verify;
pub mod zeroset;

pub use convexity::{convexity_check, ConvexityReport};
pub use cutoff::{cutoff_perturb, locate_two_component_range, model_primitives, CutoffForm, CutoffOptions, CutoffReport, EpsRange, RadialProfile};
pub use linear::{connect_same_sign, form_from_orientation_matrix, LinearPath};
pub use model::{build_model_form, line_slopes, model_coefficients, model_eps, model_h, model_zero_components, ZeroComponent};
pub use orientation::{canonical_orientation, orientation_at, OrientationForm};
pub use verify::{liouville_primitive, verify_near_symplectic, VerifyOptions, ZeroSetReport};
pub use zeroset::{extract_zero_set, ContinuationOptions, CurveEnd, TracedCurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NearSymError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error("negative perturbation parameter")]
    NegativeEps,
    #[error("form is not closed")]
    NotClosed,
    #[error("degenerate zero at {point:?}: rank {rank} < 3")]
    DegenerateZero { point: [f64; 4], rank: usize },
    #[error("ω∧ω = {value:e} < 0 at {point:?}")]
    IndefiniteWedge { point: [f64; 4], value: f64 },
    #[error("point is not on the zero set (|ω| = {residual:e})")]
    NotOnZeroSet { residual: f64 },
    #[error("tangent is not in the kernel of ∇ω (|∇_t ω| = {residual:e})")]
    TangentNotInKernel { residual: f64 },
    #[error("orientation matrix is degenerate")]
    DegenerateOrientation,
    #[error("coefficients are not homogeneous")]
    NotHomogeneous,
    #[error("expected {expected} zero-set components, found {found}")]
    ComponentCountMismatch { expected: usize, found: usize },
    #[error("near-symplectic condition fails at {point:?}: {reason}")]
    NearSymplecticFailure { point: [f64; 4], reason: &'static str },
    #[error("L_V ω ≠ ω")]
    NotLiouville,
    #[error("V is not outward transverse at {point:?}")]
    NotTransverse { point: [f64; 4] },
    #[error("no eigenvalue-interpolation path between the given matrices")]
    NoPath,
}
