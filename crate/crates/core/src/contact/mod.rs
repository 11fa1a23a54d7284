//! Near-contact 1-forms on R^3: zeros and their indices, the local
//! interpolation bound, the overtwisted sphere flow and homotopy
//! obstructions.

use thiserror::Error;

use crate::error::FormError;
use crate::ode::OdeError;

pub mod interpolation;
pub mod obstruction;
pub mod sphere;
pub mod verify;

pub use interpolation::{local_interpolation, InterpolationReport, LogCutoff};
pub use obstruction::{homotopy_obstructions, Obstruction, ObstructionVerdict};
pub use sphere::{
    c1_distance_rate, locate_eps_max, overtwisted_family, rescaled_form, saddle_differential, sphere_zeros, C1RateReport, EpsMaxReport, PeriodicOrbit, SphereFlowOptions,
    SphereFlowResult, SphereZero,
};
pub use verify::{verify_near_contact, zero_index, ContactZero, Grid3, NearContactReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContactError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("expected a 1-form on R^3")]
    NotOneFormOnR3,
    #[error("A is definite at {point:?}")]
    DefiniteA { point: [f64; 3] },
    #[error("f = {value:e} is not positive at {point:?}")]
    NegativeF { point: [f64; 3], value: f64 },
    #[error("degenerate zero at {point:?}")]
    DegenerateZero { point: [f64; 3] },
    #[error("f has no nondegenerate minimum at the zero {point:?}")]
    DegenerateMinimum { point: [f64; 3] },
    #[error("dλ = {residual:e} ≠ 0 at the zero {point:?}")]
    DlambdaNonzero { point: [f64; 3], residual: f64 },
    #[error("|λ(p)| = {residual:e}: not a zero")]
    NotAZero { residual: f64 },
    #[error("∇λ is singular at the zero")]
    Degenerate,
    #[error("indices differ: {left} vs {right}")]
    IndexMismatch { left: i8, right: i8 },
    #[error("λ∧dλ and λ'∧dλ' induce opposite orientations")]
    OrientationMismatch,
    #[error("∇λ(0) ≠ ∇λ'(0); normalize by a linear change first")]
    GradientMismatch,
    #[error("f_t < (c/3) r² at t = {t}, point {point:?} (ratio {ratio:e})")]
    BoundViolated { t: f64, point: [f64; 3], ratio: f64 },
    #[error("the forms do not both vanish at {point:?}")]
    ZeroSetMismatch { point: [f64; 3] },
    #[error("found {found} zeros on the sphere, expected {expected}")]
    WrongZeroCount { found: usize, expected: usize },
    #[error("divergence {div:e} ≥ 0 at the zero {point:?}")]
    PositiveDivergence { point: [f64; 3], div: f64 },
    #[error("no periodic orbit found: {0}")]
    NoCycleFound(&'static str),
    #[error("inadmissible input: {0}")]
    Inadmissible(&'static str),
}
