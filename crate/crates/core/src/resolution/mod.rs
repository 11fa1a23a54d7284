//! Period of the exceptional sphere of the resolved `R⁴/±1` end and the
//! Jacobian of the period map in the mode model.

mod area;
mod period;

pub use area::{area_of, kahler_area_constant, AreaReport, ModelPotential};
pub use period::{
    exceptional_integral, exceptional_value, period_jacobian, ExceptionalSample, ExceptionalSweep, JacobianReport,
    PeriodFamily, ResolutionCap,
};

use thiserror::Error;

use crate::fit::FitError;
use crate::neck::NeckError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolutionError {
    #[error("model potential has non-positive area {0}")]
    NonPositiveArea(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("period Jacobian is singular: σ_min = {sigma_min} ≤ {threshold}")]
    SingularJacobian { sigma_min: f64, threshold: f64 },
    #[error(transparent)]
    Neck(#[from] NeckError),
    #[error(transparent)]
    Fit(#[from] FitError),
}
