//! Mode-ladder model of neck stretching on `[0, T] × Y`.
//!
//! A harmonic self-dual form on the neck is a sum of modes `a_λ e^{-λt}`
//! (decaying to the right) and `b_λ e^{-λ(T-t)}` (decaying to the left).
//! Caps are linear maps on mode amplitudes.

mod cap;
mod iterate;
mod modes;

pub use cap::CapOperator;
pub use iterate::{
    direct_solve, first_contracting_t, iterate_neck, neck_sweep, second_term_split, transport, NeckConfig,
    NeckResult, NeckSample, NeckSweep, SecondTermSplit, SecondTermSweep,
};
pub use modes::{lowest_mode_form, lowest_mode_projection, mode_decay, Direction, ModeBasis, ModeVector, WindowDecay};

use thiserror::Error;

use crate::fit::FitError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeckError {
    #[error("invalid ladder: {0}")]
    InvalidLadder(&'static str),
    #[error("invalid neck configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("expected {expected} amplitudes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cap operator norm {measured} exceeds declared bound {bound}")]
    CapNormExceeded { measured: f64, bound: f64 },
    #[error("mode vector must decay toward increasing t")]
    WrongDirection,
    #[error("non-finite amplitude at index {0}")]
    NotFinite(usize),
    #[error("no contraction at T = {t}: bound C·e^(-2T) = {ratio_bound} ≥ 1")]
    NoConvergence { t: f64, ratio_bound: f64 },
    #[error("fixed-point system is singular")]
    SingularSystem,
    #[error(transparent)]
    Fit(#[from] FitError),
}
