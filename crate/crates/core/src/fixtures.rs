//! Named, pinned members of the families used by the test-suite and CLI.

use alloc::vec;
use alloc::vec::Vec;

use crate::form::PolyForm;
use crate::neck::{CapOperator, ModeBasis, ModeVector, NeckConfig, NeckError};
use crate::resolution::{kahler_area_constant, ResolutionCap, ResolutionError};
use crate::poly::{int, rat, PolyScalar};

fn x(i: usize) -> PolyScalar {
    PolyScalar::var(3, i)
}

fn cross_form(y: [PolyScalar; 3], scale: crate::poly::Rational) -> PolyForm {
    // (Y × x)·dx
    let c0 = &(&y[1] * &x(2)) - &(&y[2] * &x(1));
    let c1 = &(&y[2] * &x(0)) - &(&y[0] * &x(2));
    let c2 = &(&y[0] * &x(1)) - &(&y[1] * &x(0));
    PolyForm::one_form(vec![c0, c1, c2]).expect("three components").scale(&scale)
}

/// `(1/3) Y × x` with `Y = (x1, x2, -2x3)`; its curl is `Y`.
pub fn twist_quadratic() -> PolyForm {
    cross_form([x(0), x(1), x(2).scale(&int(-2))], rat(1, 3))
}

/// `(1/4) Z × x` with `Z = (0, 0, x1² + x2²)`.
pub fn twist_cubic() -> PolyForm {
    let r2 = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
    cross_form([PolyScalar::zero(3), PolyScalar::zero(3), r2], rat(1, 4))
}

/// `C = x1³/3 - x1 x2²`.
pub fn overtwisted_c() -> PolyScalar {
    &(&(&x(0) * &x(0)) * &x(0)).scale(&rat(1, 3)) - &(&x(0) * &(&x(1) * &x(1)))
}

/// `μ = μ_β + μ_3 - dC`, so that `λ_ε = da + ε μ_β + ε² μ_3`.
pub fn overtwisted_mu() -> PolyForm {
    twist_quadratic()
        .add(&twist_cubic())
        .and_then(|m| m.sub(&PolyForm::differential(&overtwisted_c())?))
        .expect("same shape")
}

/// `μ = μ_β + μ_3` without the compensating `-dC`.
pub fn overtwisted_mu_uncompensated() -> PolyForm {
    twist_quadratic().add(&twist_cubic()).expect("same shape")
}

/// `dz + x dy`.
pub fn standard_contact() -> PolyForm {
    PolyForm::one_form(vec![PolyScalar::zero(3), x(0), PolyScalar::one(3)]).expect("three components")
}

/// `λ = da + (1/3) Y × x`: `λ∧dλ = (x1² + x2² + 2x3²) vol`, one zero of
/// index `-1` at the origin.
pub fn twist_minus() -> PolyForm {
    crate::contact::saddle_differential().add(&twist_quadratic()).expect("same shape")
}

/// `-twist_minus()`: same `λ∧dλ`, index `+1`.
pub fn twist_plus() -> PolyForm {
    twist_minus().neg()
}

/// `twist_minus() + d(x1³/10)`.
pub fn twist_cubic_perturbed() -> PolyForm {
    let c = (&(&x(0) * &x(0)) * &x(0)).scale(&rat(1, 10));
    twist_minus().add(&PolyForm::differential(&c).expect("scalar")).expect("same shape")
}

/// Near-contact fixtures with their names.
pub fn near_contact_fixtures() -> [(&'static str, PolyForm); 4] {
    [
        ("standard-contact", standard_contact()),
        ("twist-minus", twist_minus()),
        ("twist-plus", twist_plus()),
        ("twist-cubic", twist_cubic_perturbed()),
    ]
}

/// `ε` values of the overtwisted fixture family.
pub const OVERTWISTED_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// `0.8 I + (0.6/d) S` with `S_oi = sin(1.7o + 0.9i + phase)`; declared
/// bound 1.5.
pub fn generic_cap(basis: &ModeBasis, phase: f64) -> CapOperator {
    let d = basis.dim() as f64;
    CapOperator::from_fn(
        basis,
        |o, i| {
            let diag = if o == i { 0.8 } else { 0.0 };
            diag + 0.6 / d * libm::sin(1.7 * o as f64 + 0.9 * i as f64 + phase)
        },
        1.5,
    )
    .expect("norm at most 1.4")
}

/// `a = (1, 1/2, -1/2)` on the lowest rung, `±0.8` alternating above.
pub fn default_psi(basis: &ModeBasis) -> ModeVector {
    let mut v = ModeVector::lowest(basis, [1.0, 0.5, -0.5]);
    for (j, a) in v.amplitudes.iter_mut().enumerate().skip(3) {
        *a = if j % 2 == 0 { 0.8 } else { -0.8 };
    }
    v
}

/// Generic caps on both ends.
pub fn default_neck(basis: &ModeBasis, t: f64) -> Result<NeckConfig, NeckError> {
    NeckConfig::new(t, basis.clone(), generic_cap(basis, 0.0), generic_cap(basis, 1.0))
}

/// Resolved end with area from the model potential with parameter `p`,
/// Kähler direction `ω1`, higher weights `1/2` and a generic cap.
pub fn resolution_cap(basis: &ModeBasis, p: f64) -> Result<ResolutionCap, ResolutionError> {
    let area = kahler_area_constant(p)?.area;
    ResolutionCap::new(area, 0, vec![0.5; basis.dim()], generic_cap(basis, 2.0))
}

/// `T = 4, 5, …, 12`.
pub fn default_t_sweep() -> Vec<f64> {
    (4..=12).map(f64::from).collect()
}
