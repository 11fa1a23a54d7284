use std::time::Instant;

use nslab_core::contact::*;
use nslab_core::fixtures::*;
use nslab_core::form::PolyForm;
use nslab_core::poly::{int, rat, rational_to_f64, Rational};
use proptest::prelude::*;

fn grid() -> Grid3 {
    Grid3 { lo: -1.0, hi: 1.0, n: 21 }
}

#[test]
fn fixtures_are_near_contact() {
    for (name, lam) in near_contact_fixtures() {
        let rep = verify_near_contact(&lam, &grid()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(rep.positivity.min_f_off_zeros > 0.0, "{name}");
        for z in &rep.zeros {
            assert!(z.dlambda_residual == 0.0, "{name}");
            assert!(z.a_symmetry_residual < 1e-12, "{name}");
            let pos = z.a_eigenvalues.iter().filter(|&&e| e > 0.0).count();
            assert!(pos == 1 || pos == 2, "{name}: A definite");
            assert!(z.hessian_f_eigenvalues.iter().all(|&e| e > 0.0), "{name}");
        }
        let expected = if name == "standard-contact" { 0 } else { 1 };
        assert_eq!(rep.zeros.len(), expected, "{name}");
    }
}

#[test]
fn twist_indices() {
    let o = [0.0; 3];
    assert_eq!(zero_index(&twist_minus(), &o).unwrap(), -1);
    assert_eq!(zero_index(&twist_plus(), &o).unwrap(), 1);
    assert_eq!(zero_index(&twist_cubic_perturbed(), &o).unwrap(), -1);
}

#[test]
fn exact_gradient_has_definite_a() {
    // d(x1² + x2² + x3²)/2: dλ = 0 and A = I is definite.
    let x = |i| nslab_core::PolyScalar::var(3, i);
    let r2 = &(&(&x(0) * &x(0)) + &(&x(1) * &x(1))) + &(&x(2) * &x(2));
    let lam = PolyForm::differential(&r2.scale(&rat(1, 2))).unwrap();
    assert!(matches!(verify_near_contact(&lam, &grid()).unwrap_err(), ContactError::DefiniteA { .. }));
}

#[test]
fn saddle_alone_is_not_near_contact() {
    let e = verify_near_contact(&saddle_differential(), &grid()).unwrap_err();
    assert!(matches!(e, ContactError::NegativeF { .. } | ContactError::DegenerateMinimum { .. }));
}

fn check_interpolation(lam: &PolyForm, lam_prime: &PolyForm) -> InterpolationReport {
    let rep = local_interpolation(lam, lam_prime, 0.5, 0.5).unwrap();
    assert_eq!(rep.radii * rep.directions, 10_000);
    assert_eq!(rep.slices.len(), 5);
    for s in &rep.slices {
        assert!(s.min_ratio >= rep.c / 3.0, "t = {}: {} < {}", s.t, s.min_ratio, rep.c / 3.0);
    }
    rep
}

#[test]
fn interpolation_to_itself() {
    let rep = check_interpolation(&twist_minus(), &twist_minus());
    assert_eq!(rep.halvings, 0);
}

#[test]
fn interpolation_to_cubic_perturbation() {
    check_interpolation(&twist_minus(), &twist_cubic_perturbed());
    check_interpolation(&twist_plus(), &twist_plus().add(&PolyForm::differential(&nslab_core::PolyScalar::var(3, 1).pow(3).scale(&rat(1, 5))).unwrap()).unwrap());
}

#[test]
fn interpolation_rejects_index_change() {
    let e = local_interpolation(&twist_minus(), &twist_plus(), 0.5, 0.5).unwrap_err();
    assert_eq!(e, ContactError::IndexMismatch { left: -1, right: 1 });
}

#[test]
fn cutoff_profile() {
    let c = LogCutoff { radius: 1.0, delta: 0.5 };
    let inner = c.inner_radius();
    assert_eq!(c.value(inner * 0.5), 1.0);
    assert_eq!(c.value(1.5), 0.0);
    for k in 1..200 {
        let r = inner * (1.0 / inner).powf(k as f64 / 200.0);
        assert!(-c.derivative(r) * r <= c.delta * (1.0 + 1e-12));
        assert!(c.derivative(r) <= 0.0);
    }
}

#[test]
fn obstructions() {
    let o = [[0.0; 3]];
    assert_eq!(
        homotopy_obstructions(&twist_minus(), &twist_cubic_perturbed(), &o).unwrap(),
        ObstructionVerdict::ObstructionFree
    );
    assert!(matches!(
        homotopy_obstructions(&twist_minus(), &twist_plus(), &o).unwrap(),
        ObstructionVerdict::Obstructed(Obstruction::Index { left: -1, right: 1, .. })
    ));
    // Reflection x3 → -x3 keeps the index of the saddle part but flips λ∧dλ.
    let refl = vec![
        vec![int(1), int(0), int(0)],
        vec![int(0), int(1), int(0)],
        vec![int(0), int(0), int(-1)],
    ];
    let mirrored = twist_minus().pullback_linear(&refl).unwrap();
    assert!(matches!(
        homotopy_obstructions(&twist_minus(), &mirrored, &o).unwrap(),
        ObstructionVerdict::Obstructed(Obstruction::Orientation { .. })
    ));
    assert!(matches!(
        homotopy_obstructions(&twist_minus(), &twist_plus(), &[[0.3, 0.0, 0.0]]),
        Err(ContactError::ZeroSetMismatch { .. })
    ));
}

fn orientation_preserving() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(-3i64..=3, 9)
        .prop_map(|v| v.chunks(3).map(|r| r.iter().map(|&x| int(x)).collect::<Vec<_>>()).collect::<Vec<_>>())
        .prop_filter("det > 0", |m| {
            let f: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
            let d = f[0][0] * (f[1][1] * f[2][2] - f[1][2] * f[2][1]) - f[0][1] * (f[1][0] * f[2][2] - f[1][2] * f[2][0])
                + f[0][2] * (f[1][0] * f[2][1] - f[1][1] * f[2][0]);
            d > 0.5
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn index_and_orientation_survive_linear_changes(m in orientation_preserving()) {
        for lam in [twist_minus(), twist_plus()] {
            let pulled = lam.pullback_linear(&m).unwrap();
            prop_assert_eq!(zero_index(&pulled, &[0.0; 3]).unwrap(), zero_index(&lam, &[0.0; 3]).unwrap());
            prop_assert_eq!(
                homotopy_obstructions(&lam, &pulled, &[[0.0; 3]]).unwrap(),
                ObstructionVerdict::ObstructionFree
            );
        }
    }
}

#[test]
fn overtwisted_family_at_four_eps() {
    let mu = overtwisted_mu();
    let c = overtwisted_c();
    let opts = SphereFlowOptions::default();
    for eps in OVERTWISTED_EPS {
        let t0 = Instant::now();
        let r = overtwisted_family(&mu, &c, eps, &opts).unwrap();
        let secs = t0.elapsed().as_secs_f64();
        assert!(secs < 30.0, "ε = {eps}: {secs} s");
        assert_eq!(r.zeros_on_sphere.len(), 2);
        for z in &r.zeros_on_sphere {
            assert!((z.point[2].abs() - 1.0).abs() < 1e-9);
            assert!((z.divergence + 2.0 * eps).abs() < 1e-9, "div {}", z.divergence);
        }
        let orbit = r.periodic_orbit.unwrap();
        let xs = ((1.0 + eps * eps / 4.0).sqrt() - 1.0) / (eps / 2.0);
        assert!((orbit.section_x3 - xs).abs() < 1e-8, "x3* {} vs {xs}", orbit.section_x3);
        assert!((orbit.period / (std::f64::consts::PI / xs) - 1.0).abs() < 1e-6);
        assert!(orbit.return_residual <= 1e-6);
        assert!(orbit.closure <= 1e-6);
        assert!(orbit.multiplier_reversed > 0.0 && orbit.multiplier_reversed < 1.0);
        let predicted = (-(1.0 - xs * xs) * (eps + eps * eps * xs / 2.0) * orbit.period).exp();
        assert!((orbit.multiplier_reversed / predicted - 1.0).abs() < 1e-3, "{} vs {predicted}", orbit.multiplier_reversed);
        assert_eq!(r.attracting_direction, "reversed");
    }
}

#[test]
fn uncompensated_family_has_extra_zeros() {
    let e = overtwisted_family(&overtwisted_mu_uncompensated(), &overtwisted_c(), 0.1, &SphereFlowOptions::default()).unwrap_err();
    assert_eq!(e, ContactError::WrongZeroCount { found: 8, expected: 2 });
}

#[test]
fn rescaled_form_converges_to_saddle() {
    let r = c1_distance_rate(&overtwisted_mu(), &overtwisted_c()).unwrap();
    assert!((r.slope - 1.0).abs() < 0.05, "slope {}", r.slope);
    let lam = rescaled_form(&overtwisted_mu(), &overtwisted_c(), &rat(1, 10)).unwrap();
    let diff = lam.sub(&saddle_differential()).unwrap();
    assert!(!diff.is_zero());
}
