use std::time::Instant;

use nslab_core::form::VectorFieldPoly;
use nslab_core::frame::FlatFrame;
use nslab_core::nearsym::*;
use nslab_core::numeric::NumForm;
use nslab_core::poly::{int, rat, Rational};
use num_traits::{Signed, Zero};

fn frame() -> FlatFrame {
    FlatFrame::standard(4).unwrap()
}

#[test]
fn model_is_closed_and_self_dual_quickly() {
    let t0 = Instant::now();
    for eps in [int(0), int(1), rat(1, 3)] {
        let w = build_model_form(&eps).unwrap();
        assert!(w.exterior_d().unwrap().is_zero());
        assert_eq!(frame().hodge_star(&w).unwrap(), w);
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn eps_one_zero_set_is_the_hyperbola() {
    let w = build_model_form(&int(1)).unwrap();
    let rep = verify_near_symplectic(&w, &frame(), &VerifyOptions::default()).unwrap();
    assert_eq!(rep.zero_components.len(), 2);
    assert_eq!(rep.non_compact_components(), 2);
    for comp in &rep.zero_components {
        for (p, _) in comp.sample(100, 2.0) {
            assert_eq!((p[1], p[2]), (0.0, 0.0));
            let h = 3.0 * p[0] * p[0] - p[0] * p[3] - p[3] * p[3];
            assert!((h - 1.0).abs() < 1e-9, "H = {h}");
        }
    }
}

#[test]
fn eps_zero_gives_two_lines() {
    let comps = model_zero_components(&int(0));
    let mut slopes: Vec<f64> = comps
        .iter()
        .map(|c| match c {
            ZeroComponent::Line { slope, .. } => *slope,
            _ => panic!("expected lines"),
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let r = 13f64.sqrt();
    assert!((slopes[0] - (-1.0 - r) / 2.0).abs() < 1e-14);
    assert!((slopes[1] - (-1.0 + r) / 2.0).abs() < 1e-14);
}

#[test]
fn transversality_and_morse_bott() {
    let w = build_model_form(&int(1)).unwrap();
    let opts = VerifyOptions {
        samples_per_component: 50,
        ..VerifyOptions::default()
    };
    let rep = verify_near_symplectic(&w, &frame(), &opts).unwrap();
    assert_eq!(rep.transversality.len(), 100);
    assert!(rep.transversality.iter().all(|s| s.rank == 3));
    assert!(rep.morse_bott.pass);
    assert!(rep.morse_bott.samples.iter().all(|s| s.eigenvalues[0] > 0.0));
}

#[test]
fn exact_orientation_on_both_branches() {
    let w = build_model_form(&int(1)).unwrap();
    // Points on 3x1² - x1x4 - x4² = 1 with tangent (∂4 H, -∂1 H).
    let mut signs = Vec::new();
    for (x1, x4) in [(1, 1), (1, -2), (-1, -1), (-1, 2)] {
        let p = [int(x1), int(0), int(0), int(x4)];
        let t = [int(-x1 - 2 * x4), int(0), int(0), int(-(6 * x1 - x4))];
        let o = canonical_orientation(&w, &p, &t).unwrap();
        let ex = o.exact.as_ref().unwrap();
        assert!(ex.symmetric);
        assert!(ex.trace.is_zero());
        assert!(o.trace.abs() <= 1e-12);
        let neg: Vec<Rational> = t.iter().map(|v| -v).collect();
        let flipped = canonical_orientation(&w, &p, &neg).unwrap();
        assert_eq!(flipped.det_sign, -o.det_sign);
        signs.push((x1, o.det_sign));
    }
    // Along each branch the tangent (∂4 H, -∂1 H) is a consistent orientation.
    for x1 in [1, -1] {
        let s: Vec<i8> = signs.iter().filter(|s| s.0 == x1).map(|s| s.1).collect();
        assert_eq!(s[0], s[1]);
    }
}

#[test]
fn numerical_orientation_is_constant_per_component() {
    let w = build_model_form(&int(1)).unwrap();
    let rep = verify_near_symplectic(&w, &frame(), &VerifyOptions::default()).unwrap();
    for o in &rep.orientation {
        assert!(o.constant_sign);
        assert!(o.max_trace_residual <= 1e-12);
        assert!(o.max_symmetry_residual <= 1e-10);
    }
}

#[test]
fn orientation_off_zero_set_is_rejected() {
    let w = build_model_form(&int(1)).unwrap();
    let e = canonical_orientation(&w, &[int(0), int(0), int(0), int(0)], &[int(1), int(0), int(0), int(0)]).unwrap_err();
    assert!(matches!(e, NearSymError::NotOnZeroSet { .. }));
    let field = NumForm::new(&w);
    assert!(orientation_at(&field, &[0.3, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], 1e-8).is_err());
}

#[test]
fn liouville_primitive_recovers_model() {
    let w = build_model_form(&int(0)).unwrap();
    let lam = liouville_primitive(&w).unwrap();
    assert_eq!(lam.exterior_d().unwrap(), w);
    let euler = VectorFieldPoly::euler(4).unwrap().scale(&rat(1, 4));
    assert_eq!(w.lie_derivative(&euler).unwrap(), w);
}

#[test]
fn round_spheres_are_convex() {
    let w = build_model_form(&int(0)).unwrap();
    let v = VectorFieldPoly::euler(4).unwrap().scale(&rat(1, 4));
    let rep = convexity_check(&w, &v, &int(1), 25).unwrap();
    assert!(rep.min_radial_component > 0.0);
    assert_eq!(rep.zero_count(), 4);
    // Each zero lies on one of the two lines.
    let slopes = line_slopes();
    for ch in &rep.charts {
        for z in &ch.sphere_zeros {
            assert!(z[1].abs() < 1e-9 && z[2].abs() < 1e-9);
            let s = z[3] / z[0];
            assert!(slopes.iter().any(|t| (t - s).abs() < 1e-6), "slope {s}");
        }
    }
}

#[test]
fn non_liouville_field_is_rejected() {
    let w = build_model_form(&int(0)).unwrap();
    let v = VectorFieldPoly::euler(4).unwrap();
    assert_eq!(convexity_check(&w, &v, &int(1), 9).unwrap_err(), NearSymError::NotLiouville);
}

#[test]
fn linear_forms_and_paths() {
    let a = [
        [int(2), int(1), int(0)],
        [int(1), int(-1), int(0)],
        [int(0), int(0), int(-1)],
    ];
    let w = form_from_orientation_matrix(&a).unwrap();
    assert!(w.exterior_d().unwrap().is_zero());
    assert!(frame().is_self_dual(&w).unwrap());

    let f = |m: &[[Rational; 3]; 3]| m.clone().map(|r| r.map(|v| nslab_core::poly::rational_to_f64(&v)));
    let b = [[-1.0, 0.0, 0.5], [0.0, -1.0, 0.0], [0.5, 0.0, 2.0]];
    let p = connect_same_sign(&f(&a), &b, 200).unwrap();
    assert_eq!(p.samples.len(), 200);
    assert!(p.min_abs_det > 0.0);
    assert!(p.max_trace < 1e-12 && p.max_asymmetry < 1e-12);
    assert!(p.endpoint_error < 1e-12);

    let minus = b.map(|r| r.map(|v| -v));
    assert_eq!(connect_same_sign(&f(&a), &minus, 200).unwrap_err(), NearSymError::NoPath);
    assert!(a.iter().flatten().any(|v| v.is_negative()));
}

#[test]
fn cutoff_perturbation_in_the_shell() {
    let (lambda, mu) = model_primitives().unwrap();
    let rep = cutoff_perturb(&lambda, &mu, RadialProfile::default(), 0.1, &CutoffOptions::default()).unwrap();
    assert_eq!(rep.antipodal_pairs, 1000);
    assert!(rep.antipodal_residual <= 1e-10);
    assert!(rep.inner_residual <= 1e-12 && rep.outer_residual <= 1e-12);
    assert!(rep.closedness_residual <= 1e-12);
    assert!(rep.profile_derivative_error <= 1e-6);
    // dρ∧μ is not self-dual: ω_ε∧ω_ε goes negative on the old zero lines.
    assert!(rep.wedge.min_value < 0.0);
    assert!(matches!(rep.verdict(), Err(NearSymError::NearSymplecticFailure { .. })));
}
