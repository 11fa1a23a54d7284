use std::time::Instant;

use nslab_core::fixtures::*;
use nslab_core::neck::*;
use nslab_core::poly::rat;
use nslab_core::resolution::*;
use nslab_core::FlatFrame;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ladders() -> Vec<ModeBasis> {
    vec![
        ModeBasis::from_values(&[2.0, 3.0], 3).unwrap(),
        ModeBasis::default_ladder(),
        ModeBasis::from_values(&[2.0, 2.5, 5.0], 2).unwrap(),
    ]
}

#[test]
fn window_ratio_bounded_for_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for basis in ladders() {
        for _ in 0..1000 {
            let amps: Vec<f64> = (0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let psi = ModeVector::new(&basis, amps, Direction::IncreasingT).unwrap();
            for s in [0.5, 1.0, 2.0, 4.0] {
                let w = mode_decay(&basis, &psi, s).unwrap();
                assert!(w.holds, "ratio {} > {}", w.ratio, w.bound);
            }
        }
    }
}

#[test]
fn window_ratio_exact_on_lowest_rung() {
    let basis = ModeBasis::default_ladder();
    for s in [0.5, 1.0, 2.0, 4.0] {
        let w = mode_decay(&basis, &ModeVector::lowest(&basis, [0.3, -1.0, 2.0]), s).unwrap();
        assert!((w.ratio - (-2.0 * s).exp()).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_ratio_monotone(amps in prop::collection::vec(-5.0f64..5.0, 9), s in 0.0f64..6.0) {
        let basis = ModeBasis::default_ladder();
        prop_assume!(amps.iter().any(|a| a.abs() > 1e-6));
        let psi = ModeVector::new(&basis, amps, Direction::IncreasingT).unwrap();
        let a = mode_decay(&basis, &psi, s).unwrap();
        let b = mode_decay(&basis, &psi, s + 0.5).unwrap();
        prop_assert!(a.holds);
        prop_assert!(b.at_q1_plus_s <= a.at_q1_plus_s);
    }

    #[test]
    fn transport_is_diagonal(amps in prop::collection::vec(-5.0f64..5.0, 9), t in 0.0f64..8.0) {
        let basis = ModeBasis::default_ladder();
        let out = transport(&basis, &amps, t);
        for (j, (&r, (&x, &y))) in basis.rates().iter().zip(amps.iter().zip(&out)).enumerate() {
            prop_assert!((y - x * (-r * t).exp()).abs() <= 1e-15 * x.abs().max(1e-300), "j = {}", j);
        }
    }

    #[test]
    fn limit_matches_direct_solve(t in 4.0f64..12.0, phase in 0.0f64..6.0) {
        let basis = ModeBasis::from_values(&[2.0, 3.0], 3).unwrap();
        let cfg = NeckConfig::new(t, basis.clone(), generic_cap(&basis, phase), generic_cap(&basis, phase + 1.0)).unwrap();
        let s = NeckSample::run(&cfg, &default_psi(&basis), 200).unwrap();
        prop_assert!(s.direct_error <= 1e-12);
    }
}

#[test]
fn contraction_decreases_with_t() {
    let basis = ModeBasis::default_ladder();
    let mut prev = f64::INFINITY;
    for t in default_t_sweep() {
        let cfg = default_neck(&basis, t).unwrap();
        let rb = cfg.ratio_bound();
        assert!(rb < prev);
        prev = rb;
        let r = iterate_neck(&cfg, &default_psi(&basis), 200).unwrap();
        assert!(r.converged && r.contraction_within_bound);
        for w in r.per_iterate_norms.windows(2).skip(1) {
            assert!(w[1] <= r.ratio_bound * w[0] * (1.0 + 1e-12) || w[1] == 0.0);
        }
    }
}

#[test]
fn tail_slopes_and_direct_limit() {
    for basis in ladders() {
        let t0 = Instant::now();
        let cfg = default_neck(&basis, 4.0).unwrap();
        let sweep = neck_sweep(&cfg, &default_psi(&basis), &default_t_sweep(), 200).unwrap();
        assert!(t0.elapsed().as_secs_f64() < 10.0);
        let t1 = sweep.tail1_fit.as_ref().unwrap();
        let t2 = sweep.tail2_fit.as_ref().unwrap();
        assert!((t1.slope + 2.0).abs() <= 0.05, "tail1 {}", t1.slope);
        assert!((t2.slope + 4.0).abs() <= 0.1, "tail2 {}", t2.slope);
        assert!(sweep.max_direct_error <= 1e-12, "{}", sweep.max_direct_error);
    }
}

#[test]
fn zero_caps_stop_after_first_term() {
    let basis = ModeBasis::default_ladder();
    let z = CapOperator::zero(&basis);
    let cfg = NeckConfig::new(5.0, basis.clone(), z.clone(), z).unwrap();
    let r = iterate_neck(&cfg, &default_psi(&basis), 50).unwrap();
    assert_eq!(r.tail1, 0.0);
    assert_eq!(r.tail2, 0.0);
}

#[test]
fn second_term_higher_part_slope() {
    for basis in ladders() {
        let cfg = default_neck(&basis, 4.0).unwrap();
        let sw = SecondTermSweep::run(&cfg, &default_psi(&basis), &default_t_sweep()).unwrap();
        let gap = basis.gap().unwrap();
        let lowest = sw.lowest_fit.unwrap();
        let higher = sw.higher_fit.unwrap();
        assert!((lowest.slope + 2.0).abs() <= 0.05, "{}", lowest.slope);
        assert!((higher.slope + gap).abs() <= 0.05, "gap {gap}: {}", higher.slope);
    }
}

#[test]
fn single_rung_has_no_higher_part() {
    let basis = ModeBasis::from_values(&[2.0], 3).unwrap();
    let cfg = default_neck(&basis, 6.0).unwrap();
    let split = second_term_split(&cfg, &default_psi(&basis)).unwrap();
    assert_eq!(split.higher_norm, 0.0);
    assert!(split.lowest_norm > 0.0);
}

#[test]
fn lowest_mode_pairing() {
    let frame = FlatFrame::standard(4).unwrap();
    let a = [rat(3, 2), rat(-1, 3), rat(2, 1)];
    let form = lowest_mode_form(&a);
    for (i, w) in nslab_core::self_dual_basis().iter().enumerate() {
        let p = frame.inner(&form, w).unwrap();
        assert_eq!(p, nslab_core::PolyScalar::constant(4, &a[i] * &rat(2, 1)));
    }
    let basis = ModeBasis::default_ladder();
    assert_eq!(lowest_mode_projection(&default_psi(&basis)), [1.0, 0.5, -0.5]);
}

#[test]
fn area_quadratures_agree() {
    for p in [0.25, 0.7, 1.0, 3.0] {
        let r = kahler_area_constant(p).unwrap();
        assert!((r.coarse - r.fine).abs() <= 1e-6, "p = {p}");
        assert!((r.area - std::f64::consts::PI * p).abs() <= 1e-9, "p = {p}");
        assert!(r.min_positivity > 0.0);
    }
    let a = area_of(ModelPotential::new(0.7, 1.0).unwrap()).unwrap().area;
    let b = area_of(ModelPotential::new(0.7, 2.5).unwrap()).unwrap().area;
    assert!((b / a - 2.5).abs() < 1e-12);
    assert!(ModelPotential::new(-1.0, 1.0).is_err());
}

#[test]
fn exceptional_integral_slope_and_intercept() {
    for basis in ladders() {
        let cfg = default_neck(&basis, 4.0).unwrap();
        let res = resolution_cap(&basis, 0.7).unwrap();
        let psi = default_psi(&basis);
        let sw = exceptional_integral(&cfg, &res, &psi, &default_t_sweep()).unwrap();
        let want = (2.0 * res.area * psi.amplitudes[0]).ln();
        assert_eq!(sw.expected_intercept, Some(want));
        assert!((sw.fit.slope + 2.0).abs() <= 0.05, "{}", sw.fit.slope);
        assert!((sw.fit.intercept - want).abs() <= 0.05, "{} vs {want}", sw.fit.intercept);
        let rem = sw.remainder_fit.unwrap();
        assert!(rem.slope <= -(basis.gap().unwrap() - 0.05), "{}", rem.slope);
    }
}

#[test]
fn exceptional_integral_without_kahler_component() {
    for basis in ladders() {
        let cfg = default_neck(&basis, 4.0).unwrap();
        let res = resolution_cap(&basis, 0.7).unwrap();
        let mut psi = default_psi(&basis);
        psi.amplitudes[0] = 0.0;
        let sw = exceptional_integral(&cfg, &res, &psi, &default_t_sweep()).unwrap();
        assert_eq!(sw.expected_intercept, None);
        let c = basis.gap().unwrap();
        assert!(sw.fit.slope <= -(c - 0.05), "{} vs {c}", sw.fit.slope);
    }
}

fn zero_cap_setup(basis: &ModeBasis, t: f64) -> (NeckConfig, ResolutionCap) {
    let z = CapOperator::zero(basis);
    let cfg = NeckConfig::new(t, basis.clone(), z.clone(), z.clone()).unwrap();
    let area = kahler_area_constant(0.7).unwrap().area;
    (cfg, ResolutionCap::new(area, 0, vec![0.5; basis.dim()], z).unwrap())
}

#[test]
fn identity_family_jacobian_is_leading_term() {
    let basis = ModeBasis::from_values(&[2.0, 3.0], 3).unwrap();
    for n in [1, 2] {
        let (cfg, res) = zero_cap_setup(&basis, 8.0);
        let j = period_jacobian(&PeriodFamily::identity(n, basis.clone()), &cfg, &res, 1e-4).unwrap();
        let lead = j.leading_scale;
        assert!((lead - 2.0 * res.area * (-16.0f64).exp()).abs() <= 1e-15 * lead);
        for (r, row) in j.matrix.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let want = if r == c { lead } else { 0.0 };
                assert!((v - want).abs() <= 1e-8 * lead, "({r}, {c}): {v}");
            }
        }
    }
}

#[test]
fn generic_family_is_nonsingular() {
    for basis in ladders() {
        let cfg = default_neck(&basis, 8.0).unwrap();
        let res = resolution_cap(&basis, 0.7).unwrap();
        let j = period_jacobian(&PeriodFamily::generic(1, basis.clone()), &cfg, &res, 1e-4).unwrap();
        assert!(j.sigma_min > j.threshold);
        for s in &j.singular_values {
            assert!(*s > 0.5 * j.leading_scale && *s < 2.0 * j.leading_scale, "{s}");
        }
    }
}

#[test]
fn redundant_family_is_singular() {
    let basis = ModeBasis::default_ladder();
    let cfg = default_neck(&basis, 8.0).unwrap();
    let res = resolution_cap(&basis, 0.7).unwrap();
    let e = period_jacobian(&PeriodFamily::redundant(1, basis.clone()), &cfg, &res, 1e-4).unwrap_err();
    assert!(matches!(e, ResolutionError::SingularJacobian { .. }));
}

#[test]
fn relabelling_points_permutes_jacobian() {
    let basis = ModeBasis::from_values(&[2.0, 3.0], 3).unwrap();
    let cfg = default_neck(&basis, 6.0).unwrap();
    let res = resolution_cap(&basis, 0.7).unwrap();
    let fam = PeriodFamily::generic(2, basis.clone());
    let perm = [1, 0];
    let j = period_jacobian(&fam, &cfg, &res, 1e-4).unwrap();
    let jp = period_jacobian(&fam.relabel(&perm), &cfg, &res, 1e-4).unwrap();
    let idx = |k: usize| 3 * perm[k / 3] + k % 3;
    for r in 0..6 {
        for c in 0..6 {
            assert!((jp.matrix[idx(r)][idx(c)] - j.matrix[r][c]).abs() <= 1e-6 * j.leading_scale);
        }
    }
    for (a, b) in j.singular_values.iter().zip(&jp.singular_values) {
        assert!((a - b).abs() <= 1e-6 * j.leading_scale);
    }
}
