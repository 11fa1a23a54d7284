//! The twelve acceptance criteria, each evaluated against pinned
//! tolerances from [`tol`].

use std::fmt;
use std::time::Instant;

use nslab_core::contact::{local_interpolation, overtwisted_family, verify_near_contact, Grid3, SphereFlowOptions};
use nslab_core::fixtures::*;
use nslab_core::nearsym::*;
use nslab_core::neck::*;
use nslab_core::numeric::{norm, NumForm};
use nslab_core::poly::{int, rat, Rational};
use nslab_core::resolution::*;
use nslab_core::{FlatFrame, PolyForm, PolyScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub mod tol;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict}  {}: {} [{:.2} s]", self.id, self.title, self.detail, self.seconds)
    }
}

pub const TITLES: [&str; 12] = [
    "exact closedness and self-duality",
    "zero-set structure",
    "transversality and Morse-Bott",
    "orientation form",
    "cutoff perturbation",
    "near-contact suite",
    "overtwisted family",
    "window-norm decay",
    "neck iteration tails",
    "second iterate, higher modes",
    "exceptional-sphere period",
    "period Jacobian",
];

/// Evaluates criterion `id` (1 to 12).
pub fn run(id: u8, seed: u64) -> CriterionResult {
    let t0 = Instant::now();
    let out = match id {
        1 => exact_identities(),
        2 => zero_set_structure(),
        3 => transversality(),
        4 => orientation(),
        5 => cutoff(),
        6 => near_contact(),
        7 => overtwisted(),
        8 => window_decay(seed),
        9 => neck_tails(),
        10 => higher_modes(),
        11 => exceptional_period(),
        12 => jacobian(),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match out {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        title: TITLES.get(usize::from(id).wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=12).map(|id| run(id, seed)).collect()
}

type Outcome = Result<(bool, String), String>;

fn within(value: f64, (target, tol): (f64, f64)) -> bool {
    (value - target).abs() <= tol
}

fn frame() -> FlatFrame {
    FlatFrame::standard(4).expect("standard frame")
}

fn model(eps: &Rational) -> Result<PolyForm, String> {
    build_model_form(eps).map_err(|e| e.to_string())
}

fn exact_identities() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    for eps in [int(0), int(1), rat(1, 3)] {
        let w = model(&eps)?;
        ok &= w.exterior_d().map_err(|e| e.to_string())?.is_zero();
        ok &= frame().hodge_star(&w).map_err(|e| e.to_string())? == w;
    }
    let secs = t0.elapsed().as_secs_f64();
    Ok((
        ok && secs < tol::EXACT_RUNTIME_SECS,
        format!("dω = 0 and ⋆ω = ω exactly for ε ∈ {{0, 1, 1/3}}: {ok}; {secs:.3} s"),
    ))
}

fn h(p: &[f64; 4]) -> f64 {
    3.0 * p[0] * p[0] - p[0] * p[3] - p[3] * p[3]
}

fn zero_set_structure() -> Outcome {
    let w = model(&int(1))?;
    let rep = verify_near_symplectic(&w, &frame(), &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let branches = rep
        .zero_components
        .iter()
        .filter(|c| matches!(c, ZeroComponent::HyperbolaBranch { .. }))
        .count();
    let mut worst = 0.0_f64;
    for comp in &rep.zero_components {
        for (p, _) in comp.sample(100, 2.0) {
            worst = worst.max(p[1].abs()).max(p[2].abs()).max((h(&p) - 1.0).abs());
        }
    }
    // ε = 0: the lines x4 = t·x1 with t = (-1 ± √13)/2.
    let r13 = 13f64.sqrt();
    let expected = [(-1.0 - r13) / 2.0, (-1.0 + r13) / 2.0];
    let mut slopes: Vec<f64> = model_zero_components(&int(0))
        .iter()
        .filter_map(|c| match c {
            ZeroComponent::Line { slope, .. } => Some(*slope),
            _ => None,
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let slope_err = if slopes.len() == 2 {
        (slopes[0] - expected[0]).abs().max((slopes[1] - expected[1]).abs())
    } else {
        f64::INFINITY
    };
    let field = NumForm::new(&model(&int(0))?);
    let mut line_residual = 0.0_f64;
    for t in expected {
        for s in [-2.0, -0.5, 0.7, 1.9] {
            let p = [s, 0.0, 0.0, s * t];
            line_residual = line_residual.max(norm(&field.eval(&p)) / (s * s));
        }
    }
    let ok = branches == 2
        && rep.zero_components.len() == 2
        && worst <= tol::ZERO_SET_EQUATIONS
        && slope_err <= tol::LINE_SLOPE
        && line_residual <= tol::LINE_SLOPE;
    Ok((
        ok,
        format!(
            "ε = 1: {branches} hyperbola branches, max |x2|, |x3|, |H - 1| = {worst:.1e}; ε = 0: slope error {slope_err:.1e}, |ω| on lines {line_residual:.1e}"
        ),
    ))
}

fn transversality() -> Outcome {
    let w = model(&int(1))?;
    let opts = VerifyOptions {
        samples_per_component: tol::TRANSVERSAL_SAMPLES / 2,
        ..VerifyOptions::default()
    };
    let rep = verify_near_symplectic(&w, &frame(), &opts).map_err(|e| e.to_string())?;
    let rank3 = rep.transversality.iter().filter(|s| s.rank == 3).count();
    let min_eig = rep
        .morse_bott
        .samples
        .iter()
        .map(|s| s.eigenvalues[0])
        .fold(f64::INFINITY, f64::min);
    let ok = rep.transversality.len() == tol::TRANSVERSAL_SAMPLES
        && rank3 == tol::TRANSVERSAL_SAMPLES
        && rep.morse_bott.pass
        && min_eig > 0.0;
    Ok((
        ok,
        format!(
            "rank 3 at {rank3}/{} samples; min normal Hessian eigenvalue {min_eig:.3e}",
            rep.transversality.len()
        ),
    ))
}

fn orientation() -> Outcome {
    let w = model(&int(1))?;
    let mut exact_ok = true;
    let mut flips = true;
    let mut signs = Vec::new();
    let mut max_trace = 0.0_f64;
    for (x1, x4) in [(1i64, 1i64), (1, -2), (-1, -1), (-1, 2)] {
        let p = [int(x1), int(0), int(0), int(x4)];
        let t = [int(-x1 - 2 * x4), int(0), int(0), int(x4 - 6 * x1)];
        let o = canonical_orientation(&w, &p, &t).map_err(|e| e.to_string())?;
        match &o.exact {
            Some(ex) => exact_ok &= ex.symmetric && ex.trace == int(0),
            None => exact_ok = false,
        }
        max_trace = max_trace.max(o.trace.abs());
        let neg: Vec<Rational> = t.iter().map(|v| -v).collect();
        let flipped = canonical_orientation(&w, &p, &neg).map_err(|e| e.to_string())?;
        flips &= flipped.det_sign == -o.det_sign;
        signs.push((x1, o.det_sign));
    }
    let exact_constant = [1, -1].iter().all(|&b| {
        let s: Vec<i8> = signs.iter().filter(|s| s.0 == b).map(|s| s.1).collect();
        s.windows(2).all(|w| w[0] == w[1])
    });
    let rep = verify_near_symplectic(&w, &frame(), &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let numeric_constant = !rep.orientation.is_empty() && rep.orientation.iter().all(|o| o.constant_sign);
    for o in &rep.orientation {
        max_trace = max_trace.max(o.max_trace_residual);
    }
    let ok = exact_ok && flips && exact_constant && numeric_constant && max_trace <= tol::TRACE_RESIDUAL;
    Ok((
        ok,
        format!(
            "exact symmetric/traceless: {exact_ok}; max trace residual {max_trace:.1e}; constant sign per branch: {}; flips with ∂Z: {flips}",
            exact_constant && numeric_constant
        ),
    ))
}

fn cutoff() -> Outcome {
    let (lambda, mu) = model_primitives().map_err(|e| e.to_string())?;
    let opts = CutoffOptions {
        antipodal_pairs: tol::ANTIPODAL_PAIRS,
        expected_components: tol::EXPECTED_COMPONENTS,
        ..CutoffOptions::default()
    };
    let profile = RadialProfile::default();
    let range = locate_two_component_range(&lambda, &mu, profile, 4, &opts).map_err(|e| e.to_string())?;
    let eps = range.threshold.unwrap_or(0.1);
    let rep = cutoff_perturb(&lambda, &mu, profile, eps, &opts).map_err(|e| e.to_string())?;
    let antipodal_ok = rep.antipodal_pairs == tol::ANTIPODAL_PAIRS && rep.antipodal_residual <= tol::ANTIPODAL_RESIDUAL;
    let counts: Vec<String> = range.scanned.iter().map(|(e, c)| format!("{e}:{c}")).collect();
    let verdict = match rep.verdict() {
        Ok(()) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    let ok = antipodal_ok && range.found && rep.components.len() == tol::EXPECTED_COMPONENTS && rep.verdict().is_ok();
    Ok((
        ok,
        format!(
            "antipodal residual {:.1e} on {} pairs; components by ε [{}]; at ε = {eps}: {} components, min ω∧ω {:.2e} ({verdict})",
            rep.antipodal_residual,
            rep.antipodal_pairs,
            counts.join(", "),
            rep.components.len(),
            rep.wedge.min_value
        ),
    ))
}

fn near_contact() -> Outcome {
    let grid = Grid3 { lo: -1.0, hi: 1.0, n: 21 };
    let mut ok = true;
    let mut zeros = 0;
    let mut interp = Vec::new();
    let cubic = PolyForm::differential(&PolyScalar::var(3, 1).pow(3).scale(&rat(1, 5))).map_err(|e| e.to_string())?;
    for (name, lam) in near_contact_fixtures() {
        let rep = verify_near_contact(&lam, &grid).map_err(|e| format!("{name}: {e}"))?;
        for z in &rep.zeros {
            zeros += 1;
            let pos = z.a_eigenvalues.iter().filter(|&&e| e > 0.0).count();
            let neg = z.a_eigenvalues.iter().filter(|&&e| e < 0.0).count();
            ok &= z.dlambda_residual == 0.0 && pos > 0 && neg > 0;
            ok &= z.hessian_f_eigenvalues.iter().all(|&e| e > 0.0);
        }
        if rep.zeros.iter().any(|z| norm(&z.point) == 0.0) {
            let partner = lam.add(&cubic).map_err(|e| e.to_string())?;
            let ir = local_interpolation(&lam, &partner, 0.5, 0.5).map_err(|e| format!("{name}: {e}"))?;
            let pts = ir.radii * ir.directions;
            let min = ir.slices.iter().map(|s| s.min_ratio).fold(f64::INFINITY, f64::min);
            ok &= pts == tol::INTERPOLATION_POINTS
                && ir.slices.len() == tol::INTERPOLATION_TIMES
                && ir.slices.iter().all(|s| s.min_ratio >= ir.c / 3.0);
            interp.push(format!("{name}: min f_t/r² {min:.3e} ≥ c/3 = {:.3e}, R = {}", ir.c / 3.0, ir.cutoff.radius));
        }
    }
    Ok((ok, format!("{zeros} zeros checked; {}", interp.join("; "))))
}

fn overtwisted() -> Outcome {
    let mu = overtwisted_mu();
    let c = overtwisted_c();
    let opts = SphereFlowOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in OVERTWISTED_EPS {
        let t0 = Instant::now();
        let r = overtwisted_family(&mu, &c, eps, &opts).map_err(|e| format!("ε = {eps}: {e}"))?;
        let secs = t0.elapsed().as_secs_f64();
        let sinks = r.zeros_on_sphere.iter().all(|z| z.divergence < 0.0);
        let (res, attracting) = match &r.periodic_orbit {
            Some(o) => (o.return_residual, o.multiplier_reversed.abs() < 1.0 || o.multiplier_forward.abs() < 1.0),
            None => (f64::INFINITY, false),
        };
        ok &= r.zeros_on_sphere.len() == 2 && sinks && attracting && res <= tol::RETURN_RESIDUAL && secs < tol::OVERTWISTED_SECS;
        parts.push(format!(
            "ε = {eps}: {} zeros, div < 0: {sinks}, residual {res:.1e} ({})",
            r.zeros_on_sphere.len(),
            r.attracting_direction
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn window_decay(seed: u64) -> Outcome {
    let basis = ModeBasis::default_ladder();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for _ in 0..tol::WINDOW_VECTORS {
        let amps: Vec<f64> = (0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let psi = ModeVector::new(&basis, amps, Direction::IncreasingT).map_err(|e| e.to_string())?;
        for s in tol::WINDOW_SHIFTS {
            let w = mode_decay(&basis, &psi, s).map_err(|e| e.to_string())?;
            ok &= w.holds;
            worst = worst.max(w.ratio / w.bound);
        }
    }
    let mut eq = 0.0_f64;
    for s in tol::WINDOW_SHIFTS {
        let w = mode_decay(&basis, &ModeVector::lowest(&basis, [0.3, -1.0, 2.0]), s).map_err(|e| e.to_string())?;
        eq = eq.max((w.ratio - w.bound).abs());
    }
    ok &= eq <= tol::WINDOW_EQUALITY;
    Ok((
        ok,
        format!("max ratio/e^(-2s) {worst:.6} over {} vectors; λ = 2 equality error {eq:.1e}", tol::WINDOW_VECTORS),
    ))
}

fn neck_tails() -> Outcome {
    let basis = ModeBasis::default_ladder();
    let t0 = Instant::now();
    let cfg = default_neck(&basis, 4.0).map_err(|e| e.to_string())?;
    let sweep = neck_sweep(&cfg, &default_psi(&basis), &default_t_sweep(), 200).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let (s1, s2) = match (&sweep.tail1_fit, &sweep.tail2_fit) {
        (Some(a), Some(b)) => (a.slope, b.slope),
        _ => return Ok((false, "tails vanish identically".into())),
    };
    let ok = within(s1, tol::TAIL1_SLOPE)
        && within(s2, tol::TAIL2_SLOPE)
        && sweep.max_direct_error <= tol::DIRECT_SOLVE
        && secs < tol::SWEEP_SECS;
    Ok((
        ok,
        format!(
            "slopes {s1:.4} and {s2:.4}; max |limit - direct| {:.1e}; sweep {secs:.3} s",
            sweep.max_direct_error
        ),
    ))
}

fn higher_modes() -> Outcome {
    let basis = ModeBasis::default_ladder();
    let cfg = default_neck(&basis, 4.0).map_err(|e| e.to_string())?;
    let sw = SecondTermSweep::run(&cfg, &default_psi(&basis), &default_t_sweep()).map_err(|e| e.to_string())?;
    let gap = basis.gap().unwrap_or(f64::NAN);
    let Some(fit) = sw.higher_fit else {
        return Ok((false, "higher part vanishes identically".into()));
    };
    Ok((
        within(fit.slope, tol::HIGHER_SLOPE) && gap == 3.0,
        format!("higher-mode part of u(2) slope {:.4} (gap {gap})", fit.slope),
    ))
}

fn exceptional_period() -> Outcome {
    let basis = ModeBasis::default_ladder();
    let cfg = default_neck(&basis, 4.0).map_err(|e| e.to_string())?;
    let area = kahler_area_constant(tol::AREA_PARAMETER).map_err(|e| e.to_string())?;
    let res = resolution_cap(&basis, tol::AREA_PARAMETER).map_err(|e| e.to_string())?;
    let psi = default_psi(&basis);
    let sw = exceptional_integral(&cfg, &res, &psi, &default_t_sweep()).map_err(|e| e.to_string())?;
    let want = sw.expected_intercept.unwrap_or(f64::NAN);
    let mut zero = psi.clone();
    zero.amplitudes[res.kahler_index] = 0.0;
    let sz = exceptional_integral(&cfg, &res, &zero, &default_t_sweep()).map_err(|e| e.to_string())?;
    let c = basis.gap().unwrap_or(f64::NAN);
    let agree = (area.coarse - area.fine).abs();
    let ok = within(sw.fit.slope, tol::PERIOD_SLOPE)
        && (sw.fit.intercept - want).abs() <= tol::INTERCEPT
        && agree <= tol::QUADRATURE_AGREEMENT
        && sz.fit.slope <= -(c - tol::FAST_DECAY_MARGIN);
    Ok((
        ok,
        format!(
            "slope {:.4}, intercept {:.4} vs log(2A·a1) {want:.4}; A = {:.10}, quadratures differ by {agree:.1e}; a1 = 0 slope {:.4} (c = {c})",
            sw.fit.slope, sw.fit.intercept, area.area, sz.fit.slope
        ),
    ))
}

fn jacobian() -> Outcome {
    let basis = ModeBasis::default_ladder();
    let t = tol::JACOBIAN_T;
    let cfg = default_neck(&basis, t).map_err(|e| e.to_string())?;
    let res = resolution_cap(&basis, tol::AREA_PARAMETER).map_err(|e| e.to_string())?;
    let j = period_jacobian(&PeriodFamily::generic(1, basis.clone()), &cfg, &res, tol::FD_STEP).map_err(|e| e.to_string())?;
    let threshold = tol::SIGMA_FACTOR * (-2.0 * t).exp() * res.area;

    let z = CapOperator::zero(&basis);
    let zcfg = NeckConfig::new(t, basis.clone(), z.clone(), z.clone()).map_err(|e| e.to_string())?;
    let zres = ResolutionCap::new(res.area, 0, res.higher.clone(), z).map_err(|e| e.to_string())?;
    let ji = period_jacobian(&PeriodFamily::identity(1, basis.clone()), &zcfg, &zres, tol::FD_STEP).map_err(|e| e.to_string())?;
    let lead = 2.0 * res.area * (-2.0 * t).exp();
    let mut rel = 0.0_f64;
    for (r, row) in ji.matrix.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let want = if r == c { lead } else { 0.0 };
            rel = rel.max((v - want).abs() / lead);
        }
    }
    let ok = j.matrix.len() == 3 && j.sigma_min > threshold && rel <= tol::IDENTITY_JACOBIAN;
    Ok((
        ok,
        format!(
            "σ_min {:.4e} > {threshold:.4e}; zero-cap identity vs 2A·e^(-2T)·I relative error {rel:.1e}",
            j.sigma_min
        ),
    ))
}
