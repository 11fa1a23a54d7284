//! The subcommands. Each returns an [`Outcome`]; failed invariants are
//! recorded as checks, invalid input is an error.

use std::time::Instant;

use nslab_core::contact::{c1_distance_rate, local_interpolation, overtwisted_family, verify_near_contact, Grid3, SphereFlowOptions};
use nslab_core::fixtures::{default_psi, default_t_sweep, resolution_cap, OVERTWISTED_EPS};
use nslab_core::nearsym::{
    cutoff_perturb, locate_two_component_range, model_primitives, model_zero_components, verify_near_symplectic, CutoffOptions, RadialProfile,
    VerifyOptions, ZeroComponent,
};
use nslab_core::neck::{
    mode_decay, second_term_split, CapOperator, Direction, ModeBasis, ModeVector, NeckConfig, NeckSample, NeckSweep, SecondTermSweep,
};
use nslab_core::numeric::norm;
use nslab_core::poly::{rat, rational_to_f64};
use nslab_core::resolution::{exceptional_value, kahler_area_constant, period_jacobian, ExceptionalSweep, PeriodFamily, ResolutionCap, ResolutionError};
use nslab_core::{FlatFrame, PolyForm, PolyScalar, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Settings;
use crate::error::LabError;
use crate::fixtures::{self, FamilyKind, NearSymplecticFixture};
use crate::report::{num, Check, Outcome, Table};

const ZERO_SET_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 200;
const FD_STEP: f64 = 1e-4;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn core_input<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> LabError + '_ {
    move |e| LabError::Input(format!("{what}: {e}"))
}

pub fn verify_near_symplectic_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let name = s.fixture.as_deref().unwrap_or("model-eps1");
    let (form, model_eps) = match fixtures::near_symplectic(name)? {
        NearSymplecticFixture::Cutoff => return cutoff_cmd(s),
        NearSymplecticFixture::Form { form, model_eps, .. } => (form, model_eps),
    };
    let frame = FlatFrame::standard(4).map_err(core_input("frame"))?;
    let mut checks = vec![
        Check::new("closed", form.exterior_d().map_err(core_input(name))?.is_zero(), "dω = 0 in exact arithmetic"),
        Check::new("self-dual", frame.is_self_dual(&form).unwrap_or(false), "⋆ω = ω in exact arithmetic"),
    ];
    let mut opts = VerifyOptions::default();
    if let Some(n) = s.grid {
        opts.grid.n = n;
    }
    let mut table = Table::new(&["component", "x1", "x2", "x3", "x4", "rank"]);
    let rep = match verify_near_symplectic(&form, &frame, &opts) {
        Ok(r) => r,
        Err(e) => {
            checks.push(Check::new("near-symplectic", false, e.to_string()));
            if let Some(eps) = &model_eps {
                checks.push(model_zero_set_check(eps, &model_zero_components(eps)));
            }
            return Ok(Outcome::new("verify-near-symplectic", s, checks, json!({ "fixture": name }), table));
        }
    };
    let rank3 = rep.transversality.iter().filter(|t| t.rank == 3).count();
    checks.push(Check::new(
        "transversality",
        !rep.transversality.is_empty() && rank3 == rep.transversality.len(),
        format!("rank 3 at {rank3}/{} samples", rep.transversality.len()),
    ));
    checks.push(Check::new("morse-bott", rep.morse_bott.pass, "normal Hessian of |ω|² positive-definite"));
    let constant = rep.orientation.iter().all(|o| o.constant_sign);
    let trace = rep.orientation.iter().map(|o| o.max_trace_residual).fold(0.0, f64::max);
    checks.push(Check::new("orientation-sign", constant, "det A constant along each component"));
    checks.push(Check::at_most("orientation-trace", trace, TRACE_TOL));
    checks.push(Check::at_most("zero-residual", rep.max_zero_residual, ZERO_SET_TOL));
    if let Some(eps) = &model_eps {
        checks.push(model_zero_set_check(eps, &rep.zero_components));
    }
    let per = rep.transversality.len() / rep.zero_components.len().max(1);
    for (k, t) in rep.transversality.iter().enumerate() {
        let mut row = vec![(k / per.max(1)).to_string()];
        row.extend(t.point.iter().map(|&v| num(v)));
        row.push(t.rank.to_string());
        table.push(row);
    }
    let data = json!({
        "fixture": name,
        "form": form.to_string(),
        "components": rep.zero_components.len(),
        "non_compact_components": rep.non_compact_components(),
        "zero_set": to_value(&rep),
    });
    Ok(Outcome::new("verify-near-symplectic", s, checks, data, table))
}

fn model_zero_set_check(eps: &Rational, comps: &[ZeroComponent]) -> Check {
    let e = rational_to_f64(eps);
    if e == 0.0 {
        let r = 13f64.sqrt();
        let want = [(-1.0 - r) / 2.0, (-1.0 + r) / 2.0];
        let mut slopes: Vec<f64> = comps
            .iter()
            .filter_map(|c| match c {
                ZeroComponent::Line { slope, .. } => Some(*slope),
                _ => None,
            })
            .collect();
        slopes.sort_by(f64::total_cmp);
        let err = if slopes.len() == 2 {
            (slopes[0] - want[0]).abs().max((slopes[1] - want[1]).abs())
        } else {
            f64::INFINITY
        };
        return Check::new(
            "zero-set",
            err <= ZERO_SET_TOL && comps.len() == 2,
            format!("{} lines, slope error {err:e} against (-1 ± √13)/2", slopes.len()),
        );
    }
    let branches = comps.iter().filter(|c| matches!(c, ZeroComponent::HyperbolaBranch { .. })).count();
    let mut worst = 0.0_f64;
    for c in comps {
        for (p, _) in c.sample(100, 2.0) {
            let h = 3.0 * p[0] * p[0] - p[0] * p[3] - p[3] * p[3];
            worst = worst.max(p[1].abs()).max(p[2].abs()).max((h - e).abs() / e.max(1.0));
        }
    }
    Check::new(
        "zero-set",
        branches == 2 && comps.len() == 2 && worst <= ZERO_SET_TOL,
        format!("{branches} hyperbola components of x2 = x3 = 0, H = {e}; max residual {worst:e}"),
    )
}

fn cutoff_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let eps = s.eps.as_ref().and_then(|v| v.first().copied()).unwrap_or(0.1);
    if !(eps > 0.0) {
        return Err(LabError::Input("--eps must be positive".into()));
    }
    let (lambda, mu) = model_primitives().map_err(core_input("model-cutoff"))?;
    let mut opts = CutoffOptions::default();
    if let Some(n) = s.grid {
        opts.wedge_grid.n = n;
        opts.zero_grid.n = n;
    }
    let profile = RadialProfile::default();
    let rep = cutoff_perturb(&lambda, &mu, profile, eps, &opts).map_err(core_input("model-cutoff"))?;
    let range = locate_two_component_range(&lambda, &mu, profile, 4, &opts).map_err(core_input("model-cutoff"))?;
    let checks = vec![
        Check::at_most("antipodal", rep.antipodal_residual, 1e-10),
        Check::at_most("closed", rep.closedness_residual, 1e-12),
        Check::at_most("inner-region", rep.inner_residual, 1e-12),
        Check::at_most("outer-region", rep.outer_residual, 1e-12),
        Check::new(
            "near-symplectic",
            rep.wedge.first_negative.is_none(),
            match rep.wedge.first_negative {
                Some(p) => format!("ω∧ω = {:e} < 0, first at {p:?}", rep.wedge.min_value),
                None => format!("min ω∧ω = {:e}", rep.wedge.min_value),
            },
        ),
        Check::new(
            "component-count",
            rep.components.len() == opts.expected_components,
            format!("{} components, expected {}", rep.components.len(), opts.expected_components),
        ),
        Check::new(
            "two-component-range",
            range.found,
            format!("component counts by ε: {:?}", range.scanned),
        ),
    ];
    let mut table = Table::new(&["component", "points", "non_compact", "min_radius", "max_radius"]);
    for (k, c) in rep.components.iter().enumerate() {
        table.push([k.to_string(), c.points.to_string(), c.non_compact.to_string(), num(c.min_radius), num(c.max_radius)]);
    }
    let data = json!({ "fixture": "model-cutoff", "cutoff": to_value(&rep), "range": to_value(&range) });
    Ok(Outcome::new("verify-near-symplectic", s, checks, data, table))
}

pub fn verify_near_contact_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let name = s.fixture.as_deref().unwrap_or("all");
    let list = fixtures::near_contact(name)?;
    let grid = Grid3 {
        lo: -1.0,
        hi: 1.0,
        n: s.grid.unwrap_or(21),
    };
    let cubic = PolyForm::differential(&PolyScalar::var(3, 1).pow(3).scale(&rat(1, 5))).map_err(core_input("perturbation"))?;
    let runs: Vec<_> = list
        .par_iter()
        .map(|(n, lam)| {
            let rep = verify_near_contact(lam, &grid);
            let interp = match &rep {
                Ok(r) if r.zeros.iter().any(|z| norm(&z.point) == 0.0) => {
                    Some(lam.add(&cubic).map_err(|e| e.to_string()).and_then(|p| local_interpolation(lam, &p, 0.5, 0.5).map_err(|e| e.to_string())))
                }
                _ => None,
            };
            (n.clone(), rep, interp)
        })
        .collect();
    let mut checks = Vec::new();
    let mut data = Vec::new();
    let mut table = Table::new(&[
        "fixture", "x1", "x2", "x3", "index", "a_eig1", "a_eig2", "a_eig3", "hess_eig1", "hess_eig2", "hess_eig3",
    ]);
    for (n, rep, interp) in runs {
        let rep = match rep {
            Ok(r) => r,
            Err(e) => {
                checks.push(Check::new(format!("{n}: near-contact"), false, e.to_string()));
                data.push(json!({ "fixture": n, "error": e.to_string() }));
                continue;
            }
        };
        checks.push(Check::new(
            format!("{n}: near-contact"),
            rep.positivity.min_f_off_zeros > 0.0,
            format!("{} zeros, min f off zeros {:e}", rep.zeros.len(), rep.positivity.min_f_off_zeros),
        ));
        for z in &rep.zeros {
            let pos = z.a_eigenvalues.iter().filter(|&&e| e > 0.0).count();
            let neg = z.a_eigenvalues.iter().filter(|&&e| e < 0.0).count();
            checks.push(Check::at_most(format!("{n}: dλ at {:?}", z.point), z.dlambda_residual, 1e-12));
            checks.push(Check::new(format!("{n}: A indefinite at {:?}", z.point), pos > 0 && neg > 0, format!("{:?}", z.a_eigenvalues)));
            checks.push(Check::new(
                format!("{n}: Hess f positive at {:?}", z.point),
                z.hessian_f_eigenvalues.iter().all(|&e| e > 0.0),
                format!("{:?}", z.hessian_f_eigenvalues),
            ));
            let mut row = vec![n.clone()];
            row.extend(z.point.iter().map(|&v| num(v)));
            row.push(z.index.to_string());
            row.extend(z.a_eigenvalues.iter().map(|&v| num(v)));
            row.extend(z.hessian_f_eigenvalues.iter().map(|&v| num(v)));
            table.push(row);
        }
        let interp_value = match interp {
            Some(Ok(ir)) => {
                let min = ir.slices.iter().map(|t| t.min_ratio).fold(f64::INFINITY, f64::min);
                checks.push(Check::new(
                    format!("{n}: interpolation bound"),
                    ir.slices.len() == 5 && ir.radii * ir.directions == 10_000 && ir.slices.iter().all(|t| t.min_ratio >= ir.c / 3.0),
                    format!("min f_t/r² {min:e} >= c/3 = {:e} at R = {}", ir.c / 3.0, ir.cutoff.radius),
                ));
                to_value(&ir)
            }
            Some(Err(e)) => {
                checks.push(Check::new(format!("{n}: interpolation bound"), false, e));
                Value::Null
            }
            None => Value::Null,
        };
        data.push(json!({ "fixture": n, "report": to_value(&rep), "interpolation": interp_value }));
    }
    Ok(Outcome::new("verify-near-contact", s, checks, Value::Array(data), table))
}

pub fn overtwisted_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let name = s.fixture.as_deref().unwrap_or("overtwisted");
    let (mu, c) = fixtures::overtwisted(name)?;
    let eps: Vec<f64> = s.eps.clone().unwrap_or_else(|| OVERTWISTED_EPS.to_vec());
    if eps.iter().any(|&e| !(e > 0.0)) {
        return Err(LabError::Input("--eps values must be positive".into()));
    }
    let opts = SphereFlowOptions::default();
    let runs: Vec<_> = eps
        .par_iter()
        .map(|&e| {
            let t0 = Instant::now();
            let r = overtwisted_family(&mu, &c, e, &opts);
            (e, r, t0.elapsed().as_secs_f64())
        })
        .collect();
    let mut checks = Vec::new();
    let mut data = Vec::new();
    let mut table = Table::new(&[
        "eps", "zeros", "max_divergence", "section_x3", "period", "return_residual", "closure", "multiplier_reversed", "multiplier_forward", "attracting",
    ]);
    for (e, r, secs) in runs {
        checks.push(Check::new(format!("ε = {e}: runtime"), secs < 30.0, "under 30 s"));
        let r = match r {
            Ok(r) => r,
            Err(err) => {
                checks.push(Check::new(format!("ε = {e}: sphere flow"), false, err.to_string()));
                continue;
            }
        };
        let maxdiv = r.zeros_on_sphere.iter().map(|z| z.divergence).fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::new(
            format!("ε = {e}: two sinks"),
            r.zeros_on_sphere.len() == 2 && maxdiv < 0.0,
            format!("{} zeros, max divergence {maxdiv:e}", r.zeros_on_sphere.len()),
        ));
        match &r.periodic_orbit {
            Some(o) => {
                checks.push(Check::at_most(format!("ε = {e}: return residual"), o.return_residual, 1e-6));
                checks.push(Check::new(
                    format!("ε = {e}: attracting"),
                    o.multiplier_reversed.abs() < 1.0 || o.multiplier_forward.abs() < 1.0,
                    format!("attracting in {} time, multiplier {:e}", r.attracting_direction, o.multiplier_reversed),
                ));
                table.push([
                    num(e),
                    r.zeros_on_sphere.len().to_string(),
                    num(maxdiv),
                    num(o.section_x3),
                    num(o.period),
                    num(o.return_residual),
                    num(o.closure),
                    num(o.multiplier_reversed),
                    num(o.multiplier_forward),
                    r.attracting_direction.clone(),
                ]);
            }
            None => checks.push(Check::new(format!("ε = {e}: periodic orbit"), false, "no periodic orbit found")),
        }
        let mut v = to_value(&r);
        if let Some(o) = v.get_mut("periodic_orbit").and_then(Value::as_object_mut) {
            o.remove("polyline");
        }
        data.push(v);
    }
    let rate = match c1_distance_rate(&mu, &c) {
        Ok(rate) => {
            checks.push(Check::near("C¹ distance to da ~ ε", rate.slope, 1.0, 0.05));
            to_value(&rate)
        }
        Err(e) => {
            checks.push(Check::new("C¹ distance to da ~ ε", false, e.to_string()));
            Value::Null
        }
    };
    Ok(Outcome::new("overtwisted", s, checks, json!({ "fixture": name, "families": data, "c1_rate": rate }), table))
}

fn sweep_ts(s: &Settings) -> Result<Vec<f64>, LabError> {
    let ts = s.t.clone().unwrap_or_else(default_t_sweep);
    if ts.len() < 2 {
        return Err(LabError::Input("--T needs at least two values for a fit".into()));
    }
    Ok(ts)
}

fn neck_config(s: &Settings, basis: &ModeBasis, t: f64) -> Result<NeckConfig, LabError> {
    let (l, r) = fixtures::caps(s.fixture.as_deref().unwrap_or("generic-caps"), basis)?;
    NeckConfig::new(t, basis.clone(), l, r).map_err(core_input("neck"))
}

/// Window-norm ratios of `n` seeded random vectors at the standard shifts;
/// returns the largest `ratio / e^{-2s}` and the `λ = 2` equality error.
fn window_check(basis: &ModeBasis, seed: u64, n: usize) -> Result<(f64, f64, bool), LabError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut holds = true;
    for _ in 0..n {
        let a: Vec<f64> = (0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let psi = ModeVector::new(basis, a, Direction::IncreasingT).map_err(core_input("window"))?;
        for sh in [0.5, 1.0, 2.0, 4.0] {
            let w = mode_decay(basis, &psi, sh).map_err(core_input("window"))?;
            holds &= w.holds;
            worst = worst.max(w.ratio / w.bound);
        }
    }
    let mut eq = 0.0_f64;
    for sh in [0.5, 1.0, 2.0, 4.0] {
        let w = mode_decay(basis, &ModeVector::lowest(basis, [0.3, -1.0, 2.0]), sh).map_err(core_input("window"))?;
        eq = eq.max((w.ratio - w.bound).abs());
    }
    Ok((worst, eq, holds))
}

pub fn neck_sim_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let basis = fixtures::ladder(s.ladder.as_deref())?;
    let ts = sweep_ts(s)?;
    let cfg = neck_config(s, &basis, ts[0].max(2.0))?;
    let psi = default_psi(&basis);
    let mut checks = Vec::new();
    let mut table = Table::new(&[
        "T", "u_norm", "tail1", "tail2", "iterations", "ratio_bound", "direct_error", "lowest_norm", "higher_norm",
    ]);
    let runs: Vec<_> = ts
        .par_iter()
        .map(|&t| {
            let c = cfg.with_t(t)?;
            Ok::<_, nslab_core::neck::NeckError>((NeckSample::run(&c, &psi, MAX_ITERS)?, second_term_split(&c, &psi)?))
        })
        .collect();
    let (mut samples, mut splits) = (Vec::new(), Vec::new());
    for (t, r) in ts.iter().zip(runs) {
        match r {
            Ok((a, b)) => {
                samples.push(a);
                splits.push(b);
            }
            Err(e) => checks.push(Check::new(format!("T = {t}: iteration"), false, e.to_string())),
        }
    }
    let (worst, eq, holds) = window_check(&basis, s.seed, 1000)?;
    checks.push(Check::new("window decay", holds, format!("max ratio / e^(-2s) = {worst} over 1000 seeded vectors")));
    checks.push(Check::at_most("window equality on λ = 2", eq, 1e-12));
    let mut data = json!({
        "ladder": to_value(&basis),
        "synthetic_ladder": basis.is_synthetic(),
        "window": { "vectors": 1000, "shifts": [0.5, 1.0, 2.0, 4.0], "max_ratio_over_bound": worst, "lowest_equality_error": eq },
    });
    if samples.len() == ts.len() {
        for (a, b) in samples.iter().zip(&splits) {
            table.push([
                num(a.t),
                num(a.u_norm),
                num(a.tail1),
                num(a.tail2),
                a.iterations.to_string(),
                num(a.ratio_bound),
                num(a.direct_error),
                num(b.lowest_norm),
                num(b.higher_norm),
            ]);
        }
        match (NeckSweep::from_samples(samples), SecondTermSweep::from_samples(splits)) {
            (Ok(sw), Ok(st)) => {
                match (&sw.tail1_fit, &sw.tail2_fit) {
                    (Some(f1), Some(f2)) => {
                        checks.push(Check::near("tail ‖u - u(1)‖ slope", f1.slope, -2.0, 0.05));
                        checks.push(Check::near("tail ‖u - u(1) - u(2)‖ slope", f2.slope, -4.0, 0.1));
                    }
                    _ => checks.push(Check::new("tails", false, "tails vanish identically")),
                }
                checks.push(Check::at_most("limit vs direct solve", sw.max_direct_error, 1e-12));
                if let (Some(gap), Some(h)) = (basis.gap(), &st.higher_fit) {
                    checks.push(Check::near("higher-mode part of u(2) slope", h.slope, -gap, 0.05));
                }
                data["tail1_fit"] = to_value(&sw.tail1_fit);
                data["tail2_fit"] = to_value(&sw.tail2_fit);
                data["lowest_fit"] = to_value(&st.lowest_fit);
                data["higher_fit"] = to_value(&st.higher_fit);
                data["max_direct_error"] = json!(sw.max_direct_error);
            }
            (Err(e), _) | (_, Err(e)) => checks.push(Check::new("fit", false, e.to_string())),
        }
    }
    Ok(Outcome::new("neck-sim", s, checks, data, table))
}

pub fn resolution_sweep_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let p = fixtures::resolution(s.fixture.as_deref().unwrap_or("model-p0.7"))?;
    let basis = fixtures::ladder(s.ladder.as_deref())?;
    let ts = sweep_ts(s)?;
    let area = kahler_area_constant(p).map_err(core_input("area"))?;
    let res = resolution_cap(&basis, p).map_err(core_input("resolution"))?;
    let (l, r) = fixtures::caps("generic-caps", &basis)?;
    let cfg = NeckConfig::new(ts[0].max(2.0), basis.clone(), l, r).map_err(core_input("neck"))?;
    let psi = default_psi(&basis);
    let mut zero = psi.clone();
    zero.amplitudes[res.kahler_index] = 0.0;
    let mut checks = vec![
        Check::at_most("quadrature agreement", (area.coarse - area.fine).abs(), 1e-6),
        Check::new("positivity", area.min_positivity > 0.0, format!("min positivity {:e}", area.min_positivity)),
    ];
    let runs: Vec<_> = ts
        .par_iter()
        .map(|&t| -> Result<_, ResolutionError> {
            let c = cfg.with_t(t)?;
            Ok((exceptional_value(&c, &res, &psi)?, exceptional_value(&c, &res, &zero)?))
        })
        .collect();
    let mut table = Table::new(&["T", "value", "leading", "remainder", "value_a1_zero"]);
    let mut data = json!({ "p": p, "area": to_value(&area) });
    match runs.into_iter().collect::<Result<Vec<_>, _>>() {
        Err(e) => checks.push(Check::new("sweep", false, e.to_string())),
        Ok(v) => {
            for (a, b) in &v {
                table.push([num(a.t), num(a.value), num(a.leading), num(a.remainder), num(b.value)]);
            }
            let (main, zeros): (Vec<_>, Vec<_>) = v.into_iter().unzip();
            match (ExceptionalSweep::from_samples(main, &res, &psi), ExceptionalSweep::from_samples(zeros, &res, &zero)) {
                (Ok(sw), Ok(sz)) => {
                    checks.push(Check::near("slope", sw.fit.slope, -2.0, 0.05));
                    if let Some(want) = sw.expected_intercept {
                        checks.push(Check::near("intercept vs log(2A·a1)", sw.fit.intercept, want, 0.05));
                    }
                    if let Some(c) = basis.gap() {
                        checks.push(Check::new(
                            "a1 = 0 decays faster",
                            sz.fit.slope <= -(c - 0.05),
                            format!("slope {} <= -({c} - 0.05)", sz.fit.slope),
                        ));
                    }
                    data["sweep"] = to_value(&sw);
                    data["a1_zero"] = to_value(&sz);
                }
                (Err(e), _) | (_, Err(e)) => checks.push(Check::new("fit", false, e.to_string())),
            }
        }
    }
    Ok(Outcome::new("resolution-sweep", s, checks, data, table))
}

pub fn period_jacobian_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let (kind, n) = fixtures::family(s.fixture.as_deref().unwrap_or("generic"))?;
    let basis = fixtures::ladder(s.ladder.as_deref())?;
    let t = match s.t.as_deref() {
        None => 8.0,
        Some([t]) => *t,
        Some(_) => return Err(LabError::Input("period-jacobian takes a single --T".into())),
    };
    let p = 0.7;
    let (cfg, res) = if kind == FamilyKind::Identity {
        let z = CapOperator::zero(&basis);
        let area = kahler_area_constant(p).map_err(core_input("area"))?.area;
        let cfg = NeckConfig::new(t, basis.clone(), z.clone(), z.clone()).map_err(core_input("neck"))?;
        (cfg, ResolutionCap::new(area, 0, vec![0.5; basis.dim()], z).map_err(core_input("resolution"))?)
    } else {
        let (l, r) = fixtures::caps("generic-caps", &basis)?;
        let cfg = NeckConfig::new(t, basis.clone(), l, r).map_err(core_input("neck"))?;
        (cfg, resolution_cap(&basis, p).map_err(core_input("resolution"))?)
    };
    let family = match kind {
        FamilyKind::Generic => PeriodFamily::generic(n, basis.clone()),
        FamilyKind::Identity => PeriodFamily::identity(n, basis.clone()),
        FamilyKind::Redundant => PeriodFamily::redundant(n, basis.clone()),
    };
    let mut checks = Vec::new();
    let mut table = Table::new(&["row", "col", "value"]);
    let data = match period_jacobian(&family, &cfg, &res, FD_STEP) {
        Err(ResolutionError::SingularJacobian { sigma_min, threshold }) => {
            checks.push(Check::new("nonsingular", false, format!("σ_min {sigma_min:e} <= {threshold:e}")));
            json!({ "sigma_min": sigma_min, "threshold": threshold })
        }
        Err(e) => {
            checks.push(Check::new("jacobian", false, e.to_string()));
            Value::Null
        }
        Ok(j) => {
            checks.push(Check::new("nonsingular", j.nonsingular, format!("σ_min {:e} > {:e}", j.sigma_min, j.threshold)));
            let lead = j.leading_scale;
            match kind {
                FamilyKind::Identity => {
                    let mut rel = 0.0_f64;
                    for (r, row) in j.matrix.iter().enumerate() {
                        for (c, &v) in row.iter().enumerate() {
                            rel = rel.max((v - if r == c { lead } else { 0.0 }).abs() / lead);
                        }
                    }
                    checks.push(Check::at_most("2A·e^(-2T)·I relative error", rel, 1e-8));
                }
                _ => {
                    let ok = j.singular_values.iter().all(|&v| v > 0.5 * lead && v < 2.0 * lead);
                    checks.push(Check::new("singular values within factor 2 of 2A·e^(-2T)", ok, format!("{:?} vs {lead:e}", j.singular_values)));
                }
            }
            for (r, row) in j.matrix.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    table.push([r.to_string(), c.to_string(), num(v)]);
                }
            }
            to_value(&j)
        }
    };
    Ok(Outcome::new("period-jacobian", s, checks, json!({ "points": n, "jacobian": data }), table))
}

pub fn all_cmd(s: &Settings) -> Result<Outcome, LabError> {
    let mut checks = Vec::new();
    let mut table = Table::new(&["criterion", "title", "passed", "detail"]);
    let results: Vec<_> = (1..=12)
        .map(|id| {
            let r = nslab_suite::run(id, s.seed);
            eprintln!("{r}");
            r
        })
        .collect();
    for r in &results {
        checks.push(Check::new(format!("criterion {}: {}", r.id, r.title), r.passed, r.detail.clone()));
        table.push([r.id.to_string(), r.title.to_string(), r.passed.to_string(), r.detail.clone()]);
    }
    Ok(Outcome::new("all", s, checks, to_value(&results), table))
}
