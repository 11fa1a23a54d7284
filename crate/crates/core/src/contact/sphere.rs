//! The rescaled family `λ_ε = da + ε⁻²φ_ε*μ + ε dC` restricted to the unit
//! sphere: zeros of the induced flow, their divergence, and a periodic orbit
//! found from a Poincaré return map.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::interpolation::fibonacci_sphere;
use super::ContactError;
use crate::form::PolyForm;
use crate::linalg::{linear_fit, svd_sorted};
use crate::numeric::{cross, dot, norm, NumForm};
use crate::ode::DormandPrince;
use crate::poly::{int, rat, rational_from_f64, PolyScalar, Rational};

#[derive(Clone, Copy, Debug)]
pub struct SphereFlowOptions {
    pub seed_lat: usize,
    pub seed_lon: usize,
    pub ode: DormandPrince,
    /// Time budget for one return to the section.
    pub max_time: f64,
    pub max_iterations: usize,
    /// Required `|P(z) - z|` at the fixed point.
    pub fixed_point_tol: f64,
    pub closure_tol: f64,
    pub fd_step: f64,
    /// Returns iterated from a second seed for the convergence cross-check.
    pub long_time_returns: usize,
}

impl Default for SphereFlowOptions {
    fn default() -> Self {
        SphereFlowOptions {
            seed_lat: 36,
            seed_lon: 72,
            ode: DormandPrince {
                rtol: 1e-12,
                atol: 1e-13,
                h_max: 0.5,
                ..DormandPrince::default()
            },
            max_time: 1e5,
            max_iterations: 60,
            fixed_point_tol: 1e-8,
            closure_tol: 1e-6,
            fd_step: 1e-5,
            long_time_returns: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereZero {
    pub point: [f64; 3],
    pub residual: f64,
    /// Eigenvalues of the linearization as `(re, im)` pairs.
    pub eigenvalues: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    /// `x · curl λ`.
    pub divergence: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    /// Height `x3` where the orbit meets the half-plane `{x2 = 0, x1 > 0}`.
    pub section_x3: f64,
    pub period: f64,
    pub return_residual: f64,
    pub closure: f64,
    /// Derivative of the return map of the time-reversed flow.
    pub multiplier_reversed: f64,
    pub multiplier_forward: f64,
    /// Distance to the fixed point after iterating the return map from a
    /// second seed.
    pub long_time_distance: f64,
    pub max_radius_drift: f64,
    pub polyline: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereFlowResult {
    pub eps: f64,
    pub zeros_on_sphere: Vec<SphereZero>,
    pub periodic_orbit: Option<PeriodicOrbit>,
    /// Direction of time in which the orbit attracts.
    pub attracting_direction: String,
}

/// Tangent field `X = λ × x` on the unit sphere, which satisfies
/// `ι_X ω = λ|_S` for the area form `ω = ι_E vol`.
struct SphereField {
    lam: NumForm,
}

impl SphereField {
    fn lam(&self, x: &[f64; 3]) -> [f64; 3] {
        let v = self.lam.eval(x);
        [v[0], v[1], v[2]]
    }

    fn jac(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let j = self.lam.jacobian(x);
        core::array::from_fn(|r| [j[r][0], j[r][1], j[r][2]])
    }

    fn x(&self, x: &[f64; 3]) -> [f64; 3] {
        cross(&self.lam(x), x)
    }

    /// `DX·w = (∇λ w) × x + λ × w`.
    fn dx(&self, x: &[f64; 3], w: &[f64; 3]) -> [f64; 3] {
        let j = self.jac(x);
        let jw: [f64; 3] = core::array::from_fn(|i| dot(&j[i], w));
        let a = cross(&jw, x);
        let b = cross(&self.lam(x), w);
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    fn linearization(&self, x: &[f64; 3]) -> ([[f64; 2]; 2], [[f64; 3]; 2]) {
        let e = tangent_basis(x);
        let m = core::array::from_fn(|i| core::array::from_fn(|k| dot(&e[i], &self.dx(x, &e[k]))));
        (m, e)
    }

    fn divergence(&self, x: &[f64; 3]) -> f64 {
        let j = self.jac(x);
        let curl = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
        dot(&curl, x)
    }
}

fn unit(v: &[f64; 3]) -> [f64; 3] {
    let n = norm(v);
    v.map(|c| c / n)
}

fn tangent_basis(x: &[f64; 3]) -> [[f64; 3]; 2] {
    let k = (0..3)
        .min_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))
        .expect("three axes");
    let mut a = [0.0; 3];
    a[k] = 1.0;
    let d = dot(&a, x);
    let e1 = unit(&[a[0] - d * x[0], a[1] - d * x[1], a[2] - d * x[2]]);
    [e1, cross(x, &e1)]
}

fn newton_on_sphere(field: &SphereField, x0: &[f64; 3]) -> Option<[f64; 3]> {
    let mut x = unit(x0);
    for _ in 0..60 {
        let v = field.x(&x);
        if norm(&v) < 1e-15 {
            break;
        }
        let (m, e) = field.linearization(&x);
        let mat = DMatrix::from_fn(2, 2, |i, k| m[i][k]);
        let rhs = DVector::from_vec(alloc::vec![dot(&e[0], &v), dot(&e[1], &v)]);
        let (u, s, vv) = svd_sorted(&mat);
        if s[0] == 0.0 {
            break;
        }
        let mut d = [0.0; 2];
        for (k, &sk) in s.iter().enumerate() {
            if sk > 1e-12 * s[0] {
                let c = u.column(k).dot(&rhs) / sk;
                d[0] += c * vv[(0, k)];
                d[1] += c * vv[(1, k)];
            }
        }
        for i in 0..3 {
            x[i] -= d[0] * e[0][i] + d[1] * e[1][i];
        }
        x = unit(&x);
        if libm::hypot(d[0], d[1]) < 1e-16 {
            break;
        }
    }
    (norm(&field.x(&x)) <= 1e-10).then_some(x)
}

fn describe_zero(field: &SphereField, x: [f64; 3]) -> SphereZero {
    let (m, _) = field.linearization(&x);
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    let eigenvalues = if disc >= 0.0 {
        let r = libm::sqrt(disc);
        [[(tr - r) / 2.0, 0.0], [(tr + r) / 2.0, 0.0]]
    } else {
        let i = libm::sqrt(-disc) / 2.0;
        [[tr / 2.0, -i], [tr / 2.0, i]]
    };
    let scale = m.iter().flatten().map(|v| v * v).sum::<f64>();
    SphereZero {
        point: x,
        residual: norm(&field.x(&x)),
        eigenvalues,
        trace: tr,
        det,
        divergence: field.divergence(&x),
        degenerate: det.abs() <= 1e-10 * scale.max(1e-300),
    }
}

fn zeros_of(field: &SphereField, opts: &SphereFlowOptions) -> Vec<SphereZero> {
    let mut found: Vec<[f64; 3]> = Vec::new();
    for i in 0..opts.seed_lat {
        let theta = core::f64::consts::PI * (i as f64 + 0.5) / opts.seed_lat as f64;
        for k in 0..opts.seed_lon {
            let phi = 2.0 * core::f64::consts::PI * k as f64 / opts.seed_lon as f64;
            let seed = [
                libm::sin(theta) * libm::cos(phi),
                libm::sin(theta) * libm::sin(phi),
                libm::cos(theta),
            ];
            if let Some(z) = newton_on_sphere(field, &seed) {
                if found.iter().all(|q| norm(&[q[0] - z[0], q[1] - z[1], q[2] - z[2]]) > 1e-6) {
                    found.push(z);
                }
            }
        }
    }
    found.sort_by(|a, b| b[2].total_cmp(&a[2]).then(a[0].total_cmp(&b[0])).then(a[1].total_cmp(&b[1])));
    found.into_iter().map(|z| describe_zero(field, z)).collect()
}

fn compile(lam: &PolyForm) -> Result<SphereField, ContactError> {
    if lam.dim() != 3 || lam.degree() != 1 {
        return Err(ContactError::NotOneFormOnR3);
    }
    Ok(SphereField { lam: NumForm::new(lam) })
}

/// Zeros of `X = λ × x` on the unit sphere from a latitude-longitude seed
/// grid, sorted by decreasing `x3`.
pub fn sphere_zeros(lam: &PolyForm, opts: &SphereFlowOptions) -> Result<Vec<SphereZero>, ContactError> {
    Ok(zeros_of(&compile(lam)?, opts))
}

/// `da` for `a = ½(x1² + x2² - x3²)`.
pub fn saddle_differential() -> PolyForm {
    let x = |i| PolyScalar::var(3, i);
    PolyForm::one_form(alloc::vec![x(0), x(1), -&x(2)]).expect("three components")
}

fn check_admissible(mu: &PolyForm, c: &PolyScalar) -> Result<(), ContactError> {
    if mu.dim() != 3 || mu.degree() != 1 {
        return Err(ContactError::NotOneFormOnR3);
    }
    for i in 0..3 {
        let p = mu.component(&[i]);
        if !p.homogeneous_part(0).is_zero() || !p.homogeneous_part(1).is_zero() {
            return Err(ContactError::Inadmissible("μ or ∇μ is nonzero at the origin"));
        }
    }
    if c.num_vars() != 3 || !c.independent_of(2) {
        return Err(ContactError::Inadmissible("C depends on x3"));
    }
    if c.homogeneous_degree() != Some(3) {
        return Err(ContactError::Inadmissible("C is not a homogeneous cubic"));
    }
    // ∇C is homogeneous, so nonvanishing on the unit circle suffices.
    let g = [c.partial(0), c.partial(1)];
    for k in 0..720 {
        let phi = 2.0 * core::f64::consts::PI * k as f64 / 720.0;
        let p = [libm::cos(phi), libm::sin(phi), 0.0];
        if libm::hypot(g[0].eval_f64(&p), g[1].eval_f64(&p)) < 1e-9 {
            return Err(ContactError::Inadmissible("dC vanishes off the x3-axis"));
        }
    }
    Ok(())
}

/// `λ_ε = da + ε⁻² φ_ε*μ + ε dC` with `φ_ε(x) = εx`, built exactly.
pub fn rescaled_form(mu: &PolyForm, c: &PolyScalar, eps: &Rational) -> Result<PolyForm, ContactError> {
    let m: Vec<Vec<Rational>> = (0..3)
        .map(|i| (0..3).map(|j| if i == j { eps.clone() } else { int(0) }).collect())
        .collect();
    let inv_sq = (eps * eps).recip();
    let pulled = mu.pullback_linear(&m)?.scale(&inv_sq);
    let dc = PolyForm::differential(c)?.scale(eps);
    Ok(saddle_differential().add(&pulled)?.add(&dc)?)
}

fn eps_rational(eps: f64) -> Result<Rational, ContactError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(ContactError::Inadmissible("ε must be positive"));
    }
    rational_from_f64(eps).ok_or(ContactError::Inadmissible("ε is not finite"))
}

struct Crossing {
    z: f64,
    time: f64,
}

/// First return of the time-reversed flow to `{x2 = 0, x1 > 0}`.
fn reversed_return(field: &SphereField, z: f64, opts: &SphereFlowOptions) -> Result<Crossing, ContactError> {
    let x0 = [libm::sqrt((1.0 - z * z).max(0.0)), 0.0, z];
    let g = |y: &[f64; 3]| {
        let v = field.x(y);
        [-v[0], -v[1], -v[2]]
    };
    let dir = g(&x0)[1];
    if dir == 0.0 {
        return Err(ContactError::NoCycleFound("flow is tangent to the section"));
    }
    let s = dir.signum();
    let mut hit: Option<Crossing> = None;
    opts.ode.integrate(g, unit, 0.0, x0, opts.max_time, |step| {
        let (a, b) = (s * step.y0[1], s * step.y1[1]);
        if !(a < 0.0 && b >= 0.0) {
            return false;
        }
        let (mut lo, mut hi) = (step.t0, step.t1);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if s * step.interpolate(mid)[1] < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let p = unit(&step.interpolate(t));
        if p[0] <= 0.0 {
            return false;
        }
        hit = Some(Crossing { z: p[2], time: t });
        true
    })?;
    hit.ok_or(ContactError::NoCycleFound("no return to the section within the time budget"))
}

fn find_cycle(field: &SphereField, opts: &SphereFlowOptions) -> Result<PeriodicOrbit, ContactError> {
    let p = |z: f64| reversed_return(field, z, opts);
    // plain iteration toward the attracting fixed point, then secant
    let mut z = 0.3;
    let mut prev: Option<(f64, f64)> = None;
    for _ in 0..opts.max_iterations {
        let gz = p(z)?.z - z;
        let residual = gz.abs();
        if residual <= 1e-12 {
            break;
        }
        let next = match prev {
            Some((zp, gp)) if residual < 1e-3 && gz != gp => z - gz * (z - zp) / (gz - gp),
            _ => z + gz,
        };
        prev = Some((z, gz));
        if !(next.abs() < 1.0) {
            return Err(ContactError::NoCycleFound("return map left the section"));
        }
        z = next;
    }
    let crossing = p(z)?;
    let residual = (crossing.z - z).abs();
    if residual > opts.fixed_point_tol {
        return Err(ContactError::NoCycleFound("return-map iteration did not converge"));
    }
    let h = opts.fd_step;
    let m = (p(z + h)?.z - p(z - h)?.z) / (2.0 * h);

    let x0 = [libm::sqrt(1.0 - z * z), 0.0, z];
    let mut polyline = alloc::vec![x0];
    let mut drift = 0.0_f64;
    let g = |y: &[f64; 3]| {
        let v = field.x(y);
        [-v[0], -v[1], -v[2]]
    };
    let (_, end) = opts.ode.integrate(g, unit, 0.0, x0, crossing.time, |step| {
        polyline.push(step.y1);
        drift = drift.max((norm(&step.y1) - 1.0).abs());
        false
    })?;
    let closure = norm(&[end[0] - x0[0], end[1] - x0[1], end[2] - x0[2]]);
    if closure > opts.closure_tol {
        return Err(ContactError::NoCycleFound("orbit does not close after one period"));
    }

    // second seed between the fixed point and the nearer pole
    let mut w = 0.5 * (z + z.signum());
    for _ in 0..opts.long_time_returns {
        w = p(w)?.z;
    }
    Ok(PeriodicOrbit {
        section_x3: z,
        period: crossing.time,
        return_residual: residual,
        closure,
        multiplier_reversed: m,
        multiplier_forward: 1.0 / m,
        long_time_distance: (w - z).abs(),
        max_radius_drift: drift,
        polyline,
    })
}

/// Builds `λ_ε`, checks for exactly two zeros on the unit sphere with
/// negative divergence, and locates the periodic orbit separating their
/// basins.
pub fn overtwisted_family(
    mu: &PolyForm,
    c: &PolyScalar,
    eps: f64,
    opts: &SphereFlowOptions,
) -> Result<SphereFlowResult, ContactError> {
    check_admissible(mu, c)?;
    let e = eps_rational(eps)?;
    let lam = rescaled_form(mu, c, &e)?;
    let field = compile(&lam)?;
    let zeros = zeros_of(&field, opts);
    if zeros.len() != 2 {
        return Err(ContactError::WrongZeroCount {
            found: zeros.len(),
            expected: 2,
        });
    }
    if let Some(z) = zeros.iter().find(|z| !(z.divergence < 0.0)) {
        return Err(ContactError::PositiveDivergence {
            point: z.point,
            div: z.divergence,
        });
    }
    let orbit = find_cycle(&field, opts)?;
    let attracting_direction = if orbit.multiplier_reversed.abs() < 1.0 {
        "reversed"
    } else {
        "forward"
    };
    Ok(SphereFlowResult {
        eps,
        zeros_on_sphere: zeros,
        periodic_orbit: Some(orbit),
        attracting_direction: attracting_direction.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsMaxReport {
    pub found: bool,
    /// Largest scanned `ε` below the first failure of the two-zero condition,
    /// refined by bisection.
    pub threshold: f64,
    pub scanned: Vec<(f64, usize)>,
}

fn zero_count(mu: &PolyForm, c: &PolyScalar, eps: f64, opts: &SphereFlowOptions) -> Result<usize, ContactError> {
    let lam = rescaled_form(mu, c, &eps_rational(eps)?)?;
    Ok(zeros_of(&compile(&lam)?, opts).len())
}

/// Scans `ε` geometrically over `[lo, hi]` and bisects at the first loss of
/// the two-zero condition.
pub fn locate_eps_max(
    mu: &PolyForm,
    c: &PolyScalar,
    lo: f64,
    hi: f64,
    opts: &SphereFlowOptions,
) -> Result<EpsMaxReport, ContactError> {
    check_admissible(mu, c)?;
    let n = 16;
    let mut scanned = Vec::with_capacity(n);
    let mut good = None;
    for k in 0..n {
        let eps = lo * libm::pow(hi / lo, k as f64 / (n - 1) as f64);
        let count = zero_count(mu, c, eps, opts)?;
        scanned.push((eps, count));
        if count == 2 {
            good = Some(eps);
            continue;
        }
        if let Some(mut a) = good {
            let mut b = eps;
            for _ in 0..40 {
                let mid = 0.5 * (a + b);
                if zero_count(mu, c, mid, opts)? == 2 {
                    a = mid;
                } else {
                    b = mid;
                }
                if b - a < 1e-6 * b {
                    break;
                }
            }
            return Ok(EpsMaxReport {
                found: true,
                threshold: a,
                scanned,
            });
        }
    }
    Ok(EpsMaxReport {
        found: false,
        threshold: good.unwrap_or(0.0),
        scanned,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C1RateReport {
    /// `(ε, ‖λ_ε - da‖_{C¹(S²)})`.
    pub samples: Vec<(f64, f64)>,
    /// Slope of `log ‖·‖` against `log ε`.
    pub slope: f64,
    pub intercept: f64,
}

/// Sup of `|λ_ε - da|` and `|∇(λ_ε - da)|` over points of the unit sphere,
/// for `ε = 2⁻³, …, 2⁻⁸`, with a log-log fit.
pub fn c1_distance_rate(mu: &PolyForm, c: &PolyScalar) -> Result<C1RateReport, ContactError> {
    check_admissible(mu, c)?;
    let pts = fibonacci_sphere(2000);
    let mut samples = Vec::new();
    for k in 3..=8u32 {
        let e = rat(1, 1i64 << k);
        let diff = NumForm::new(&rescaled_form(mu, c, &e)?.sub(&saddle_differential())?);
        let mut sup = 0.0_f64;
        for p in &pts {
            let v = norm(&diff.eval(p));
            let j: f64 = diff.jacobian(p).iter().flatten().map(|x| x * x).sum();
            sup = sup.max(v).max(libm::sqrt(j));
        }
        samples.push((crate::poly::rational_to_f64(&e), sup));
    }
    let xs: Vec<f64> = samples.iter().map(|s| libm::log(s.0)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(s.1)).collect();
    let (slope, intercept, _) = linear_fit(&xs, &ys);
    Ok(C1RateReport {
        samples,
        slope,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_flow_has_poles_and_equator() {
        let zs = sphere_zeros(&saddle_differential(), &SphereFlowOptions::default()).unwrap();
        let poles: Vec<_> = zs.iter().filter(|z| z.point[2].abs() > 0.999).collect();
        assert_eq!(poles.len(), 2);
        assert!(poles.iter().all(|z| !z.degenerate && z.divergence == 0.0));
        let equator: Vec<_> = zs.iter().filter(|z| z.point[2].abs() < 1e-8).collect();
        assert!(equator.len() > 10);
        assert!(equator.iter().all(|z| z.degenerate));
    }

    #[test]
    fn admissibility() {
        let x = |i| PolyScalar::var(3, i);
        let c = &(&(&x(0) * &x(0)) * &x(0)).scale(&rat(1, 3)) - &(&x(0) * &(&x(1) * &x(1)));
        let linear = PolyForm::one_form(alloc::vec![x(1), PolyScalar::zero(3), PolyScalar::zero(3)]).unwrap();
        assert!(matches!(
            overtwisted_family(&linear, &c, 0.1, &SphereFlowOptions::default()),
            Err(ContactError::Inadmissible(_))
        ));
        let zero = PolyForm::zero(3, 1).unwrap();
        let bad_c = &c + &(&x(2) * &(&x(2) * &x(2)));
        assert!(matches!(
            overtwisted_family(&zero, &bad_c, 0.1, &SphereFlowOptions::default()),
            Err(ContactError::Inadmissible(_))
        ));
        let degenerate_c = &(&x(0) * &x(0)) * &x(0);
        assert!(matches!(
            overtwisted_family(&zero, &degenerate_c, 0.1, &SphereFlowOptions::default()),
            Err(ContactError::Inadmissible(_))
        ));
        assert!(matches!(
            overtwisted_family(&zero, &c, 0.0, &SphereFlowOptions::default()),
            Err(ContactError::Inadmissible(_))
        ));
    }
}
