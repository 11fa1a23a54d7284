//! Predictor–corrector continuation of the zero set of a 2-form field on
//! R^4. The corrector solves the three equations obtained by projecting
//! `ω` onto the span of the leading left singular vectors of `∇ω`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::linalg::{numerical_rank, solve, svd_sorted};
use crate::numeric::{dot, norm, TwoFormField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContinuationOptions {
    /// Continuation stops when a curve leaves this ball.
    pub ball_radius: f64,
    /// Points inside this ball around the origin are treated as removed.
    pub exclude_radius: f64,
    pub step: f64,
    pub max_step: f64,
    pub residual_tol: f64,
    pub merge_tol: f64,
    pub max_points: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            ball_radius: 3.0,
            exclude_radius: 0.0,
            step: 0.05,
            max_step: 0.1,
            residual_tol: 1e-9,
            merge_tol: 1e-6,
            max_points: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveEnd {
    ExitedBall,
    Excluded,
    Closed,
    Stalled,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracedCurve {
    pub points: Vec<[f64; 4]>,
    pub ends: [CurveEnd; 2],
    pub max_residual: f64,
}

impl TracedCurve {
    pub fn is_closed(&self) -> bool {
        self.ends[0] == CurveEnd::Closed
    }

    /// Both ends escape: to the boundary of the working ball or into the
    /// removed ball around the origin.
    pub fn is_non_compact(&self) -> bool {
        self.ends
            .iter()
            .all(|e| matches!(e, CurveEnd::ExitedBall | CurveEnd::Excluded))
    }
}

struct Local {
    value: [f64; 6],
    u3: DMatrix<f64>,
    sig: Vec<f64>,
    v: DMatrix<f64>,
    jac: DMatrix<f64>,
}

fn local<F: TwoFormField + ?Sized>(field: &F, x: &[f64; 4]) -> Local {
    let value = field.value(x);
    let j = field.jacobian(x);
    let jac = DMatrix::from_fn(6, 4, |r, c| j[r][c]);
    let (u, sig, v) = svd_sorted(&jac);
    Local {
        value,
        u3: u.columns(0, 3).into_owned(),
        sig,
        v,
        jac,
    }
}

fn null_vector(l: &Local) -> [f64; 4] {
    [l.v[(0, 3)], l.v[(1, 3)], l.v[(2, 3)], l.v[(3, 3)]]
}

/// Rank of `∇ω` at `x` with relative threshold `1e-9`.
pub fn jacobian_rank<F: TwoFormField + ?Sized>(field: &F, x: &[f64; 4]) -> usize {
    numerical_rank(&local(field, x).sig, 1e-9)
}

/// Gauss–Newton projection onto the zero set using the rank-3 truncated
/// pseudo-inverse. Returns the point and its residual `|ω|`.
pub fn newton_project<F: TwoFormField + ?Sized>(field: &F, x0: &[f64; 4], tol: f64) -> Option<([f64; 4], f64)> {
    let mut x = *x0;
    let mut best = f64::INFINITY;
    for _ in 0..60 {
        let l = local(field, &x);
        let r = norm(&l.value);
        best = r;
        if r <= 1e-13 {
            return Some((x, r));
        }
        if l.sig[2] <= 1e-12 * l.sig[0].max(1.0) {
            return None;
        }
        let f = DVector::from_row_slice(&l.value);
        let c = l.u3.transpose() * f;
        let mut step = [0.0; 4];
        for k in 0..3 {
            let coef = c[k] / l.sig[k];
            for i in 0..4 {
                step[i] -= coef * l.v[(i, k)];
            }
        }
        for i in 0..4 {
            x[i] += step[i];
        }
        if norm(&step) < 1e-15 * (1.0 + norm(&x)) {
            break;
        }
        if !x.iter().all(|v| v.is_finite()) || norm(&x) > 1e6 {
            return None;
        }
    }
    let r = norm(&field.value(&x));
    (r <= tol || best <= tol).then_some((x, r))
}

/// Arclength corrector: solves `U3ᵀω(y) = 0`, `tᵀ(y - x) = h`.
fn correct<F: TwoFormField + ?Sized>(field: &F, x: &[f64; 4], t: &[f64; 4], h: f64) -> Option<([f64; 4], usize, f64)> {
    let mut y = [0.0; 4];
    for i in 0..4 {
        y[i] = x[i] + h * t[i];
    }
    for it in 0..12 {
        let l = local(field, &y);
        let r = norm(&l.value);
        let gap = dot(t, &[y[0] - x[0], y[1] - x[1], y[2] - x[2], y[3] - x[3]]) - h;
        if r <= 1e-13 && gap.abs() <= 1e-13 {
            return Some((y, it, r));
        }
        if l.sig[2] <= 1e-12 * l.sig[0].max(1.0) {
            return None;
        }
        let top = l.u3.transpose() * &l.jac;
        let mut a = DMatrix::zeros(4, 4);
        a.view_mut((0, 0), (3, 4)).copy_from(&top);
        for k in 0..4 {
            a[(3, k)] = t[k];
        }
        let f = DVector::from_row_slice(&l.value);
        let rhs_top = l.u3.transpose() * f;
        let rhs = DVector::from_vec(vec![-rhs_top[0], -rhs_top[1], -rhs_top[2], -gap]);
        let d = solve(&a, &rhs)?;
        for i in 0..4 {
            y[i] += d[i];
        }
        if d.norm() < 1e-15 * (1.0 + norm(&y)) {
            let r = norm(&field.value(&y));
            return (r <= 1e-11).then_some((y, it, r));
        }
    }
    let r = norm(&field.value(&y));
    (r <= 1e-11).then_some((y, 12, r))
}

/// Traces from `start` in direction `dir` until the curve leaves the
/// working region, closes up, or stalls.
fn trace<F: TwoFormField + ?Sized>(
    field: &F,
    start: &[f64; 4],
    dir: f64,
    opts: &ContinuationOptions,
) -> (Vec<[f64; 4]>, CurveEnd, f64) {
    let mut pts = vec![*start];
    let mut x = *start;
    let mut t_prev = null_vector(&local(field, &x)).map(|v| dir * v);
    let mut h = opts.step;
    let h_min = opts.step * 1e-6;
    let mut worst = 0.0_f64;
    let mut travelled = 0.0;
    loop {
        if pts.len() >= opts.max_points {
            return (pts, CurveEnd::Budget, worst);
        }
        let mut t = null_vector(&local(field, &x));
        if dot(&t, &t_prev) < 0.0 {
            t = t.map(|v| -v);
        }
        match correct(field, &x, &t, h) {
            Some((y, iters, r)) => {
                let mut d = [0.0; 4];
                for i in 0..4 {
                    d[i] = y[i] - x[i];
                }
                if dot(&d, &t) <= 0.0 || norm(&d) > 2.0 * h {
                    h *= 0.5;
                    if h < h_min {
                        return (pts, CurveEnd::Stalled, worst);
                    }
                    continue;
                }
                travelled += norm(&d);
                worst = worst.max(r);
                let mut back = [0.0; 4];
                for i in 0..4 {
                    back[i] = start[i] - y[i];
                }
                if travelled > 4.0 * opts.step && norm(&back) < 0.75 * h.max(opts.step) {
                    pts.push(y);
                    return (pts, CurveEnd::Closed, worst);
                }
                pts.push(y);
                if norm(&y) > opts.ball_radius {
                    return (pts, CurveEnd::ExitedBall, worst);
                }
                if norm(&y) < opts.exclude_radius {
                    return (pts, CurveEnd::Excluded, worst);
                }
                t_prev = t;
                x = y;
                if iters <= 3 {
                    h = (h * 1.3).min(opts.max_step);
                }
            }
            None => {
                h *= 0.5;
                if h < h_min {
                    return (pts, CurveEnd::Stalled, worst);
                }
            }
        }
    }
}

fn seg_dist(p: &[f64; 4], a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut ab = [0.0; 4];
    let mut ap = [0.0; 4];
    for i in 0..4 {
        ab[i] = b[i] - a[i];
        ap[i] = p[i] - a[i];
    }
    let l2 = dot(&ab, &ab);
    let s = if l2 == 0.0 { 0.0 } else { (dot(&ap, &ab) / l2).clamp(0.0, 1.0) };
    let mut d = [0.0; 4];
    for i in 0..4 {
        d[i] = ap[i] - s * ab[i];
    }
    norm(&d)
}

fn dist_to_curve(p: &[f64; 4], c: &TracedCurve) -> f64 {
    if c.points.len() == 1 {
        let mut d = [0.0; 4];
        for i in 0..4 {
            d[i] = p[i] - c.points[0][i];
        }
        return norm(&d);
    }
    c.points
        .windows(2)
        .map(|w| seg_dist(p, &w[0], &w[1]))
        .fold(f64::INFINITY, f64::min)
}

fn close(a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
    libm::sqrt((0..4).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum::<f64>()) <= tol
}

/// Uniform grid on `[lo, hi]^4` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid4 {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid4 {
    pub fn coord(&self, k: usize) -> f64 {
        if self.n == 1 {
            return 0.5 * (self.lo + self.hi);
        }
        self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
    }

    pub fn point(&self, idx: [usize; 4]) -> [f64; 4] {
        idx.map(|k| self.coord(k))
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        let n = self.n;
        (0..n.pow(4)).map(move |flat| {
            let idx = [flat / (n * n * n), (flat / (n * n)) % n, (flat / n) % n, flat % n];
            self.point(idx)
        })
    }
}

/// Grid local minima of `|ω|²` (axis neighbours), ordered by value.
pub fn grid_seeds<F: TwoFormField + ?Sized>(field: &F, grid: &Grid4) -> Vec<[f64; 4]> {
    let n = grid.n;
    let vals: Vec<f64> = grid
        .points()
        .map(|p| {
            let v = field.value(&p);
            dot(&v, &v)
        })
        .collect();
    let at = |i: [usize; 4]| vals[((i[0] * n + i[1]) * n + i[2]) * n + i[3]];
    let mut seeds: Vec<(f64, [f64; 4])> = Vec::new();
    for flat in 0..n.pow(4) {
        let idx = [flat / (n * n * n), (flat / (n * n)) % n, (flat / n) % n, flat % n];
        let v = vals[flat];
        let mut is_min = true;
        'outer: for axis in 0..4 {
            for delta in [-1i64, 1] {
                let k = idx[axis] as i64 + delta;
                if k < 0 || k >= n as i64 {
                    continue;
                }
                let mut j = idx;
                j[axis] = k as usize;
                if at(j) < v {
                    is_min = false;
                    break 'outer;
                }
            }
        }
        if is_min {
            seeds.push((v, grid.point(idx)));
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal)));
    seeds.into_iter().map(|s| s.1).collect()
}

/// Continuation from grid seeds. Curves sharing an endpoint within
/// `merge_tol` are merged.
pub fn extract_zero_set<F: TwoFormField + ?Sized>(
    field: &F,
    grid: &Grid4,
    opts: &ContinuationOptions,
) -> Vec<TracedCurve> {
    let mut curves: Vec<TracedCurve> = Vec::new();
    for seed in grid_seeds(field, grid) {
        let Some((z, _)) = newton_project(field, &seed, opts.residual_tol) else {
            continue;
        };
        let r = norm(&z);
        if r > opts.ball_radius || r < opts.exclude_radius.max(1e-9) {
            continue;
        }
        if jacobian_rank(field, &z) < 3 {
            continue;
        }
        if curves.iter().any(|c| dist_to_curve(&z, c) < 0.25 * opts.step) {
            continue;
        }
        let (fwd, end_f, wf) = trace(field, &z, 1.0, opts);
        if end_f == CurveEnd::Closed {
            curves.push(TracedCurve {
                points: fwd,
                ends: [CurveEnd::Closed, CurveEnd::Closed],
                max_residual: wf,
            });
            continue;
        }
        let (bwd, end_b, wb) = trace(field, &z, -1.0, opts);
        let mut points: Vec<[f64; 4]> = bwd.into_iter().rev().collect();
        points.extend(fwd.into_iter().skip(1));
        curves.push(TracedCurve {
            points,
            ends: [end_b, end_f],
            max_residual: wf.max(wb),
        });
    }
    merge_curves(curves, opts.merge_tol)
}

fn merge_curves(mut curves: Vec<TracedCurve>, tol: f64) -> Vec<TracedCurve> {
    let mut changed = true;
    while changed {
        changed = false;
        'search: for i in 0..curves.len() {
            if curves[i].is_closed() {
                continue;
            }
            for j in (i + 1)..curves.len() {
                if curves[j].is_closed() {
                    continue;
                }
                let (a, b) = (&curves[i], &curves[j]);
                let a_first = a.points[0];
                let a_last = *a.points.last().expect("nonempty");
                let b_first = b.points[0];
                let b_last = *b.points.last().expect("nonempty");
                let joined = if close(&a_last, &b_first, tol) {
                    Some((false, false))
                } else if close(&a_last, &b_last, tol) {
                    Some((false, true))
                } else if close(&a_first, &b_last, tol) {
                    Some((true, true))
                } else if close(&a_first, &b_first, tol) {
                    Some((true, false))
                } else {
                    None
                };
                if let Some((rev_a, rev_b)) = joined {
                    let b = curves.remove(j);
                    let a = &mut curves[i];
                    let mut pa = a.points.clone();
                    let mut ea = a.ends;
                    if rev_a {
                        pa.reverse();
                        ea.reverse();
                    }
                    let mut pb = b.points.clone();
                    let mut eb = b.ends;
                    if rev_b {
                        pb.reverse();
                        eb.reverse();
                    }
                    pa.extend(pb.into_iter().skip(1));
                    a.points = pa;
                    a.ends = [ea[0], eb[1]];
                    a.max_residual = a.max_residual.max(b.max_residual);
                    changed = true;
                    break 'search;
                }
            }
        }
    }
    curves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nearsym::model::build_model_form;
    use crate::numeric::NumForm;
    use crate::poly::int;

    #[test]
    fn newton_lands_on_hyperbola() {
        let w = NumForm::new(&build_model_form(&int(1)).unwrap());
        let (z, r) = newton_project(&w, &[0.7, 0.05, -0.03, 0.6], 1e-9).unwrap();
        assert!(r < 1e-12);
        let h = 3.0 * z[0] * z[0] - z[0] * z[3] - z[3] * z[3];
        assert!((h - 1.0).abs() < 1e-10 && z[1].abs() < 1e-12 && z[2].abs() < 1e-12);
    }

    #[test]
    fn merge_joins_matching_endpoints() {
        let c1 = TracedCurve {
            points: vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0]],
            ends: [CurveEnd::ExitedBall, CurveEnd::Stalled],
            max_residual: 0.0,
        };
        let c2 = TracedCurve {
            points: vec![[2.0, 0.0, 0.0, 0.0], [1.0 + 1e-8, 0.0, 0.0, 0.0]],
            ends: [CurveEnd::ExitedBall, CurveEnd::Stalled],
            max_residual: 0.0,
        };
        let m = merge_curves(vec![c1, c2], 1e-6);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].points.len(), 3);
        assert!(m[0].is_non_compact());
    }
}
