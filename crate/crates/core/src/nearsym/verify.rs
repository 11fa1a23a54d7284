//! Verification of the near-symplectic conditions for a polynomial 2-form.

use alloc::vec::Vec;

use num_traits::Zero;
use serde::Serialize;

use super::model::{model_eps, model_zero_components, ZeroComponent};
use super::orientation::orientation_at;
use super::zeroset::{extract_zero_set, jacobian_rank, ContinuationOptions, Grid4};
use super::NearSymError;
use crate::form::{PolyForm, VectorFieldPoly};
use crate::frame::FlatFrame;
use crate::linalg::sym_eigen;
use crate::numeric::{norm, NumForm, NumPoly, TwoFormField};
use crate::poly::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub grid: Grid4,
    pub continuation: ContinuationOptions,
    /// Zero-set samples per component.
    pub samples_per_component: usize,
    /// Parameter range sampled on lines and hyperbola branches.
    pub sample_range: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid: Grid4 {
                lo: -2.0,
                hi: 2.0,
                n: 11,
            },
            continuation: ContinuationOptions::default(),
            samples_per_component: 50,
            sample_range: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalitySample {
    pub point: [f64; 4],
    pub rank: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalHessianSample {
    pub point: [f64; 4],
    pub eigenvalues: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseBott {
    pub pass: bool,
    pub samples: Vec<NormalHessianSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentOrientation {
    pub component: usize,
    pub det_sign: i8,
    pub constant_sign: bool,
    pub samples: usize,
    pub max_trace_residual: f64,
    pub max_symmetry_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeSummary {
    pub grid_points: usize,
    pub min_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSetReport {
    pub closed: bool,
    pub selfdual: bool,
    /// `symbolic` for members of the model family, `continuation` otherwise.
    pub extraction: &'static str,
    pub zero_components: Vec<ZeroComponent>,
    pub transversality: Vec<TransversalitySample>,
    pub morse_bott: MorseBott,
    pub orientation: Vec<ComponentOrientation>,
    pub wedge: WedgeSummary,
    /// Degenerate zeros inside the removed ball (e.g. the crossing point of
    /// two zero lines); they do not fail verification.
    pub flagged_degenerate: Vec<[f64; 4]>,
    pub max_zero_residual: f64,
}

impl ZeroSetReport {
    pub fn non_compact_components(&self) -> usize {
        self.zero_components
            .iter()
            .filter(|c| match c {
                ZeroComponent::SampledArc { non_compact, .. } => *non_compact,
                _ => true,
            })
            .count()
    }
}

/// `Hess f = 2 Jᵀ P J` where `ω∧ω = f vol = 2 Pf(ω) vol`, restricted to the
/// orthogonal complement of the tangent `t`.
pub fn normal_hessian(jac: &[[f64; 4]; 6], t: &[f64; 4]) -> [f64; 3] {
    // P: quadratic form of the Pfaffian, Pf(w) = ½ wᵀ P w.
    const PAIRS: [(usize, usize, f64); 3] = [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)];
    let mut h = nalgebra::DMatrix::<f64>::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for &(i, j, c) in &PAIRS {
                s += c * (jac[i][a] * jac[j][b] + jac[j][a] * jac[i][b]);
            }
            h[(a, b)] = 2.0 * s;
        }
    }
    let tn = norm(t);
    let u = t.map(|v| v / tn);
    let p = nalgebra::DMatrix::<f64>::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.0 } - u[i] * u[j]);
    let hp = &p * h * &p;
    let (vals, _) = sym_eigen(&hp);
    // one eigenvalue is the (zero) tangential direction; drop the smallest
    // in absolute value.
    let mut v = vals;
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut out = [v[1], v[2], v[3]];
    out.sort_by(f64::total_cmp);
    out
}

fn sample_checks<F: TwoFormField + ?Sized>(
    field: &F,
    samples: &[([f64; 4], [f64; 4])],
) -> (Vec<TransversalitySample>, Vec<NormalHessianSample>) {
    let mut tr = Vec::with_capacity(samples.len());
    let mut mb = Vec::with_capacity(samples.len());
    for (p, t) in samples {
        let rank = jacobian_rank(field, p);
        tr.push(TransversalitySample {
            point: *p,
            rank,
            pass: rank == 3,
        });
        mb.push(NormalHessianSample {
            point: *p,
            eigenvalues: normal_hessian(&field.jacobian(p), t),
        });
    }
    (tr, mb)
}

/// Checks `dω = 0`, `ω∧ω ≥ 0` on the grid, extracts the zero set and
/// verifies rank-3 transversality, the Morse–Bott condition and the
/// orientation form at zero-set samples.
pub fn verify_near_symplectic(
    w: &PolyForm,
    frame: &FlatFrame,
    opts: &VerifyOptions,
) -> Result<ZeroSetReport, NearSymError> {
    if w.dim() != 4 || w.degree() != 2 {
        return Err(crate::error::FormError::WrongDegree {
            expected: 2,
            got: w.degree(),
        }
        .into());
    }
    if !w.exterior_d()?.is_zero() {
        return Err(NearSymError::NotClosed);
    }
    let selfdual = match frame.is_self_dual(w) {
        Ok(b) => b,
        Err(crate::error::FormError::IrrationalVolume) => false,
        Err(e) => return Err(e.into()),
    };
    let f = NumPoly::new(&w.wedge(w)?.top_coefficient()?);
    let field = NumForm::new(w);
    let excl = opts.continuation.exclude_radius;

    // ω∧ω ≥ 0 on the grid (relative tolerance for rounding in f).
    let mut min_value = f64::INFINITY;
    let mut grid_points = 0;
    for p in opts.grid.points() {
        if norm(&p) < excl {
            continue;
        }
        grid_points += 1;
        let v = f.eval(&p);
        let wv = field.value(&p);
        let scale = 1.0 + wv.iter().map(|x| x * x).sum::<f64>();
        if v < -1e-10 * scale {
            return Err(NearSymError::IndefiniteWedge { point: p, value: v });
        }
        min_value = min_value.min(v);
    }

    let mut flagged = Vec::new();
    let (extraction, components, max_res) = match model_eps(w) {
        Some(eps) => {
            if eps.is_zero() {
                let origin = [0.0; 4];
                let rank = jacobian_rank(&field, &origin);
                if excl > 0.0 {
                    flagged.push(origin);
                } else {
                    return Err(NearSymError::DegenerateZero { point: origin, rank });
                }
            }
            let comps = model_zero_components(&eps);
            let res = comps
                .iter()
                .flat_map(|c| c.sample(opts.samples_per_component, opts.sample_range))
                .map(|(p, _)| norm(&field.value(&p)))
                .fold(0.0, f64::max);
            ("symbolic", comps, res)
        }
        None => {
            let curves = extract_zero_set(&field, &opts.grid, &opts.continuation);
            let res = curves.iter().map(|c| c.max_residual).fold(0.0, f64::max);
            let comps = curves
                .into_iter()
                .map(|c| ZeroComponent::SampledArc {
                    non_compact: c.is_non_compact(),
                    closed: c.is_closed(),
                    points: c.points,
                })
                .collect();
            ("continuation", comps, res)
        }
    };

    let mut transversality = Vec::new();
    let mut hess = Vec::new();
    let mut orientation = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        let samples: Vec<([f64; 4], [f64; 4])> = comp
            .sample(opts.samples_per_component, opts.sample_range)
            .into_iter()
            .filter(|(p, _)| norm(p) >= excl.max(1e-12))
            .collect();
        let (tr, mb) = sample_checks(&field, &samples);
        if let Some(bad) = tr.iter().find(|s| !s.pass) {
            return Err(NearSymError::DegenerateZero {
                point: bad.point,
                rank: bad.rank,
            });
        }
        transversality.extend(tr);
        hess.extend(mb);
        let mut signs = Vec::new();
        let mut tr_res = 0.0_f64;
        let mut sym_res = 0.0_f64;
        // Lines are sampled alternately on both rays; orient every sample
        // along the line's parametrization.
        for (p, t) in &samples {
            let o = orientation_at(&field, p, t, 1e-8)?;
            signs.push(o.det_sign);
            let scale = o.matrix.iter().flatten().map(|v| v.abs()).fold(1e-300, f64::max);
            tr_res = tr_res.max(o.trace.abs() / scale.max(1.0));
            sym_res = sym_res.max(o.symmetry_residual);
        }
        let first = signs.first().copied().unwrap_or(0);
        orientation.push(ComponentOrientation {
            component: ci,
            det_sign: first,
            constant_sign: signs.iter().all(|&s| s == first),
            samples: signs.len(),
            max_trace_residual: tr_res,
            max_symmetry_residual: sym_res,
        });
    }
    let mb_pass = hess.iter().all(|s| s.eigenvalues[0] > 1e-9);
    Ok(ZeroSetReport {
        closed: true,
        selfdual,
        extraction,
        zero_components: components,
        transversality,
        morse_bott: MorseBott {
            pass: mb_pass,
            samples: hess,
        },
        orientation,
        wedge: WedgeSummary {
            grid_points,
            min_value,
        },
        flagged_degenerate: flagged,
        max_zero_residual: max_res,
    })
}

/// Primitive `λ` with `dλ = w` for a closed 2-form whose coefficients are
/// homogeneous of a common degree `m`: `λ = ι_E w / (m + 2)`.
pub fn liouville_primitive(w: &PolyForm) -> Result<PolyForm, NearSymError> {
    if w.degree() == 0 {
        return Err(crate::error::FormError::WrongDegree { expected: 2, got: 0 }.into());
    }
    if w.is_zero() {
        return Ok(PolyForm::zero(w.dim(), w.degree() - 1)?);
    }
    let m = w.coefficient_degree().ok_or(NearSymError::NotHomogeneous)?;
    if !w.exterior_d()?.is_zero() {
        return Err(NearSymError::NotClosed);
    }
    let e = VectorFieldPoly::euler(w.dim())?;
    let k = w.degree() as i64;
    let lam = w
        .interior_product(&e)?
        .scale(&Rational::new(1.into(), (i64::from(m) + k).into()));
    Ok(lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::self_dual_basis;
    use crate::nearsym::model::build_model_form;
    use crate::poly::int;

    #[test]
    fn primitive_of_model_and_constant() {
        let w = build_model_form(&int(0)).unwrap();
        let lam = liouville_primitive(&w).unwrap();
        assert_eq!(lam.exterior_d().unwrap(), w);
        let e = VectorFieldPoly::euler(4).unwrap();
        assert_eq!(lam, w.interior_product(&e).unwrap().scale(&crate::poly::rat(1, 4)));
        let [_, _, w3] = self_dual_basis();
        let mu = liouville_primitive(&w3).unwrap();
        assert_eq!(mu.exterior_d().unwrap(), w3);
        let zero = PolyForm::zero(4, 2).unwrap();
        assert!(liouville_primitive(&zero).unwrap().is_zero());
        let mixed = build_model_form(&int(1)).unwrap();
        assert_eq!(liouville_primitive(&mixed).unwrap_err(), NearSymError::NotHomogeneous);
    }
}
