//! Adaptive Dormand–Prince 5(4) integrator for autonomous systems, with an
//! optional manifold projection after every accepted step.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

/// An accepted step, with endpoint derivatives for cubic Hermite
/// interpolation.
#[derive(Clone, Copy, Debug)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolant on `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        y
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        DormandPrince {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-2,
            h_min: 1e-14,
            h_max: 1.0,
            max_steps: 1_000_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl DormandPrince {
    /// Integrates `y' = f(y)` from `t0` toward `t_end` (either direction).
    /// `project` is applied to every accepted state; `on_step` sees each
    /// accepted step and stops the integration by returning `true`.
    pub fn integrate<const N: usize, F, P, C>(
        &self,
        f: F,
        project: P,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut on_step: C,
    ) -> Result<(f64, [f64; N]), OdeError>
    where
        F: Fn(&[f64; N]) -> [f64; N],
        P: Fn(&[f64; N]) -> [f64; N],
        C: FnMut(&Step<N>) -> bool,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = project(&y0);
        let mut k1 = f(&y);
        let mut h = self.h_init.min(self.h_max);
        let mut steps = 0;
        while dir * (t_end - t) > 0.0 {
            if steps >= self.max_steps {
                return Err(OdeError::TooManySteps(self.max_steps));
            }
            steps += 1;
            let remaining = dir * (t_end - t);
            let last = h >= remaining;
            h = h.min(remaining);
            let hs = dir * h;
            let k2 = f(&axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(&axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(&axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(&axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(&axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ));
            let y5 = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(&y5);
            let mut err = 0.0_f64;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                return Err(OdeError::NonFinite { t });
            }
            if err <= 1.0 {
                let y_new = project(&y5);
                let f_new = f(&y_new);
                let step = Step {
                    t0: t,
                    y0: y,
                    f0: k1,
                    t1: if last { t_end } else { t + hs },
                    y1: y_new,
                    f1: f_new,
                };
                t = step.t1;
                y = y_new;
                k1 = f_new;
                if on_step(&step) {
                    return Ok((t, y));
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(self.h_max);
            if h < self.h_min {
                return Err(OdeError::StepUnderflow { t });
            }
        }
        Ok((t, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let dp = DormandPrince::default();
        let (t, y) = dp
            .integrate(|y: &[f64; 1]| [-y[0]], |y| *y, 0.0, [1.0], 3.0, |_| false)
            .unwrap();
        assert_eq!(t, 3.0);
        assert!((y[0] - libm::exp(-3.0)).abs() < 1e-9);
    }

    #[test]
    fn rotation_on_circle_backward() {
        let dp = DormandPrince::default();
        let proj = |y: &[f64; 2]| {
            let n = libm::sqrt(y[0] * y[0] + y[1] * y[1]);
            [y[0] / n, y[1] / n]
        };
        let tau = 2.0 * core::f64::consts::PI;
        let (_, y) = dp
            .integrate(|y: &[f64; 2]| [-y[1], y[0]], proj, 0.0, [1.0, 0.0], -tau, |_| false)
            .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }
}
