use serde::Serialize;

use super::ResolutionError;

/// U(2)-invariant potential `h = c·F(t)`, `t = log |z|²`, on the minimal
/// resolution of `C²/±1`, with
/// `F'(t)² = p² χ(t) + e^{2t}` and `χ` stepping from 1 to 0 on
/// `[log p + 1, log p + 2]`. Hence `h = c·r²` for `r² ≥ p e²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelPotential {
    pub p: f64,
    pub scale: f64,
}

fn smootherstep(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0)
    } else {
        (s * s * s * (s * (6.0 * s - 15.0) + 10.0), 30.0 * s * s * (s - 1.0) * (s - 1.0))
    }
}

impl ModelPotential {
    pub fn new(p: f64, scale: f64) -> Result<Self, ResolutionError> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(ResolutionError::InvalidParameter("model parameter must be positive"));
        }
        Ok(ModelPotential { p, scale })
    }

    fn chi(&self, t: f64) -> (f64, f64) {
        let (s, ds) = smootherstep(t - libm::log(self.p) - 1.0);
        (1.0 - s, -ds)
    }

    /// `(h', h'')` in `t`.
    pub fn derivatives(&self, t: f64) -> (f64, f64) {
        let (chi, dchi) = self.chi(t);
        let e2 = libm::exp(2.0 * t);
        let f1 = libm::sqrt(self.p * self.p * chi + e2);
        let f2 = (self.p * self.p * dchi + 2.0 * e2) / (2.0 * f1);
        (self.scale * f1, self.scale * f2)
    }

    /// `h'` on the exceptional curve (`t → -∞`).
    pub fn slope_on_curve(&self) -> f64 {
        self.scale * self.p
    }

    /// `min(h', h'')` over `t ∈ [log p - 10, log p + 10]`: positive iff
    /// the form is Kähler there.
    pub fn min_positivity(&self) -> f64 {
        let lo = libm::log(self.p) - 10.0;
        (0..=4000)
            .map(|k| {
                let (a, b) = self.derivatives(lo + 20.0 * k as f64 / 4000.0);
                a.min(b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Composite Simpson on `n` (even) subintervals of
    /// `∫_0^π ∫_0^{2π} ¼ h'(C) sin φ dθ dφ`, the integral of
    /// `(i/2)∂∂̄h` over `C` in the chart `ζ = tan(φ/2) e^{iθ}`.
    pub fn curve_integral(&self, n: usize) -> f64 {
        let n = n + n % 2;
        let step = core::f64::consts::PI / n as f64;
        let density = |phi: f64| 0.25 * libm::sin(phi) * 2.0 * core::f64::consts::PI * self.slope_on_curve();
        let mut acc = density(0.0) + density(core::f64::consts::PI);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * density(k as f64 * step);
        }
        acc * step / 3.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaReport {
    pub potential: ModelPotential,
    /// Richardson extrapolation of `coarse` and `fine`.
    pub area: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `(I_n - I_{n/2}) / (I_{2n} - I_n)`; about 16 for Simpson.
    pub richardson_ratio: f64,
    pub min_positivity: f64,
}

impl AreaReport {
    pub fn resolution_gap(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

/// `A = ∫_C ω'` for the model potential with parameter `p`.
pub fn kahler_area_constant(p: f64) -> Result<AreaReport, ResolutionError> {
    area_of(ModelPotential::new(p, 1.0)?)
}

pub fn area_of(potential: ModelPotential) -> Result<AreaReport, ResolutionError> {
    let n = 64;
    let half = potential.curve_integral(n / 2);
    let coarse = potential.curve_integral(n);
    let fine = potential.curve_integral(2 * n);
    let min_positivity = potential.min_positivity();
    if !(fine > 0.0) || !(min_positivity > 0.0) {
        return Err(ResolutionError::NonPositiveArea(fine));
    }
    Ok(AreaReport {
        potential,
        area: fine + (fine - coarse) / 15.0,
        coarse,
        fine,
        richardson_ratio: (coarse - half) / (fine - coarse),
        min_positivity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_is_pi_p() {
        let r = kahler_area_constant(0.7).unwrap();
        assert!((r.area - 0.7 * core::f64::consts::PI).abs() < 1e-9);
        assert!(r.resolution_gap() < 1e-6);
        assert!((r.richardson_ratio - 16.0).abs() < 0.5);
    }

    #[test]
    fn potential_is_r_squared_outside() {
        let m = ModelPotential::new(0.5, 1.0).unwrap();
        let t = libm::log(0.5) + 2.5;
        let (a, b) = m.derivatives(t);
        assert!((a - libm::exp(t)).abs() < 1e-12 && (b - libm::exp(t)).abs() < 1e-12);
        let h = 1e-6;
        let t = libm::log(0.5) + 1.4;
        let fd = (m.derivatives(t + h).0 - m.derivatives(t - h).0) / (2.0 * h);
        assert!((fd - m.derivatives(t).1).abs() < 1e-7);
    }

    #[test]
    fn broken_potential_is_rejected() {
        let neg = area_of(ModelPotential { p: 1.0, scale: -1.0 });
        assert!(matches!(neg, Err(ResolutionError::NonPositiveArea(_))));
        assert!(kahler_area_constant(0.0).is_err());
    }
}
