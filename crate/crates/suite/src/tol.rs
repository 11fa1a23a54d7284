//! Pinned tolerances of the acceptance criteria.

pub const EXACT_RUNTIME_SECS: f64 = 1.0;
pub const ZERO_SET_EQUATIONS: f64 = 1e-9;
pub const LINE_SLOPE: f64 = 1e-9;
pub const TRANSVERSAL_SAMPLES: usize = 100;
pub const TRACE_RESIDUAL: f64 = 1e-12;
pub const ANTIPODAL_RESIDUAL: f64 = 1e-10;
pub const ANTIPODAL_PAIRS: usize = 1000;
pub const EXPECTED_COMPONENTS: usize = 2;
pub const INTERPOLATION_POINTS: usize = 10_000;
pub const INTERPOLATION_TIMES: usize = 5;
pub const RETURN_RESIDUAL: f64 = 1e-6;
pub const OVERTWISTED_SECS: f64 = 30.0;
pub const WINDOW_VECTORS: usize = 1000;
pub const WINDOW_SHIFTS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
pub const WINDOW_EQUALITY: f64 = 1e-12;
pub const TAIL1_SLOPE: (f64, f64) = (-2.0, 0.05);
pub const TAIL2_SLOPE: (f64, f64) = (-4.0, 0.1);
pub const DIRECT_SOLVE: f64 = 1e-12;
pub const SWEEP_SECS: f64 = 10.0;
pub const HIGHER_SLOPE: (f64, f64) = (-3.0, 0.05);
pub const PERIOD_SLOPE: (f64, f64) = (-2.0, 0.05);
pub const INTERCEPT: f64 = 0.05;
pub const QUADRATURE_AGREEMENT: f64 = 1e-6;
pub const FAST_DECAY_MARGIN: f64 = 0.05;
pub const JACOBIAN_T: f64 = 8.0;
pub const SIGMA_FACTOR: f64 = 1e-3;
pub const IDENTITY_JACOBIAN: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-4;
pub const AREA_PARAMETER: f64 = 0.7;
