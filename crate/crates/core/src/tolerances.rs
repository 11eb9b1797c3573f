//! Pass thresholds for the identity checks, all absolute.

/// Integral presentation of `Li` against the direct series.
pub const SERIES_VS_CONTOUR: f64 = 1e-8;
/// Imaginary parts pushed to `pi - 0.1`.
pub const SERIES_VS_CONTOUR_BOUNDARY: f64 = 1e-6;

/// Displayed depth-one integrals `int e^{-ip w} / sh^a(pi p) dp`.
pub const DEPTH1_DISPLAY: f64 = 1e-10;
/// `depth1_closed_form` against quadrature.
pub const DEPTH1_CLOSED_FORM: f64 = 1e-9;

/// `Delta_{i pi}` and `Delta_{i pi hbar}` relations.
pub const DIFFERENCE: f64 = 1e-8;
/// Finite-difference step for the differential relation.
pub const FD_STEP: f64 = 1e-3;

/// Differential relation: `max(1e-6, 10 h^4)`.
pub fn differential() -> f64 {
    (10.0 * FD_STEP.powi(4)).max(1e-6)
}

pub const H1_DEPTH1: f64 = 1e-8;
pub const H1_DEPTH2: f64 = 1e-7;

pub const DISTRIBUTION: f64 = 1e-6;
pub const RATIONAL_HBAR: f64 = 1e-6;

pub const COMPANION_DEPTH1: f64 = 1e-7;
pub const COMPANION_DEPTH2: f64 = 1e-6;
pub const TWO_SERIES_SPLIT: f64 = 1e-7;

pub const SHUFFLE: f64 = 1e-7;
pub const GENERATING_SERIES: f64 = 1e-8;

/// `|rho(hbar) - 1|` at the smallest `hbar`.
pub const ASYMPTOTIC_RATIO: f64 = 0.5;
/// Depth-two trend check: `rho` within a factor 2 of 1.
pub const ASYMPTOTIC_TREND: f64 = 1.0;

pub const CONJUGATION: f64 = 1e-8;
pub const MODULAR: f64 = 1e-8;
pub const NEGATION: f64 = 1e-8;
/// Bound on `|F|` at `Re omega = -30`.
pub const DECAY: f64 = 1e-10;

pub const QDI: f64 = 1e-13;
pub const Q_INTEGRAL_SUM: f64 = 1e-10;
pub const PSI1: f64 = 1e-10;

/// Small-circle quadrature against exact Bernoulli evaluation.
pub const BERNOULLI_CIRCLE: f64 = 1e-12;
