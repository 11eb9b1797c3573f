//! Shared vocabulary: indices, hbar, evaluation results and check reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Triple `(a, b, n)` of integer tuples of common length `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub n: Vec<i32>,
}

impl MultiIndex {
    pub fn new(a: Vec<u32>, b: Vec<u32>, n: Vec<i32>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Usage("multi-index must have depth >= 1".into()));
        }
        if a.len() != b.len() || a.len() != n.len() {
            return Err(Error::Usage(format!(
                "index lengths differ: a={}, b={}, n={}",
                a.len(),
                b.len(),
                n.len()
            )));
        }
        Ok(Self { a, b, n })
    }

    /// Depth one index `((a),(b),(n))`.
    pub fn single(a: u32, b: u32, n: i32) -> Self {
        Self { a: vec![a], b: vec![b], n: vec![n] }
    }

    /// The basic index `a = b = (1,...,1)`.
    pub fn basic(n: &[i32]) -> Self {
        let m = n.len();
        Self { a: vec![1; m], b: vec![1; m], n: n.to_vec() }
    }

    pub fn depth(&self) -> usize {
        self.n.len()
    }

    pub fn weight(&self) -> i64 {
        weight(self)
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut out = self.clone();
        out.a.extend_from_slice(&other.a);
        out.b.extend_from_slice(&other.b);
        out.n.extend_from_slice(&other.n);
        out
    }

    pub fn a_total(&self) -> u32 {
        self.a.iter().sum()
    }

    pub fn b_total(&self) -> u32 {
        self.b.iter().sum()
    }
}

/// `|n| = n_1 + ... + n_m`.
pub fn weight(idx: &MultiIndex) -> i64 {
    idx.n.iter().map(|&x| x as i64).sum()
}

/// Planck-like parameter; never on the closed negative real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HbarValue(C64);

impl HbarValue {
    pub fn new(value: C64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain("hbar must be finite".into()));
        }
        if value.im == 0.0 && value.re <= 0.0 {
            return Err(Error::Domain(format!("hbar = {} lies on (-inf, 0]", value.re)));
        }
        Ok(Self(value))
    }

    pub fn real(h: f64) -> Result<Self> {
        Self::new(C64::new(h, 0.0))
    }

    pub fn value(&self) -> C64 {
        self.0
    }

    /// Numeric backends need `Re(hbar) > 0`.
    pub fn require_numeric(&self) -> Result<()> {
        if self.0.re > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("numeric backends need Re(hbar) > 0, got {}", self.0)))
        }
    }

    pub fn is_real_positive(&self) -> bool {
        self.0.im == 0.0 && self.0.re > 0.0
    }

    /// `q = e^{i pi hbar}`.
    pub fn q(&self) -> C64 {
        (C64::i() * PI * self.0).exp()
    }

    /// `q^v = e^{i pi / hbar}`.
    pub fn q_dual(&self) -> C64 {
        (C64::i() * PI / self.0).exp()
    }

    /// `q* = e^{-i pi / hbar}`.
    pub fn q_star(&self) -> C64 {
        (-C64::i() * PI / self.0).exp()
    }

    /// Height of the lowest nonzero pole of `1/(sh(pi p) sh(pi hbar p))` above the axis.
    pub fn lowest_pole_height(&self) -> f64 {
        (self.0.re / self.0.norm_sqr()).min(1.0)
    }
}

impl fmt::Display for HbarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-coordinate bounds `s_i = pi (a_i + b_i Re hbar)` on `|Im omega_i|`.
pub fn convergence_strip(idx: &MultiIndex, hbar: &HbarValue) -> Result<Vec<f64>> {
    hbar.require_numeric()?;
    idx.a
        .iter()
        .zip(&idx.b)
        .map(|(&a, &b)| {
            if a == 0 && b == 0 {
                Err(Error::Domain("a_i = b_i = 0 gives no exponential decay".into()))
            } else {
                Ok(PI * (a as f64 + b as f64 * hbar.value().re))
            }
        })
        .collect()
}

/// True iff every `|Im omega_i| < s_i`.
pub fn in_strip(omega: &[C64], strip: &[f64]) -> bool {
    omega.len() == strip.len() && omega.iter().zip(strip).all(|(w, s)| w.im.abs() < *s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Series,
    Contour,
    Companion,
    ClosedForm,
    Exact,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Series => "series",
            Backend::Contour => "contour",
            Backend::Companion => "companion",
            Backend::ClosedForm => "closed_form",
            Backend::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Quadrature nodes (all axes, all levels).
    pub nodes: u64,
    /// Series terms summed.
    pub terms: u64,
    /// Contour truncation half-length.
    pub truncation: Option<f64>,
    pub refinements: u32,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: C64,
    pub err_estimate: f64,
    pub backend: Backend,
    pub diagnostics: Diagnostics,
}

impl EvalResult {
    pub fn new(value: C64, err_estimate: f64, backend: Backend, diagnostics: Diagnostics) -> Result<Self> {
        check_finite(value, "result")?;
        let err_estimate = if err_estimate.is_finite() { err_estimate.abs() } else { f64::INFINITY };
        Ok(Self { value, err_estimate, backend, diagnostics })
    }

    pub fn exact(value: C64) -> Result<Self> {
        Self::new(value, 0.0, Backend::Exact, Diagnostics::default())
    }
}

pub fn check_finite(z: C64, what: &str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// One verified identity instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub identity_name: String,
    pub params: serde_json::Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckReport {
    /// A non-finite residual is reported as infinite and fails.
    pub fn new(name: impl Into<String>, params: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual.abs() };
        Self { identity_name: name.into(), params, residual, tolerance, pass: residual <= tolerance }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, mut params: serde_json::Value, tolerance: f64, err: &Error) -> Self {
        if let serde_json::Value::Object(map) = &mut params {
            map.insert("error".into(), serde_json::Value::String(err.to_string()));
        }
        Self::new(name, params, f64::INFINITY, tolerance)
    }
}

/// Sort key for order-independent aggregation.
pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|x, y| {
        x.identity_name
            .cmp(&y.identity_name)
            .then_with(|| x.params.to_string().cmp(&y.params.to_string()))
    });
}
