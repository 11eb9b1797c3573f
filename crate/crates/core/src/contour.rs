//! Shifted-contour quadrature for quantum polylogarithms.
//!
//! Every integral runs over the line `Im p = eps` (per axis) with composite
//! 16-point Gauss-Legendre panels. The panel width is halved until two
//! successive levels agree; the last difference is the error estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::{compensated, i_pow, log_sh, powi, CompensatedSum};
pub use crate::closed_form::depth1_closed_form;
use crate::types::{convergence_strip, Backend, Diagnostics, EvalResult, HbarValue, MultiIndex, C64};

const GL_NODES: usize = 16;
const T_MIN: f64 = 10.0;
const T_MAX: f64 = 200.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Contour height; `None` picks half the lowest pole height.
    pub epsilon: Option<f64>,
    /// Half-length of the truncated line; `None` derives it from the decay rate.
    pub t: Option<f64>,
    /// Initial panel count per axis; `None` derives it from the pole distance.
    pub panels: Option<usize>,
    pub max_refine: u32,
    pub tol: f64,
    pub max_depth_m: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { epsilon: None, t: None, panels: None, max_refine: 5, tol: 1e-10, max_depth_m: 3 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Usage("quadrature tol must be positive".into()));
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Usage("truncation T must be positive and finite".into()));
            }
        }
        if self.panels == Some(0) {
            return Err(Error::Usage("panel count must be positive".into()));
        }
        Ok(())
    }

    /// Contour height for this `hbar`, checked against the lowest pole.
    pub fn contour_height(&self, hbar: &HbarValue) -> Result<f64> {
        let h = hbar.lowest_pole_height();
        match self.epsilon {
            None => Ok(0.5 * h),
            Some(e) if e > 0.0 && e < h => Ok(e),
            Some(e) => Err(Error::Domain(format!("contour shift {e} must lie in (0, {h})"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub a: u32,
    pub b: u32,
    pub hbar: HbarValue,
    pub omega: C64,
}

/// `log K = -i p omega - a log sh(pi p) - b log sh(pi hbar p)`, any branch.
fn log_kernel(k: &KernelParams, p: C64) -> Result<C64> {
    let mut r = -C64::i() * p * k.omega;
    for (count, arg) in [(k.a, PI * p), (k.b, PI * k.hbar.value() * p)] {
        if count > 0 {
            let l = log_sh(arg);
            if !(l.re > -700.0) {
                return Err(Error::Pole(format!("sh vanishes at p = {p}")));
            }
            r -= l * count as f64;
        }
    }
    Ok(r)
}

/// `K(p; omega) = e^{-ip omega} / (sh^a(pi p) sh^b(pi hbar p))`.
pub fn kernel(k: &KernelParams, p: C64) -> Result<C64> {
    Ok(log_kernel(k, p)?.exp())
}

fn gauss_legendre() -> &'static ([f64; GL_NODES], [f64; GL_NODES]) {
    static GL: OnceLock<([f64; GL_NODES], [f64; GL_NODES])> = OnceLock::new();
    GL.get_or_init(|| {
        let n = GL_NODES;
        let mut x = [0.0; GL_NODES];
        let mut w = [0.0; GL_NODES];
        for i in 0..n {
            // Newton on P_n from the Chebyshev guess
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (mut q0, mut q1) = (1.0, z);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                    break;
                }
            }
        }
        (x, w)
    })
}

/// Nodes and weights of `panels` equal GL panels on `[-t, t] + i eps`.
fn line_rule(t: f64, eps: f64, panels: usize) -> (Vec<C64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre();
    let h = 2.0 * t / panels as f64;
    let mut p = Vec::with_capacity(panels * GL_NODES);
    let mut w = Vec::with_capacity(panels * GL_NODES);
    for j in 0..panels {
        let mid = -t + (j as f64 + 0.5) * h;
        for i in 0..GL_NODES {
            p.push(C64::new(mid + 0.5 * h * gx[i], eps));
            w.push(0.5 * h * gw[i]);
        }
    }
    (p, w)
}

/// Per-axis geometry derived once per integral.
#[derive(Clone, Debug)]
struct AxisPlan {
    kp: KernelParams,
    t: f64,
    panels0: usize,
}

struct Axis {
    p: Vec<C64>,
    /// kernel times weight
    kw: Vec<C64>,
}

fn build_axis(plan: &AxisPlan, eps: f64, level: u32) -> Result<Axis> {
    let panels = plan.panels0 << level;
    let (p, w) = line_rule(plan.t, eps, panels);
    let kw = p
        .iter()
        .zip(&w)
        .map(|(&x, &wt)| Ok(kernel(&plan.kp, x)? * wt))
        .collect::<Result<Vec<_>>>()?;
    Ok(Axis { p, kw })
}

fn plan_axis(kp: KernelParams, n: i32, eps: f64, spec: &QuadratureSpec) -> Result<AxisPlan> {
    let hbar = kp.hbar;
    let rate = PI * (kp.a as f64 + kp.b as f64 * hbar.value().re) - kp.omega.im.abs();
    if !(rate > 0.0) {
        return Err(Error::OutOfStrip(format!("omega = {} gives no decay along the contour", kp.omega)));
    }
    let mut t = match spec.t {
        Some(t) => t,
        None => ((spec.tol * 1e-2).ln() / -rate).clamp(T_MIN, T_MAX),
    };
    if spec.t.is_none() {
        // make sure the integrand has actually died out at the ends
        let target = spec.tol / (2.0 * t);
        let ends = |t: f64| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for x in [-t, t] {
                let p = C64::new(x, eps);
                worst = worst.max(kernel(&kp, p)?.norm() * powi(p, -n).norm());
            }
            Ok(worst)
        };
        while t < T_MAX && ends(t)? > target {
            t = (t * 1.5).min(T_MAX);
        }
    }
    let d = eps.min(hbar.lowest_pole_height() - eps);
    let mut h = 1.8 * d;
    if kp.omega.re.abs() > 1.0 {
        h = h.min(PI / kp.omega.re.abs());
    }
    let panels0 = spec.panels.unwrap_or(((2.0 * t / h).ceil() as usize).max(4));
    Ok(AxisPlan { kp, t, panels0 })
}

/// `sum_i kw_i / (s + p_i)^{n_0} * inner(s + p_i)` over the remaining axes.
fn nested(axes: &[Axis], n: &[i32], s: C64) -> C64 {
    let (head, rest) = (&axes[0], &axes[1..]);
    let mut acc = CompensatedSum::new();
    for (&p, &kw) in head.p.iter().zip(&head.kw) {
        if kw.re == 0.0 && kw.im == 0.0 {
            continue;
        }
        let s2 = s + p;
        let mut t = kw * powi(s2, -n[0]);
        if !rest.is_empty() {
            t *= nested(rest, &n[1..], s2);
        }
        acc.add(t);
    }
    acc.value()
}

/// Raw tensor integral `int prod K_k dp_k / (p_1+...+p_k)^{n_k}` at one level.
fn tensor_integral(axes: &[Axis], n: &[i32]) -> C64 {
    let head = &axes[0];
    let rest = &axes[1..];
    let parts: Vec<C64> = head
        .p
        .par_iter()
        .zip(head.kw.par_iter())
        .map(|(&p, &kw)| {
            if kw.re == 0.0 && kw.im == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let mut t = kw * powi(p, -n[0]);
            if !rest.is_empty() {
                t *= nested(rest, &n[1..], p);
            }
            t
        })
        .collect();
    compensated(&parts)
}

/// Shared driver: raw integral `int prod K(p_k; omega_k) dp_k / (p_1+..+p_k)^{n_k}`.
fn raw_integral(idx: &MultiIndex, omega: &[C64], hbar: &HbarValue, spec: &QuadratureSpec) -> Result<EvalResult> {
    spec.validate()?;
    hbar.require_numeric()?;
    let m = idx.depth();
    if omega.len() != m {
        return Err(Error::Usage(format!("expected {m} arguments, got {}", omega.len())));
    }
    if m > spec.max_depth_m {
        return Err(Error::Dimension { m, max: spec.max_depth_m });
    }
    let strip = convergence_strip(idx, hbar)?;
    for (w, s) in omega.iter().zip(&strip) {
        if !(w.im.abs() < *s) {
            return Err(Error::OutOfStrip(format!("|Im {w}| must be < {s:.6}")));
        }
    }
    let eps = spec.contour_height(hbar)?;
    let plans = (0..m)
        .map(|k| {
            let kp = KernelParams { a: idx.a[k], b: idx.b[k], hbar: *hbar, omega: omega[k] };
            plan_axis(kp, idx.n[k], eps, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut nodes: u64 = 0;
    let mut prev: Option<C64> = None;
    let mut last_delta = f64::INFINITY;
    for level in 0..=spec.max_refine {
        let axes = plans.iter().map(|pl| build_axis(pl, eps, level)).collect::<Result<Vec<_>>>()?;
        nodes += axes.iter().map(|a| a.p.len() as u64).product::<u64>();
        let v = tensor_integral(&axes, &idx.n);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("contour integral".into()));
        }
        if let Some(pv) = prev {
            last_delta = (v - pv).norm();
            if last_delta <= spec.tol.max(1e-13 * v.norm()) {
                let diagnostics = Diagnostics {
                    nodes,
                    terms: 0,
                    truncation: Some(plans.iter().map(|p| p.t).fold(0.0, f64::max)),
                    refinements: level,
                    warnings: vec![],
                };
                return EvalResult::new(v, last_delta, Backend::Contour, diagnostics);
            }
        }
        prev = Some(v);
    }
    Err(Error::NonConvergent { delta: last_delta, tol: spec.tol })
}

/// `F_{a,b,n}(omega) = i^{|n|-m} int prod K dp_k / (p_1+...+p_k)^{n_k}`.
#[allow(non_snake_case)]
pub fn quad_F(idx: &MultiIndex, omega: &[C64], hbar: &HbarValue, spec: &QuadratureSpec) -> Result<EvalResult> {
    let mut r = raw_integral(idx, omega, hbar, spec)?;
    r.value *= i_pow(idx.weight() - idx.depth() as i64);
    Ok(r)
}

/// `omega_j = w_j + ... + w_m`.
pub fn i_to_f_args(w: &[C64]) -> Vec<C64> {
    let mut out = w.to_vec();
    for j in (0..w.len().saturating_sub(1)).rev() {
        out[j] = out[j] + out[j + 1];
    }
    out
}

/// `w_j = omega_j - omega_{j+1}`, `w_m = omega_m`.
pub fn f_to_i_args(omega: &[C64]) -> Vec<C64> {
    let m = omega.len();
    (0..m).map(|j| if j + 1 < m { omega[j] - omega[j + 1] } else { omega[j] }).collect()
}

/// I-variant: exponentials `e^{-i(p_1+...+p_k) w_k}`; equals `F` at `omega = i_to_f_args(w)`.
#[allow(non_snake_case)]
pub fn quad_I(idx: &MultiIndex, w: &[C64], hbar: &HbarValue, spec: &QuadratureSpec) -> Result<EvalResult> {
    quad_F(idx, &i_to_f_args(w), hbar, spec)
}

fn li_index(n: &[i32]) -> Result<MultiIndex> {
    if n.is_empty() || n.iter().any(|&x| x < 1) {
        return Err(Error::Domain("integral presentation needs all n_i >= 1".into()));
    }
    MultiIndex::new(vec![1; n.len()], vec![0; n.len()], n.to_vec())
}

const MARGIN: f64 = 1e-9;

/// `Li_n(e^{w_1}, ..., e^{w_{m-1}}, -e^{w_m})` as the `sh(pi p)`-only I-variant integral.
///
/// Needs `Re w_i < 0`, `|Im w_i| < pi`; the integral itself also needs every
/// tail sum `w_j + ... + w_m` to keep `|Im| < pi`.
#[allow(non_snake_case)]
pub fn quad_Li(n: &[i32], w: &[C64], spec: &QuadratureSpec) -> Result<EvalResult> {
    let idx = li_index(n)?;
    if w.len() != n.len() {
        return Err(Error::Usage("quad_Li needs matching n and w".into()));
    }
    for x in w {
        if !(x.re < -MARGIN && x.im.abs() < PI - MARGIN) {
            return Err(Error::Domain(format!("quad_Li needs Re w < 0 and |Im w| < pi, got {x}")));
        }
    }
    let omega = i_to_f_args(w);
    if let Some(o) = omega.iter().find(|o| !(o.im.abs() < PI - MARGIN)) {
        return Err(Error::Domain(format!("tail sum {o} leaves |Im| < pi: the integral diverges there")));
    }
    let hbar = HbarValue::real(1.0)?;
    quad_F(&idx, &omega, &hbar, spec)
}

/// The same integral in `F` variables: `Li_n(e^{omega_1-omega_2}, ..., -e^{omega_m})`,
/// with `Re omega_1 < ... < Re omega_m < 0` and `|Im omega_i| < pi`.
#[allow(non_snake_case)]
pub fn quad_Li_f(n: &[i32], omega: &[C64], spec: &QuadratureSpec) -> Result<EvalResult> {
    let idx = li_index(n)?;
    if omega.len() != n.len() {
        return Err(Error::Usage("quad_Li_f needs matching n and omega".into()));
    }
    for (j, o) in omega.iter().enumerate() {
        let next = if j + 1 < omega.len() { omega[j + 1].re } else { 0.0 };
        if !(o.re < next - MARGIN && o.im.abs() < PI - MARGIN) {
            return Err(Error::Domain(format!("quad_Li_f needs Re omega increasing to below 0 and |Im| < pi at {o}")));
        }
    }
    let hbar = HbarValue::real(1.0)?;
    quad_F(&idx, omega, &hbar, spec)
}

/// `zeta_hbar(s) = int prod K_{1,1}(p_k; 0) dp_k / (p_1+...+p_k)^{s_k - 1}`.
///
/// Equals `i^{-(|n|-m)} F_{1,1,n}(0)` with `n_k = s_k - 1`.
pub fn quad_zeta_hbar(s: &[i32], hbar: &HbarValue, spec: &QuadratureSpec) -> Result<EvalResult> {
    if s.is_empty() || s.iter().any(|&x| x < 2) {
        return Err(Error::Domain("zeta_hbar needs integer s_i >= 2".into()));
    }
    if !hbar.is_real_positive() {
        return Err(Error::Domain("zeta_hbar needs real hbar > 0".into()));
    }
    let n: Vec<i32> = s.iter().map(|x| x - 1).collect();
    let idx = MultiIndex::basic(&n);
    raw_integral(&idx, &vec![C64::new(0.0, 0.0); s.len()], hbar, spec)
}

/// `i^{n-1} oint_{|p| = radius} K(p; omega) dp / p^n`, counterclockwise, trapezoidal rule.
pub fn quad_bernoulli_circle(idx: &MultiIndex, omega: C64, hbar: &HbarValue, radius: f64) -> Result<EvalResult> {
    if idx.depth() != 1 {
        return Err(Error::Usage("circle integral is depth one".into()));
    }
    hbar.require_numeric()?;
    let h = hbar.lowest_pole_height();
    if !(radius > 0.0 && radius < h) {
        return Err(Error::Domain(format!("radius {radius} must lie in (0, {h})")));
    }
    let kp = KernelParams { a: idx.a[0], b: idx.b[0], hbar: *hbar, omega };
    let n = idx.n[0];
    let circle = |npts: usize| -> Result<C64> {
        let mut acc = CompensatedSum::new();
        for j in 0..npts {
            let theta = 2.0 * PI * j as f64 / npts as f64;
            let p = C64::from_polar(radius, theta);
            // dp = i p dtheta
            acc.add(kernel(&kp, p)? * powi(p, 1 - n) * C64::i());
        }
        Ok(acc.value() * (2.0 * PI / npts as f64))
    };
    let pref = i_pow(n as i64 - 1);
    let mut npts = 64;
    let mut prev = circle(npts)?;
    loop {
        npts *= 2;
        let v = circle(npts)?;
        let delta = (v - prev).norm();
        if delta <= 1e-15 * v.norm().max(1.0) || npts >= 1 << 16 {
            let diagnostics = Diagnostics { nodes: npts as u64, ..Default::default() };
            return EvalResult::new(v * pref, delta, Backend::Contour, diagnostics);
        }
        prev = v;
    }
}

/// `int e^{-ip omega} / ((sh(pi p) - r)(sh(pi hbar p) - s)) dp / (p - iu)` on the shifted line.
///
/// Expands as `sum r^{a-1} s^{b-1} u^{n-1} F_{a,b,n}(omega)` for small `r, s, u`.
pub fn gen_series_depth1(omega: C64, r: C64, s: C64, u: C64, hbar: &HbarValue, spec: &QuadratureSpec) -> Result<EvalResult> {
    spec.validate()?;
    hbar.require_numeric()?;
    if r.norm() > 0.5 || s.norm() > 0.5 {
        return Err(Error::Domain("generating series needs |r|, |s| <= 0.5".into()));
    }
    let eps = spec.contour_height(hbar)?;
    if !(u.re < eps - 0.05) {
        // p = iu sits on or above the contour
        return Err(Error::Pole(format!("p = iu = {} is within 0.05 of the contour", C64::i() * u)));
    }
    let idx = MultiIndex::single(1, 1, 1);
    if !(omega.im.abs() < convergence_strip(&idx, hbar)?[0]) {
        return Err(Error::OutOfStrip(format!("omega = {omega}")));
    }
    let kp = KernelParams { a: 1, b: 1, hbar: *hbar, omega };
    let plan = plan_axis(kp, 1, eps, spec)?;
    let iu = C64::i() * u;
    let hb = hbar.value();
    let eval_level = |level: u32| -> Result<C64> {
        let panels = plan.panels0 << level;
        let (p, w) = line_rule(plan.t, eps, panels);
        let mut acc = CompensatedSum::new();
        for (&x, &wt) in p.iter().zip(&w) {
            let l1 = log_sh(PI * x);
            let l2 = log_sh(PI * hb * x);
            let d1 = C64::new(1.0, 0.0) - r * (-l1).exp();
            let d2 = C64::new(1.0, 0.0) - s * (-l2).exp();
            let v = (-C64::i() * x * omega - l1 - l2).exp() / (d1 * d2 * (x - iu));
            acc.add(v * wt);
        }
        Ok(acc.value())
    };
    let mut prev = eval_level(0)?;
    let mut delta = f64::INFINITY;
    for level in 1..=spec.max_refine {
        let v = eval_level(level)?;
        delta = (v - prev).norm();
        if delta <= spec.tol.max(1e-13 * v.norm()) {
            let diagnostics = Diagnostics { truncation: Some(plan.t), refinements: level, ..Default::default() };
            return EvalResult::new(v, delta, Backend::Contour, diagnostics);
        }
        prev = v;
    }
    Err(Error::NonConvergent { delta, tol: spec.tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{bernoulli_exact, eval_exact};
    use crate::series::{multiple_polylog, SeriesParams};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn h(x: f64) -> HbarValue {
        HbarValue::real(x).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre();
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m30: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_difference_relations() {
        let hb = h(1.3);
        for &(p, w) in &[(c(0.3, 0.2), c(-0.5, 0.4)), (c(-1.1, 0.35), c(0.7, -1.0))] {
            let k = |a, b, om| kernel(&KernelParams { a, b, hbar: hb, omega: om }, p).unwrap();
            let ipi = c(0.0, PI);
            let lhs = k(2, 1, w + ipi) - k(2, 1, w - ipi);
            let rhs = k(1, 1, w);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
            let iph = ipi * 1.3;
            let e = |om: C64| (-C64::i() * p * om).exp();
            let lhs = e(w + iph) - e(w - iph);
            let rhs = crate::numeric::sh(PI * 1.3 * p) * e(w);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
        let k0 = kernel(&KernelParams { a: 0, b: 0, hbar: hb, omega: c(0.4, 0.1) }, c(0.2, 0.3)).unwrap();
        assert!((k0 - (-C64::i() * c(0.2, 0.3) * c(0.4, 0.1)).exp()).norm() < 1e-15);
    }

    #[test]
    fn depth_one_logistic() {
        let spec = QuadratureSpec::default();
        let v = quad_F(&MultiIndex::single(1, 0, 0), &[c(-1.0, 0.0)], &h(1.0), &spec).unwrap().value;
        let e = (-1.0f64).exp();
        assert!((v - c(-e / (1.0 + e), 0.0)).norm() < 1e-10, "{v}");
        let v = quad_F(&MultiIndex::single(2, 0, 0), &[c(-1.0, 0.0)], &h(1.0), &spec).unwrap().value;
        let expect = c(-1.0, 0.0) / c(0.0, 2.0 * PI) * e / (1.0 - e);
        assert!((v - expect).norm() < 1e-10, "{v} vs {expect}");
    }

    #[test]
    fn li_integral_matches_series() {
        let spec = QuadratureSpec::default();
        let sp = SeriesParams::default();
        let v = quad_Li(&[1], &[c(-1.0, 0.0)], &spec).unwrap().value;
        let e = (-1.0f64).exp();
        assert!((v - c(-(1.0 + e).ln(), 0.0)).norm() < 1e-9);
        let w = [c(-1.0, 0.3), c(-0.8, -0.5)];
        let v = quad_Li(&[2, 1], &w, &spec).unwrap().value;
        let s = multiple_polylog(&[2, 1], &[w[0].exp(), -w[1].exp()], &sp).unwrap().value;
        assert!((v - s).norm() < 1e-8, "{v} vs {s}");
        let om = [c(-2.0, 0.0), c(-1.0, 0.0)];
        let v = quad_Li_f(&[2, 1], &om, &spec).unwrap().value;
        let s = multiple_polylog(&[2, 1], &[(om[0] - om[1]).exp(), -om[1].exp()], &sp).unwrap().value;
        assert!((v - s).norm() < 1e-8, "{v} vs {s}");
    }

    #[test]
    fn li_integral_domain() {
        let spec = QuadratureSpec::default();
        assert!(quad_Li(&[1], &[c(0.5, 0.0)], &spec).is_err());
        assert!(quad_Li(&[1, 1], &[c(-1.0, 2.0), c(-1.0, 2.0)], &spec).is_err());
        assert!(quad_Li_f(&[1, 1], &[c(-1.0, 0.0), c(-2.0, 0.0)], &spec).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let sp = SeriesParams::default();
        let w = c(-1.0, 0.0);
        for a in 1..=3u32 {
            for n in 0..=2 {
                let q = quad_F(&MultiIndex::single(a, 0, n), &[w], &h(1.0), &spec).unwrap().value;
                let cf = depth1_closed_form(a, n, w, &sp).unwrap().value;
                assert!((q - cf).norm() < 1e-9, "a={a} n={n}: {q} vs {cf}");
            }
        }
    }

    #[test]
    fn circle_matches_exact() {
        let hb = h(1.7);
        for &(a, b, n) in &[(1u32, 0u32, 1i32), (1, 1, 1), (3, 0, 0), (2, 1, 2)] {
            let om = c(0.3, 0.0);
            let v = quad_bernoulli_circle(&MultiIndex::single(a, b, n), om, &hb, 0.3).unwrap().value;
            let e = eval_exact(&bernoulli_exact(a, b, n), om, hb.value()).unwrap();
            assert!((v - e).norm() < 1e-12, "({a},{b},{n}): {v} vs {e}");
        }
        let v = quad_bernoulli_circle(&MultiIndex::single(0, 0, 0), c(0.7, 0.2), &hb, 0.3).unwrap().value;
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn generating_series_base_point() {
        let spec = QuadratureSpec::default();
        let hb = h(1.0);
        let w = c(-0.5, 0.2);
        let g = gen_series_depth1(w, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), &hb, &spec).unwrap().value;
        let f = quad_F(&MultiIndex::single(1, 1, 1), &[w], &hb, &spec).unwrap().value;
        assert!((g - f).norm() < 1e-9);
    }
}
