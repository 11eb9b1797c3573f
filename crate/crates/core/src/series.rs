//! Direct summation: classical and multiple polylogarithms, multiple
//! q-polylogarithms, companion series, higher Pochhammer products and the
//! coefficient-wise q-calculus on truncated power series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{binom, ln_1p, powi, CompensatedSum};
use crate::types::{check_finite, Backend, Diagnostics, EvalResult, HbarValue, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub tol: f64,
    pub k_max: u64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        Self { tol: 1e-12, k_max: 1_000_000 }
    }
}

impl SeriesParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.k_max < 1 {
            return Err(Error::Usage("series params need tol > 0 and k_max >= 1".into()));
        }
        Ok(())
    }
}

fn series_result(value: C64, tail: f64, terms: u64) -> Result<EvalResult> {
    check_finite(value, "series sum")?;
    EvalResult::new(value, tail, Backend::Series, Diagnostics { terms, ..Default::default() })
}

/// `Li_n(z)`: power series for `n >= 1`, rational closed form for `n <= 0`.
pub fn classical_polylog(n: i32, z: C64, p: &SeriesParams) -> Result<EvalResult> {
    p.validate()?;
    if n <= 0 {
        if (z - 1.0).norm() < 1e-15 {
            return Err(Error::Domain("Li_n for n <= 0 has a pole at z = 1".into()));
        }
        return series_result(polylog_nonpositive(n, z), 0.0, 0);
    }
    let r = z.norm();
    if r > 1.0 || (r == 1.0 && n < 2) {
        return Err(Error::Domain(format!("Li_{n} series diverges at |z| = {r}")));
    }
    let mut acc = CompensatedSum::new();
    let mut pw = C64::new(1.0, 0.0);
    let mut k: u64 = 0;
    loop {
        k += 1;
        if k > p.k_max {
            return Err(Error::Cap { cap: p.k_max, tail: tail_li(r, n, k - 1) });
        }
        pw *= z;
        acc.add(pw / (k as f64).powi(n));
        let tail = tail_li(r, n, k);
        if tail < p.tol {
            return series_result(acc.value(), tail, k);
        }
    }
}

/// Bound on `sum_{j>k} r^j / j^n`.
fn tail_li(r: f64, n: i32, k: u64) -> f64 {
    let k1 = (k + 1) as f64;
    if r < 1.0 {
        r.powf(k1) / (k1.powi(n) * (1.0 - r))
    } else {
        1.0 / ((n - 1) as f64 * (k as f64).powi(n - 1))
    }
}

/// `(z d/dz)^s z/(1-z)` via Eulerian numbers.
fn polylog_nonpositive(n: i32, z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return z / (one - z);
    }
    let s = (-n) as usize;
    // A(s, j), j = 0..s-1
    let mut row = vec![1.0f64];
    for m in 2..=s {
        let mut next = vec![0.0; m];
        for j in 0..m {
            let left = if j < row.len() { (j + 1) as f64 * row[j] } else { 0.0 };
            let right = if j >= 1 && j - 1 < row.len() { (m - j) as f64 * row[j - 1] } else { 0.0 };
            next[j] = left + right;
        }
        row = next;
    }
    let mut num = C64::new(0.0, 0.0);
    let mut pw = z;
    for a in &row {
        num += pw * *a;
        pw *= z;
    }
    num / (one - z).powu(s as u32 + 1)
}

/// `Li_{n_1..n_m}(z) = sum_{0<k_1<...<k_m} prod z_i^{k_i} / k_i^{n_i}`.
pub fn multiple_polylog(n: &[i32], z: &[C64], p: &SeriesParams) -> Result<EvalResult> {
    p.validate()?;
    if n.is_empty() || n.len() != z.len() {
        return Err(Error::Usage("multiple_polylog needs matching non-empty n and z".into()));
    }
    if let Some(zz) = z.iter().find(|zz| zz.norm() >= 1.0) {
        return Err(Error::Domain(format!("multiple_polylog needs |z_i| < 1, got |{zz}|")));
    }
    let m = n.len();
    if m == 1 {
        return classical_polylog(n[0], z[0], p);
    }
    if n.iter().any(|&x| x < 1) {
        return Err(Error::Domain("multiple_polylog at depth >= 2 needs n_i >= 1".into()));
    }
    if z.iter().any(|zz| *zz == C64::new(0.0, 0.0)) {
        return series_result(C64::new(0.0, 0.0), 0.0, 0);
    }
    // acc[j] = sum over 0<k_1<...<k_j<=k
    let mut acc = vec![CompensatedSum::new(); m + 1];
    acc[0].add(C64::new(1.0, 0.0));
    let mut pw = vec![C64::new(1.0, 0.0); m];
    let rm = z[m - 1].norm();
    let inner_bound: f64 = z[..m - 1].iter().map(|zz| zz.norm() / (1.0 - zz.norm())).product();
    let mut k: u64 = 0;
    loop {
        k += 1;
        if k > p.k_max {
            return Err(Error::Cap { cap: p.k_max, tail: f64::INFINITY });
        }
        let kf = k as f64;
        for j in (1..=m).rev() {
            pw[j - 1] *= z[j - 1];
            let prev = acc[j - 1].value();
            acc[j].add(prev * pw[j - 1] / kf.powi(n[j - 1]));
        }
        let tail = inner_bound * rm.powf(kf + 1.0) / ((kf + 1.0).powi(n[m - 1]) * (1.0 - rm));
        if k >= m as u64 && tail < p.tol {
            return series_result(acc[m].value(), tail, k);
        }
    }
}

/// Maps `(z_1, ..., z_{m+1})` to `(z_2/z_1, ..., z_{m+1}/z_m)`.
pub fn polylog_from_iterated_args(n: &[i32], z_path: &[C64]) -> Result<Vec<C64>> {
    if z_path.len() != n.len() + 1 {
        return Err(Error::Usage(format!("need {} path points, got {}", n.len() + 1, z_path.len())));
    }
    if z_path.iter().any(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::Domain("iterated-integral arguments must be nonzero".into()));
    }
    Ok(z_path.windows(2).map(|w| w[1] / w[0]).collect())
}

/// Sums `term(k)` over `k in Z_{>0}^m` shell by shell in `|k|`.
///
/// `r` bounds the geometric decay per unit of `|k|`; the tail is estimated from
/// the observed envelope `max |term| / r^{|k|}`.
pub(crate) fn octant_sum<F>(m: usize, r: f64, p: &SeriesParams, mut term: F) -> Result<(C64, f64, u64)>
where
    F: FnMut(&[u64]) -> Result<C64>,
{
    if !(r < 1.0) {
        return Err(Error::Domain(format!("octant series ratio {r} is not < 1")));
    }
    let mut acc = CompensatedSum::new();
    let mut count: u64 = 0;
    let mut envelope: f64 = 0.0;
    let mut k = vec![0u64; m];
    let mut s = m as u64;
    let mut quiet_shells = 0;
    loop {
        let mut shell_max: f64 = 0.0;
        let mut cont = first_composition(&mut k, s);
        while cont {
            let t = term(&k)?;
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::NonFinite(format!("series term at k = {k:?}")));
            }
            acc.add(t);
            count += 1;
            shell_max = shell_max.max(t.norm());
            if count > p.k_max {
                return Err(Error::Cap { cap: p.k_max, tail: f64::INFINITY });
            }
            cont = next_composition(&mut k);
        }
        let rs = r.powf(s as f64);
        if rs > 0.0 {
            envelope = envelope.max(shell_max / rs);
        }
        let tail = envelope * binom((s + m as u64 - 1) as i64, m as i64 - 1).max(1.0) * r.powf(s as f64 + 1.0)
            / (1.0 - r).powi(m as i32);
        if tail < p.tol || rs == 0.0 {
            quiet_shells += 1;
            if quiet_shells >= 2 {
                return Ok((acc.value(), tail, count));
            }
        } else {
            quiet_shells = 0;
        }
        s += 1;
    }
}

fn first_composition(k: &mut [u64], s: u64) -> bool {
    let m = k.len();
    for x in k.iter_mut() {
        *x = 1;
    }
    k[m - 1] = s - (m as u64 - 1);
    true
}

/// Next composition with the same total (odometer on the first `m-1` parts).
fn next_composition(k: &mut [u64]) -> bool {
    let m = k.len();
    if m == 1 {
        return false;
    }
    let mut j = m - 2;
    loop {
        if k[m - 1] > 1 {
            k[j] += 1;
            k[m - 1] -= 1;
            return true;
        }
        k[m - 1] += k[j] - 1;
        k[j] = 1;
        if j == 0 {
            return false;
        }
        j -= 1;
    }
}

/// `sum_{k>0} prod z_j^{k_j} / prod (k_1+...+k_j)^{n_j}`, any integer `n_j`.
pub fn octant_polylog(n: &[i32], z: &[C64], p: &SeriesParams) -> Result<EvalResult> {
    p.validate()?;
    if n.is_empty() || n.len() != z.len() {
        return Err(Error::Usage("octant_polylog needs matching non-empty n and z".into()));
    }
    let r = z.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if r >= 1.0 {
        return Err(Error::Domain("octant_polylog needs |z_j| < 1".into()));
    }
    let (v, tail, terms) = octant_sum(n.len(), r, p, |k| {
        let mut t = C64::new(1.0, 0.0);
        let mut partial = 0u64;
        for j in 0..k.len() {
            partial += k[j];
            t *= z[j].powu(k[j] as u32) / (partial as f64).powi(n[j]);
        }
        Ok(t)
    })?;
    series_result(v, tail, terms)
}

/// `1/[k]_q` written as `q^k/(q^{2k}-1)` to avoid overflow of `q^{-k}`.
pub fn inv_q_bracket(k: u64, q: C64) -> C64 {
    let qk = q.powu(k as u32);
    qk / (qk * qk - 1.0)
}

/// `[k]_q = q^k - q^{-k}`.
pub fn q_bracket(k: u64, q: C64) -> C64 {
    let qk = q.powu(k as u32);
    qk - 1.0 / qk
}

/// Multiple q-polylogarithm: octant sum of `prod z_i^{k_i} / ([k_i]_q^{a_i} (k_1+..+k_i)^{n_i})`.
///
/// Accepts `0 < |q| < 1` with `|z_i| |q|^{a_i} < 1`, and also `|q| = 1` (not a root
/// of unity) with `|z_i| < 1`.
pub fn q_multiple_polylog(a: &[i32], n: &[i32], z: &[C64], q: C64, p: &SeriesParams) -> Result<EvalResult> {
    p.validate()?;
    let m = n.len();
    if m == 0 || a.len() != m || z.len() != m {
        return Err(Error::Usage("q_multiple_polylog needs matching non-empty a, n, z".into()));
    }
    let aq = q.norm();
    let unit = (aq - 1.0).abs() < 1e-12;
    if !(aq > 0.0) || (aq > 1.0 && !unit) {
        return Err(Error::Domain(format!("q_multiple_polylog needs 0 < |q| < 1 or |q| = 1, got {aq}")));
    }
    let zq: Vec<C64> = if unit {
        z.to_vec()
    } else {
        z.iter().zip(a).map(|(zz, &ai)| zz * powi(q, ai)).collect()
    };
    let r = zq.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if r >= 1.0 {
        return Err(Error::Domain("q_multiple_polylog: |z_i||q|^{a_i} must be < 1".into()));
    }
    let (v, tail, terms) = octant_sum(m, r, p, |k| {
        let mut t = C64::new(1.0, 0.0);
        let mut partial = 0u64;
        for j in 0..m {
            partial += k[j];
            let kj = k[j] as u32;
            let q2k = q.powu(2 * kj);
            let den = q2k - 1.0;
            if den.norm() < 1e-300 {
                return Err(Error::Pole(format!("[{}]_q = 0: q is a root of unity", k[j])));
            }
            let f = if unit {
                z[j].powu(kj) * powi(inv_q_bracket(k[j], q), a[j])
            } else {
                zq[j].powu(kj) * powi(den, -a[j])
            };
            t *= f / (partial as f64).powi(n[j]);
        }
        Ok(t)
    })?;
    series_result(v, tail, terms)
}

/// `Psi_a(x;q) = prod_{n>=0} (1 + q^{2n+a} x)^{(-1)^a C(n+a-1, a-1)}`, `Psi_0 = 1 + x`.
pub fn pochhammer_psi(a: u32, x: C64, q: C64, n_trunc: u32) -> Result<EvalResult> {
    let (logv, err, terms) = log_psi_inner(a, x, q, n_trunc)?;
    let v = logv.exp();
    EvalResult::new(v, err * v.norm(), Backend::Series, Diagnostics { terms, ..Default::default() })
}

/// `log Psi_a(x;q)` as the sum of principal logarithms of the factors.
pub fn log_pochhammer_psi(a: u32, x: C64, q: C64, n_trunc: u32) -> Result<EvalResult> {
    let (logv, err, terms) = log_psi_inner(a, x, q, n_trunc)?;
    EvalResult::new(logv, err, Backend::Series, Diagnostics { terms, ..Default::default() })
}

fn log_psi_inner(a: u32, x: C64, q: C64, n_trunc: u32) -> Result<(C64, f64, u64)> {
    if !(q.norm() < 1.0) {
        return Err(Error::Domain("pochhammer_psi needs |q| < 1".into()));
    }
    let one = C64::new(1.0, 0.0);
    if a == 0 {
        if (one + x).norm() == 0.0 {
            return Err(Error::Pole("Psi_0 vanishes at x = -1".into()));
        }
        return Ok(((one + x).ln(), 0.0, 1));
    }
    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
    let mut acc = CompensatedSum::new();
    for nn in 0..=n_trunc {
        let u = q.powu(2 * nn + a) * x;
        if (one + u).norm() < 1e-15 {
            return Err(Error::Pole(format!("factor 1 + q^{}x vanishes", 2 * nn + a)));
        }
        let e = sign * binom((nn + a - 1) as i64, a as i64 - 1);
        acc.add(ln_1p(u) * e);
    }
    let next = (n_trunc + 1) as i64;
    let aq2 = q.norm().powi(2);
    let err = binom(next + a as i64 - 1, a as i64 - 1)
        * q.norm().powi(2 * next as i32 + a as i32)
        * x.norm()
        / (1.0 - aq2).powi(a as i32 + 1)
        * 2.0;
    Ok((check_finite(acc.value(), "log Psi")?, err, n_trunc as u64 + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Eps {
    One,
    InvHbar,
}

/// Cone selector `(eps_1..eps_m)`, `eps_j in {1, 1/hbar}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonVector {
    pub slots: Vec<Eps>,
    pub hbar: HbarValue,
}

impl EpsilonVector {
    pub fn new(slots: Vec<Eps>, hbar: HbarValue) -> Self {
        Self { slots, hbar }
    }

    /// All `2^m` vectors, `One` before `InvHbar`, first slot most significant.
    pub fn all(m: usize, hbar: HbarValue) -> Vec<Self> {
        (0..(1usize << m))
            .map(|mask| {
                let slots = (0..m)
                    .map(|j| if mask >> (m - 1 - j) & 1 == 0 { Eps::One } else { Eps::InvHbar })
                    .collect();
                Self::new(slots, hbar)
            })
            .collect()
    }

    pub fn value(&self, j: usize) -> f64 {
        match self.slots[j] {
            Eps::One => 1.0,
            Eps::InvHbar => 1.0 / self.hbar.value().re,
        }
    }

    /// `q_{eps}`: `e^{i pi hbar}` or `e^{i pi / hbar}`.
    pub fn q(&self, j: usize) -> C64 {
        match self.slots[j] {
            Eps::One => self.hbar.q(),
            Eps::InvHbar => self.hbar.q_dual(),
        }
    }
}

/// Companion series of the cone `eps`:
/// `eps_1..eps_m sum_k prod_j (-1)^{k_j} e^{E_j w_j} / ([k_j]^{a_j}_{q_{eps_j}} E_j^{n_j})`
/// with `E_j = eps_1 k_1 + ... + eps_j k_j`. Certified for `a = (1,...,1)`.
pub fn companion_series(eps: &EpsilonVector, a: &[i32], n: &[i32], w: &[C64], p: &SeriesParams) -> Result<EvalResult> {
    p.validate()?;
    let m = n.len();
    if m == 0 || eps.slots.len() != m || a.len() != m || w.len() != m {
        return Err(Error::Usage("companion_series needs matching eps, a, n, w".into()));
    }
    if !eps.hbar.is_real_positive() {
        return Err(Error::Domain("companion series need real hbar > 0".into()));
    }
    if w.iter().any(|x| !(x.re < 0.0)) {
        return Err(Error::Domain("companion series need Re w_i < 0".into()));
    }
    let epsv: Vec<f64> = (0..m).map(|j| eps.value(j)).collect();
    let qs: Vec<C64> = (0..m).map(|j| eps.q(j)).collect();
    // decay per unit of k_i is exp(eps_i Re(w_i + ... + w_m))
    let mut r: f64 = 0.0;
    for i in 0..m {
        let tail_w: f64 = w[i..].iter().map(|x| x.re).sum();
        r = r.max((epsv[i] * tail_w).exp());
    }
    let (v, tail, terms) = octant_sum(m, r, p, |k| {
        let mut t = C64::new(1.0, 0.0);
        let mut e = 0.0;
        for j in 0..m {
            e += epsv[j] * k[j] as f64;
            let sign = if k[j] % 2 == 0 { 1.0 } else { -1.0 };
            let ib = inv_q_bracket(k[j], qs[j]);
            if !(ib.re.is_finite() && ib.im.is_finite()) || ib.norm() > 1e14 {
                return Err(Error::Pole(format!("[{}]_q vanishes at q = {}", k[j], qs[j])));
            }
            t *= (w[j] * e).exp() * powi(ib, a[j]) * sign / e.powi(n[j]);
        }
        Ok(t)
    })?;
    let pref: f64 = epsv.iter().product();
    EvalResult::new(v * pref, tail * pref, Backend::Companion, Diagnostics { terms, ..Default::default() })
}

/// Sum of the `2^m` companion series with `a = (1,...,1)`; equals the basic I-variant.
pub fn companion_sum_i(n: &[i32], w: &[C64], hbar: HbarValue, p: &SeriesParams) -> Result<EvalResult> {
    let m = n.len();
    if !(w.len() == m && m > 0) {
        return Err(Error::Usage("companion_sum_i needs matching n and w".into()));
    }
    for x in w {
        if x.im.abs() >= std::f64::consts::PI {
            return Err(Error::Domain("companion sum needs |Im w_i| < pi".into()));
        }
    }
    let mut warnings = Vec::new();
    if let Some((num, den)) = near_rational(hbar.value().re, 24, 1e-6) {
        warnings.push(format!("hbar is within 1e-6 of {num}/{den}: companion poles nearly coincide"));
    }
    let ones = vec![1; m];
    let mut acc = CompensatedSum::new();
    let mut err = 0.0;
    let mut terms = 0;
    for eps in EpsilonVector::all(m, hbar) {
        let r = companion_series(&eps, &ones, n, w, p)?;
        acc.add(r.value);
        err += r.err_estimate;
        terms += r.diagnostics.terms;
    }
    EvalResult::new(acc.value(), err, Backend::Companion, Diagnostics { terms, warnings, ..Default::default() })
}

/// Closest fraction `num/den` with `den <= max_den` within `tol`, if any.
pub fn near_rational(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    (1..=max_den).find_map(|den| {
        let num = (x * den as f64).round();
        ((x - num / den as f64).abs() < tol).then_some((num as i64, den))
    })
}

/// Power series `sum c_k x^k` truncated at degree `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub coeffs: Vec<C64>,
    pub var: String,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<C64>, var: impl Into<String>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Usage("truncated series needs at least c_0".into()));
        }
        Ok(Self { coeffs, var: var.into() })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    fn map_coeffs(&self, f: impl Fn(usize, C64) -> C64) -> Self {
        Self { coeffs: self.coeffs.iter().enumerate().map(|(k, c)| f(k, *c)).collect(), var: self.var.clone() }
    }
}

/// q-integral `I^a_x`: `x^k -> (-1)^{a-1} q^{ak} / (1 - q^{2k})^a x^k`; `I^0 = -id`.
pub fn q_integral(a: u32, f: &TruncatedSeries, q: C64) -> Result<TruncatedSeries> {
    if !(q.norm() < 1.0 && q.norm() > 0.0) {
        return Err(Error::Domain("q_integral needs 0 < |q| < 1".into()));
    }
    if a == 0 {
        return Ok(f.map_coeffs(|_, c| -c));
    }
    if f.coeffs[0] != C64::new(0.0, 0.0) {
        return Err(Error::Domain("q_integral diverges on a nonzero constant term".into()));
    }
    let sign = if a % 2 == 1 { 1.0 } else { -1.0 };
    Ok(f.map_coeffs(|k, c| {
        if k == 0 {
            return c;
        }
        let qk = q.powu(k as u32);
        c * sign * qk.powu(a) / (C64::new(1.0, 0.0) - qk * qk).powu(a)
    }))
}

/// `Delta_{x,q} f(x) = f(qx) - f(x/q)`: `c_k -> (q^k - q^{-k}) c_k`.
pub fn q_difference(f: &TruncatedSeries, q: C64) -> TruncatedSeries {
    f.map_coeffs(|k, c| c * q_bracket(k as u64, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sp() -> SeriesParams {
        SeriesParams::default()
    }

    #[test]
    fn compositions_enumerate_all() {
        for m in 1..=4usize {
            for s in m as u64..(m as u64 + 6) {
                let mut k = vec![0; m];
                let mut seen = std::collections::BTreeSet::new();
                let mut cont = first_composition(&mut k, s);
                while cont {
                    assert_eq!(k.iter().sum::<u64>(), s, "{k:?}");
                    assert!(k.iter().all(|&x| x >= 1));
                    assert!(seen.insert(k.clone()));
                    cont = next_composition(&mut k);
                }
                assert_eq!(seen.len() as f64, binom(s as i64 - 1, m as i64 - 1));
            }
        }
    }

    #[test]
    fn li0_at_half() {
        let v = classical_polylog(0, C64::new(0.5, 0.0), &sp()).unwrap().value;
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn li_at_zero() {
        assert_eq!(classical_polylog(3, C64::new(0.0, 0.0), &sp()).unwrap().value, C64::new(0.0, 0.0));
    }

    #[test]
    fn li1_is_minus_log() {
        // partial sums of sum 2^{-k}/k, summed independently
        let oracle: f64 = (1..200).map(|k| 0.5f64.powi(k) / k as f64).sum();
        let v = classical_polylog(1, C64::new(0.5, 0.0), &sp()).unwrap().value;
        assert!((v.re - oracle).abs() < 1e-12);
        assert!((v.re - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn negative_index_matches_derivative() {
        let z = C64::new(0.3, 0.2);
        let h = 1e-5;
        for n in [0, -1, -2, -3] {
            let f = |zz: C64| polylog_nonpositive(n, zz);
            let d = z * (f(z + h) - f(z - h)) / (2.0 * h);
            assert!((polylog_nonpositive(n - 1, z) - d).norm() < 1e-7);
        }
    }

    #[test]
    fn li2_at_one_is_zeta2() {
        let p = SeriesParams { tol: 1e-6, k_max: 2_000_000 };
        let v = classical_polylog(2, C64::new(1.0, 0.0), &p).unwrap().value;
        assert!((v.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 2e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(classical_polylog(1, C64::new(1.0, 0.0), &sp()).is_err());
        assert!(multiple_polylog(&[1, 1], &[C64::new(1.0, 0.0), C64::new(0.1, 0.0)], &sp()).is_err());
        assert!(classical_polylog(0, C64::new(1.0, 0.0), &sp()).is_err());
    }

    #[test]
    fn cap_error() {
        let p = SeriesParams { tol: 1e-12, k_max: 10 };
        assert!(matches!(classical_polylog(1, C64::new(0.9, 0.0), &p), Err(Error::Cap { .. })));
    }

    #[test]
    fn double_polylog_brute_force() {
        let z = [C64::new(0.3, 0.0), C64::new(0.4, 0.0)];
        let mut oracle = 0.0;
        for k2 in 2..120 {
            for k1 in 1..k2 {
                oracle += 0.3f64.powi(k1) * 0.4f64.powi(k2) / (k1 as f64 * k2 as f64);
            }
        }
        let v = multiple_polylog(&[1, 1], &z, &sp()).unwrap().value;
        assert!((v.re - oracle).abs() < 1e-12, "{} vs {}", v.re, oracle);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn zero_argument_gives_zero() {
        let v = multiple_polylog(&[1, 2], &[C64::new(0.0, 0.0), C64::new(0.4, 0.0)], &sp()).unwrap().value;
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn iterated_args() {
        let c = |x: f64| C64::new(x, 0.0);
        assert_eq!(polylog_from_iterated_args(&[1], &[c(2.0), c(3.0)]).unwrap(), vec![c(1.5)]);
        assert_eq!(polylog_from_iterated_args(&[1, 1], &[c(2.0), c(4.0), c(8.0)]).unwrap(), vec![c(2.0), c(2.0)]);
        assert_eq!(polylog_from_iterated_args(&[1, 1], &[c(5.0); 3]).unwrap(), vec![c(1.0), c(1.0)]);
        assert!(polylog_from_iterated_args(&[1], &[c(0.0), c(1.0)]).is_err());
    }

    #[test]
    fn octant_equals_simplex_after_ratio_change() {
        let z = [C64::new(0.2, 0.1), C64::new(-0.5, 0.2)];
        let oct = octant_polylog(&[2, 1], &z, &sp()).unwrap().value;
        let simp = multiple_polylog(&[2, 1], &[z[0] / z[1], z[1]], &sp()).unwrap().value;
        assert!((oct - simp).norm() < 1e-12);
    }

    #[test]
    fn q_polylog_a0_is_classical() {
        let z = C64::new(0.3, -0.4);
        let q = C64::new(0.5, 0.1);
        let v = q_multiple_polylog(&[0], &[2], &[z], q, &sp()).unwrap().value;
        let w = classical_polylog(2, z, &sp()).unwrap().value;
        assert!((v - w).norm() < 1e-12);
    }

    #[test]
    fn q_polylog_double_brute_force() {
        let q = 0.4f64;
        let br = |k: i32| q.powi(k) - q.powi(-k);
        let mut oracle = 0.0;
        for k1 in 1..60 {
            for k2 in 1..60 {
                oracle += 0.2f64.powi(k1) * 0.3f64.powi(k2) / (br(k1) * br(k2) * k1 as f64 * (k1 + k2) as f64);
            }
        }
        let v = q_multiple_polylog(&[1, 1], &[1, 1], &[C64::new(0.2, 0.0), C64::new(0.3, 0.0)], C64::new(q, 0.0), &sp())
            .unwrap()
            .value;
        assert!((v.re - oracle).abs() < 1e-12 * oracle.abs().max(1.0), "{} vs {}", v.re, oracle);
    }

    #[test]
    fn psi1_against_product_and_q_polylog() {
        let (x, q) = (C64::new(0.2, 0.0), C64::new(0.5, 0.0));
        let prod: f64 = (0..60).map(|n| 1.0 / (1.0 + 0.5f64.powi(2 * n + 1) * 0.2)).product();
        let psi = pochhammer_psi(1, x, q, 60).unwrap().value;
        assert!((psi.re - prod).abs() < 1e-15);
        let li = q_multiple_polylog(&[1], &[1], &[-x], q, &sp()).unwrap().value;
        assert!(((-li).exp() - psi).norm() < 1e-12);
    }

    #[test]
    fn psi_zero_and_recursion() {
        let (x, q) = (C64::new(0.1, 0.0), C64::new(0.4, 0.0));
        assert_eq!(pochhammer_psi(0, x, q, 10).unwrap().value, C64::new(1.1, 0.0));
        for a in 1..=3u32 {
            let lhs = pochhammer_psi(a, q * x, q, 80).unwrap().value / pochhammer_psi(a, x / q, q, 80).unwrap().value;
            let rhs = pochhammer_psi(a - 1, x, q, 80).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-10, "a={a}");
        }
    }

    #[test]
    fn companion_all_one_is_q_polylog() {
        let h = HbarValue::real(2f64.sqrt()).unwrap();
        let w = [C64::new(-1.0, 0.2), C64::new(-0.7, 0.0)];
        let eps = EpsilonVector::new(vec![Eps::One; 2], h);
        let c = companion_series(&eps, &[1, 1], &[1, 2], &w, &sp()).unwrap().value;
        let z = [-(w[0] + w[1]).exp(), -w[1].exp()];
        let qv = q_multiple_polylog(&[1, 1], &[1, 2], &z, h.q(), &sp()).unwrap().value;
        assert!((c - qv).norm() < 1e-12);
    }

    #[test]
    fn companion_all_inverse_scaling() {
        let hb = 2f64.sqrt();
        let h = HbarValue::real(hb).unwrap();
        let w = [C64::new(-1.3, 0.0)];
        let eps = EpsilonVector::new(vec![Eps::InvHbar], h);
        for n in 1..=3 {
            let c = companion_series(&eps, &[1], &[n], &w, &sp()).unwrap().value;
            let z = [-(w[0] / hb).exp()];
            let qv = q_multiple_polylog(&[1], &[n], &z, h.q_dual(), &sp()).unwrap().value;
            assert!((c - qv * hb.powi(n - 1)).norm() < 1e-12);
        }
    }

    #[test]
    fn companion_mixed_brute_force() {
        let hb = 2.0f64;
        let h = HbarValue::real(hb).unwrap();
        let w = [C64::new(-1.0, 0.0), C64::new(-1.5, 0.0)];
        let eps = EpsilonVector::new(vec![Eps::InvHbar, Eps::One], h);
        // hbar = 2 makes [k]_q = 0 for eps = 1; rational hbar is a pole, so use 1 + sqrt 2
        assert!(companion_series(&eps, &[1, 1], &[1, 1], &w, &sp()).is_err());
        let hb = 1.0 + 2f64.sqrt();
        let h = HbarValue::real(hb).unwrap();
        let eps = EpsilonVector::new(vec![Eps::InvHbar, Eps::One], h);
        let v = companion_series(&eps, &[1, 1], &[1, 1], &w, &sp()).unwrap().value;
        let q = h.q();
        let qd = h.q_dual();
        let mut oracle = C64::new(0.0, 0.0);
        for k1 in 1..200u64 {
            for k2 in 1..120u64 {
                let e1 = k1 as f64 / hb;
                let e2 = e1 + k2 as f64;
                let sign = if (k1 + k2) % 2 == 0 { 1.0 } else { -1.0 };
                oracle += (w[0] * e1 + w[1] * e2).exp() * sign / (q_bracket(k1, qd) * q_bracket(k2, q) * e1 * e2);
            }
        }
        oracle /= hb;
        assert!((v - oracle).norm() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn q_integral_monomial_direct_sum() {
        let q = C64::new(0.3, 0.0);
        let f = TruncatedSeries::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], "x").unwrap();
        let g = q_integral(1, &f, q).unwrap();
        // defining sum: sum_k f(q^{2k+1} x) at x = 1 picks the x-coefficient
        let direct: f64 = (0..200).map(|k| 0.3f64.powi(2 * k + 1)).sum();
        assert!((g.coeffs[1].re - direct).abs() < 1e-14);
        assert!((g.coeffs[1].re - 0.3 / (1.0 - 0.09)).abs() < 1e-14);
    }

    #[test]
    fn q_integral_rejects_constant() {
        let f = TruncatedSeries::new(vec![C64::new(1.0, 0.0)], "x").unwrap();
        assert!(q_integral(1, &f, C64::new(0.3, 0.0)).is_err());
        let z = TruncatedSeries::new(vec![C64::new(0.0, 0.0); 4], "x").unwrap();
        assert_eq!(q_integral(2, &z, C64::new(0.3, 0.0)).unwrap().coeffs, vec![C64::new(0.0, 0.0); 4]);
    }

    #[test]
    fn q_difference_monomials() {
        let q = C64::new(0.4, 0.1);
        let f = TruncatedSeries::new(vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], "x").unwrap();
        let g = q_difference(&f, q);
        assert_eq!(g.coeffs[0], C64::new(0.0, 0.0));
        assert!((g.coeffs[2] - (q * q - 1.0 / (q * q))).norm() < 1e-14);
    }

    #[test]
    fn qdi_on_two_term_series() {
        let q = C64::new(0.4, 0.0);
        let f = TruncatedSeries::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)], "x").unwrap();
        let lhs = q_difference(&q_integral(2, &f, q).unwrap(), q);
        let rhs = q_integral(1, &f, q).unwrap();
        for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn near_rational_detection() {
        assert_eq!(near_rational(1.5 + 1e-9, 24, 1e-6), Some((3, 2)));
        assert_eq!(near_rational(2f64.sqrt(), 24, 1e-6), None);
    }
}
