//! Finite closed forms: depth-one `b = 0` polylogs, the `hbar = 1` residue
//! expansion and the leading `hbar -> 0` terms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exact::{eval_exact, kernel_coefficient, q_poly, ExactPoly};
use crate::numeric::{binom, i_pow, CompensatedSum};
use crate::series::{classical_polylog, multiple_polylog, octant_polylog, SeriesParams};
use crate::types::{Backend, Diagnostics, EvalResult, HbarValue, MultiIndex, C64};

/// `F_{a,0,n}(omega) = sum_{k<a} C(n+k-1, k) (-d/domega)^k Q_{a-1}(omega) Li_{n+k}(e^{omega + i pi a})`.
pub fn depth1_closed_form(a: u32, n: i32, omega: C64, p: &SeriesParams) -> Result<EvalResult> {
    if a == 0 {
        return Err(Error::Domain("closed form needs a >= 1".into()));
    }
    if !(omega.re < 0.0) {
        return Err(Error::Domain("closed form needs |e^omega| < 1".into()));
    }
    let z = if a % 2 == 0 { omega.exp() } else { -omega.exp() };
    let mut q: ExactPoly = q_poly(a - 1);
    let mut acc = CompensatedSum::new();
    let mut err = 0.0;
    for k in 0..a as i64 {
        let c = binom(n as i64 + k - 1, k);
        if c != 0.0 && !q.is_zero() {
            let li = classical_polylog(n + k as i32, z, p)?;
            let qv = eval_exact(&q, omega, C64::new(1.0, 0.0))?;
            acc.add(qv * li.value * c);
            err += (qv * c).norm() * li.err_estimate;
        }
        q = -&q.derivative();
    }
    EvalResult::new(acc.value(), err, Backend::ClosedForm, Diagnostics::default())
}

/// Coefficients of `prod_k (u_1 + ... + u_k)^{t_k}` keyed by the exponent vector of `u`.
fn partial_sum_power_coeffs(t: &[u32]) -> BTreeMap<Vec<u32>, f64> {
    let m = t.len();
    let mut poly: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    poly.insert(vec![0; m], 1.0);
    for (k, &tk) in t.iter().enumerate() {
        for _ in 0..tk {
            let mut next = BTreeMap::new();
            for (e, c) in &poly {
                for i in 0..=k {
                    let mut e2 = e.clone();
                    e2[i] += 1;
                    *next.entry(e2).or_insert(0.0) += c;
                }
            }
            poly = next;
        }
    }
    poly
}

/// All vectors `x` with `0 <= x_j <= bound_j`.
fn boxes(bound: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// `F^{hbar=1}_{a,b,n}(omega)` as a finite sum of exact polynomials times octant polylogs.
///
/// With `c_j = a_j + b_j`, the residues at `p_j = i k_j` give
/// `(2 pi)^m sum_l i^{-|l|} prod_j lambda_{c_j,l_j}(omega_j)
///   sum_{|t| = |l|} [u^l] prod_k P_k^{t_k} prod_j C(-n_j, t_j) Li^oct_{n+t}(z)`
/// where `lambda_{c,l} = [p^{-1-l}] e^{-ip omega}/sh^c(pi p)`, `P_k = u_1 + ... + u_k`
/// and `z_j = (-1)^{c_j} e^{omega_j}`.
pub fn h1_closed_form(idx: &MultiIndex, omega: &[C64], p: &SeriesParams) -> Result<EvalResult> {
    let m = idx.depth();
    if omega.len() != m {
        return Err(Error::Usage("h1_closed_form needs one omega per slot".into()));
    }
    if omega.iter().any(|w| !(w.re < 0.0)) {
        return Err(Error::Domain("h1_closed_form needs Re omega_j < 0".into()));
    }
    let c: Vec<u32> = idx.a.iter().zip(&idx.b).map(|(a, b)| a + b).collect();
    if c.contains(&0) {
        return Err(Error::Domain("h1_closed_form needs a_j + b_j >= 1".into()));
    }
    let z: Vec<C64> = omega.iter().zip(&c).map(|(w, &cj)| if cj % 2 == 0 { w.exp() } else { -w.exp() }).collect();
    let lam: Vec<Vec<C64>> = (0..m)
        .map(|j| {
            (0..c[j] as i32)
                .map(|l| eval_exact(&kernel_coefficient(c[j], l), omega[j], C64::new(1.0, 0.0)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let l_bound: Vec<u32> = c.iter().map(|x| x - 1).collect();
    let total: u32 = l_bound.iter().sum();
    let mut li_cache: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
    let mut coef_cache: BTreeMap<Vec<u32>, BTreeMap<Vec<u32>, f64>> = BTreeMap::new();
    let all_t: Vec<Vec<u32>> = boxes(&vec![total; m]).into_iter().filter(|t| t.iter().sum::<u32>() <= total).collect();
    let mut acc = CompensatedSum::new();
    let mut err = 0.0;
    let mut terms = 0u64;
    for l in boxes(&l_bound) {
        let ll: u32 = l.iter().sum();
        let mut lam_prod = i_pow(-(ll as i64));
        for j in 0..m {
            lam_prod *= lam[j][l[j] as usize];
        }
        if lam_prod.norm() == 0.0 {
            continue;
        }
        for t in all_t.iter().filter(|t| t.iter().sum::<u32>() == ll) {
            let coeffs = coef_cache.entry(t.clone()).or_insert_with(|| partial_sum_power_coeffs(t));
            let coef = coeffs.get(&l).copied().unwrap_or(0.0);
            if coef == 0.0 {
                continue;
            }
            let bin: f64 = (0..m).map(|j| binom(-(idx.n[j] as i64), t[j] as i64)).product();
            if bin == 0.0 {
                continue;
            }
            let li = match li_cache.get(t) {
                Some(v) => *v,
                None => {
                    let nt: Vec<i32> = (0..m).map(|j| idx.n[j] + t[j] as i32).collect();
                    let r = octant_polylog(&nt, &z, p)?;
                    err += r.err_estimate;
                    terms += r.diagnostics.terms;
                    li_cache.insert(t.clone(), r.value);
                    r.value
                }
            };
            acc.add(lam_prod * coef * bin * li);
        }
    }
    let pref = (2.0 * PI).powi(m as i32);
    EvalResult::new(acc.value() * pref, err * pref, Backend::ClosedForm, Diagnostics { terms, ..Default::default() })
}

/// The bare product `prod_j Q_{c_j-1}(omega_j) Li^oct_n((-1)^{c_j} e^{omega_j})`, i.e. the
/// leading residue term alone; it agrees with [`h1_closed_form`] only when every `c_j = 1`.
pub fn h1_leading_product(idx: &MultiIndex, omega: &[C64], p: &SeriesParams) -> Result<EvalResult> {
    let m = idx.depth();
    if omega.len() != m {
        return Err(Error::Usage("h1_leading_product needs one omega per slot".into()));
    }
    let mut pref = C64::new(1.0, 0.0);
    let mut z = Vec::with_capacity(m);
    for j in 0..m {
        let c = idx.a[j] + idx.b[j];
        if c == 0 {
            return Err(Error::Domain("needs a_j + b_j >= 1".into()));
        }
        pref *= eval_exact(&q_poly(c - 1), omega[j], C64::new(1.0, 0.0))?;
        z.push(if c % 2 == 0 { omega[j].exp() } else { -omega[j].exp() });
    }
    let li = octant_polylog(&idx.n, &z, p)?;
    EvalResult::new(pref * li.value, pref.norm() * li.err_estimate, Backend::ClosedForm, Diagnostics::default())
}

/// Leading `hbar -> 0` term of the basic `F^hbar_n(omega)` at depth 1 or 2.
///
/// Depth 1: `Li_{n+1}(-e^omega) / (2 pi i hbar)`. Depth 2:
/// `(2 pi i hbar)^{-2} [Li_{n1+n2+1}(-e^{w1}) Li_1(-e^{w2}) - sum_{j=1}^{n2} Li_{n1+n2+2-j, j}(e^{w1-w2}, -e^{w2})]`.
pub fn asymptotic_leading(n: &[i32], omega: &[C64], hbar: &HbarValue, p: &SeriesParams) -> Result<C64> {
    let two_pi_i_h = C64::new(0.0, 2.0 * PI) * hbar.value();
    match (n, omega) {
        ([n1], [w]) => Ok(classical_polylog(n1 + 1, -w.exp(), p)?.value / two_pi_i_h),
        ([n1, n2], [w1, w2]) => {
            if *n1 < 1 || *n2 < 1 {
                return Err(Error::Domain("leading term needs n_i >= 1".into()));
            }
            let mut v = classical_polylog(n1 + n2 + 1, -w1.exp(), p)?.value * classical_polylog(1, -w2.exp(), p)?.value;
            for j in 1..=*n2 {
                v -= multiple_polylog(&[n1 + n2 + 2 - j, j], &[(w1 - w2).exp(), -w2.exp()], p)?.value;
            }
            Ok(v / (two_pi_i_h * two_pi_i_h))
        }
        _ => Err(Error::Usage("leading term implemented for depth 1 and 2".into())),
    }
}

/// The product form `(2 pi i hbar)^{-m} Li_{n+1}(e^{w1-w2}, ..., -e^{w_m})`; kept to
/// report its residual, it is not the leading term beyond depth 1.
pub fn asymptotic_naive(n: &[i32], omega: &[C64], hbar: &HbarValue, p: &SeriesParams) -> Result<C64> {
    let m = n.len();
    let n1: Vec<i32> = n.iter().map(|x| x + 1).collect();
    let z: Vec<C64> = (0..m).map(|j| if j + 1 < m { (omega[j] - omega[j + 1]).exp() } else { -omega[j].exp() }).collect();
    let li = multiple_polylog(&n1, &z, p)?.value;
    Ok(li / (C64::new(0.0, 2.0 * PI) * hbar.value()).powi(m as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{quad_F, QuadratureSpec};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn partial_sum_powers() {
        // u1 (u1+u2)^2 = u1^3 + 2 u1^2 u2 + u1 u2^2
        let p = partial_sum_power_coeffs(&[1, 2]);
        assert_eq!(p[&vec![3, 0]], 1.0);
        assert_eq!(p[&vec![2, 1]], 2.0);
        assert_eq!(p[&vec![1, 2]], 1.0);
    }

    #[test]
    fn h1_depth_one_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let sp = SeriesParams::default();
        let h1 = HbarValue::real(1.0).unwrap();
        for &(a, b, n) in &[(1u32, 0u32, 1i32), (1, 1, 2), (2, 1, 1), (1, 1, 1), (2, 2, 0)] {
            let w = [c(-1.0, 0.3)];
            let idx = MultiIndex::single(a, b, n);
            let q = quad_F(&idx, &w, &h1, &spec).unwrap().value;
            let cf = h1_closed_form(&idx, &w, &sp).unwrap().value;
            assert!((q - cf).norm() < 1e-9, "({a},{b},{n}): {q} vs {cf}");
        }
    }

    #[test]
    fn h1_depth_two_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let sp = SeriesParams::default();
        let h1 = HbarValue::real(1.0).unwrap();
        for n in [[1, 1], [2, 1], [1, 2]] {
            let idx = MultiIndex::basic(&n);
            let w = [c(-2.0, 0.0), c(-1.0, 0.4)];
            let q = quad_F(&idx, &w, &h1, &spec).unwrap().value;
            let cf = h1_closed_form(&idx, &w, &sp).unwrap().value;
            assert!((q - cf).norm() < 1e-8, "{n:?}: {q} vs {cf}");
        }
    }

    #[test]
    fn leading_product_only_for_unit_c() {
        let sp = SeriesParams::default();
        let idx = MultiIndex::single(1, 0, 2);
        let w = [c(-0.7, 0.0)];
        let a = h1_closed_form(&idx, &w, &sp).unwrap().value;
        let b = h1_leading_product(&idx, &w, &sp).unwrap().value;
        assert!((a - b).norm() < 1e-13);
    }
}
