//! Exact arithmetic over `Q[i, pi, 1/pi]`: `Q_m`, quantum Bernoulli polynomials,
//! kernel Laurent expansions, classical Bernoulli polynomials and shuffles.

mod laurent;
mod poly;
mod scalar;

pub use laurent::{kernel_laurent, sh_inverse_laurent, FormalLaurent, ShScale};
pub use poly::ExactPoly;
pub use scalar::{rat, rat_to_f64, ExactScalar};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::types::{CheckReport, C64};

/// `Q_m(omega) = prod_{j<m} (omega - i pi (m-1-2j)) / ((2 pi i)^m m!)`.
pub fn q_poly(m: u32) -> ExactPoly {
    let mut out = ExactPoly::one();
    for j in 0..m {
        let root = ExactScalar::monomial(rat(m as i64 - 1 - 2 * j as i64, 1), 1, 1);
        out = &out * &(&ExactPoly::omega() - &ExactPoly::constant(root));
    }
    let mut fact = BigInt::one();
    for j in 1..=m {
        fact *= BigInt::from(j);
    }
    // 1/((2 pi i)^m m!)
    let norm = ExactScalar::monomial(BigRational::new(BigInt::one(), fact * BigInt::from(2).pow(m)), -(m as i64), -(m as i32));
    out.scale(&norm)
}

/// `i pi` as a polynomial constant.
pub fn i_pi() -> ExactPoly {
    ExactPoly::constant(ExactScalar::monomial(BigRational::one(), 1, 1))
}

/// `i pi h` as a polynomial.
pub fn i_pi_h() -> ExactPoly {
    ExactPoly::monomial(ExactScalar::monomial(BigRational::one(), 1, 1), 0, 1)
}

/// Quantum Bernoulli polynomial `B_{a,b,n}(omega; h)`, the residue at `p = 0` of
/// `i^{n-1} e^{-ip omega} sh^{-a}(pi p) sh^{-b}(pi h p) p^{-n}` times `2 pi i`.
pub fn bernoulli_exact(a: u32, b: u32, n: i32) -> ExactPoly {
    if (a as i64 + b as i64 + n as i64) < 1 {
        return ExactPoly::zero();
    }
    let series = kernel_laurent(a, b, n, -1);
    let res = series.coeff(-1).unwrap_or_default();
    // i^{n-1} * 2 pi i = 2 pi i^n
    res.scale(&ExactScalar::monomial(rat(2, 1), n as i64, 1))
}

/// Laurent coefficient `[p^{-1-l}] e^{-ip omega} / sh^c(pi p)`.
pub fn kernel_coefficient(c: u32, l: i32) -> ExactPoly {
    kernel_laurent(c, 0, 0, -1 - l).coeff(-1 - l).unwrap_or_default()
}

/// Rational polynomial, coefficients in ascending degree.
pub type RationalPoly = Vec<BigRational>;

/// Bernoulli numbers with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut bs: Vec<BigRational> = Vec::with_capacity(n + 1);
    bs.push(BigRational::one());
    for m in 1..=n {
        // sum_{j<=m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut c = BigInt::one();
        for (j, bj) in bs.iter().enumerate() {
            acc += bj * BigRational::from_integer(c.clone());
            c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        bs.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    bs
}

/// Classical `B_n(x) = sum_k C(n,k) B_k x^{n-k}`.
pub fn bernoulli_classical(n: u32) -> RationalPoly {
    let n = n as usize;
    let bs = bernoulli_numbers(n);
    let mut out = vec![BigRational::zero(); n + 1];
    let mut c = BigInt::one();
    for k in 0..=n {
        out[n - k] = &bs[k] * BigRational::from_integer(c.clone());
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    out
}

pub fn eval_rational_poly(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Rational polynomial in `x` as an [`ExactPoly`] in `omega`, after `x -> g(omega)`.
pub fn rational_poly_compose(p: &[BigRational], g: &ExactPoly) -> ExactPoly {
    let as_poly = p
        .iter()
        .enumerate()
        .fold(ExactPoly::zero(), |acc, (k, c)| &acc + &ExactPoly::monomial(ExactScalar::rational(c.clone()), k as u32, 0));
    as_poly.compose_omega(g)
}

/// All `(k,l)`-shuffles as 0-based permutations `sigma` of `0..k+l`.
///
/// `sigma[r]` is the slot placed at position `r`; slots `0..k` and `k..k+l` keep their order.
pub fn shuffles(k: usize, l: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 || l == 0 {
        return Err(Error::Usage("shuffles need k, l >= 1".into()));
    }
    if k + l > 10 {
        return Err(Error::Usage(format!("k + l = {} exceeds the cap of 10", k + l)));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k + l);
    fn rec(i: usize, j: usize, k: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == k && j == l {
            out.push(cur.clone());
            return;
        }
        if i < k {
            cur.push(i);
            rec(i + 1, j, k, l, cur, out);
            cur.pop();
        }
        if j < l {
            cur.push(k + j);
            rec(i, j + 1, k, l, cur, out);
            cur.pop();
        }
    }
    rec(0, 0, k, l, &mut cur, &mut out);
    Ok(out)
}

/// `prod_r 1/(x_1 + ... + x_r)`, `None` if a partial sum vanishes.
fn iterated_reciprocal(xs: &[BigRational]) -> Option<BigRational> {
    let mut s = BigRational::zero();
    let mut out = BigRational::one();
    for x in xs {
        s += x;
        if s.is_zero() {
            return None;
        }
        out /= &s;
    }
    Some(out)
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let num: i64 = rng.gen_range(-100..=100);
        let den: i64 = rng.gen_range(1..=100);
        if num != 0 {
            return rat(num, den);
        }
    }
}

/// The partial-fraction identity behind the shuffle product, checked exactly at
/// `trials` random rational points drawn from a ChaCha8 stream seeded by `seed`.
///
/// The residual is the largest `|lhs - rhs|` seen, so a pass means exact equality.
pub fn verify_a3(k: usize, l: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    if k + l > 6 {
        return Err(Error::Usage(format!("k + l = {} exceeds the cap of 6", k + l)));
    }
    let sh = shuffles(k, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = BigRational::zero();
    let mut resamples = 0u64;
    let mut done = 0;
    while done < trials {
        let w: Vec<BigRational> = (0..k + l).map(|_| random_rational(&mut rng)).collect();
        let lhs = match (iterated_reciprocal(&w[..k]), iterated_reciprocal(&w[k..])) {
            (Some(x), Some(y)) => x * y,
            _ => {
                resamples += 1;
                continue;
            }
        };
        let mut rhs = BigRational::zero();
        let mut degenerate = false;
        for sigma in &sh {
            let z: Vec<BigRational> = sigma.iter().map(|&s| w[s].clone()).collect();
            match iterated_reciprocal(&z) {
                Some(v) => rhs += v,
                None => {
                    degenerate = true;
                    break;
                }
            }
        }
        if degenerate {
            resamples += 1;
            continue;
        }
        let diff = (lhs - rhs).abs();
        if diff > worst {
            worst = diff;
        }
        done += 1;
    }
    let residual = if worst.is_zero() { 0.0 } else { rat_to_f64(&worst).max(f64::MIN_POSITIVE) };
    Ok(CheckReport::new(
        "shuffle_a3_exact",
        json!({"k": k, "l": l, "trials": trials, "seed": seed, "resamples": resamples}),
        residual,
        0.0,
    ))
}

/// Numeric value of an exact polynomial.
pub fn eval_exact(poly: &ExactPoly, omega: C64, hbar: C64) -> Result<C64> {
    poly.eval(omega, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn q_poly_examples() {
        assert_eq!(q_poly(0), ExactPoly::one());
        let q1 = q_poly(1);
        assert!((eval_exact(&q1, c(0.0, 2.0 * PI), c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let q2 = q_poly(2);
        assert!(eval_exact(&q2, c(0.0, PI), c(1.0, 0.0)).unwrap().norm() < 1e-15);
        // Q_2 = (w - i pi)(w + i pi) / (2 (2 pi i)^2)
        let expect = (&(&ExactPoly::omega() - &i_pi()) * &(&ExactPoly::omega() + &i_pi()))
            .scale(&ExactScalar::monomial(rat(1, 8), -2, -2));
        assert_eq!(q2, expect);
    }

    #[test]
    fn q_poly_difference() {
        for m in 1..=8 {
            assert_eq!(q_poly(m).difference(&i_pi()), q_poly(m - 1), "m = {m}");
        }
    }

    #[test]
    fn q_poly_recursion() {
        for m in 1..=6u32 {
            let factor = (&ExactPoly::omega() - &i_pi().scale_rational(&rat(m as i64 - 1, 1)))
                .scale(&ExactScalar::monomial(rat(1, 2 * m as i64), -1, -1));
            assert_eq!(q_poly(m), &factor * &q_poly(m - 1).shift(&i_pi()), "m = {m}");
        }
    }

    #[test]
    fn bernoulli_lowest() {
        assert_eq!(bernoulli_exact(1, 0, 1), ExactPoly::omega());
        assert_eq!(bernoulli_exact(0, 0, 1), ExactPoly::constant(ExactScalar::monomial(rat(2, 1), 1, 1)));
        assert!(bernoulli_exact(1, 1, -2).is_zero());
    }

    #[test]
    fn bernoulli_degree() {
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                for n in -1..=4i32 {
                    let d = a as i32 + b as i32 + n - 1;
                    if d < 0 {
                        continue;
                    }
                    assert_eq!(bernoulli_exact(a, b, n).omega_degree(), Some(d as u32), "({a},{b},{n})");
                }
            }
        }
    }

    #[test]
    fn bernoulli_q_relation_shifted() {
        for a in 1..=6 {
            assert_eq!(bernoulli_exact(a, 0, 0), q_poly(a - 1));
        }
    }

    #[test]
    fn classical_bernoulli() {
        assert_eq!(bernoulli_classical(0), vec![rat(1, 1)]);
        assert_eq!(bernoulli_classical(1), vec![rat(-1, 2), rat(1, 1)]);
        for n in 1..=8u32 {
            let b = bernoulli_classical(n);
            for x in [rat(0, 1), rat(3, 7), rat(-5, 2)] {
                let lhs = eval_rational_poly(&b, &(&x + rat(1, 1))) - eval_rational_poly(&b, &x);
                let mut rhs = rat(n as i64, 1);
                for _ in 1..n {
                    rhs *= &x;
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bernoulli_classical_relation_shifted() {
        // B_{1,0,n}(w) = (2 pi i)^n / n! * B_n(w / 2 pi i + 1/2)
        for n in 0..=8u32 {
            let g = &ExactPoly::omega().scale(&ExactScalar::monomial(rat(1, 2), -1, -1)) + &ExactPoly::constant(ExactScalar::rational(rat(1, 2)));
            let mut fact = BigInt::one();
            for j in 1..=n {
                fact *= BigInt::from(j);
            }
            let pref = ExactScalar::monomial(BigRational::new(BigInt::from(2).pow(n), fact), n as i64, n as i32);
            let rhs = rational_poly_compose(&bernoulli_classical(n), &g).scale(&pref);
            assert_eq!(bernoulli_exact(1, 0, n as i32), rhs, "n = {n}");
        }
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(1, 1).unwrap().len(), 2);
        assert_eq!(shuffles(2, 1).unwrap().len(), 3);
        assert_eq!(shuffles(3, 4).unwrap().len(), 35);
        assert!(shuffles(6, 5).is_err());
    }

    #[test]
    fn a3_small() {
        assert!(verify_a3(1, 1, 10, 1).unwrap().pass);
        assert!(verify_a3(2, 1, 100, 2).unwrap().pass);
    }

    #[test]
    fn bernoulli_structural_identities() {
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                for n in 0..=4i32 {
                    let bb = bernoulli_exact(a, b, n);
                    // modular: B^h_{a,b,n}(w) = h^{n-1} B^{1/h}_{b,a,n}(w/h)
                    assert_eq!(bb, bernoulli_exact(b, a, n).modular().mul_h_pow(n - 1), "modular ({a},{b},{n})");
                    if a >= 1 {
                        assert_eq!(bb.difference(&i_pi()), bernoulli_exact(a - 1, b, n), "diff pi ({a},{b},{n})");
                    }
                    if b >= 1 {
                        assert_eq!(bb.difference(&i_pi_h()), bernoulli_exact(a, b - 1, n), "diff pi h ({a},{b},{n})");
                    }
                    assert_eq!(bb.derivative(), bernoulli_exact(a, b, n - 1), "d/dw ({a},{b},{n})");
                    assert_eq!(bb.at_h_one(), bernoulli_exact(a + b, 0, n), "h = 1 ({a},{b},{n})");
                    let sign = if (a + b + n as u32) % 2 == 1 { 1 } else { -1 };
                    assert_eq!(bb.negate_omega(), bb.scale_rational(&rat(sign, 1)), "parity ({a},{b},{n})");
                    let csign = if (a + b + 1) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(bb.conj(), bb.scale_rational(&rat(csign, 1)), "conj ({a},{b},{n})");
                }
            }
        }
    }
}
