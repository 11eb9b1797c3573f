//! Small numeric helpers shared by the backends.

use crate::types::C64;
use std::f64::consts::PI;

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: C64) {
        let (s, c) = two_sum(self.sum.re, x.re);
        let (t, d) = two_sum(self.sum.im, x.im);
        self.sum = C64::new(s, t);
        self.comp += C64::new(c, d);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, c)
}

/// Deterministic compensated sum of a slice, in order.
pub fn compensated(xs: &[C64]) -> C64 {
    let mut acc = CompensatedSum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Generalized binomial `C(x, k)` for integer `x` of any sign.
pub fn binom(x: i64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let mut r = 1.0;
    for j in 0..k {
        r *= (x - j) as f64 / (j + 1) as f64;
    }
    r
}

/// `log sh(z)` with `sh(z) = e^z - e^{-z}`, stable for large `|Re z|`; any branch.
pub fn log_sh(z: C64) -> C64 {
    if z.re >= 0.0 {
        z + ln_1p(-(-2.0 * z).exp())
    } else {
        C64::new(0.0, PI) - z + ln_1p(-(2.0 * z).exp())
    }
}

/// `sh(z) = e^z - e^{-z}`.
pub fn sh(z: C64) -> C64 {
    z.exp() - (-z).exp()
}

/// `log(1 + x)` with care near `x = 0`.
pub fn ln_1p(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        // series to x^6 is exact to double precision here
        let mut term = x;
        let mut s = C64::new(0.0, 0.0);
        for k in 1..=7 {
            s += term / k as f64 * if k % 2 == 1 { 1.0 } else { -1.0 };
            term *= x;
        }
        s
    } else {
        (C64::new(1.0, 0.0) + x).ln()
    }
}

/// Integer power with negative exponents allowed.
pub fn powi(z: C64, n: i32) -> C64 {
    if n >= 0 {
        z.powu(n as u32)
    } else {
        C64::new(1.0, 0.0) / z.powu(n.unsigned_abs())
    }
}

/// `i^k` exactly.
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Absolute difference scaled for reporting.
pub fn abs_diff(x: C64, y: C64) -> f64 {
    (x - y).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sh_matches_direct() {
        for &z in &[C64::new(0.3, 0.2), C64::new(-2.0, 1.0), C64::new(5.0, -0.7), C64::new(-0.01, 0.4)] {
            let d = sh(z);
            assert!((log_sh(z).exp() - d).norm() < 1e-13 * d.norm().max(1.0));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(-1, 0), 1.0);
        assert_eq!(binom(-1, 3), -1.0);
        assert_eq!(binom(-3, 2), 6.0);
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let xs: Vec<C64> = std::iter::once(C64::new(1e16, 0.0))
            .chain(std::iter::repeat_n(C64::new(1.0, 0.0), 1000))
            .chain(std::iter::once(C64::new(-1e16, 0.0)))
            .collect();
        assert_eq!(compensated(&xs).re, 1000.0);
    }
}
