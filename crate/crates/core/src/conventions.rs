//! Frozen sign and index conventions, with the calibration evidence.

/// The conventions document printed by `qpolylog --conventions`.
pub const DOCUMENT: &str = include_str!("../CONVENTIONS.md");

/// `(-1)^k`.
pub fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign in `F(w) + s F(-w) = -B(w)`: `(-1)^{a+b+n-1}`.
pub fn negation_sign(a: u32, b: u32, n: i32) -> f64 {
    sign(a as i64 + b as i64 + n as i64 - 1)
}

/// Sign in `conj F^hbar(w) = s F^{conj hbar}(conj w)`: `(-1)^{|a|+|b|-m}`.
pub fn conjugation_sign(a_total: u32, b_total: u32, depth: usize) -> f64 {
    sign(a_total as i64 + b_total as i64 - depth as i64)
}

/// Global sign of the q-integral presentation at depth `m`: `(-1)^m`.
pub fn q_integral_sign(depth: usize) -> f64 {
    sign(depth as i64)
}
