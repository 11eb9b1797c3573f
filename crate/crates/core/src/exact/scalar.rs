//! Scalars `sum q_{s,t} i^s pi^t`, `q` rational, `s in {0,1}`, `t` any integer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::types::C64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    // (power of i reduced to {0,1}, power of pi) -> coefficient; no zero entries
    terms: BTreeMap<(u8, i32), BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(q: BigRational) -> Self {
        Self::monomial(q, 0, 0)
    }

    pub fn int(k: i64) -> Self {
        Self::rational(rat(k, 1))
    }

    /// `q i^s pi^t` for any integer `s`.
    pub fn monomial(q: BigRational, s: i64, t: i32) -> Self {
        let mut out = Self::zero();
        if q.is_zero() {
            return out;
        }
        let s = s.rem_euclid(4);
        let q = if s >= 2 { -q } else { q };
        out.terms.insert(((s % 2) as u8, t), q);
        out
    }

    pub fn i() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn pi() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u8, i32), &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, key: (u8, i32), q: &BigRational) {
        let e = self.terms.entry(key).or_insert_with(BigRational::zero);
        *e += q;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * q)).collect() }
    }

    /// Complex conjugation `i -> -i` (pi and rationals real).
    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, if k.0 == 1 { -v } else { v.clone() })).collect() }
    }

    /// Inverse of a single-term scalar.
    pub fn inv_monomial(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&(s, t), q) = self.terms.iter().next().unwrap();
        Some(Self::monomial(q.recip(), -(s as i64), -t))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self) -> C64 {
        let mut z = C64::new(0.0, 0.0);
        for (&(s, t), q) in &self.terms {
            let v = rat_to_f64(q) * PI.powi(t);
            z += if s == 1 { C64::new(0.0, v) } else { C64::new(v, 0.0) };
        }
        z
    }

    /// Exact rational value if the scalar is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // rescale huge numerators and denominators
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 1000;
            let n = (q.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v);
        }
        out
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::zero();
        for (&(s1, t1), q1) in &self.terms {
            for (&(s2, t2), q2) in &rhs.terms {
                let s = s1 + s2;
                let q = q1 * q2;
                let q = if s == 2 { -q } else { q };
                out.add_term((s % 2, t1 + t2), &q);
            }
        }
        out
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(s, t), q) in &self.terms {
            let neg = q.is_negative();
            if !first {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            write!(f, "{}", q.abs())?;
            if s == 1 {
                write!(f, "*i")?;
            }
            if t != 0 {
                write!(f, "*pi^{t}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared() {
        let i = ExactScalar::i();
        assert_eq!(&i * &i, ExactScalar::int(-1));
        assert_eq!((&i * &i).pow(2), ExactScalar::one());
    }

    #[test]
    fn canonical_zero() {
        let x = &ExactScalar::pi() - &ExactScalar::pi();
        assert!(x.is_zero());
        assert_eq!(x, ExactScalar::zero());
    }

    #[test]
    fn inverse_monomial() {
        let two_pi_i = ExactScalar::monomial(rat(2, 1), 1, 1);
        let inv = two_pi_i.inv_monomial().unwrap();
        assert_eq!(&two_pi_i * &inv, ExactScalar::one());
    }

    #[test]
    fn eval_numeric() {
        let z = &ExactScalar::monomial(rat(1, 2), 1, 1) + &ExactScalar::int(3);
        assert!((z.eval() - C64::new(3.0, PI / 2.0)).norm() < 1e-15);
        assert_eq!(z.conj().eval(), C64::new(3.0, -PI / 2.0));
    }
}
