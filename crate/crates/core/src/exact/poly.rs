//! Polynomials in `omega` and `h^{±1}` over [`ExactScalar`].

use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::ExactScalar;
use crate::error::{Error, Result};
use crate::numeric::powi;
use crate::types::C64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactPoly {
    // (omega degree, h degree) -> coefficient; no zero coefficients
    terms: BTreeMap<(u32, i32), ExactScalar>,
}

impl ExactPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(ExactScalar::one())
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: ExactScalar, omega_deg: u32, h_deg: i32) -> Self {
        let mut out = Self::zero();
        if !c.is_zero() {
            out.terms.insert((omega_deg, h_deg), c);
        }
        out
    }

    pub fn omega() -> Self {
        Self::monomial(ExactScalar::one(), 1, 0)
    }

    pub fn h() -> Self {
        Self::monomial(ExactScalar::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, i32), &ExactScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, omega_deg: u32, h_deg: i32) -> ExactScalar {
        self.terms.get(&(omega_deg, h_deg)).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, key: (u32, i32), c: &ExactScalar) {
        let sum = match self.terms.get(&key) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    /// Highest power of `omega`, `None` for the zero polynomial.
    pub fn omega_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn min_h_degree(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).min()
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale(&ExactScalar::rational(q.clone()))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `d/d omega`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&(u, v), c) in &self.terms {
            if u > 0 {
                out.add_term((u - 1, v), &c.scale(&super::scalar::rat(u as i64, 1)));
            }
        }
        out
    }

    /// Substitute `omega -> g`.
    pub fn compose_omega(&self, g: &ExactPoly) -> Self {
        let mut out = Self::zero();
        let mut by_deg: BTreeMap<u32, ExactPoly> = BTreeMap::new();
        for (&(u, v), c) in &self.terms {
            let e = by_deg.entry(u).or_default();
            e.add_term((0, v), c);
        }
        // Horner in omega from the top degree down
        let top = match self.omega_degree() {
            Some(d) => d,
            None => return out,
        };
        for u in (0..=top).rev() {
            out = &out * g;
            if let Some(c) = by_deg.get(&u) {
                out = &out + c;
            }
        }
        out
    }

    /// `omega -> omega + c`.
    pub fn shift(&self, c: &ExactPoly) -> Self {
        self.compose_omega(&(&ExactPoly::omega() + c))
    }

    /// Central difference `f(omega + c) - f(omega - c)`.
    pub fn difference(&self, c: &ExactPoly) -> Self {
        &self.shift(c) - &self.shift(&-c)
    }

    /// `omega -> -omega`.
    pub fn negate_omega(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(u, v), c)| ((u, v), if u % 2 == 1 { -c } else { c.clone() })).collect(),
        }
    }

    /// `h -> 1`.
    pub fn at_h_one(&self) -> Self {
        let mut out = Self::zero();
        for (&(u, _), c) in &self.terms {
            out.add_term((u, 0), c);
        }
        out
    }

    /// `h -> 1/h` together with `omega -> omega/h`.
    pub fn modular(&self) -> Self {
        let mut out = Self::zero();
        for (&(u, v), c) in &self.terms {
            out.add_term((u, -(u as i32) - v), c);
        }
        out
    }

    /// Multiply by `h^k`.
    pub fn mul_h_pow(&self, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(&(u, v), c)| ((u, v + k), c.clone())).collect() }
    }

    /// Coefficient map `i -> -i` with `omega` and `h` held formal.
    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect() }
    }

    /// Numeric value at `(omega, hbar)`.
    pub fn eval(&self, omega: C64, hbar: C64) -> Result<C64> {
        if hbar == C64::new(0.0, 0.0) && self.min_h_degree().is_some_and(|d| d < 0) {
            return Err(Error::Pole("negative power of h at hbar = 0".into()));
        }
        let mut z = C64::new(0.0, 0.0);
        for (&(u, v), c) in &self.terms {
            z += c.eval() * omega.powu(u) * powi(hbar, v);
        }
        Ok(z)
    }
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v);
        }
        out
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        self + &(-rhs)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        let mut out = ExactPoly::zero();
        for (&(u1, v1), c1) in &self.terms {
            for (&(u2, v2), c2) in &rhs.terms {
                out.add_term((u1 + u2, v1 + v2), &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(u, v), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match u {
                0 => {}
                1 => write!(f, "*w")?,
                _ => write!(f, "*w^{u}")?,
            }
            match v {
                0 => {}
                1 => write!(f, "*h")?,
                _ => write!(f, "*h^{v}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::scalar::rat;
    use super::*;

    #[test]
    fn shift_binomial() {
        // (w + 1)^2 = w^2 + 2w + 1
        let w2 = ExactPoly::omega().pow(2);
        let s = w2.shift(&ExactPoly::one());
        assert_eq!(s.coeff(2, 0), ExactScalar::one());
        assert_eq!(s.coeff(1, 0), ExactScalar::int(2));
        assert_eq!(s.coeff(0, 0), ExactScalar::one());
    }

    #[test]
    fn modular_is_involution() {
        let p = &(&ExactPoly::omega().pow(3) * &ExactPoly::h()) + &ExactPoly::monomial(ExactScalar::pi(), 1, -2);
        assert_eq!(p.modular().modular(), p);
    }

    #[test]
    fn derivative_of_power() {
        let p = ExactPoly::omega().pow(4).scale_rational(&rat(1, 2));
        assert_eq!(p.derivative(), ExactPoly::omega().pow(3).scale_rational(&rat(2, 1)));
    }

    #[test]
    fn eval_rejects_h_pole() {
        let p = ExactPoly::monomial(ExactScalar::one(), 0, -1);
        assert!(p.eval(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).is_err());
        assert_eq!(p.eval(C64::new(1.0, 0.0), C64::new(2.0, 0.0)).unwrap(), C64::new(0.5, 0.0));
    }
}
