//! Truncated Laurent series in `p` with [`ExactPoly`] coefficients.

use super::poly::ExactPoly;
use super::scalar::ExactScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// `sum_{k=lo}^{hi} c_k p^k + O(p^{hi+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalLaurent {
    lo: i32,
    coeffs: Vec<ExactPoly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShScale {
    /// `sh(pi p)`
    Pi,
    /// `sh(pi h p)`
    PiH,
}

impl ShScale {
    /// `c^k` where `c` is the scale.
    fn power(self, k: i32) -> ExactPoly {
        let h = match self {
            ShScale::Pi => 0,
            ShScale::PiH => k,
        };
        ExactPoly::monomial(ExactScalar::monomial(BigRational::one(), 0, k), 0, h)
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

fn inv_factorial(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), factorial(k))
}

impl FormalLaurent {
    /// Requires `hi >= lo`; a short coefficient list is zero padded.
    pub fn new(lo: i32, hi: i32, mut coeffs: Vec<ExactPoly>) -> Self {
        assert!(hi >= lo, "empty Laurent window");
        coeffs.resize((hi - lo + 1) as usize, ExactPoly::zero());
        Self { lo, coeffs }
    }

    pub fn one(hi: i32) -> Self {
        Self::new(0, hi.max(0), vec![ExactPoly::one()])
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    /// Coefficient of `p^k`; zero below the window, `None` above it.
    pub fn coeff(&self, k: i32) -> Option<ExactPoly> {
        if k < self.lo {
            Some(ExactPoly::zero())
        } else if k > self.hi() {
            None
        } else {
            Some(self.coeffs[(k - self.lo) as usize].clone())
        }
    }

    /// Multiply by `p^k`.
    pub fn shift_power(&self, k: i32) -> Self {
        Self { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    /// Product, valid through the smaller of the two reliable orders.
    pub fn mul(&self, other: &FormalLaurent) -> FormalLaurent {
        let lo = self.lo + other.lo;
        let hi = (self.hi() + other.lo).min(other.hi() + self.lo);
        let mut coeffs = vec![ExactPoly::zero(); (hi - lo + 1).max(1) as usize];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k < coeffs.len() && !y.is_zero() {
                    coeffs[k] = &coeffs[k] + &(x * y);
                }
            }
        }
        FormalLaurent::new(lo, hi.max(lo), coeffs)
    }

    /// `exp(-i p omega)` through `p^hi`.
    pub fn exp_minus_ip_omega(hi: i32) -> Self {
        let hi = hi.max(0);
        let coeffs = (0..=hi as u32)
            .map(|k| {
                let c = ExactScalar::monomial(inv_factorial(k), -(k as i64), 0);
                ExactPoly::monomial(c, k, 0)
            })
            .collect();
        Self::new(0, hi, coeffs)
    }

    /// `sh(c p)` through `p^order`.
    pub fn sh(scale: ShScale, order: i32) -> Self {
        let hi = order.max(1);
        let mut coeffs = vec![ExactPoly::zero(); hi as usize + 1];
        for k in (1..=hi).step_by(2) {
            coeffs[k as usize] = scale.power(k).scale_rational(&(inv_factorial(k as u32) * BigInt::from(2)));
        }
        Self::new(0, hi, coeffs)
    }
}

/// Power series `1/s` through degree `n`, assuming `s[0] = 1`.
fn invert_unit_series(s: &[ExactPoly], n: usize) -> Vec<ExactPoly> {
    let mut inv = vec![ExactPoly::zero(); n + 1];
    inv[0] = ExactPoly::one();
    for k in 1..=n {
        let mut acc = ExactPoly::zero();
        for j in 1..=k.min(s.len() - 1) {
            if !s[j].is_zero() {
                acc = &acc + &(&s[j] * &inv[k - j]);
            }
        }
        inv[k] = -&acc;
    }
    inv
}

fn series_mul(x: &[ExactPoly], y: &[ExactPoly], n: usize) -> Vec<ExactPoly> {
    let mut out = vec![ExactPoly::zero(); n + 1];
    for (i, a) in x.iter().enumerate().take(n + 1) {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate().take(n + 1 - i) {
            if !b.is_zero() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
    }
    out
}

/// Laurent expansion of `sh^{-a}(c p)` on the window `[-a, order]`.
///
/// `a = 0` gives the constant series 1.
pub fn sh_inverse_laurent(scale: ShScale, a: u32, order: i32) -> FormalLaurent {
    let a_i = a as i32;
    if a == 0 {
        return FormalLaurent::one(order);
    }
    let order = order.max(-a_i);
    let n = (order + a_i) as usize;
    // sh(cp) = 2cp * S(p), S = sum_k (cp)^{2k}/(2k+1)!
    let s: Vec<ExactPoly> = (0..=n)
        .map(|k| {
            if k % 2 == 0 {
                scale.power(k as i32).scale_rational(&inv_factorial(k as u32 + 1))
            } else {
                ExactPoly::zero()
            }
        })
        .collect();
    let inv = invert_unit_series(&s, n);
    let mut pow = vec![ExactPoly::one()];
    for _ in 0..a {
        pow = series_mul(&pow, &inv, n);
    }
    let front = scale.power(-a_i).scale_rational(&BigRational::new(BigInt::one(), BigInt::from(2u32).pow(a)));
    let coeffs = pow.iter().map(|c| c * &front).collect();
    FormalLaurent::new(-a_i, order, coeffs)
}

/// Laurent expansion of `e^{-ip omega} sh^{-a}(pi p) sh^{-b}(pi h p) p^{-n}` through `p^hi`.
pub fn kernel_laurent(a: u32, b: u32, n: i32, hi: i32) -> FormalLaurent {
    // target order before the p^{-n} shift
    let t = hi + n;
    let (ai, bi) = (a as i32, b as i32);
    let e = FormalLaurent::exp_minus_ip_omega(t + ai + bi);
    let sa = sh_inverse_laurent(ShScale::Pi, a, t + bi);
    let sb = sh_inverse_laurent(ShScale::PiH, b, t + ai);
    e.mul(&sa).mul(&sb).shift_power(-n)
}
