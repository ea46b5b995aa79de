//! Thin high-precision wrapper around `astro-float`, used by the identity
//! ledger for checks that are not purely polynomial.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default working precision in bits.
pub const DEFAULT_BITS: usize = 320;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct Hp {
    p: usize,
    cc: Consts,
}

impl Hp {
    pub fn new(bits: usize) -> Self {
        Hp { p: bits, cc: Consts::new().expect("constant cache allocation") }
    }

    pub fn bits(&self) -> usize {
        self.p
    }

    pub fn f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    pub fn int(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.p)
    }

    pub fn bigint(&self, v: &BigInt) -> BigFloat {
        let two64 = BigFloat::from_u128(1u128 << 64, self.p);
        let mut acc = BigFloat::from_i64(0, self.p);
        for d in v.magnitude().iter_u64_digits().rev() {
            acc = acc.mul(&two64, self.p, RM).add(&BigFloat::from_u64(d, self.p), self.p, RM);
        }
        if v.is_negative() {
            acc.neg()
        } else {
            acc
        }
    }

    pub fn rational(&self, r: &BigRational) -> BigFloat {
        let n = self.bigint(r.numer());
        let d = self.bigint(r.denom());
        n.div(&d, self.p, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.p, RM)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.p, RM, &mut self.cc)
    }

    pub fn tan(&mut self, a: &BigFloat) -> BigFloat {
        a.tan(self.p, RM, &mut self.cc)
    }

    pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
        a.sinh(self.p, RM, &mut self.cc)
    }

    pub fn cosh(&mut self, a: &BigFloat) -> BigFloat {
        a.cosh(self.p, RM, &mut self.cc)
    }

    pub fn tanh(&mut self, a: &BigFloat) -> BigFloat {
        a.tanh(self.p, RM, &mut self.cc)
    }

    pub fn atan(&mut self, a: &BigFloat) -> BigFloat {
        a.atan(self.p, RM, &mut self.cc)
    }

    pub fn atanh(&mut self, a: &BigFloat) -> BigFloat {
        a.atanh(self.p, RM, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }
}

/// Nearest-ish `f64` (truncated to the top mantissa word); adequate for
/// reporting residual magnitudes.
pub fn to_f64(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf_pos() {
        return f64::INFINITY;
    }
    if v.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if v.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    let top = words.last().copied().unwrap_or(0).to_f64().unwrap_or(0.0);
    let mag = libm::ldexp(top, e - 64);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// `|v| ≤ tol` decided in full precision.
pub fn abs_le(v: &BigFloat, tol: f64) -> bool {
    if v.is_nan() || v.is_inf() {
        return false;
    }
    let a = v.abs();
    matches!(a.cmp(&BigFloat::from_f64(tol, 64)), Some(c) if c <= 0)
}

pub fn is_zero(v: &BigFloat) -> bool {
    v.is_zero()
}

pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub fn zero_rational() -> BigRational {
    BigRational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        let hp = Hp::new(DEFAULT_BITS);
        assert_eq!(to_f64(&hp.f64(1.5)), 1.5);
        assert_eq!(to_f64(&hp.f64(-0.1)), -0.1);
        let big = BigInt::from(1u64 << 40) * BigInt::from(1u64 << 40) + BigInt::from(7);
        let r = BigRational::new(big.clone(), BigInt::from(3));
        let got = to_f64(&hp.rational(&r));
        let want = (2f64.powi(80) + 7.0) / 3.0;
        assert!((got - want).abs() / want < 1e-15);
    }

    #[test]
    fn transcendental_identity() {
        let mut hp = Hp::new(DEFAULT_BITS);
        // atan(1) = pi/4
        let one = hp.int(1);
        let a = hp.atan(&one);
        let pi = hp.pi();
        let q = hp.div(&pi, &hp.int(4));
        assert!(abs_le(&hp.sub(&a, &q), 1e-80));
        assert!(!abs_le(&hp.f64(1e-20), 1e-30));
    }
}
