//! Outward-rounded interval arithmetic.
//!
//! Rounding is emulated: every arithmetic result is nudged one ulp outward
//! (round-to-nearest is within half an ulp, so this is enough) and every libm
//! result two ulps outward. Infinite endpoints are allowed; `0 · ∞` is taken
//! as `0`, which is correct for the products formed here (a bounded factor
//! times one whose endpoint stands for an unbounded but finite value).

mod compact;
mod eval;

pub use compact::*;
pub use eval::*;

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use libm::{atan, atanh, cos, cosh, exp, log, sin, sinh, tan, tanh};
use serde::{Deserialize, Serialize};

/// Description of the rounding mechanism, stamped into certificates.
pub const ROUNDING: &str = "outward nudge: 1 ulp per arithmetic operation, 2 ulps per libm call";

#[inline]
fn dn(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

#[inline]
fn dn2(x: f64) -> f64 {
    dn(dn(x))
}

#[inline]
fn up2(x: f64) -> f64 {
    up(up(x))
}

/// Lower end of a libm value `fx = f(x)`; `f(0) = 0` is exact for the odd
/// functions used here.
#[inline]
fn ldn(x: f64, fx: f64) -> f64 {
    if x == 0.0 && fx == 0.0 {
        0.0
    } else {
        dn2(fx)
    }
}

#[inline]
fn lup(x: f64, fx: f64) -> f64 {
    if x == 0.0 && fx == 0.0 {
        0.0
    } else {
        up2(fx)
    }
}

/// Closed interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            write!(f, "[{:e}, {:e}]", self.lo, self.hi)
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// π with a two-ulp enclosure.
pub const PI: Interval = Interval { lo: 3.1415926535897927, hi: 3.1415926535897936 };
/// π/2 with a two-ulp enclosure.
pub const FRAC_PI_2: Interval = Interval { lo: 1.5707963267948963, hi: 1.5707963267948968 };

impl Interval {
    pub const EMPTY: Interval = Interval { lo: f64::INFINITY, hi: f64::NEG_INFINITY };
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// `[lo, hi]`; NaN endpoints widen to infinity, reversed endpoints give
    /// the empty interval.
    pub fn new(lo: f64, hi: f64) -> Interval {
        let lo = if lo.is_nan() { f64::NEG_INFINITY } else { lo };
        let hi = if hi.is_nan() { f64::INFINITY } else { hi };
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    // Written so that NaN endpoints count as empty.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`.
    pub fn subset(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    /// `self` lies in the interior of `other`.
    pub fn interior(&self, other: &Interval) -> bool {
        !self.is_empty() && other.lo < self.lo && self.hi < other.hi
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            up(self.hi - self.lo)
        }
    }

    pub fn mid(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + 0.5 * (self.hi - self.lo),
            (true, false) => {
                if self.lo >= 0.0 {
                    (2.0 * self.lo).max(1.0)
                } else {
                    0.0
                }
            }
            (false, true) => {
                if self.hi <= 0.0 {
                    (2.0 * self.hi).min(-1.0)
                } else {
                    0.0
                }
            }
            (false, false) => 0.0,
        }
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        if self.is_empty() {
            return *o;
        }
        if o.is_empty() {
            return *self;
        }
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.min(o.hi))
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }

    pub fn sqr(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let (a, b) = (self.lo.abs(), self.hi.abs());
        let (m, mm) = if self.contains(0.0) { (0.0, a.max(b)) } else { (a.min(b), a.max(b)) };
        Interval::new(if m == 0.0 { 0.0 } else { dn(m * m).max(0.0) }, up(mm * mm))
    }

    pub fn powi(self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => self,
            2 => self.sqr(),
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => {
                if self.is_empty() {
                    return self;
                }
                // Odd powers are monotone.
                let p = |x: f64, r: fn(f64) -> f64| {
                    if x == 0.0 {
                        return 0.0;
                    }
                    let mut acc = x;
                    for _ in 1..n {
                        acc = r(acc * x);
                    }
                    acc
                };
                let lo = if self.lo >= 0.0 { p(self.lo, dn) } else { -p(-self.lo, up) };
                let hi = if self.hi >= 0.0 { p(self.hi, up) } else { -p(-self.hi, dn) };
                Interval::new(lo, hi)
            }
        }
    }

    pub fn sqrt(self) -> Interval {
        let a = self.intersect(&Interval::new(0.0, f64::INFINITY));
        if a.is_empty() {
            return a;
        }
        Interval::new(dn(libm::sqrt(a.lo)).max(0.0), up(libm::sqrt(a.hi)))
    }

    pub fn recip(self) -> Interval {
        Interval::ONE / self
    }

    pub fn scale(self, k: f64) -> Interval {
        self * Interval::point(k)
    }

    pub fn abs(self) -> Interval {
        if self.is_empty() || self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::new(0.0, self.mag())
        }
    }

    pub fn max(self, o: Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.max(o.hi))
    }

    pub fn min(self, o: Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.min(o.hi))
    }

    fn mono_inc(self, f: fn(f64) -> f64) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval::new(ldn(self.lo, f(self.lo)), lup(self.hi, f(self.hi)))
    }

    /// Whether `self` may contain a point of `a + k·period`.
    fn hits(&self, a: f64, period: f64) -> bool {
        let k = libm::ceil((self.lo - a) / period - 1e-9);
        a + k * period <= self.hi + 1e-9 * period
    }

    pub fn sin(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let tau = 2.0 * core::f64::consts::PI;
        if !self.is_finite() || self.hi - self.lo >= tau {
            return Interval::new(-1.0, 1.0);
        }
        let (a, b) = (sin(self.lo), sin(self.hi));
        let mut r = Interval::new(ldn(self.lo, a).min(ldn(self.hi, b)), lup(self.lo, a).max(lup(self.hi, b)));
        if self.hits(core::f64::consts::FRAC_PI_2, tau) {
            r.hi = 1.0;
        }
        if self.hits(-core::f64::consts::FRAC_PI_2, tau) {
            r.lo = -1.0;
        }
        r.intersect(&Interval::new(-1.0, 1.0))
    }

    pub fn cos(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let tau = 2.0 * core::f64::consts::PI;
        if !self.is_finite() || self.hi - self.lo >= tau {
            return Interval::new(-1.0, 1.0);
        }
        let (a, b) = (cos(self.lo), cos(self.hi));
        let mut r = Interval::new(dn2(a.min(b)), up2(a.max(b)));
        if self.hits(0.0, tau) {
            r.hi = 1.0;
        }
        if self.hits(core::f64::consts::PI, tau) {
            r.lo = -1.0;
        }
        r.intersect(&Interval::new(-1.0, 1.0))
    }

    /// `tan` on a subset of `(−π/2, π/2]`; an endpoint at or above the f64
    /// value of π/2 maps to `+∞`.
    pub fn tan(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        if self.lo <= -core::f64::consts::FRAC_PI_2 || self.hi > FRAC_PI_2.hi {
            return Interval::ENTIRE;
        }
        let hi = if self.hi >= core::f64::consts::FRAC_PI_2 { f64::INFINITY } else { lup(self.hi, tan(self.hi)) };
        Interval::new(ldn(self.lo, tan(self.lo)), hi)
    }

    pub fn atan(self) -> Interval {
        let r = self.mono_inc(atan);
        r.intersect(&Interval::new(-FRAC_PI_2.hi, FRAC_PI_2.hi))
    }

    pub fn sinh(self) -> Interval {
        self.mono_inc(sinh)
    }

    pub fn cosh(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let (a, b) = (cosh(self.lo), cosh(self.hi));
        let lo = if self.contains(0.0) { 1.0 } else { dn2(a.min(b)).max(1.0) };
        Interval::new(lo, up2(a.max(b)))
    }

    pub fn tanh(self) -> Interval {
        self.mono_inc(tanh).intersect(&Interval::new(-1.0, 1.0))
    }

    pub fn exp(self) -> Interval {
        let r = self.mono_inc(exp);
        Interval::new(r.lo.max(0.0), r.hi)
    }

    pub fn ln(self) -> Interval {
        let a = self.intersect(&Interval::new(0.0, f64::INFINITY));
        if a.is_empty() {
            return a;
        }
        a.mono_inc(log)
    }

    /// `atanh` on `[−1, 1]`; the parts of the argument outside the domain
    /// are dropped and `±1` map to `±∞`.
    pub fn atanh(self) -> Interval {
        let a = self.intersect(&Interval::new(-1.0, 1.0));
        if a.is_empty() {
            return a;
        }
        let lo = if a.lo <= -1.0 { f64::NEG_INFINITY } else { ldn(a.lo, atanh(a.lo)) };
        let hi = if a.hi >= 1.0 { f64::INFINITY } else { lup(a.hi, atanh(a.hi)) };
        Interval::new(lo, hi)
    }

    /// `atanh` that rejects arguments reaching outside `[−1, 1]`.
    pub fn atanh_strict(self) -> crate::error::Result<Interval> {
        if self.lo < -1.0 || self.hi > 1.0 {
            return Err(crate::error::Error::IntervalDomain("atanh argument outside [-1, 1]"));
        }
        Ok(self.atanh())
    }

    /// `coth` for positive arguments (decreasing); `coth 0 = +∞`.
    pub fn coth(self) -> Interval {
        let a = self.intersect(&Interval::new(0.0, f64::INFINITY));
        if a.is_empty() {
            return a;
        }
        let f = |w: f64| Interval::point(w).tanh().recip();
        let hi = if a.lo == 0.0 { f64::INFINITY } else { f(a.lo).hi };
        let lo = if a.hi.is_infinite() { 1.0 } else { f(a.hi).lo.max(1.0) };
        Interval::new(lo, hi)
    }

    /// `sin(x)/x` on `[0, π]` (decreasing), with value 1 at 0.
    pub fn sinc(self) -> Interval {
        let a = self.intersect(&Interval::new(0.0, PI.hi));
        if a.is_empty() {
            return a;
        }
        let f = |x: f64| {
            if x < 1e-4 {
                // 1 − x²/6 ≤ sinc x ≤ 1; avoids dividing subnormal enclosures.
                Interval::new(1.0 - x * x / 6.0 - f64::EPSILON, 1.0)
            } else {
                Interval::point(x).sin() / Interval::point(x)
            }
        };
        Interval::new(f(a.hi).lo.max(-1.0), f(a.lo).hi.min(1.0))
    }
}

/// Rounded-down product; exact when a factor is zero.
#[inline]
fn mul_dn(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        dn(a * b)
    }
}

#[inline]
fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        up(a * b)
    }
}

/// A floating sum or difference that comes out zero is exact.
#[inline]
fn sum_dn(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        dn(x)
    }
}

#[inline]
fn sum_up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        up(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        if self.is_empty() || o.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(sum_dn(self.lo + o.lo), sum_up(self.hi + o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        if self.is_empty() || o.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(sum_dn(self.lo - o.hi), sum_up(self.hi - o.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        if self.is_empty() || o.is_empty() {
            return Interval::EMPTY;
        }
        if self.lo >= 0.0 && o.lo >= 0.0 {
            return Interval::new(mul_dn(self.lo, o.lo).max(0.0), mul_up(self.hi, o.hi));
        }
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let lo = pairs.iter().map(|&(a, b)| mul_dn(a, b)).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|&(a, b)| mul_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if self.is_empty() || o.is_empty() {
            return Interval::EMPTY;
        }
        if o.contains(0.0) {
            if o.lo == 0.0 && o.hi == 0.0 {
                return Interval::EMPTY;
            }
            if o.lo == 0.0 && self.lo >= 0.0 {
                let lo = if o.hi.is_infinite() { 0.0 } else { dn(self.lo / o.hi).max(0.0) };
                return Interval::new(lo, f64::INFINITY);
            }
            return Interval::ENTIRE;
        }
        let q = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        if q.iter().any(|v| v.is_nan()) {
            return Interval::ENTIRE;
        }
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(dn(lo), up(hi))
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, o: f64) -> Interval {
        self + Interval::point(o)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, o: f64) -> Interval {
        self - Interval::point(o)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, o: f64) -> Interval {
        self * Interval::point(o)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        Interval::point(self) * o
    }
}

impl Add<Interval> for f64 {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::point(self) + o
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::point(self) - o
    }
}

/// `f` over an interval, for `f` increasing: hull of the endpoint images,
/// each evaluated by the interval extension `f`.
pub fn mono_inc(a: Interval, f: impl Fn(Interval) -> Interval) -> Interval {
    if a.is_empty() {
        return a;
    }
    if a.is_point() {
        return f(a);
    }
    Interval::new(f(Interval::point(a.lo)).lo, f(Interval::point(a.hi)).hi)
}

/// As [`mono_inc`] for decreasing `f`.
pub fn mono_dec(a: Interval, f: impl Fn(Interval) -> Interval) -> Interval {
    if a.is_empty() {
        return a;
    }
    if a.is_point() {
        return f(a);
    }
    Interval::new(f(Interval::point(a.hi)).lo, f(Interval::point(a.lo)).hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_outward() {
        let a = Interval::point(0.1) + Interval::point(0.2);
        assert!(a.lo < 0.30000000000000004 && a.hi > 0.3);
        let third = Interval::ONE / Interval::point(3.0);
        assert!(third.lo < 1.0 / 3.0 && third.hi > 1.0 / 3.0);
        let p = Interval::new(-2.0, 3.0) * Interval::new(-1.0, 4.0);
        assert!(p.lo <= -8.0 && p.hi >= 12.0);
        assert_eq!(Interval::new(-2.0, 3.0).sqr().lo, 0.0);
    }

    #[test]
    fn empty_propagates() {
        let e = Interval::EMPTY;
        assert!((e + Interval::ONE).is_empty());
        assert!((e * Interval::ONE).is_empty());
        assert!(e.sin().is_empty());
        assert!(Interval::new(2.0, 3.0).atanh().is_empty());
        assert!(Interval::new(0.5, 2.0).atanh_strict().is_err());
    }

    #[test]
    fn zero_times_infinity() {
        let p = Interval::new(0.0, 1.0) * Interval::new(2.0, f64::INFINITY);
        assert_eq!(p.lo, 0.0);
        assert_eq!(p.hi, f64::INFINITY);
    }

    #[test]
    fn sin_cos_fold() {
        let s = Interval::new(0.0, core::f64::consts::PI).sin();
        assert!(s.lo <= 0.0 && s.lo >= -1e-15 && s.hi == 1.0);
        let c = Interval::new(0.0, core::f64::consts::PI).cos();
        assert!(c.lo == -1.0 && c.hi == 1.0);
        let c = Interval::new(0.5, 1.0).cos();
        assert!(c.contains(0.7) && c.lo > 0.5);
    }

    #[test]
    fn atan_of_one_is_tight() {
        let a = Interval::ONE.atan();
        assert!(a.contains(core::f64::consts::FRAC_PI_4));
        let ulp = core::f64::consts::FRAC_PI_4.next_up() - core::f64::consts::FRAC_PI_4;
        assert!(a.hi - a.lo <= 4.0 * ulp);
    }

    #[test]
    fn pi_encloses() {
        assert!(PI.lo < core::f64::consts::PI.next_up() && PI.hi > core::f64::consts::PI);
        assert!(FRAC_PI_2.contains(core::f64::consts::FRAC_PI_2));
        assert_eq!(PI.lo, core::f64::consts::PI.next_down());
        assert_eq!(PI.hi, core::f64::consts::PI.next_up());
        assert_eq!(FRAC_PI_2.lo, core::f64::consts::FRAC_PI_2.next_down());
        assert_eq!(FRAC_PI_2.hi, core::f64::consts::FRAC_PI_2.next_up());
    }

    #[test]
    fn special_functions() {
        assert_eq!(Interval::new(0.5, 1.0).atanh().hi, f64::INFINITY);
        let c = Interval::new(0.0, 1.0).coth();
        assert_eq!(c.hi, f64::INFINITY);
        assert!(c.lo <= 1.0 / libm::tanh(1.0));
        let s = Interval::new(0.0, 0.5).sinc();
        assert!(s.hi >= 1.0 && s.lo <= libm::sin(0.5) / 0.5);
        assert_eq!(Interval::new(1.0, core::f64::consts::FRAC_PI_2).tan().hi, f64::INFINITY);
        assert!(Interval::new(-1.0, 2.0).cosh().lo == 1.0);
    }
}
