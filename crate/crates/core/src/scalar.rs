//! Double-precision evaluation of the trigonometric family G(θ, x, y) and the
//! hyperbolic family F(ℓ, x, y), their gradients and (x, y)-Hessians.
//!
//! Both families are also available in compactified coordinates:
//! `x = tan u` for G and `x = coth w` for F. On the zero manifold those
//! coordinates are `u = π/2 − θ/2` and `w = ℓ/2`, which are exactly
//! representable, so the compact evaluators are the ones to use when the
//! manifold itself is probed.

use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use libm::{atan, atanh, cos, cosh, expm1, log1p, sin, sinh, tan, tanh};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which family a point, box or step belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Trig,
    Hyp,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Trig => "trig",
            Mode::Hyp => "hyp",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "trig" | "G" | "g" | "1" => Some(Mode::Trig),
            "hyp" | "F" | "f" | "2" => Some(Mode::Hyp),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated point `(t, x, y)`; `t` is θ in trig mode and ℓ in hyp mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub mode: Mode,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl EvalPoint {
    pub fn new(mode: Mode, t: f64, x: f64, y: f64) -> Result<Self> {
        let bad = |reason| Err(Error::Domain { mode, reason });
        if !(t.is_finite() && x.is_finite() && y.is_finite()) {
            return bad("coordinates must be finite");
        }
        match mode {
            Mode::Trig => {
                if !(0.0..=PI).contains(&t) {
                    return bad("theta must lie in [0, pi]");
                }
                if x < 0.0 || y < 0.0 {
                    return bad("x and y must be nonnegative");
                }
            }
            Mode::Hyp => {
                if t < 0.0 {
                    return bad("ell must be nonnegative");
                }
                if x < 1.0 || y < 1.0 {
                    return bad("x and y must be at least 1");
                }
            }
        }
        Ok(EvalPoint { mode, t, x, y })
    }

    pub fn trig(theta: f64, x: f64, y: f64) -> Result<Self> {
        Self::new(Mode::Trig, theta, x, y)
    }

    pub fn hyp(ell: f64, x: f64, y: f64) -> Result<Self> {
        Self::new(Mode::Hyp, ell, x, y)
    }
}

/// Conditioning flag attached to every scalar evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Regular,
    /// Within 1e-9 of the pole `x = 1` (hyp) or beyond 1e12 (trig); the value
    /// is returned but its absolute error can exceed the usual 1e-12.
    NearSingular,
    /// The value is `+∞` (hyp with `x = 1` or `y = 1`).
    AtInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarValue {
    pub value: f64,
    pub condition: Condition,
}

/// Closed form used for G.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GForm {
    /// `(c³ − 3c + 2)(x + y) − 6 atan x + 2x/(1+x²) …`
    #[default]
    Direct,
    /// `(c³ − 3c − 2)(x + y) + I(x) + I(y)` with `I(x) = 4x − 6 atan x + 2x/(1+x²)`.
    Integral,
}

/// Closed form used for F.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FForm {
    /// `Centered` for ℓ > 1, `Direct` otherwise.
    #[default]
    Auto,
    Direct,
    /// Expansion about the manifold point `p = coth(ℓ/2)`:
    /// `(C−1)(C+3)(δx+δy) + S³δxδy + Δh(x) + Δh(y)`, free of the
    /// `e^{3ℓ}`-sized cancellation of the direct form. Requires ℓ > 0.
    Centered,
}

/// `c³ − 3c + 2 = (1 − c)²(2 + c)`.
#[inline]
pub fn k_trig(c: f64) -> f64 {
    (1.0 - c) * (1.0 - c) * (2.0 + c)
}

/// `C³ − 3C + 2 = (C − 1)²(C + 2)`.
#[inline]
pub fn k_hyp(cc: f64) -> f64 {
    (cc - 1.0) * (cc - 1.0) * (cc + 2.0)
}

/// `I(x) = 4x − 6 atan x + 2x/(1+x²)`.
#[inline]
pub fn integral_term(x: f64) -> f64 {
    4.0 * x - 6.0 * atan(x) + 2.0 * x / (1.0 + x * x)
}

/// `6 atanh(1/x) + 2x/(x² − 1)` for `x > 1`.
#[inline]
pub fn hyp_term(x: f64) -> f64 {
    6.0 * atanh(1.0 / x) + 2.0 * x / ((x - 1.0) * (x + 1.0))
}

/// `(coth(ℓ/2), coth(ℓ/2) − 1)` with the second computed as `2/expm1(ℓ)`,
/// accurate to a few ulps of itself even when `coth(ℓ/2)` rounds to near 1.
fn coth_half(l: f64) -> (f64, f64) {
    let pm1 = 2.0 / expm1(l);
    (1.0 + pm1, pm1)
}

/// `z − coth(ℓ/2)` as `(z − 1) − (coth(ℓ/2) − 1)`; `z − 1` is exact for
/// `z ∈ [1, 2]`, which is where the offset is small.
#[inline]
fn offset(z: f64, pm1: f64) -> f64 {
    (z - 1.0) - pm1
}

/// Manifold coordinate `cot(θ/2)` (trig) or `coth(ℓ/2)` (hyp).
pub fn manifold_x(mode: Mode, t: f64) -> f64 {
    match mode {
        Mode::Trig => 1.0 / tan(0.5 * t),
        Mode::Hyp => 1.0 / tanh(0.5 * t),
    }
}

/// Manifold coordinate in compactified form: `π/2 − θ/2` or `ℓ/2`.
pub fn manifold_compact(mode: Mode, t: f64) -> f64 {
    match mode {
        Mode::Trig => FRAC_PI_2 - 0.5 * t,
        Mode::Hyp => 0.5 * t,
    }
}

pub fn eval_g(p: &EvalPoint, form: GForm) -> Result<ScalarValue> {
    if p.mode != Mode::Trig {
        return Err(Error::ModeMismatch { expected: Mode::Trig });
    }
    let (th, x, y) = (p.t, p.x, p.y);
    let s = sin(th);
    let c = cos(th);
    let s3 = s * s * s;
    let tail = -s3 - 6.0 * s - 6.0 * th + 6.0 * PI;
    let value = match form {
        GForm::Direct => {
            s3 * x * y + (c * c * c - 3.0 * c + 2.0) * (x + y) + tail - 6.0 * atan(x)
                + 2.0 * x / (1.0 + x * x)
                - 6.0 * atan(y)
                + 2.0 * y / (1.0 + y * y)
        }
        GForm::Integral => {
            s3 * x * y + (c * c * c - 3.0 * c - 2.0) * (x + y) + tail + integral_term(x) + integral_term(y)
        }
    };
    let condition = if x.max(y) >= 1e12 { Condition::NearSingular } else { Condition::Regular };
    Ok(ScalarValue { value, condition })
}

fn hyp_condition(x: f64, y: f64) -> Condition {
    if x == 1.0 || y == 1.0 {
        Condition::AtInfinity
    } else if x - 1.0 < 1e-9 || y - 1.0 < 1e-9 {
        Condition::NearSingular
    } else {
        Condition::Regular
    }
}

pub fn eval_f(p: &EvalPoint, form: FForm) -> Result<ScalarValue> {
    if p.mode != Mode::Hyp {
        return Err(Error::ModeMismatch { expected: Mode::Hyp });
    }
    let (l, x, y) = (p.t, p.x, p.y);
    let condition = hyp_condition(x, y);
    if condition == Condition::AtInfinity {
        return Ok(ScalarValue { value: f64::INFINITY, condition });
    }
    let centered = match form {
        FForm::Auto => l > 1.0,
        FForm::Direct => false,
        FForm::Centered => {
            if l <= 0.0 {
                return Err(Error::Domain { mode: Mode::Hyp, reason: "centered form needs ell > 0" });
            }
            true
        }
    };
    let ss = sinh(l);
    let cc = cosh(l);
    let s3 = ss * ss * ss;
    let value = if centered {
        let half = 0.5 * l;
        let (p, pm1) = coth_half(l);
        let sh = sinh(half);
        let cm1 = 2.0 * sh * sh;
        let (dx, dy) = (offset(x, pm1), offset(y, pm1));
        // 2z/(z²−1) − 2p/(p²−1) = −2(zp + 1)(z − p)/((z²−1)(p²−1))
        let pp = pm1 * (p + 1.0);
        let dh = |z: f64, d: f64| {
            let zm1 = z - 1.0;
            6.0 * (0.5 * log1p(2.0 / zm1) - half) - 2.0 * (z * p + 1.0) * d / (zm1 * (z + 1.0) * pp)
        };
        cm1 * (cc + 3.0) * (dx + dy) + s3 * dx * dy + dh(x, dx) + dh(y, dy)
    } else {
        s3 * x * y - k_hyp(cc) * (x + y) + s3 - 6.0 * ss - 6.0 * l + hyp_term(x) + hyp_term(y)
    };
    Ok(ScalarValue { value, condition })
}

/// Evaluates G or F with the default closed form for the point's mode.
pub fn eval(p: &EvalPoint) -> ScalarValue {
    match p.mode {
        Mode::Trig => eval_g(p, GForm::Direct),
        Mode::Hyp => eval_f(p, FForm::Auto),
    }
    .expect("mode checked by dispatch")
}

/// `∇G = (∂θ, ∂x, ∂y)`.
pub fn grad_g(p: &EvalPoint) -> Result<[f64; 3]> {
    if p.mode != Mode::Trig {
        return Err(Error::ModeMismatch { expected: Mode::Trig });
    }
    let (th, x, y) = (p.t, p.x, p.y);
    let s = sin(th);
    let c = cos(th);
    let s2 = s * s;
    let s3 = s2 * s;
    let k = k_trig(c);
    let dt = 3.0 * s2 * c * x * y + 3.0 * s3 * (x + y) + 3.0 * (1.0 + c) * (1.0 + c) * (c - 2.0);
    let r = |z: f64| (4.0 + 8.0 * z * z) / ((1.0 + z * z) * (1.0 + z * z));
    Ok([dt, s3 * y + k - r(x), s3 * x + k - r(y)])
}

/// `∇F = (∂ℓ, ∂x, ∂y)`; centered about the manifold for ℓ > 1.
pub fn grad_f(p: &EvalPoint) -> Result<[f64; 3]> {
    if p.mode != Mode::Hyp {
        return Err(Error::ModeMismatch { expected: Mode::Hyp });
    }
    let (l, x, y) = (p.t, p.x, p.y);
    if x == 1.0 || y == 1.0 {
        return Err(Error::Domain { mode: Mode::Hyp, reason: "gradient is unbounded at x = 1" });
    }
    let ss = sinh(l);
    let cc = cosh(l);
    let s2 = ss * ss;
    let s3 = s2 * ss;
    let q = |z: f64| 1.0 + 1.0 / ((z - 1.0) * (z + 1.0));
    if l > 1.0 {
        let half = 0.5 * l;
        let (p, pm1) = coth_half(l);
        let sh = sinh(half);
        let ch = cosh(half);
        let qp = ch * ch;
        let (dx, dy) = (offset(x, pm1), offset(y, pm1));
        let dl = 3.0 * s2 * (p * (dx + dy) + cc * dx * dy);
        // q(z) − q(p) = −δ (p + z) sinh²(ℓ/2) / (z² − 1)
        let dq = |z: f64, d: f64| -d * (p + z) * sh * sh / ((z - 1.0) * (z + 1.0));
        let gx = s3 * dy - 4.0 * dq(x, dx) * (q(x) + qp);
        let gy = s3 * dx - 4.0 * dq(y, dy) * (q(y) + qp);
        Ok([dl, gx, gy])
    } else {
        let dl = 3.0 * s2 * cc * x * y - 3.0 * s3 * (x + y) + 3.0 * (cc + 1.0) * (cc + 1.0) * (cc - 2.0);
        let tail = (1.0 + cc) * (1.0 + cc) * (2.0 - cc);
        Ok([dl, s3 * y - 4.0 * q(x) * q(x) + tail, s3 * x - 4.0 * q(y) * q(y) + tail])
    }
}

pub fn grad(p: &EvalPoint) -> Result<[f64; 3]> {
    match p.mode {
        Mode::Trig => grad_g(p),
        Mode::Hyp => grad_f(p),
    }
}

/// Hessian in `(x, y)` only.
pub fn hessian_xy(p: &EvalPoint) -> Result<[[f64; 2]; 2]> {
    let (t, x, y) = (p.t, p.x, p.y);
    match p.mode {
        Mode::Trig => {
            let s = sin(t);
            let d = |z: f64| {
                let w = 1.0 + z * z;
                16.0 * z * z * z / (w * w * w)
            };
            Ok([[d(x), s * s * s], [s * s * s, d(y)]])
        }
        Mode::Hyp => {
            if x == 1.0 || y == 1.0 {
                return Err(Error::Domain { mode: Mode::Hyp, reason: "Hessian is unbounded at x = 1" });
            }
            let ss = sinh(t);
            let d = |z: f64| {
                let w = (z - 1.0) * (z + 1.0);
                16.0 * z * z * z / (w * w * w)
            };
            Ok([[d(x), ss * ss * ss], [ss * ss * ss, d(y)]])
        }
    }
}

/// Full Hessian in `(t, x, y)`.
pub fn hessian(p: &EvalPoint) -> Result<[[f64; 3]; 3]> {
    let hxy = hessian_xy(p)?;
    let (t, x, y) = (p.t, p.x, p.y);
    let (tt, tx, ty) = match p.mode {
        Mode::Trig => {
            let s = sin(t);
            let c = cos(t);
            let s2 = s * s;
            let s3 = s2 * s;
            (
                3.0 * (2.0 * s * c * c - s3) * x * y + 9.0 * s2 * c * (x + y) + 9.0 * s3,
                3.0 * s2 * c * y + 3.0 * s3,
                3.0 * s2 * c * x + 3.0 * s3,
            )
        }
        Mode::Hyp => {
            let ss = sinh(t);
            let cc = cosh(t);
            let s2 = ss * ss;
            let s3 = s2 * ss;
            (
                3.0 * (2.0 * ss * cc * cc + s3) * x * y - 9.0 * s2 * cc * (x + y) + 9.0 * s3,
                3.0 * s2 * cc * y - 3.0 * s3,
                3.0 * s2 * cc * x - 3.0 * s3,
            )
        }
    };
    Ok([[tt, tx, ty], [tx, hxy[0][0], hxy[0][1]], [ty, hxy[1][0], hxy[1][1]]])
}

/// `b(u) = −6u + sin 2u`, i.e. `−6 atan x + 2x/(1+x²)` at `x = tan u`.
#[inline]
pub fn b_trig(u: f64) -> f64 {
    -6.0 * u + sin(2.0 * u)
}

/// `h(w) = 6w + sinh 2w`, i.e. `6 atanh(1/x) + 2x/(x²−1)` at `x = coth w`.
#[inline]
pub fn h_hyp(w: f64) -> f64 {
    6.0 * w + sinh(2.0 * w)
}

/// G at `(θ, tan u, tan v)` for `u, v ∈ [0, π/2)`.
pub fn eval_g_compact(theta: f64, u: f64, v: f64) -> f64 {
    let s = sin(theta);
    let c = cos(theta);
    let (x, y) = (tan(u), tan(v));
    s * s * s * x * y + k_trig(c) * (x + y) - s * s * s - 6.0 * s - 6.0 * theta + 6.0 * PI + b_trig(u) + b_trig(v)
}

/// F at `(ℓ, coth w, coth v)` for `w, v > 0`; centered about `w = v = ℓ/2`
/// when ℓ > 1.
pub fn eval_f_compact(ell: f64, w: f64, v: f64) -> f64 {
    let ss = sinh(ell);
    let cc = cosh(ell);
    let s3 = ss * ss * ss;
    if ell > 1.0 {
        let half = 0.5 * ell;
        let sh = sinh(half);
        let delta = |z: f64| sinh(half - z) / (sinh(z) * sh);
        let dh = |z: f64| 6.0 * (z - half) + 2.0 * cosh(z + half) * sinh(z - half);
        let (dx, dy) = (delta(w), delta(v));
        2.0 * sh * sh * (cc + 3.0) * (dx + dy) + s3 * dx * dy + dh(w) + dh(v)
    } else {
        let (x, y) = (1.0 / tanh(w), 1.0 / tanh(v));
        s3 * x * y - k_hyp(cc) * (x + y) + s3 - 6.0 * ss - 6.0 * ell + h_hyp(w) + h_hyp(v)
    }
}

/// Gradient of `(θ, u, v) ↦ G(θ, tan u, tan v)`.
pub fn grad_g_compact(theta: f64, u: f64, v: f64) -> [f64; 3] {
    let (x, y) = (tan(u), tan(v));
    let s = sin(theta);
    let c = cos(theta);
    let s2 = s * s;
    let s3 = s2 * s;
    let k = k_trig(c);
    let dt = 3.0 * s2 * c * x * y + 3.0 * s3 * (x + y) + 3.0 * (1.0 + c) * (1.0 + c) * (c - 2.0);
    let du = |other: f64, a: f64| {
        let ca = cos(a);
        (s3 * other + k) / (ca * ca) - 8.0 + 4.0 * ca * ca
    };
    [dt, du(y, u), du(x, v)]
}

/// Gradient of `(ℓ, w, v) ↦ F(ℓ, coth w, coth v)`.
pub fn grad_f_compact(ell: f64, w: f64, v: f64) -> [f64; 3] {
    let ss = sinh(ell);
    let cc = cosh(ell);
    let s2 = ss * ss;
    let s3 = s2 * ss;
    let sw = sinh(w);
    let sv = sinh(v);
    if ell > 1.0 {
        let half = 0.5 * ell;
        let sh = sinh(half);
        let ch = cosh(half);
        let p = ch / sh;
        let delta = |z: f64| sinh(half - z) / (sinh(z) * sh);
        let (dx, dy) = (delta(w), delta(v));
        let dl = 3.0 * s2 * (p * (dx + dy) + cc * dx * dy);
        // cosh²z − cosh²(ℓ/2) = sinh(z + ℓ/2) sinh(z − ℓ/2)
        let dq = |z: f64| sinh(z + half) * sinh(z - half) * (cosh(z) * cosh(z) + ch * ch);
        let gx = s3 * dy - 4.0 * dq(w);
        let gy = s3 * dx - 4.0 * dq(v);
        [dl, -gx / (sw * sw), -gy / (sv * sv)]
    } else {
        let (x, y) = (1.0 / tanh(w), 1.0 / tanh(v));
        let dl = 3.0 * s2 * cc * x * y - 3.0 * s3 * (x + y) + 3.0 * (cc + 1.0) * (cc + 1.0) * (cc - 2.0);
        let tail = (1.0 + cc) * (1.0 + cc) * (2.0 - cc);
        let c4 = |z: f64| {
            let c = cosh(z);
            c * c * c * c
        };
        let gx = s3 * y - 4.0 * c4(w) + tail;
        let gy = s3 * x - 4.0 * c4(v) + tail;
        [dl, -gx / (sw * sw), -gy / (sv * sv)]
    }
}

/// Compact evaluator for either mode.
pub fn eval_compact(mode: Mode, t: f64, u: f64, v: f64) -> f64 {
    match mode {
        Mode::Trig => eval_g_compact(t, u, v),
        Mode::Hyp => eval_f_compact(t, u, v),
    }
}

pub fn grad_compact(mode: Mode, t: f64, u: f64, v: f64) -> [f64; 3] {
    match mode {
        Mode::Trig => grad_g_compact(t, u, v),
        Mode::Hyp => grad_f_compact(t, u, v),
    }
}

/// Maps a compact coordinate back to `x` (`tan` or `coth`).
pub fn from_compact(mode: Mode, u: f64) -> f64 {
    match mode {
        Mode::Trig => {
            if u >= FRAC_PI_2 {
                f64::INFINITY
            } else {
                tan(u)
            }
        }
        Mode::Hyp => 1.0 / tanh(u),
    }
}

/// Maps `x` to its compact coordinate (`atan` or `acoth`).
pub fn to_compact(mode: Mode, x: f64) -> f64 {
    match mode {
        Mode::Trig => atan(x),
        Mode::Hyp => atanh(1.0 / x),
    }
}
