//! Interval enclosures of G, F and their derivatives over boxes in the
//! original coordinates, assembled from monotone building blocks.

use super::{mono_dec, mono_inc, Interval, FRAC_PI_2, PI};
use crate::error::{Error, Result};
use crate::scalar::Mode;

type I = Interval;

/// Box in `(t, x, y)`, clipped to the mode's domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box3 {
    pub mode: Mode,
    pub t: Interval,
    pub x: Interval,
    pub y: Interval,
}

impl Box3 {
    /// Clips to `θ ∈ [0, π], x, y ≥ 0` (trig) or `ℓ ≥ 0, x, y ≥ 1` (hyp);
    /// an empty intersection is a domain error.
    pub fn new(mode: Mode, t: Interval, x: Interval, y: Interval) -> Result<Box3> {
        let (tr, xr) = match mode {
            Mode::Trig => (I::new(0.0, PI.hi), I::new(0.0, f64::INFINITY)),
            Mode::Hyp => (I::new(0.0, f64::INFINITY), I::new(1.0, f64::INFINITY)),
        };
        let b = Box3 { mode, t: t.intersect(&tr), x: x.intersect(&xr), y: y.intersect(&xr) };
        if b.t.is_empty() || b.x.is_empty() || b.y.is_empty() {
            return Err(Error::Domain { mode, reason: "box does not meet the domain" });
        }
        Ok(b)
    }

    pub fn point(mode: Mode, t: f64, x: f64, y: f64) -> Result<Box3> {
        Box3::new(mode, I::point(t), I::point(x), I::point(y))
    }

    pub fn contains(&self, t: f64, x: f64, y: f64) -> bool {
        self.t.contains(t) && self.x.contains(x) && self.y.contains(y)
    }
}

// ---- trigonometric building blocks, θ ∈ [0, π] ----

fn k_trig_pt(t: I) -> I {
    let c = t.cos();
    (1.0 - c).sqr() * (2.0 + c)
}

/// `(1 − cos θ)²(2 + cos θ)`, increasing in θ.
pub fn k_of_theta(t: I) -> I {
    mono_inc(t, k_trig_pt)
}

fn km4_pt(t: I) -> I {
    let c = t.cos();
    -((1.0 + c).sqr() * (2.0 - c))
}

/// `k − 4 = −(1 + cos θ)²(2 − cos θ)`, increasing in θ.
pub fn km4_of_theta(t: I) -> I {
    mono_inc(t, km4_pt)
}

fn tail_trig_pt(t: I) -> I {
    let s = sin_theta(t);
    -s.powi(3) - 6.0 * s - 6.0 * t + 6.0 * PI
}

/// `−sin³θ − 6 sin θ − 6θ + 6π`, decreasing on `[0, π]`.
pub fn tail_of_theta(t: I) -> I {
    mono_dec(t, tail_trig_pt)
}

fn dtheta_tail_pt(t: I) -> I {
    let c = t.cos();
    3.0 * (1.0 + c).sqr() * (c - 2.0)
}

/// `3(1 + cos θ)²(cos θ − 2)`, increasing in θ.
pub fn dtheta_tail_of_theta(t: I) -> I {
    mono_inc(t, dtheta_tail_pt)
}

/// `sin θ` for `θ ∈ [0, π]`. Boxes reach `PI.hi`, just past π, where the
/// plain enclosure dips below zero; only `θ ≤ π` is in the domain.
pub fn sin_theta(t: I) -> I {
    let s = t.sin();
    I::new(s.lo.clamp(0.0, 1.0), s.hi.clamp(0.0, 1.0))
}

/// `sin³θ`.
pub fn s3_of_theta(t: I) -> I {
    sin_theta(t).powi(3)
}

fn b_x_pt(x: I) -> I {
    if x.lo.is_infinite() {
        return -3.0 * PI;
    }
    -6.0 * x.atan() + 2.0 * x / (1.0 + x.sqr())
}

/// `−6 atan x + 2x/(1 + x²)`, decreasing; `−3π` at infinity.
pub fn b_of_x(x: I) -> I {
    mono_dec(x, b_x_pt)
}

/// Coefficients of `Ã(z) = A(z)/z⁵ = Σ_{n≥2} (−1)ⁿ (4n − 4)/(2n + 1) z^{2n−4}`.
const ATILDE_TERMS: usize = 40;

/// `Ã(z) = A(z)/z⁵` for `|z| ≤ 0.6`, with `A(z) = 4z − 6 atan z + 2z/(1+z²)`;
/// alternating power series with a rigorous tail bound.
pub fn atilde(z: I) -> I {
    let z2 = z.sqr();
    assert!(z2.hi <= 0.36 + 1e-12, "atilde called outside its series range");
    let mut acc = I::ZERO;
    for n in (2..2 + ATILDE_TERMS).rev() {
        let coef = I::point((4 * n - 4) as f64) / I::point((2 * n + 1) as f64);
        let coef = if n % 2 == 0 { coef } else { -coef };
        acc = acc * z2 + coef;
    }
    // |coefficients| < 2, so the tail is at most 2 z^{2N}/(1 − z²) with N the
    // first omitted exponent index.
    let n = (2 + ATILDE_TERMS) as u32;
    let tail = 2.0 * z2.hi.powi((n - 2) as i32) / (1.0 - z2.hi) * 1.0001;
    acc + I::new(-tail, tail)
}

fn a_x_pt(x: I) -> I {
    if x.lo.is_infinite() {
        return I::new(f64::MAX, f64::INFINITY);
    }
    if x.hi <= 0.5 {
        x.powi(5) * atilde(x)
    } else {
        4.0 * x - 6.0 * x.atan() + 2.0 * x / (1.0 + x.sqr())
    }
}

/// `A(x) = 4x − 6 atan x + 2x/(1 + x²) ≥ 0`, increasing; `A ~ 4x⁵/5` at 0.
pub fn a_of_x(x: I) -> I {
    mono_inc(x, a_x_pt).max(I::ZERO)
}

fn r_x_pt(x: I) -> I {
    if x.lo.is_infinite() {
        return I::ZERO;
    }
    let w = 1.0 + x.sqr();
    (4.0 + 8.0 * x.sqr()) / w.sqr()
}

/// `r(x) = (4 + 8x²)/(1 + x²)²`, decreasing from 4 to 0.
pub fn r_of_x(x: I) -> I {
    mono_dec(x, r_x_pt).intersect(&I::new(0.0, 4.0))
}

fn d_x_pt(x: I) -> I {
    if x.lo.is_infinite() {
        return I::ZERO;
    }
    16.0 * x.powi(3) / (1.0 + x.sqr()).powi(3)
}

/// `16x³/(1 + x²)³ = ∂²G/∂x²`; unimodal with maximum 2 at `x = 1`.
pub fn d_of_x(x: I) -> I {
    if x.is_empty() {
        return x;
    }
    let lo = d_x_pt(I::point(x.lo)).lo.min(d_x_pt(I::point(x.hi)).lo);
    let hi = if x.contains(1.0) {
        2.0f64.next_up()
    } else {
        d_x_pt(I::point(x.lo)).hi.max(d_x_pt(I::point(x.hi)).hi)
    };
    I::new(lo.max(0.0), hi)
}

// ---- hyperbolic building blocks, ℓ ≥ 0, x ≥ 1 ----

fn k_hyp_pt(l: I) -> I {
    let c = l.cosh();
    (c - 1.0).sqr() * (c + 2.0)
}

/// `(cosh ℓ − 1)²(cosh ℓ + 2)`, increasing.
pub fn k_of_ell(l: I) -> I {
    mono_inc(l, k_hyp_pt)
}

fn tail_hyp_pt(l: I) -> I {
    let s = l.sinh();
    s.powi(3) - 6.0 * s - 6.0 * l
}

/// `ℓ* = acosh 2`, the minimizer of the hyperbolic tail.
const ELL_STAR: f64 = 1.3169578969248166;

/// `sinh³ℓ − 6 sinh ℓ − 6ℓ`: decreasing up to `acosh 2`, increasing after.
pub fn tail_of_ell(l: I) -> I {
    if l.is_empty() {
        return l;
    }
    let margin = 1e-9;
    if l.hi <= ELL_STAR - margin {
        mono_dec(l, tail_hyp_pt)
    } else if l.lo >= ELL_STAR + margin {
        mono_inc(l, tail_hyp_pt)
    } else {
        let a = tail_hyp_pt(I::point(l.lo));
        let b = tail_hyp_pt(I::point(l.hi));
        let m = tail_hyp_pt(I::new(ELL_STAR - margin, ELL_STAR + margin));
        I::new(m.lo.min(a.lo).min(b.lo), a.hi.max(b.hi))
    }
}

fn dl_tail_pt(l: I) -> I {
    let c = l.cosh();
    3.0 * (c + 1.0).sqr() * (c - 2.0)
}

/// `3(cosh ℓ + 1)²(cosh ℓ − 2)`, increasing.
pub fn dl_tail_of_ell(l: I) -> I {
    mono_inc(l, dl_tail_pt)
}

/// `(1 + cosh ℓ)²(2 − cosh ℓ)`, decreasing.
pub fn hyp_grad_tail(l: I) -> I {
    mono_dec(l, |l| {
        let c = l.cosh();
        (1.0 + c).sqr() * (2.0 - c)
    })
}

fn hterm_pt(x: I) -> I {
    if x.lo <= 1.0 {
        return I::new(f64::MAX, f64::INFINITY);
    }
    if x.hi.is_infinite() {
        return I::ZERO;
    }
    6.0 * x.recip().atanh() + 2.0 * x / ((x - 1.0) * (x + 1.0))
}

/// `6 atanh(1/x) + 2x/(x² − 1)`, decreasing, `+∞` at `x = 1`.
pub fn hterm_of_x(x: I) -> I {
    mono_dec(x, hterm_pt).max(I::ZERO)
}

fn q_pt(x: I) -> I {
    if x.lo <= 1.0 {
        return I::new(f64::MAX, f64::INFINITY);
    }
    if x.hi.is_infinite() {
        return I::ONE;
    }
    x.sqr() / ((x - 1.0) * (x + 1.0))
}

/// `q(x) = x²/(x² − 1)`, decreasing from `+∞` to 1.
pub fn q_of_x(x: I) -> I {
    mono_dec(x, q_pt).max(I::ONE)
}

fn dh_pt(x: I) -> I {
    if x.lo <= 1.0 {
        return I::new(f64::MAX, f64::INFINITY);
    }
    if x.hi.is_infinite() {
        return I::ZERO;
    }
    16.0 * x.powi(3) / ((x - 1.0) * (x + 1.0)).powi(3)
}

/// `16x³/(x² − 1)³ = ∂²F/∂x²`, decreasing.
pub fn dh_of_x(x: I) -> I {
    mono_dec(x, dh_pt).max(I::ZERO)
}

fn coth_half_pt(l: I) -> I {
    (0.5 * l).coth()
}

/// `coth(ℓ/2)`, decreasing.
pub fn coth_half(l: I) -> I {
    mono_dec(l, coth_half_pt)
}

fn cm1c3_pt(l: I) -> I {
    2.0 * (0.5 * l).sinh().sqr() * (l.cosh() + 3.0)
}

/// `(cosh ℓ − 1)(cosh ℓ + 3)` written as `2 sinh²(ℓ/2)(cosh ℓ + 3)`, increasing.
pub fn cm1c3(l: I) -> I {
    mono_inc(l, cm1c3_pt)
}

/// `6(atanh(1/x) − ℓ/2) + (2x/(x² − 1) − sinh ℓ)`: decreasing in `x` and in ℓ.
fn dh_center(x: I, l: I) -> I {
    let f = |x: I, l: I| {
        if x.lo <= 1.0 {
            return I::new(f64::MAX, f64::INFINITY);
        }
        6.0 * (x.recip().atanh() - 0.5 * l) + (2.0 * x / ((x - 1.0) * (x + 1.0)) - l.sinh())
    };
    if x.hi.is_infinite() {
        // atanh(1/x) ≥ 0 and 2x/(x²−1) ≥ 0 as x → ∞.
        let lo = (-3.0 * l - l.sinh()).lo;
        return I::new(lo, f(I::point(x.lo), I::point(l.lo)).hi);
    }
    I::new(f(I::point(x.hi), I::point(l.hi)).lo, f(I::point(x.lo), I::point(l.lo)).hi)
}

// ---- enclosures of G and F ----

fn require(b: &Box3, mode: Mode) -> Result<()> {
    if b.mode != mode {
        return Err(Error::ModeMismatch { expected: mode });
    }
    Ok(())
}

/// Enclosure of G over the box.
pub fn eval_g_interval(b: &Box3) -> Result<Interval> {
    require(b, Mode::Trig)?;
    let (t, x, y) = (b.t, b.x, b.y);
    let s3 = s3_of_theta(t);
    let tail = tail_of_theta(t);
    let e1 = s3 * x * y + k_of_theta(t) * (x + y) + tail + b_of_x(x) + b_of_x(y);
    if !(x.hi.is_finite() && y.hi.is_finite()) {
        return Ok(e1);
    }
    let e2 = s3 * x * y + km4_of_theta(t) * (x + y) + tail + a_of_x(x) + a_of_x(y);
    Ok(meet(e1, e2))
}

/// Intersection of two enclosures of the same quantity.
pub(crate) fn meet(a: Interval, b: Interval) -> Interval {
    let m = a.intersect(&b);
    debug_assert!(!m.is_empty(), "disjoint enclosures {a:?} {b:?}");
    if m.is_empty() {
        a.hull(&b)
    } else {
        m
    }
}

/// Enclosure of F over the box; `+∞` upper bound when the box touches `x = 1`.
pub fn eval_f_interval(b: &Box3) -> Result<Interval> {
    require(b, Mode::Hyp)?;
    let (l, x, y) = (b.t, b.x, b.y);
    if !(x.hi.is_finite() && y.hi.is_finite()) {
        return Ok(Interval::ENTIRE);
    }
    let s3 = l.sinh().powi(3);
    let direct = s3 * x * y - k_of_ell(l) * (x + y) + tail_of_ell(l) + hterm_of_x(x) + hterm_of_x(y);
    if l.lo <= 0.0 || x.lo <= 1.0 || y.lo <= 1.0 {
        return Ok(direct);
    }
    let p = coth_half(l);
    let (dx, dy) = (x - p, y - p);
    let centered = cm1c3(l) * (dx + dy) + s3 * dx * dy + dh_center(x, l) + dh_center(y, l);
    Ok(meet(direct, centered))
}

pub fn eval_interval(b: &Box3) -> Interval {
    match b.mode {
        Mode::Trig => eval_g_interval(b),
        Mode::Hyp => eval_f_interval(b),
    }
    .expect("mode checked by dispatch")
}

/// Enclosures of `(∂θ G, ∂x G, ∂y G)`.
pub fn eval_grad_g_interval(b: &Box3) -> Result<[Interval; 3]> {
    require(b, Mode::Trig)?;
    let (t, x, y) = (b.t, b.x, b.y);
    let s = sin_theta(t);
    let c = t.cos();
    let s2 = s.sqr();
    let s3 = s3_of_theta(t);
    let dt = 3.0 * s2 * c * x * y + 3.0 * s3 * (x + y) + dtheta_tail_of_theta(t);
    let k = k_of_theta(t);
    let km4 = km4_of_theta(t);
    let part = |other: I, z: I| {
        let a = s3 * other + k - r_of_x(z);
        if z.hi.is_finite() {
            // 4 − r(z) = 4z⁴/(1 + z²)², increasing.
            let ap = mono_inc(z, |z| 4.0 * z.powi(4) / (1.0 + z.sqr()).sqr());
            meet(a, s3 * other + km4 + ap)
        } else {
            a
        }
    };
    Ok([dt, part(y, x), part(x, y)])
}

/// Enclosures of `(∂ℓ F, ∂x F, ∂y F)`.
pub fn eval_grad_f_interval(b: &Box3) -> Result<[Interval; 3]> {
    require(b, Mode::Hyp)?;
    let (l, x, y) = (b.t, b.x, b.y);
    if !(x.hi.is_finite() && y.hi.is_finite()) || x.lo <= 1.0 || y.lo <= 1.0 {
        let dl = if x.hi.is_finite() && y.hi.is_finite() { hyp_dl_direct(l, x, y) } else { Interval::ENTIRE };
        return Ok([dl, Interval::ENTIRE, Interval::ENTIRE]);
    }
    let s = l.sinh();
    let s3 = s.powi(3);
    let tail = hyp_grad_tail(l);
    let qx = q_of_x(x);
    let qy = q_of_x(y);
    let mut dl = hyp_dl_direct(l, x, y);
    let mut gx = s3 * y - 4.0 * qx.sqr() + tail;
    let mut gy = s3 * x - 4.0 * qy.sqr() + tail;
    if l.lo > 0.0 {
        let p = coth_half(l);
        let sh2 = (0.5 * l).sinh().sqr();
        let qp = (0.5 * l).cosh().sqr();
        let (dx, dy) = (x - p, y - p);
        let dlc = 3.0 * s.sqr() * (p * (dx + dy) + l.cosh() * dx * dy);
        let dq = |z: I, d: I| -(d * (p + z) * sh2 / ((z - 1.0) * (z + 1.0)));
        dl = meet(dl, dlc);
        gx = meet(gx, s3 * dy - 4.0 * dq(x, dx) * (qx + qp));
        gy = meet(gy, s3 * dx - 4.0 * dq(y, dy) * (qy + qp));
    }
    Ok([dl, gx, gy])
}

fn hyp_dl_direct(l: I, x: I, y: I) -> I {
    let s = l.sinh();
    let c = l.cosh();
    3.0 * s.sqr() * c * x * y - 3.0 * s.powi(3) * (x + y) + dl_tail_of_ell(l)
}

pub fn eval_grad_interval(b: &Box3) -> [Interval; 3] {
    match b.mode {
        Mode::Trig => eval_grad_g_interval(b),
        Mode::Hyp => eval_grad_f_interval(b),
    }
    .expect("mode checked by dispatch")
}

/// Enclosure of the `(x, y)` Hessian block.
pub fn eval_hessian_xy_interval(b: &Box3) -> [[Interval; 2]; 2] {
    let (off, dx, dy) = match b.mode {
        Mode::Trig => (s3_of_theta(b.t), d_of_x(b.x), d_of_x(b.y)),
        Mode::Hyp => (b.t.sinh().powi(3), dh_of_x(b.x), dh_of_x(b.y)),
    };
    [[dx, off], [off, dy]]
}

/// Convenience constants for callers building boxes in compact coordinates.
pub fn half_pi() -> Interval {
    FRAC_PI_2
}
