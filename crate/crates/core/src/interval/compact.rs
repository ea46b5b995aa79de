//! Enclosures in compactified coordinates: `x = tan u` (trig) and
//! `x = coth w` (hyp). The certifier works here, where the equality manifold
//! is the straight line `u = v = π/2 − θ/2` resp. `w_x = w_y = ℓ/2`.

use serde::{Deserialize, Serialize};

use super::eval::*;
use super::{mono_dec, mono_inc, Interval, FRAC_PI_2};
use crate::scalar::Mode;

type I = Interval;

/// Box in compactified coordinates `(t, u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CBox {
    pub t: Interval,
    pub u: Interval,
    pub v: Interval,
}

impl CBox {
    pub fn new(t: (f64, f64), u: (f64, f64), v: (f64, f64)) -> CBox {
        CBox { t: I::new(t.0, t.1), u: I::new(u.0, u.1), v: I::new(v.0, v.1) }
    }

    pub fn dims(&self) -> [Interval; 3] {
        [self.t, self.u, self.v]
    }

    pub fn from_dims(d: [Interval; 3]) -> CBox {
        CBox { t: d[0], u: d[1], v: d[2] }
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty() || self.u.is_empty() || self.v.is_empty()
    }

    pub fn contains(&self, t: f64, u: f64, v: f64) -> bool {
        self.t.contains(t) && self.u.contains(u) && self.v.contains(v)
    }

    pub fn subset(&self, o: &CBox) -> bool {
        self.t.subset(&o.t) && self.u.subset(&o.u) && self.v.subset(&o.v)
    }

    pub fn mid(&self) -> [f64; 3] {
        [self.t.mid(), self.u.mid(), self.v.mid()]
    }

    /// Bisects dimension `d`.
    pub fn split(&self, d: usize) -> (CBox, CBox) {
        let mut a = self.dims();
        let mut b = a;
        let (l, r) = a[d].bisect();
        a[d] = l;
        b[d] = r;
        (CBox::from_dims(a), CBox::from_dims(b))
    }

    pub fn as_array(&self) -> [[f64; 2]; 3] {
        [[self.t.lo, self.t.hi], [self.u.lo, self.u.hi], [self.v.lo, self.v.hi]]
    }
}

/// `x` from a compact coordinate: `tan u` or `coth w`.
pub fn x_of_compact(mode: Mode, u: Interval) -> Interval {
    match mode {
        Mode::Trig => u.intersect(&I::new(0.0, FRAC_PI_2.hi)).tan(),
        Mode::Hyp => u.coth(),
    }
}

/// Compact coordinate from `x`: `atan x` or `atanh(1/x)`.
pub fn compact_of_x(mode: Mode, x: Interval) -> Interval {
    match mode {
        Mode::Trig => x.atan(),
        Mode::Hyp => x.recip().atanh(),
    }
}

/// Interval-sound compactification of a box.
pub fn compactify_box(b: &Box3) -> CBox {
    CBox { t: b.t, u: compact_of_x(b.mode, b.x), v: compact_of_x(b.mode, b.y) }
}

/// Interval-sound inverse of [`compactify_box`].
pub fn expand_box(mode: Mode, b: &CBox) -> Box3 {
    Box3 { mode, t: b.t, x: x_of_compact(mode, b.u), y: x_of_compact(mode, b.v) }
}

/// Widens a point at the f64 value of π/2 so that it covers the real π/2.
fn cover_half_pi(u: I) -> I {
    if u.hi >= core::f64::consts::FRAC_PI_2 {
        I::new(u.lo, FRAC_PI_2.hi)
    } else {
        u
    }
}

fn b_u_pt(u: I) -> I {
    let u = cover_half_pi(u);
    -6.0 * u + (2.0 * u).sin()
}

/// `b(u) = −6u + sin 2u`, decreasing.
pub fn b_of_u(u: I) -> I {
    mono_dec(u, b_u_pt)
}

fn h_w_pt(w: I) -> I {
    6.0 * w + (2.0 * w).sinh()
}

/// `h(w) = 6w + sinh 2w`, increasing.
pub fn h_of_w(w: I) -> I {
    mono_inc(w, h_w_pt)
}

/// `tan²u · sin²u`, increasing on `[0, π/2)`.
fn tan2sin2(u: I) -> I {
    mono_inc(u, |p| {
        let x = p.tan();
        if x.hi.is_infinite() {
            return I::new(f64::MAX, f64::INFINITY);
        }
        x.sqr() * p.sin().sqr()
    })
}

/// `coth w − coth(ℓ/2) = sinh(ℓ/2 − w)/(sinh w · sinh(ℓ/2))`: decreasing in
/// `w`, increasing in ℓ.
fn delta_w(w: I, l: I) -> I {
    let f = |w: I, l: I| {
        let h = 0.5 * l;
        (h - w).sinh() / (w.sinh() * h.sinh())
    };
    if w.is_point() && l.is_point() {
        return f(w, l);
    }
    let lo = if w.hi.is_infinite() { (I::ONE - coth_half(I::point(l.lo))).lo } else { f(I::point(w.hi), I::point(l.lo)).lo };
    I::new(lo, f(I::point(w.lo), I::point(l.hi)).hi)
}

/// `6(w − ℓ/2) + 2 cosh(w + ℓ/2) sinh(w − ℓ/2)`: increasing in `w`,
/// decreasing in ℓ.
fn dh_w(w: I, l: I) -> I {
    let f = |w: I, l: I| {
        let h = 0.5 * l;
        6.0 * (w - h) + 2.0 * (w + h).cosh() * (w - h).sinh()
    };
    if w.is_point() && l.is_point() {
        return f(w, l);
    }
    I::new(f(I::point(w.lo), I::point(l.hi)).lo, f(I::point(w.hi), I::point(l.lo)).hi)
}

/// Naive enclosure of G resp. F over a compact box (no mean-value form).
pub fn value_naive(mode: Mode, b: &CBox) -> Interval {
    match mode {
        Mode::Trig => {
            let (t, u, v) = (b.t, b.u, b.v);
            let x = x_of_compact(mode, u);
            let y = x_of_compact(mode, v);
            let s3 = s3_of_theta(t);
            let tail = tail_of_theta(t);
            let e1 = s3 * x * y + k_of_theta(t) * (x + y) + tail + b_of_u(u) + b_of_u(v);
            if !(x.hi.is_finite() && y.hi.is_finite()) {
                return e1;
            }
            let e2 = s3 * x * y + km4_of_theta(t) * (x + y) + tail + a_of_x(x) + a_of_x(y);
            meet(e1, e2)
        }
        Mode::Hyp => {
            let (l, w, v) = (b.t, b.u, b.v);
            if w.lo <= 0.0 || v.lo <= 0.0 {
                return Interval::ENTIRE;
            }
            let x = w.coth();
            let y = v.coth();
            let s3 = l.sinh().powi(3);
            let direct = s3 * x * y - k_of_ell(l) * (x + y) + tail_of_ell(l) + h_of_w(w) + h_of_w(v);
            if l.lo <= 0.0 {
                return direct;
            }
            let (dx, dy) = (delta_w(w, l), delta_w(v, l));
            let centered = cm1c3(l) * (dx + dy) + s3 * dx * dy + dh_w(w, l) + dh_w(v, l);
            meet(direct, centered)
        }
    }
}

/// Enclosure of the gradient in compact coordinates.
pub fn grad_compact_interval(mode: Mode, b: &CBox) -> [Interval; 3] {
    match mode {
        Mode::Trig => {
            let (t, u, v) = (b.t, b.u, b.v);
            let x = x_of_compact(mode, u);
            let y = x_of_compact(mode, v);
            let s = sin_theta(t);
            let c = t.cos();
            let s3 = s3_of_theta(t);
            let dt = 3.0 * s.sqr() * c * x * y + 3.0 * s3 * (x + y) + dtheta_tail_of_theta(t);
            let km4 = km4_of_theta(t);
            let du = |other: I, z: I, a: I| {
                if !z.hi.is_finite() {
                    return Interval::ENTIRE;
                }
                (s3 * other + km4) * (1.0 + z.sqr()) + 4.0 * tan2sin2(a)
            };
            [dt, du(y, x, u), du(x, y, v)]
        }
        Mode::Hyp => {
            let (l, w, v) = (b.t, b.u, b.v);
            if w.lo <= 0.0 || v.lo <= 0.0 {
                return [Interval::ENTIRE; 3];
            }
            let x = w.coth();
            let y = v.coth();
            let s = l.sinh();
            let cc = l.cosh();
            let s3 = s.powi(3);
            let mut dl = 3.0 * s.sqr() * cc * x * y - 3.0 * s3 * (x + y) + dl_tail_of_ell(l);
            let tail = hyp_grad_tail(l);
            let c4 = |z: I| mono_inc(z, |p| p.cosh().powi(4));
            let mut gx = s3 * y - 4.0 * c4(w) + tail;
            let mut gy = s3 * x - 4.0 * c4(v) + tail;
            if l.lo > 0.0 {
                let h = 0.5 * l;
                let p = coth_half(l);
                let (dx, dy) = (delta_w(w, l), delta_w(v, l));
                dl = meet(dl, 3.0 * s.sqr() * (p * (dx + dy) + cc * dx * dy));
                let ch2 = h.cosh().sqr();
                let dq = |z: I| (z + h).sinh() * (z - h).sinh() * (z.cosh().sqr() + ch2);
                gx = meet(gx, s3 * dy - 4.0 * dq(w));
                gy = meet(gy, s3 * dx - 4.0 * dq(v));
            }
            [dl, -(gx / w.sinh().sqr()), -(gy / v.sinh().sqr())]
        }
    }
}

/// Value and gradient enclosure over a compact box.
#[derive(Clone, Copy, Debug)]
pub struct Enclosure {
    pub value: Interval,
    pub grad: Option<[Interval; 3]>,
    /// Whether the mean-value form tightened the value.
    pub refined: bool,
}

/// Mean-value form about the box midpoint, when the gradient is bounded.
pub fn value_mvf(mode: Mode, b: &CBox, grad: &[Interval; 3]) -> Option<Interval> {
    if !grad.iter().all(|g| g.is_finite()) || !b.dims().iter().all(|d| d.is_finite()) {
        return None;
    }
    let m = b.mid();
    let mb = CBox { t: I::point(m[0]), u: I::point(m[1]), v: I::point(m[2]) };
    let mut acc = value_naive(mode, &mb);
    for (i, d) in b.dims().iter().enumerate() {
        acc = acc + grad[i] * (*d - m[i]);
    }
    Some(acc)
}

/// Enclosure used by the branch-and-bound: the naive form decides when it
/// can; otherwise the gradient is enclosed and the mean-value form is
/// intersected in.
pub fn enclose(mode: Mode, b: &CBox, threshold: f64) -> Enclosure {
    let naive = value_naive(mode, b);
    if naive.lo > threshold {
        return Enclosure { value: naive, grad: None, refined: false };
    }
    let grad = grad_compact_interval(mode, b);
    match value_mvf(mode, b, &grad) {
        Some(mvf) => {
            let refined = mvf.lo > naive.lo;
            Enclosure { value: meet(naive, mvf), grad: Some(grad), refined }
        }
        None => Enclosure { value: naive, grad: Some(grad), refined: false },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar;

    #[test]
    fn point_boxes_match_scalar() {
        for &(t, u, v) in &[(0.3, 0.4, 1.2), (2.0, 0.2, 0.9), (3.1, 0.01, 0.3), (0.1, 1.5, 0.2)] {
            let want = scalar::eval_g_compact(t, u, v);
            let e = value_naive(Mode::Trig, &CBox::new((t, t), (u, u), (v, v)));
            assert!(e.contains(want) || (e.mid() - want).abs() < 1e-12, "{want} {e:?}");
            let g = scalar::grad_g_compact(t, u, v);
            let ge = grad_compact_interval(Mode::Trig, &CBox::new((t, t), (u, u), (v, v)));
            for i in 0..3 {
                assert!((ge[i].mid() - g[i]).abs() <= 1e-9 * (1.0 + g[i].abs()), "{i} {g:?} {ge:?}");
            }
        }
        for &(l, w, v) in &[(0.3, 0.4, 1.2), (2.0, 0.7, 1.3), (5.5, 2.8, 2.6)] {
            let want = scalar::eval_f_compact(l, w, v);
            let e = value_naive(Mode::Hyp, &CBox::new((l, l), (w, w), (v, v)));
            assert!((e.mid() - want).abs() <= 1e-9 * (1.0 + want.abs()), "{want} {e:?}");
            let g = scalar::grad_f_compact(l, w, v);
            let ge = grad_compact_interval(Mode::Hyp, &CBox::new((l, l), (w, w), (v, v)));
            for i in 0..3 {
                assert!((ge[i].mid() - g[i]).abs() <= 1e-8 * (1.0 + g[i].abs()), "{i} {g:?} {ge:?}");
            }
        }
    }

    #[test]
    fn manifold_point_encloses_zero() {
        let t = 2.0;
        let m = core::f64::consts::FRAC_PI_2 - 1.0;
        assert!(value_naive(Mode::Trig, &CBox::new((t, t), (m, m), (m, m))).contains(0.0));
        assert!(value_naive(Mode::Hyp, &CBox::new((3.0, 3.0), (1.5, 1.5), (1.5, 1.5))).contains(0.0));
    }

    #[test]
    fn upper_edge_is_infinite_x() {
        let b = CBox::new((0.5, 0.6), (1.4, core::f64::consts::FRAC_PI_2), (0.1, 0.2));
        let e = value_naive(Mode::Trig, &b);
        assert!(e.lo.is_finite() && e.hi == f64::INFINITY);
    }

    #[test]
    fn compactify_round_trip_is_sound() {
        let b = Box3::new(Mode::Trig, I::new(1.0, 1.2), I::new(5.0, 6.0), I::new(0.0, 1.0)).unwrap();
        let back = expand_box(Mode::Trig, &compactify_box(&b));
        assert!(b.x.subset(&back.x) && b.y.subset(&back.y));
        assert!(back.x.width() < 1e-12 + b.x.width());
        let h = Box3::new(Mode::Hyp, I::new(1.0, 1.2), I::new(1.5, 2.0), I::new(3.0, 4.0)).unwrap();
        let back = expand_box(Mode::Hyp, &compactify_box(&h));
        assert!(h.x.subset(&back.x) && h.y.subset(&back.y));
    }
}
