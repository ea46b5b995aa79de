//! Per-slice argument inside the tube. For a slice `t ∈ T` the cross-section
//! is a square around the manifold. It is closed by three facts:
//! a Krawczyk contraction isolating the unique zero of the `(x, y)` gradient,
//! a positive-definite core containing the manifold (so the manifold point is
//! the minimum over the core, where the value is exactly zero by the ledger),
//! and interval positivity on the ring between core and cross-section.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::bnb::{self, Assess, BnbParams, Problem};
use crate::exec::Sequential;
use crate::interval::{enclose, eval_grad_interval, eval_hessian_xy_interval, x_of_compact, Box3, CBox, Interval, FRAC_PI_2};
use crate::scalar::Mode;

type I = Interval;

/// Number of halvings tried when shrinking the positive-definite core.
const CORE_HALVINGS: u32 = 6;
const KRAWCZYK_MAX_ITER: u32 = 8;
/// Start-box enlargements (factor 4 each) tried before giving up.
const KRAWCZYK_WIDENINGS: u32 = 8;
/// Bisections of the slice parameter allowed inside one Krawczyk cover.
const KRAWCZYK_T_SPLITS: u32 = 6;

/// A family of 2-D cross-sections along a one-parameter manifold.
pub trait Section: Problem {
    /// Enclosure of the manifold position (section coordinate) over `t`.
    fn manifold(&self, t: I) -> I;
    /// Admissible ranges of the two section coordinates.
    fn clip(&self) -> [I; 2];
    /// Where the function itself is defined. The core and the Krawczyk boxes
    /// may leave the clipped cross-section but not this domain.
    fn domain(&self) -> [I; 2] {
        self.clip()
    }
    /// Newton coordinate (`x`) for a section-coordinate interval.
    fn to_newton(&self, p: I) -> I;
    /// `(∂x, ∂y)` of the function at `t`.
    fn grad(&self, t: I, x: I, y: I) -> [I; 2];
    /// `(x, y)` Hessian block.
    fn hess(&self, t: I, x: I, y: I) -> [[I; 2]; 2];
}

/// Ordered from best to worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceVerdict {
    Certified,
    FallbackUsed,
    UpToEpsilon,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceRecord {
    /// Slice in the original parameter (θ or ℓ).
    pub t: [f64; 2],
    pub verdict: SliceVerdict,
    /// Cross-section in section coordinates.
    pub cross_section: [[f64; 2]; 2],
    pub core_radius: Option<f64>,
    pub krawczyk_iterations: Option<u32>,
    /// Krawczyk enclosure of the stationary point, in `x`/`y`.
    pub krawczyk_box: Option<[[f64; 2]; 2]>,
    pub ring_boxes: u64,
    pub ring_min_lower: Option<f64>,
    pub residual: Vec<CBox>,
    pub reason: Option<String>,
}

impl SliceRecord {
    fn empty(t: I, verdict: SliceVerdict) -> SliceRecord {
        SliceRecord {
            t: [t.lo, t.hi],
            verdict,
            cross_section: [[0.0; 2]; 2],
            core_radius: None,
            krawczyk_iterations: None,
            krawczyk_box: None,
            ring_boxes: 0,
            ring_min_lower: None,
            residual: Vec::new(),
            reason: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SliceParams {
    pub rho: f64,
    pub budget: u64,
    pub max_depth: u32,
    pub keep: usize,
    pub shift: f64,
    pub epsilon: f64,
}

pub(crate) fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Split weights `width × |∂|`, or plain widths when no gradient is known.
pub(crate) fn weights(b: &CBox, grad: Option<[I; 3]>) -> [f64; 3] {
    let d = b.dims();
    match grad {
        Some(g) => core::array::from_fn(|i| {
            let m = g[i].mag();
            if m.is_nan() {
                f64::INFINITY
            } else {
                d[i].width() * m
            }
        }),
        None => core::array::from_fn(|i| d[i].width()),
    }
}

/// Lower bound of `f − shift` over a compact box, as a B&B verdict.
pub(crate) fn compact_bound(mode: Mode, b: &CBox, threshold: f64, shift: f64) -> Assess {
    let e = enclose(mode, b, threshold + shift);
    let lower = (e.value - shift).lo;
    Assess::Bound { lower, weights: weights(b, e.grad), refined: e.refined }
}

/// The tube of the original problem in compact coordinates.
pub struct MainSection {
    pub mode: Mode,
    pub clip: [I; 2],
    pub shift: f64,
}

/// Manifold in compact coordinates: `π/2 − t/2` (trig) or `t/2` (hyp).
pub fn manifold_compact_interval(mode: Mode, t: I) -> I {
    match mode {
        Mode::Trig => FRAC_PI_2 - 0.5 * t,
        Mode::Hyp => 0.5 * t,
    }
}

impl Problem for MainSection {
    fn assess(&self, b: &CBox, threshold: f64) -> Assess {
        compact_bound(self.mode, b, threshold, self.shift)
    }
}

impl MainSection {
    fn box3(&self, t: I, x: I, y: I) -> Box3 {
        Box3 { mode: self.mode, t, x, y }
    }
}

impl Section for MainSection {
    fn manifold(&self, t: I) -> I {
        manifold_compact_interval(self.mode, t)
    }

    fn clip(&self) -> [I; 2] {
        self.clip
    }

    fn domain(&self) -> [I; 2] {
        match self.mode {
            Mode::Trig => [I::new(0.0, FRAC_PI_2.hi); 2],
            Mode::Hyp => [I::new(f64::MIN_POSITIVE, f64::INFINITY); 2],
        }
    }

    fn to_newton(&self, p: I) -> I {
        x_of_compact(self.mode, p)
    }

    fn grad(&self, t: I, x: I, y: I) -> [I; 2] {
        let g = eval_grad_interval(&self.box3(t, x, y));
        [g[1], g[2]]
    }

    fn hess(&self, t: I, x: I, y: I) -> [[I; 2]; 2] {
        eval_hessian_xy_interval(&self.box3(t, x, y))
    }
}

/// Strict positive definiteness of a symmetric interval matrix.
fn positive_definite(h: &[[I; 2]; 2]) -> bool {
    let off = h[0][1].hull(&h[1][0]);
    h[0][0].lo > 0.0 && h[1][1].lo > 0.0 && (h[0][0] * h[1][1]).lo > off.sqr().hi
}

/// Parametric Krawczyk iteration for `∇_{xy} f(t, ·) = 0`, `t ∈ T`.
/// Returns the iteration count and the final box on success.
pub fn krawczyk<S: Section>(sec: &S, t: I, start: [I; 2]) -> Option<(u32, [I; 2])> {
    let tm = I::point(t.mid());
    let mut x = start;
    for k in 1..=KRAWCZYK_MAX_ITER {
        let m = [x[0].mid(), x[1].mid()];
        let (pm0, pm1) = (I::point(m[0]), I::point(m[1]));
        let a = sec.hess(tm, pm0, pm1);
        let a = [[a[0][0].mid(), a[0][1].mid()], [a[1][0].mid(), a[1][1].mid()]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let y = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
        let f = sec.grad(t, pm0, pm1);
        let j = sec.hess(t, x[0], x[1]);
        let dx = [x[0] - m[0], x[1] - m[1]];
        let mut kx = [I::ZERO; 2];
        for i in 0..2 {
            let yf = f[0] * y[i][0] + f[1] * y[i][1];
            let mut acc = I::point(m[i]) - yf;
            for (c, dxc) in dx.iter().enumerate() {
                let yj = j[0][c] * y[i][0] + j[1][c] * y[i][1];
                let delta = if i == c { I::ONE } else { I::ZERO };
                acc = acc + (delta - yj) * *dxc;
            }
            kx[i] = acc;
        }
        if kx[0].interior(&x[0]) && kx[1].interior(&x[1]) {
            return Some((k, kx));
        }
        let next = [kx[0].intersect(&x[0]), kx[1].intersect(&x[1])];
        if next[0].is_empty() || next[1].is_empty() {
            return None;
        }
        x = next;
    }
    None
}

/// Krawczyk over the slice `t` with the start box confined to `xc`. The zero
/// curve moves across the slice, so the start box must be wider than its
/// spread: widen until the operator contracts, and bisect `t` when widening
/// alone does not work. Returns the worst iteration count and the hull of
/// the contracted boxes.
fn krawczyk_cover<S: Section>(sec: &S, t: I, xc: [I; 2], splits: u32) -> Option<(u32, [I; 2])> {
    let xm = sec.to_newton(sec.manifold(t));
    let base = 0.5 * xm.width() + 1e-12 * (1.0 + xm.mag());
    for a in 0..KRAWCZYK_WIDENINGS {
        let pad = base * f64::from(4u32.pow(a));
        let start = [(xm + I::new(-pad, pad)).intersect(&xc[0]), (xm + I::new(-pad, pad)).intersect(&xc[1])];
        if start[0].is_empty() || start[1].is_empty() {
            break;
        }
        if let Some(hit) = krawczyk(sec, t, start) {
            return Some(hit);
        }
    }
    if splits == 0 {
        return None;
    }
    let (l, r) = t.bisect();
    let (kl, bl) = krawczyk_cover(sec, l, xc, splits - 1)?;
    let (kr, br) = krawczyk_cover(sec, r, xc, splits - 1)?;
    Some((kl.max(kr), [bl[0].hull(&br[0]), bl[1].hull(&br[1])]))
}

/// `outer \ inner` for 2-D rectangles, as at most four rectangles.
fn ring(outer: [I; 2], inner: [I; 2]) -> Vec<[I; 2]> {
    let mut out = Vec::new();
    let [ou, ov] = outer;
    let [iu, iv] = inner;
    if ou.lo < iu.lo {
        out.push([I::new(ou.lo, iu.lo), ov]);
    }
    if iu.hi < ou.hi {
        out.push([I::new(iu.hi, ou.hi), ov]);
    }
    let mid = I::new(iu.lo.max(ou.lo), iu.hi.min(ou.hi));
    if ov.lo < iv.lo {
        out.push([mid, I::new(ov.lo, iv.lo)]);
    }
    if iv.hi < ov.hi {
        out.push([mid, I::new(iv.hi, ov.hi)]);
    }
    out
}

/// Certifies `f ≥ 0` on the tube cross-section over the slice `t`.
pub fn certify_slice<S: Section>(sec: &S, t: I, p: &SliceParams) -> SliceRecord {
    let m = sec.manifold(t);
    let clip = sec.clip();
    let reach = I::new(-p.rho, p.rho);
    let cs = [(m + reach).intersect(&clip[0]), (m + reach).intersect(&clip[1])];
    if cs[0].is_empty() || cs[1].is_empty() {
        return SliceRecord::empty(t, SliceVerdict::Certified);
    }
    let mut rec = SliceRecord::empty(t, SliceVerdict::Failed);
    rec.cross_section = [[cs[0].lo, cs[0].hi], [cs[1].lo, cs[1].hi]];
    let on_manifold = m.intersect(&clip[0]).intersect(&clip[1]);
    let mut core: Option<[I; 2]> = None;
    if !on_manifold.is_empty() {
        if p.shift != 0.0 {
            // The exact zero at the manifold is the hinge; a shifted function
            // does not vanish there.
            rec.reason = Some("shifted function is negative on the manifold".into());
            return rec;
        }
        let dom = sec.domain();
        for j in 0..=CORE_HALVINGS {
            let r = p.rho / f64::from(1u32 << j);
            let c = [(m + I::new(-r, r)).intersect(&dom[0]), (m + I::new(-r, r)).intersect(&dom[1])];
            let h = sec.hess(t, sec.to_newton(c[0]), sec.to_newton(c[1]));
            if positive_definite(&h) {
                rec.core_radius = Some(r);
                core = Some(c);
                break;
            }
        }
        let Some(c) = core else {
            rec.reason = Some("no positive-definite core".into());
            return rec;
        };
        let xc = [sec.to_newton(c[0]), sec.to_newton(c[1])];
        let found = krawczyk_cover(sec, t, xc, KRAWCZYK_T_SPLITS);
        match found {
            Some((k, kb)) => {
                rec.krawczyk_iterations = Some(k);
                rec.krawczyk_box = Some([[kb[0].lo, kb[0].hi], [kb[1].lo, kb[1].hi]]);
            }
            None => {
                rec.reason = Some("Krawczyk operator did not contract".into());
                return rec;
            }
        }
    }
    let pieces = match core {
        Some(c) => ring(cs, c),
        None => alloc::vec![cs],
    };
    let roots: Vec<CBox> = pieces.iter().map(|q| CBox { t, u: q[0], v: q[1] }).collect();
    let params = BnbParams { threshold: 0.0, budget: p.budget, max_depth: p.max_depth, keep: p.keep };
    let out = bnb::run(sec, &roots, params, &Sequential);
    rec.ring_boxes = out.processed;
    rec.ring_min_lower = finite_or_none(out.min_accepted.min(out.min_failed));
    rec.residual = out.failed.iter().map(|(b, _)| *b).chain(out.pending.iter().copied()).collect();
    rec.verdict = if out.complete() {
        SliceVerdict::Certified
    } else if out.pending_count == 0 && out.min_failed >= -p.epsilon {
        rec.reason = Some("ring closed only up to epsilon".into());
        SliceVerdict::UpToEpsilon
    } else {
        rec.reason = Some("ring not closed".into());
        SliceVerdict::Failed
    };
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::FRAC_PI_2 as HALF_PI;

    fn params() -> SliceParams {
        SliceParams { rho: 0.1, budget: 200_000, max_depth: 60, keep: 8, shift: 0.0, epsilon: 1e-9 }
    }

    fn trig() -> MainSection {
        MainSection { mode: Mode::Trig, clip: [I::new(0.0, HALF_PI.hi); 2], shift: 0.0 }
    }

    #[test]
    fn mid_slice_is_certified_quickly() {
        let t = I::new(1.5, 1.51);
        let rec = certify_slice(&trig(), t, &params());
        assert_eq!(rec.verdict, SliceVerdict::Certified, "{rec:?}");
        assert!(rec.krawczyk_iterations.unwrap() <= 3);
        let kb = rec.krawczyk_box.unwrap();
        for th in [1.5, 1.505, 1.51] {
            let x = 1.0 / libm::tan(0.5 * th);
            assert!(kb[0][0] <= x && x <= kb[0][1] && kb[1][0] <= x && x <= kb[1][1]);
        }
    }

    #[test]
    fn hyp_slice_is_certified() {
        let sec = MainSection { mode: Mode::Hyp, clip: [I::new(0.05, 3.0); 2], shift: 0.0 };
        let rec = certify_slice(&sec, I::new(2.0, 2.01), &params());
        assert_eq!(rec.verdict, SliceVerdict::Certified, "{rec:?}");
        let kb = rec.krawczyk_box.unwrap();
        let x = 1.0 / libm::tanh(1.0);
        assert!(kb[0][0] <= x && x <= kb[0][1]);
    }

    #[test]
    fn shifted_function_fails() {
        let sec = MainSection { shift: 0.01, ..trig() };
        let rec = certify_slice(&sec, I::new(1.5, 1.51), &SliceParams { shift: 0.01, ..params() });
        assert_eq!(rec.verdict, SliceVerdict::Failed);
    }

    #[test]
    fn ring_decomposition_covers_outer() {
        let outer = [I::new(0.0, 1.0), I::new(0.0, 1.0)];
        let inner = [I::new(0.4, 0.6), I::new(0.3, 0.5)];
        let parts = ring(outer, inner);
        assert_eq!(parts.len(), 4);
        let area: f64 = parts.iter().map(|p| p[0].width() * p[1].width()).sum::<f64>() + 0.2 * 0.2;
        assert!((area - 1.0).abs() < 1e-12);
    }
}
