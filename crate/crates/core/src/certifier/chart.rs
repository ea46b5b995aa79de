//! Blow-up chart at θ = π. With `ε = π − θ` and `x = εX`, `y = εY`,
//!
//! `H(ε, X, Y) = G(π − ε, εX, εY)/ε⁵ = σ³XY + κ(X + Y) + X⁵Ã(εX) + Y⁵Ã(εY) + τ`
//!
//! where `σ = sinc ε`, `κ = −¼ sinc⁴(ε/2)(2 + cos ε)` and `τ` is the rescaled
//! θ-tail. `H` is a smooth function with a nondegenerate minimum curve
//! `X = Y = tan(ε/2)/ε` (equal to ½ at ε = 0), so the degenerate corner
//! `(π, 0, 0)` of G becomes an ordinary tube in this chart.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::bnb::{self, Assess, BnbParams, Problem};
use super::section::{certify_slice, finite_or_none, Section, SliceParams, SliceRecord, SliceVerdict};
use super::BnbStats;
use crate::exec::Executor;
use crate::interval::{atilde, mono_inc, CBox, Interval};

type I = Interval;

/// Chart parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    /// Chart covers `θ ∈ [π − eps0, π]`.
    pub eps0: f64,
    /// Bounded part of the chart: `X, Y ∈ [0, x_max]`.
    pub x_max: f64,
    /// Tube radius around the chart manifold, in `X`.
    pub eta: f64,
}

impl Default for ChartSpec {
    fn default() -> Self {
        ChartSpec { eps0: 0.2, x_max: 2.0, eta: 0.25 }
    }
}

/// `sinc³ ε`, decreasing on `[0, π]`.
pub fn sigma3(e: I) -> I {
    e.sinc().powi(3)
}

/// `(k − 4)/ε⁴ = −¼ sinc⁴(ε/2)(2 + cos ε)`, increasing in ε.
pub fn kappa(e: I) -> I {
    mono_inc(e, |p| -0.25 * (0.5 * p).sinc().powi(4) * (2.0 + p.cos()))
}

const TAU_TERMS: u32 = 12;

/// `τ(ε) = Σ_{k≥2} q_k ε^{2k−4}` with
/// `q_k = (−1)^k (3^{2k+1} − 27)/(4 (2k+1)!)`; valid for `ε ≤ 1`.
pub fn tau(e: I) -> I {
    let e2 = e.sqr();
    assert!(e2.hi <= 1.0, "tau series used outside its range");
    let coef = |k: u32| {
        let num = 3f64.powi(2 * k as i32 + 1) - 27.0;
        let mut fact = I::ONE;
        for j in 2..=(2 * k + 1) {
            fact = fact * f64::from(j);
        }
        let q = I::point(num) / (4.0 * fact);
        if k % 2 == 0 {
            q
        } else {
            -q
        }
    };
    let mut acc = I::ZERO;
    for k in (2..2 + TAU_TERMS).rev() {
        acc = acc * e2 + coef(k);
    }
    // Term ratios are below 9ε²/((2k+2)(2k+3)) < ½, so the tail is at most
    // twice the first omitted term.
    let k = 2 + TAU_TERMS;
    let first = coef(k).mag() * e2.hi.powi((k - 2) as i32);
    acc + I::new(-2.0 * first, 2.0 * first)
}

/// Chart manifold `M(ε) = tan(ε/2)/ε`, increasing, `M(0) = ½`.
pub fn chart_manifold(e: I) -> I {
    mono_inc(e, |p| if p.hi == 0.0 { I::point(0.5) } else { (0.5 * p).tan() / p })
}

/// Evaluates `f(e, z)` increasing in `z` and decreasing in `e` by endpoints.
fn inc_z_dec_e(e: I, z: I, f: impl Fn(I, I) -> I) -> I {
    I::new(f(I::point(e.hi), I::point(z.lo)).lo, f(I::point(e.lo), I::point(z.hi)).hi)
}

/// `4X⁴/(1 + ε²X²)²`.
fn q4(e: I, z: I) -> I {
    inc_z_dec_e(e, z, |e, z| 4.0 * z.powi(4) / (1.0 + (e * z).sqr()).sqr())
}

/// `16X³/(1 + ε²X²)³`, increasing in `X` while `εX ≤ 1`.
fn d3(e: I, z: I) -> I {
    assert!((e * z).hi <= 1.0);
    inc_z_dec_e(e, z, |e, z| 16.0 * z.powi(3) / (1.0 + (e * z).sqr()).powi(3))
}

fn fifth(e: I, z: I) -> I {
    z.powi(5) * atilde(e * z)
}

/// Naive enclosure of `H`.
pub fn chart_value(e: I, x: I, y: I) -> I {
    sigma3(e) * x * y + kappa(e) * (x + y) + fifth(e, x) + fifth(e, y) + tau(e)
}

/// `(∂X H, ∂Y H)`.
pub fn chart_grad(e: I, x: I, y: I) -> [I; 2] {
    let s3 = sigma3(e);
    let k = kappa(e);
    [s3 * y + k + q4(e, x), s3 * x + k + q4(e, y)]
}

/// `(X, Y)` Hessian block of `H`.
pub fn chart_hess(e: I, x: I, y: I) -> [[I; 2]; 2] {
    let s3 = sigma3(e);
    [[d3(e, x), s3], [s3, d3(e, y)]]
}

/// Value of `H − shift` with a mean-value refinement in `(X, Y)`.
fn chart_bound(b: &CBox, threshold: f64, shift: f64) -> Assess {
    let (e, x, y) = (b.t, b.u, b.v);
    let naive = chart_value(e, x, y) - shift;
    let w = [e.width(), x.width(), y.width()];
    if naive.lo > threshold {
        return Assess::Bound { lower: naive.lo, weights: w, refined: false };
    }
    let g = chart_grad(e, x, y);
    let (xm, ym) = (x.mid(), y.mid());
    let mvf = chart_value(e, I::point(xm), I::point(ym)) - shift + g[0] * (x - xm) + g[1] * (y - ym);
    let value = naive.intersect(&mvf);
    // ε enters only through smooth O(ε) coefficients.
    let weights = [w[0], w[1] * g[0].mag(), w[2] * g[1].mag()];
    Assess::Bound { lower: value.lo, weights, refined: mvf.lo > naive.lo }
}

/// The chart tube as a family of sections.
pub struct ChartSection {
    pub spec: ChartSpec,
    pub shift: f64,
}

impl Problem for ChartSection {
    fn assess(&self, b: &CBox, threshold: f64) -> Assess {
        chart_bound(b, threshold, self.shift)
    }
}

impl Section for ChartSection {
    fn manifold(&self, t: I) -> I {
        chart_manifold(t)
    }

    fn clip(&self) -> [I; 2] {
        [I::new(0.0, self.spec.x_max); 2]
    }

    fn to_newton(&self, p: I) -> I {
        p
    }

    fn grad(&self, t: I, x: I, y: I) -> [I; 2] {
        chart_grad(t, x, y)
    }

    fn hess(&self, t: I, x: I, y: I) -> [[I; 2]; 2] {
        chart_hess(t, x, y)
    }
}

/// Bounded chart region minus the chart tube.
struct ChartRegion {
    eta: f64,
    shift: f64,
}

impl Problem for ChartRegion {
    fn assess(&self, b: &CBox, threshold: f64) -> Assess {
        let lo = chart_manifold(I::point(b.t.hi)) - self.eta;
        let hi = chart_manifold(I::point(b.t.lo)) + self.eta;
        let inside = |z: I| z.lo >= lo.hi && z.hi <= hi.lo;
        if inside(b.u) && inside(b.v) {
            return Assess::Excluded;
        }
        // A probe point outside the chart tube that is certainly below the
        // threshold means no subdivision can succeed.
        let hopeless = bnb::probe_points(b).any(|[e, x, y]| {
            let m = chart_manifold(I::point(e)).mid();
            let in_tube = (x - m).abs() <= self.eta && (y - m).abs() <= self.eta;
            !in_tube && (chart_value(I::point(e), I::point(x), I::point(y)) - self.shift).hi < threshold
        });
        if hopeless {
            return Assess::Hopeless;
        }
        chart_bound(b, threshold, self.shift)
    }
}

/// `ψ(ε, X) = X⁵Ã(εX) + κX + τ/2`, so that `H ≥ ψ(X) + ψ(Y)`.
fn psi(e: I, x: I) -> I {
    fifth(e, x) + kappa(e) * x + 0.5 * tau(e)
}

struct Psi;

impl Problem for Psi {
    fn assess(&self, b: &CBox, threshold: f64) -> Assess {
        let (e, x) = (b.t, b.u);
        let naive = psi(e, x);
        let d = q4(e, x) + kappa(e);
        let xm = x.mid();
        let mvf = psi(e, I::point(xm)) + d * (x - xm);
        let value = naive.intersect(&mvf);
        let _ = threshold;
        Assess::Bound { lower: value.lo, weights: [e.width(), x.width() * d.mag(), 0.0], refined: mvf.lo > naive.lo }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExteriorRecord {
    /// Lower bound of `ψ` over `[0, x_max]`.
    pub psi_min_lower: Option<f64>,
    /// Lower bound of `ψ(X)` for `X ≥ x_max` (value of the monotone minorant).
    pub phi_at_x_max: f64,
    /// `φ(x_max) + min(ψ_min, φ(x_max))`; positive means closed.
    pub margin: Option<f64>,
    pub monotone: bool,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub spec: ChartSpec,
    /// Largest `x` covered by the chart: `tan(eps0/2 + ρ)`.
    pub x_top: f64,
    pub eps: [f64; 2],
    pub region: BnbStats,
    pub slices: u64,
    pub slices_failed: Vec<SliceRecord>,
    pub slice_boxes: u64,
    pub max_krawczyk_iterations: u32,
    pub exterior: ExteriorRecord,
    pub closed: bool,
    /// Per-slice records, reported in θ.
    #[serde(skip)]
    pub slice_records: Vec<SliceRecord>,
}

#[derive(Clone, Copy, Debug)]
pub struct ChartParams {
    pub rho: f64,
    pub slice_width: f64,
    pub budget: u64,
    pub slice_budget: u64,
    pub max_depth: u32,
    pub keep: usize,
    pub shift: f64,
    pub epsilon: f64,
}

/// `tan(eps_hi/2 + ρ)`, or `None` when the chart cannot cover the tube.
pub fn chart_x_top(eps_hi: f64, rho: f64) -> Option<f64> {
    let a = I::point(eps_hi) * 0.5 + rho;
    let top = a.tan().hi;
    // `Ã` is only available for arguments up to 0.6.
    (top <= 0.6 && eps_hi <= 1.0).then_some(top)
}

/// Proves `H ≥ 0` on `ε ∈ eps`, `X, Y ∈ [0, x_top/ε]`.
pub fn run_chart<E: Executor>(spec: &ChartSpec, eps: I, p: &ChartParams, exec: &E) -> Option<ChartRecord> {
    let x_top = chart_x_top(eps.hi, p.rho)?;
    let xm = spec.x_max;
    let square = I::new(0.0, xm);
    let bp = BnbParams { threshold: 0.0, budget: p.budget, max_depth: p.max_depth, keep: p.keep };
    let region = bnb::run(&ChartRegion { eta: spec.eta, shift: p.shift }, &[CBox { t: eps, u: square, v: square }], bp, exec);

    let sec = ChartSection { spec: *spec, shift: p.shift };
    let sp = SliceParams { rho: spec.eta, budget: p.slice_budget, max_depth: p.max_depth, keep: p.keep, shift: p.shift, epsilon: p.epsilon };
    let cuts = slice_cuts(eps, p.slice_width);
    let records = exec.map(&cuts, |e| certify_slice(&sec, *e, &sp));

    // Exterior: a monotone minorant φ of ψ beyond x_max, and ψ over
    // [0, x_max] bounded below by −φ(x_max)/2.
    let a_lo = atilde(I::new(0.0, x_top)).lo;
    let k_lo = kappa(eps).lo;
    let t_lo = tau(eps).lo;
    let xmi = I::point(xm);
    let monotone = (5.0 * a_lo * xmi.powi(4) + k_lo).lo > 0.0;
    let phi = (a_lo * xmi.powi(5) + k_lo * xmi + 0.5 * t_lo).lo;
    let psi_threshold = -0.5 * phi.max(0.0);
    let psi_out = bnb::run(&Psi, &[CBox { t: eps, u: square, v: I::ZERO }], BnbParams { threshold: psi_threshold, ..bp }, exec);
    let psi_min = if psi_out.complete() { psi_out.min_accepted } else { f64::NEG_INFINITY };
    let margin = (I::point(phi) + psi_min.min(phi)).lo - p.shift;
    let ext_closed = monotone && margin > 0.0;
    let exterior = ExteriorRecord { psi_min_lower: finite_or_none(psi_min), phi_at_x_max: phi, margin: finite_or_none(margin), monotone, closed: ext_closed };

    let slice_ok = records.iter().all(|r| r.verdict == SliceVerdict::Certified);
    let region_stats = BnbStats::from(&region);
    let closed = region.complete() && slice_ok && ext_closed;
    let theta = |r: &SliceRecord| {
        let mut r = r.clone();
        let th = crate::interval::PI - I::new(r.t[0], r.t[1]);
        r.t = [th.lo, th.hi];
        r
    };
    Some(ChartRecord {
        spec: *spec,
        x_top,
        eps: [eps.lo, eps.hi],
        region: region_stats,
        slices: records.len() as u64,
        slices_failed: records.iter().filter(|r| r.verdict != SliceVerdict::Certified).map(theta).collect(),
        slice_boxes: records.iter().map(|r| r.ring_boxes).sum(),
        max_krawczyk_iterations: records.iter().filter_map(|r| r.krawczyk_iterations).max().unwrap_or(0),
        exterior,
        closed,
        slice_records: records.iter().map(theta).collect(),
    })
}

/// Consecutive slices of width `w` covering `t` exactly.
pub fn slice_cuts(t: I, w: f64) -> Vec<I> {
    let n = ((t.hi - t.lo) / w).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let a = if i == 0 { t.lo } else { t.lo + i as f64 * w };
            let b = if i + 1 == n { t.hi } else { t.lo + (i + 1) as f64 * w };
            I::new(a, b)
        })
        .collect()
}
