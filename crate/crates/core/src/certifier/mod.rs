//! Nonnegativity certification of G and F over compact boxes in compactified
//! coordinates. The region away from the equality manifold is closed by
//! interval branch-and-bound; a tube of radius ρ around the manifold is closed
//! slice by slice (see [`section`]), with the degenerate end at θ = π moved to
//! a blow-up chart (see [`chart`]).

pub mod bnb;
pub mod chart;
pub mod section;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::identities::{self, StepStatus};
use crate::interval::{self, CBox, Interval, FRAC_PI_2, PI};
use crate::quasi::Halton;
use crate::scalar::{self, EvalPoint, Mode};
use bnb::{Assess, BnbOutcome, BnbParams, Problem};
pub use chart::{ChartRecord, ChartSpec};
use section::{certify_slice, compact_bound, finite_or_none, manifold_compact_interval, MainSection, SliceParams};
pub use section::{SliceRecord, SliceVerdict};

type I = Interval;

/// Tolerance for `proved_up_to_epsilon`.
pub const EPSILON: f64 = 1e-9;
pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_DEPTH: u32 = 60;
/// Refinement policy stamped into certificates.
pub const REFINEMENT: &str = "naive enclosure first; mean-value form about the box midpoint intersected in when the naive bound does not decide";
pub const SUBDIVISION: &str = "bisect the dimension maximizing width x gradient magnitude, widest dimension on ties";

/// Ordered from weakest to strongest, so `min` is the weakest link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Inconclusive,
    ProvedUpToEpsilon,
    ProvedStrict,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Inconclusive => "inconclusive",
            Status::ProvedUpToEpsilon => "proved_up_to_epsilon",
            Status::ProvedStrict => "proved_strict",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerPolicy {
    /// Quasi-random sampled check, reported as `proved_up_to_epsilon`.
    Sample,
    /// Corner left out of the claim entirely.
    Exclude,
}

impl CornerPolicy {
    pub fn parse(s: &str) -> Option<CornerPolicy> {
        match s {
            "sample" => Some(CornerPolicy::Sample),
            "exclude" => Some(CornerPolicy::Exclude),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    /// Radius in compact coordinates; 0 disables the tube.
    pub rho: f64,
    /// Slice width in `t`.
    pub slice_width: f64,
}

impl Default for TubeSpec {
    fn default() -> Self {
        TubeSpec { rho: 0.1, slice_width: 0.01 }
    }
}

/// Name of the compactification map.
pub fn map_id(mode: Mode) -> &'static str {
    match mode {
        Mode::Trig => "u = atan x",
        Mode::Hyp => "w = atanh(1/x)",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Outer boxes in compact coordinates; `None` selects the lemma default.
    pub outer: Option<Vec<CBox>>,
    pub tube: TubeSpec,
    pub chart: ChartSpec,
    /// Leaves are accepted when their lower bound exceeds this.
    pub target_delta: f64,
    /// Maximum number of boxes processed by the region search.
    pub budget: u64,
    /// Maximum number of boxes per tube slice.
    pub slice_budget: u64,
    pub max_depth: u32,
    /// Certify `f − shift` instead of `f` (negative control).
    pub shift: f64,
    pub corner_policy: CornerPolicy,
    pub corner_samples: u64,
    pub seed: u64,
    /// How many residual boxes to list.
    pub keep_boxes: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            outer: None,
            tube: TubeSpec::default(),
            chart: ChartSpec::default(),
            target_delta: 0.0,
            budget: 50_000_000,
            slice_budget: 1_000_000,
            max_depth: MAX_DEPTH,
            shift: 0.0,
            corner_policy: CornerPolicy::Sample,
            corner_samples: 1_000_000,
            seed: 0,
            keep_boxes: 32,
        }
    }
}

impl CertifyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.tube.rho >= 0.0 && self.tube.rho.is_finite()) {
            return bad("rho must be a finite nonnegative number");
        }
        if !(self.tube.slice_width > 0.0 && self.tube.slice_width.is_finite()) {
            return bad("slice width must be positive");
        }
        if self.budget == 0 {
            return bad("budget must be at least 1");
        }
        if !self.target_delta.is_finite() || !self.shift.is_finite() {
            return bad("target delta and shift must be finite");
        }
        if !(self.chart.eps0 > 0.0 && self.chart.x_max > 0.0 && self.chart.eta > 0.0) {
            return bad("chart parameters must be positive");
        }
        Ok(())
    }
}

/// Trig corner left to the corner policy: `θ < 0.2`, `u, v > π/2 − 0.15`.
pub fn trig_corner() -> CBox {
    let c = core::f64::consts::FRAC_PI_2 - 0.15;
    CBox::new((0.0, 0.2), (c, FRAC_PI_2.hi), (c, FRAC_PI_2.hi))
}

/// Default outer boxes, in compact coordinates.
pub fn default_region(lemma: u8) -> Result<Vec<CBox>> {
    let top = FRAC_PI_2.hi;
    let c = trig_corner().u.lo;
    match lemma {
        1 => Ok(alloc::vec![
            CBox::new((0.2, PI.hi), (0.0, top), (0.0, top)),
            CBox::new((0.0, 0.2), (0.0, c), (0.0, top)),
            CBox::new((0.0, 0.2), (c, top), (0.0, c)),
        ]),
        2 => Ok(alloc::vec![CBox::new((0.2, 6.0), (0.05, 3.0), (0.05, 3.0))]),
        _ => Err(Error::Config(format!("unknown lemma {lemma}"))),
    }
}

pub fn lemma_mode(lemma: u8) -> Result<Mode> {
    match lemma {
        1 => Ok(Mode::Trig),
        2 => Ok(Mode::Hyp),
        _ => Err(Error::Config(format!("unknown lemma {lemma}"))),
    }
}

/// Compactifies a point: `(t, atan x, atan y)` or `(t, acoth x, acoth y)`.
pub fn compactify_point(p: &EvalPoint) -> [f64; 3] {
    [p.t, scalar::to_compact(p.mode, p.x), scalar::to_compact(p.mode, p.y)]
}

/// Inverse of [`compactify_point`].
pub fn expand_point(mode: Mode, c: [f64; 3]) -> Result<EvalPoint> {
    EvalPoint::new(mode, c[0], scalar::from_compact(mode, c[1]), scalar::from_compact(mode, c[2]))
}

pub use interval::{compactify_box, expand_box};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BnbStats {
    pub processed: u64,
    pub accepted: u64,
    pub excluded: u64,
    pub refined: u64,
    pub max_depth: u32,
    pub failed: u64,
    pub pending: u64,
    pub min_accepted: Option<f64>,
    pub min_failed: Option<f64>,
    pub complete: bool,
}

impl From<&BnbOutcome> for BnbStats {
    fn from(o: &BnbOutcome) -> Self {
        BnbStats {
            processed: o.processed,
            accepted: o.accepted,
            excluded: o.excluded,
            refined: o.refined,
            max_depth: o.max_depth,
            failed: o.failed_count,
            pending: o.pending_count,
            min_accepted: finite_or_none(o.min_accepted),
            min_failed: finite_or_none(o.min_failed),
            complete: o.complete(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub coordinates: String,
    pub outer: Vec<CBox>,
    /// Outer boxes met by the manifold, where the tube is excluded.
    pub tube_applies: Vec<bool>,
    pub corner: Option<CBox>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeRecord {
    pub rho: f64,
    pub map: String,
    pub slice_width: f64,
    pub skipped: bool,
    pub slices: u64,
    pub certified: u64,
    pub fallback_used: u64,
    pub up_to_epsilon: u64,
    pub failed: u64,
    pub ring_boxes: u64,
    pub min_ring_lower: Option<f64>,
    pub max_krawczyk_iterations: u32,
    /// Ledger step supplying the exact zero on the manifold.
    pub zero_from: String,
    pub chart: Option<ChartRecord>,
    pub failed_slices: Vec<SliceRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerRecord {
    pub region: CBox,
    pub samples: u64,
    pub seed: u64,
    pub threshold: f64,
    pub min_value: f64,
    /// Compact coordinates of the smallest sample.
    pub argmin: [f64; 3],
    pub passed: bool,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub face: String,
    pub method: String,
    pub ledger_step: Option<String>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerUse {
    pub id: String,
    pub name: String,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualBox {
    pub kind: String,
    #[serde(rename = "box")]
    pub bx: CBox,
    pub lower: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub boxes_processed: u64,
    pub max_depth: u32,
    pub leaves_accepted: u64,
    pub leaves_excluded: u64,
    pub mvf_refined: u64,
    pub leaves_failed: u64,
    pub boxes_pending: u64,
    pub slices: u64,
    pub slice_boxes: u64,
    pub chart_boxes: u64,
    pub corner_samples: u64,
}

/// Run metadata filled in by the front end; excluded from determinism checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub wall_time_s: f64,
    pub workers: usize,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    /// 1 (trig) or 2 (hyp); 0 for a bare region run.
    pub lemma: u8,
    pub mode: Mode,
    /// Rigorous part: region, tube and boundary faces.
    pub status: Status,
    /// Weakest of `status` and the corner check.
    pub overall_status: Status,
    /// Smallest accepted lower bound on region ∖ tube.
    pub delta: Option<f64>,
    pub target_delta: f64,
    pub epsilon: f64,
    pub shift: f64,
    pub region: RegionRecord,
    pub tube: TubeRecord,
    pub corner_policy: CornerPolicy,
    pub corner: Option<CornerRecord>,
    pub boundaries: Vec<BoundaryRecord>,
    pub ledger: Vec<LedgerUse>,
    pub residual_boxes: Vec<ResidualBox>,
    pub stats: Stats,
    pub rounding: String,
    pub refinement: String,
    pub subdivision: String,
    pub max_depth: u32,
    pub budget: u64,
    pub version: String,
    pub run: Option<RunInfo>,
}

/// Region search: the outer box minus the tube.
struct Region {
    mode: Mode,
    rho: f64,
    shift: f64,
}

/// Whether the whole box lies within ρ of the manifold (both coordinates).
pub fn inside_tube(mode: Mode, b: &CBox, rho: f64) -> bool {
    if rho <= 0.0 {
        return false;
    }
    let (big, small) = match mode {
        Mode::Trig => (manifold_compact_interval(mode, I::point(b.t.lo)), manifold_compact_interval(mode, I::point(b.t.hi))),
        Mode::Hyp => (manifold_compact_interval(mode, I::point(b.t.hi)), manifold_compact_interval(mode, I::point(b.t.lo))),
    };
    let lo = (big - rho).hi;
    let hi = (small + rho).lo;
    b.u.lo >= lo && b.u.hi <= hi && b.v.lo >= lo && b.v.hi <= hi
}

/// Whether the manifold may pass through the box.
pub fn meets_manifold(mode: Mode, b: &CBox) -> bool {
    !manifold_compact_interval(mode, b.t).intersect(&b.u).intersect(&b.v).is_empty()
}

impl Region {
    /// Whether the midpoint or a corner of the box, taken inside the domain
    /// but outside the tube, is certainly below the threshold. Such a box
    /// can never be accepted, so splitting it only burns budget. The tube is
    /// convex, so a box not inside it has a corner outside it; that is what
    /// stops boxes straddling the tube wall from splitting forever.
    fn witness_below(&self, b: &CBox, threshold: f64) -> bool {
        bnb::probe_points(b).any(|[t, u, v]| {
            let in_domain = match self.mode {
                Mode::Trig => (0.0..=core::f64::consts::PI).contains(&t) && [u, v].iter().all(|z| (0.0..=core::f64::consts::FRAC_PI_2).contains(z)),
                Mode::Hyp => t >= 0.0 && u > 0.0 && v > 0.0,
            };
            let m = scalar::manifold_compact(self.mode, t);
            let in_tube = self.rho > 0.0 && (u - m).abs() <= self.rho && (v - m).abs() <= self.rho;
            in_domain && !in_tube && (interval::value_naive(self.mode, &CBox::new((t, t), (u, u), (v, v))) - self.shift).hi < threshold
        })
    }
}

impl Problem for Region {
    fn assess(&self, b: &CBox, threshold: f64) -> Assess {
        if inside_tube(self.mode, b, self.rho) {
            return Assess::Excluded;
        }
        if self.rho <= 0.0 && -self.shift <= threshold && meets_manifold(self.mode, b) {
            // The function equals −shift on the manifold; no bound can exceed it.
            return Assess::Hopeless;
        }
        if self.witness_below(b, threshold) {
            return Assess::Hopeless;
        }
        compact_bound(self.mode, b, threshold, self.shift)
    }
}

fn ledger_use(key: &str) -> LedgerUse {
    match identities::verify_step(key) {
        Ok(o) => LedgerUse { id: o.id, name: o.name, verified: o.status == StepStatus::Verified },
        Err(_) => LedgerUse { id: String::new(), name: key.to_string(), verified: false },
    }
}

fn zero_step(mode: Mode) -> &'static str {
    match mode {
        Mode::Trig => "G_manifold_zero",
        Mode::Hyp => "F_manifold_zero",
    }
}

fn slice_params(cfg: &CertifyConfig) -> SliceParams {
    SliceParams { rho: cfg.tube.rho, budget: cfg.slice_budget, max_depth: cfg.max_depth, keep: cfg.keep_boxes, shift: cfg.shift, epsilon: EPSILON }
}

/// Where the chart takes over from ordinary slices.
fn chart_split(spec: &ChartSpec) -> f64 {
    (PI - spec.eps0).hi
}

/// Certifies a single tube slice of the main problem over the full compact
/// cross-section. Trig slices reaching into the chart zone are handed to the
/// chart and reported as `fallback_used` when it closes.
pub fn certify_tube_slice<E: Executor>(mode: Mode, t: Interval, tube: &TubeSpec, exec: &E) -> SliceRecord {
    let cfg = CertifyConfig { tube: *tube, ..CertifyConfig::default() };
    let clip = match mode {
        Mode::Trig => I::new(0.0, FRAC_PI_2.hi),
        Mode::Hyp => I::new(0.05, 3.0f64.max(t.hi)),
    };
    let mut recs = tube_slices(mode, t, [clip, clip], &cfg, exec);
    let mut out = recs.slices.remove(0);
    out.t = [t.lo, t.hi];
    for r in recs.slices {
        if r.verdict > out.verdict {
            out.verdict = r.verdict;
            out.reason = r.reason;
        }
        out.ring_boxes += r.ring_boxes;
    }
    out
}

struct TubeRun {
    slices: Vec<SliceRecord>,
    chart: Option<ChartRecord>,
}

fn tube_slices<E: Executor>(mode: Mode, t: Interval, clip: [I; 2], cfg: &CertifyConfig, exec: &E) -> TubeRun {
    let sp = slice_params(cfg);
    let split = chart_split(&cfg.chart);
    let use_chart = mode == Mode::Trig && t.hi > split;
    let main_end = if use_chart { t.hi.min(split) } else { t.hi };
    let mut slices = Vec::new();
    if t.lo < main_end {
        let sec = MainSection { mode, clip, shift: cfg.shift };
        let cuts = chart::slice_cuts(I::new(t.lo, main_end), cfg.tube.slice_width);
        slices = exec.map(&cuts, |c| certify_slice(&sec, *c, &sp));
    }
    let mut chart_rec = None;
    if use_chart {
        let from = t.lo.max(split);
        let eps = I::new(0.0, (PI - from).hi);
        let cp = chart::ChartParams {
            rho: cfg.tube.rho,
            slice_width: cfg.tube.slice_width,
            budget: cfg.budget,
            slice_budget: cfg.slice_budget,
            max_depth: cfg.max_depth,
            keep: cfg.keep_boxes,
            shift: cfg.shift,
            epsilon: EPSILON,
        };
        match chart::run_chart(&cfg.chart, eps, &cp, exec) {
            Some(rec) => {
                let verdict = if rec.closed { SliceVerdict::FallbackUsed } else { SliceVerdict::Failed };
                let mut add: Vec<SliceRecord> = rec.slice_records.iter().rev().cloned().collect();
                for r in add.iter_mut() {
                    if r.verdict == SliceVerdict::Certified || !rec.closed {
                        r.verdict = if r.verdict == SliceVerdict::Certified { verdict } else { r.verdict };
                    }
                    if !rec.closed && r.reason.is_none() {
                        r.reason = Some("chart not closed".to_string());
                    }
                }
                slices.extend(add);
                chart_rec = Some(rec);
            }
            None => {
                // Chart unavailable (tube too wide): continue with plain slices.
                let sec = MainSection { mode, clip, shift: cfg.shift };
                let cuts = chart::slice_cuts(I::new(from, t.hi), cfg.tube.slice_width);
                slices.extend(exec.map(&cuts, |c| certify_slice(&sec, *c, &sp)));
            }
        }
    }
    TubeRun { slices, chart: chart_rec }
}

fn tube_status(slices: &[SliceRecord]) -> Status {
    slices
        .iter()
        .map(|s| match s.verdict {
            SliceVerdict::Certified | SliceVerdict::FallbackUsed => Status::ProvedStrict,
            SliceVerdict::UpToEpsilon => Status::ProvedUpToEpsilon,
            SliceVerdict::Failed => Status::Inconclusive,
        })
        .min()
        .unwrap_or(Status::ProvedStrict)
}

/// Certifies `f − shift > target_delta` on `outer ∖ tube` and `f ≥ 0` on the
/// tube; no corner or boundary bookkeeping.
pub fn certify_region<E: Executor>(mode: Mode, outer: &[CBox], cfg: &CertifyConfig, exec: &E) -> Result<Certificate> {
    run(0, mode, outer, None, cfg, exec)
}

/// Full lemma certificate: default region (unless overridden), tube, corner
/// policy and boundary faces.
pub fn certify_lemma<E: Executor>(lemma: u8, cfg: &CertifyConfig, exec: &E) -> Result<Certificate> {
    let mode = lemma_mode(lemma)?;
    let outer = match &cfg.outer {
        Some(o) => o.clone(),
        None => default_region(lemma)?,
    };
    let corner = (mode == Mode::Trig && cfg.outer.is_none()).then(trig_corner);
    run(lemma, mode, &outer, corner, cfg, exec)
}

fn run<E: Executor>(lemma: u8, mode: Mode, outer: &[CBox], corner: Option<CBox>, cfg: &CertifyConfig, exec: &E) -> Result<Certificate> {
    cfg.validate()?;
    let rho = cfg.tube.rho;
    let tube_applies: Vec<bool> = outer.iter().map(|b| rho > 0.0 && meets_manifold(mode, b)).collect();

    let mut ledger = alloc::vec![ledger_use(zero_step(mode))];
    if lemma != 0 {
        let extra: &[&str] = match mode {
            Mode::Trig => &["G_theta_pi", "G_factorization"],
            Mode::Hyp => &["F_ell_zero", "F_factorization"],
        };
        ledger.extend(extra.iter().map(|k| ledger_use(k)));
    }
    let ledger_ok = ledger.iter().all(|l| l.verified);

    // Region search; a box is excluded only inside a tube that applies to
    // its outer box, so each outer box is searched separately.
    let mut stats = Stats::default();
    let mut delta = f64::INFINITY;
    let mut residual = Vec::new();
    let mut region_ok = true;
    let mut exhausted = false;
    for (b, &applies) in outer.iter().zip(&tube_applies) {
        let left = cfg.budget.saturating_sub(stats.boxes_processed);
        if left == 0 {
            exhausted = true;
            residual.push(ResidualBox { kind: "pending".to_string(), bx: *b, lower: None });
            stats.boxes_pending += 1;
            region_ok = false;
            continue;
        }
        let problem = Region { mode, rho: if applies { rho } else { 0.0 }, shift: cfg.shift };
        let params = BnbParams { threshold: cfg.target_delta, budget: left, max_depth: cfg.max_depth, keep: cfg.keep_boxes };
        let out = bnb::run(&problem, &[*b], params, exec);
        stats.boxes_processed += out.processed;
        stats.max_depth = stats.max_depth.max(out.max_depth);
        stats.leaves_accepted += out.accepted;
        stats.leaves_excluded += out.excluded;
        stats.mvf_refined += out.refined;
        stats.leaves_failed += out.failed_count;
        stats.boxes_pending += out.pending_count;
        delta = delta.min(out.min_accepted);
        region_ok &= out.complete();
        exhausted |= out.budget_exhausted();
        for (bx, lo) in &out.failed {
            residual.push(ResidualBox { kind: "failed".to_string(), bx: *bx, lower: finite_or_none(*lo) });
        }
        for bx in &out.pending {
            residual.push(ResidualBox { kind: "pending".to_string(), bx: *bx, lower: None });
        }
    }

    // Tube.
    let mut tube = TubeRecord {
        rho,
        map: map_id(mode).to_string(),
        slice_width: cfg.tube.slice_width,
        skipped: exhausted,
        slices: 0,
        certified: 0,
        fallback_used: 0,
        up_to_epsilon: 0,
        failed: 0,
        ring_boxes: 0,
        min_ring_lower: None,
        max_krawczyk_iterations: 0,
        zero_from: ledger[0].id.clone(),
        chart: None,
        failed_slices: Vec::new(),
    };
    let tube_st = if exhausted {
        Status::Inconclusive
    } else {
        let mut all = Vec::new();
        for (b, &applies) in outer.iter().zip(&tube_applies) {
            if !applies {
                continue;
            }
            let run = tube_slices(mode, b.t, [b.u, b.v], cfg, exec);
            if let Some(c) = run.chart {
                stats.chart_boxes += c.region.processed + c.slice_boxes;
                tube.chart = Some(c);
            }
            all.extend(run.slices);
        }
        tube.slices = all.len() as u64;
        let count = |v| all.iter().filter(|s| s.verdict == v).count() as u64;
        tube.certified = count(SliceVerdict::Certified);
        tube.fallback_used = count(SliceVerdict::FallbackUsed);
        tube.up_to_epsilon = count(SliceVerdict::UpToEpsilon);
        tube.failed = count(SliceVerdict::Failed);
        tube.ring_boxes = all.iter().map(|s| s.ring_boxes).sum();
        tube.min_ring_lower = all.iter().filter_map(|s| s.ring_min_lower).reduce(f64::min);
        tube.max_krawczyk_iterations = all.iter().filter_map(|s| s.krawczyk_iterations).max().unwrap_or(0);
        stats.slices = tube.slices;
        stats.slice_boxes = tube.ring_boxes;
        for s in all.iter().filter(|s| !matches!(s.verdict, SliceVerdict::Certified | SliceVerdict::FallbackUsed)) {
            for bx in &s.residual {
                residual.push(ResidualBox { kind: "slice".to_string(), bx: *bx, lower: None });
            }
            if tube.failed_slices.len() < cfg.keep_boxes {
                tube.failed_slices.push(s.clone());
            }
        }
        tube_status(&all)
    };
    residual.truncate(cfg.keep_boxes);

    let boundaries = if lemma == 0 { Vec::new() } else { boundary_records(mode, &ledger) };
    let region_st = if region_ok && ledger_ok { Status::ProvedStrict } else { Status::Inconclusive };
    let status = region_st.min(tube_st);

    let corner_rec = match (corner, cfg.corner_policy) {
        (Some(c), CornerPolicy::Sample) => Some(sample_corner(&c, cfg.corner_samples, cfg.seed, cfg.shift, exec)),
        _ => None,
    };
    let overall = match &corner_rec {
        Some(c) => status.min(c.status),
        None => status,
    };
    stats.corner_samples = corner_rec.as_ref().map_or(0, |c| c.samples);

    Ok(Certificate {
        schema_version: SCHEMA_VERSION,
        lemma,
        mode,
        status,
        overall_status: overall,
        delta: finite_or_none(delta),
        target_delta: cfg.target_delta,
        epsilon: EPSILON,
        shift: cfg.shift,
        region: RegionRecord { coordinates: format!("(t, {})", map_id(mode)), outer: outer.to_vec(), tube_applies, corner },
        tube,
        corner_policy: cfg.corner_policy,
        corner: corner_rec,
        boundaries,
        ledger,
        residual_boxes: residual,
        stats,
        rounding: interval::ROUNDING.to_string(),
        refinement: REFINEMENT.to_string(),
        subdivision: SUBDIVISION.to_string(),
        max_depth: cfg.max_depth,
        budget: cfg.budget,
        version: crate::VERSION.to_string(),
        run: None,
    })
}

fn boundary_records(mode: Mode, ledger: &[LedgerUse]) -> Vec<BoundaryRecord> {
    let find = |name: &str| ledger.iter().find(|l| l.name == name);
    let rec = |face: &str, method: &str, step: Option<&LedgerUse>, status: &str| BoundaryRecord {
        face: face.to_string(),
        method: method.to_string(),
        ledger_step: step.map(|l| l.id.clone()),
        status: if step.is_some_and(|l| !l.verified) { "unverified".to_string() } else { status.to_string() },
    };
    match mode {
        Mode::Trig => alloc::vec![
            rec("theta = pi", "exact identity G = 4A(x) + 4A(y) with A increasing from A(0) = 0", find("G_theta_pi"), "proved"),
            rec(
                "theta = 0",
                "boundary infimum: G = (3pi - 6u + sin 2u) + (3pi - 6v + sin 2v) > 0, with infimum 0 only as x, y -> infinity; inside the corner it follows the corner policy",
                None,
                "boundary_infimum",
            ),
            rec("x = 0 or y = 0", "faces u = 0, v = 0 belong to the outer boxes", None, "covered_by_region"),
            rec("x or y -> infinity", "faces u = pi/2, v = pi/2 belong to the outer boxes (compactification)", None, "covered_by_region"),
        ],
        Mode::Hyp => alloc::vec![
            rec("ell = 0", "exact identity at ell = 0; outside the certified ell-range", find("F_ell_zero"), "identity_only"),
            rec("x = 1 or y = 1", "F -> +infinity (w -> infinity); outside the certified w-range", None, "outside_region"),
            rec("x, y -> infinity", "w -> 0 edge; outside the certified w-range", None, "outside_region"),
        ],
    }
}

/// Quasi-random check of `G − shift ≥ −ε` over the corner box.
pub fn sample_corner<E: Executor>(corner: &CBox, samples: u64, seed: u64, shift: f64, exec: &E) -> CornerRecord {
    const CHUNK: u64 = 10_000;
    let halton = Halton::new(3, seed);
    let chunks: Vec<u64> = (0..samples.div_ceil(CHUNK)).collect();
    let dims = corner.dims();
    let at = |h: &[f64], d: usize| {
        let v = dims[d].lo + h[d] * (dims[d].hi - dims[d].lo);
        // Stay strictly below π/2 so that x is finite.
        if d > 0 {
            v.min(core::f64::consts::FRAC_PI_2.next_down())
        } else {
            v
        }
    };
    let mins = exec.map(&chunks, |&c| {
        let mut best = (f64::INFINITY, [0.0; 3]);
        for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
            let h = halton.point(i + 1);
            let p = [at(&h, 0), at(&h, 1), at(&h, 2)];
            let v = scalar::eval_g_compact(p[0], p[1], p[2]) - shift;
            if v < best.0 {
                best = (v, p);
            }
        }
        best
    });
    let (min_value, argmin) = mins.into_iter().fold((f64::INFINITY, [0.0; 3]), |a, b| if b.0 < a.0 { b } else { a });
    let passed = samples > 0 && min_value >= -EPSILON;
    CornerRecord {
        region: *corner,
        samples,
        seed,
        threshold: -EPSILON,
        min_value,
        argmin,
        passed,
        status: if passed { Status::ProvedUpToEpsilon } else { Status::Inconclusive },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn compactify_examples() {
        let c = compactify_point(&EvalPoint::trig(core::f64::consts::FRAC_PI_2, 1.0, 1.0).unwrap());
        assert!((c[1] - core::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let x = 1.0 / libm::tan(1.0);
        let c = compactify_point(&EvalPoint::trig(2.0, x, x).unwrap());
        assert!((c[1] - (core::f64::consts::FRAC_PI_2 - 1.0)).abs() < 1e-14);
        for &(m, t, x, y) in &[(Mode::Trig, 0.7, 0.3, 12.0), (Mode::Hyp, 1.3, 1.2, 7.5)] {
            let p = EvalPoint::new(m, t, x, y).unwrap();
            let back = expand_point(m, compactify_point(&p)).unwrap();
            assert!((back.x - x).abs() <= 1e-14 * x && (back.y - y).abs() <= 1e-14 * y);
        }
    }

    #[test]
    fn off_manifold_box_is_strict() {
        let b = compactify_box(&interval::Box3::new(Mode::Trig, I::new(1.0, 1.2), I::new(5.0, 6.0), I::new(5.0, 6.0)).unwrap());
        let cert = certify_region(Mode::Trig, &[b], &CertifyConfig::default(), &Sequential).unwrap();
        assert_eq!(cert.status, Status::ProvedStrict);
        assert!(!cert.region.tube_applies[0]);
        let d = cert.delta.unwrap();
        assert!(d > 0.0);
        let g = scalar::eval_g_compact(1.0, b.u.lo, b.v.lo);
        assert!(d <= g + 1e-12);
    }

    #[test]
    fn disabled_tube_is_inconclusive() {
        let b = CBox::new((1.0, 1.2), (0.8, 1.2), (0.8, 1.2));
        let cfg = CertifyConfig { tube: TubeSpec { rho: 0.0, slice_width: 0.01 }, ..Default::default() };
        let cert = certify_region(Mode::Trig, &[b], &cfg, &Sequential).unwrap();
        assert_eq!(cert.status, Status::Inconclusive);
        assert!(!cert.residual_boxes.is_empty());
    }

    #[test]
    fn budget_one_processes_one_box() {
        let cfg = CertifyConfig { budget: 1, corner_policy: CornerPolicy::Exclude, ..Default::default() };
        let cert = certify_lemma(1, &cfg, &Sequential).unwrap();
        assert_eq!(cert.status, Status::Inconclusive);
        assert_eq!(cert.stats.boxes_processed, 1);
        assert!(cert.tube.skipped);
    }

    #[test]
    fn small_region_with_tube_is_strict() {
        let b = CBox::new((1.2, 1.4), (0.0, FRAC_PI_2.hi), (0.0, FRAC_PI_2.hi));
        let cert = certify_region(Mode::Trig, &[b], &CertifyConfig::default(), &Sequential).unwrap();
        assert_eq!(cert.status, Status::ProvedStrict, "{:?} {:?} {:?}", cert.tube.failed_slices, cert.residual_boxes, cert.stats);
        assert_eq!(cert.tube.slices, 20);
    }

    #[test]
    fn shifted_function_is_not_strict() {
        let b = CBox::new((1.2, 1.3), (0.0, FRAC_PI_2.hi), (0.0, FRAC_PI_2.hi));
        let cfg = CertifyConfig { shift: 0.01, budget: 200_000, ..Default::default() };
        let cert = certify_region(Mode::Trig, &[b], &cfg, &Sequential).unwrap();
        assert_ne!(cert.status, Status::ProvedStrict);
    }

    #[test]
    fn near_pi_slice_uses_fallback() {
        let r = certify_tube_slice(Mode::Trig, I::new(3.10, PI.lo), &TubeSpec::default(), &Sequential);
        assert_eq!(r.verdict, SliceVerdict::FallbackUsed, "{r:?}");
        let r = certify_tube_slice(Mode::Trig, I::new(1.5, 1.51), &TubeSpec::default(), &Sequential);
        assert_eq!(r.verdict, SliceVerdict::Certified);
    }

    #[test]
    fn corner_sampling_is_deterministic() {
        let c = trig_corner();
        let a = sample_corner(&c, 20_000, 3, 0.0, &Sequential);
        let b = sample_corner(&c, 20_000, 3, 0.0, &Sequential);
        assert_eq!(a, b);
        assert!(a.passed, "{a:?}");
    }
}
