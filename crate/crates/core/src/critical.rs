//! Floating-point exploration of the stationarity systems: damped Newton on
//! the gradient, the reduced α/β case split, and a brute-force grid oracle.
//! Nothing here is rigorous; the certifier is.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::quasi::Halton;
use crate::scalar::{self, from_compact, grad_compact, manifold_compact, to_compact, EvalPoint, Mode};

/// Newton stops once the compact gradient is this small.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// ... or once the accepted step is this short.
pub const STEP_TOL: f64 = 1e-14;
/// Largest residual of a reported stationary point.
pub const REPORT_TOL: f64 = 1e-10;
/// Step halvings tried before the iteration is declared stalled.
pub const MAX_HALVINGS: u32 = 40;
/// Manifold distance (compact coordinates) that counts as "on the manifold".
pub const MANIFOLD_TOL: f64 = 1e-6;
/// Distance to the domain boundary (compact coordinates) that counts as
/// "on the boundary".
pub const BOUNDARY_TOL: f64 = 1e-6;
/// Near `(π, 0, 0)` the gradient is quartic in the distance to the corner,
/// so every point within this (compact) distance passes the residual test.
/// Convergents there are attributed to the corner.
pub const CORNER_RADIUS: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Manifold,
    Boundary,
    Spurious,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Manifold => "manifold",
            Classification::Boundary => "boundary",
            Classification::Spurious => "spurious",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub mode: Mode,
    /// `(t, x, y)`; `x` or `y` may be `+∞` on the trig boundary.
    pub point: [f64; 3],
    /// `(t, u, v)` with `x = tan u` resp. `x = coth u`.
    pub compact: [f64; 3],
    /// Largest gradient component at `point` (original coordinates).
    pub residual: f64,
    pub iterations: u32,
    pub manifold_distance: f64,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub reason: String,
    pub compact: [f64; 3],
    pub residual: f64,
    pub iterations: u32,
}

pub type NewtonResult = core::result::Result<StationaryPoint, Divergence>;

fn clip(mode: Mode, z: [f64; 3]) -> [f64; 3] {
    match mode {
        Mode::Trig => {
            let top = FRAC_PI_2 * (1.0 - 1e-12);
            [z[0].clamp(0.0, PI), z[1].clamp(0.0, top), z[2].clamp(0.0, top)]
        }
        Mode::Hyp => [z[0].max(0.0), z[1].max(1e-12), z[2].max(1e-12)],
    }
}

fn norm(v: &[f64; 3]) -> f64 {
    libm::sqrt(v.iter().map(|a| a * a).sum())
}

fn max_abs(v: &[f64; 3]) -> f64 {
    v.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

/// `dx/du` and `d²x/du²` for the compact map.
fn chart_derivs(mode: Mode, x: f64) -> (f64, f64) {
    match mode {
        Mode::Trig => (1.0 + x * x, 2.0 * x * (1.0 + x * x)),
        Mode::Hyp => (1.0 - x * x, 2.0 * x * (x * x - 1.0)),
    }
}

/// Hessian of the compact function by the chain rule.
fn hessian_compact(mode: Mode, z: [f64; 3]) -> Option<[[f64; 3]; 3]> {
    let x = from_compact(mode, z[1]);
    let y = from_compact(mode, z[2]);
    let p = EvalPoint { mode, t: z[0], x, y };
    if !(x.is_finite() && y.is_finite()) {
        return None;
    }
    let h = scalar::hessian(&p).ok()?;
    let g = scalar::grad(&p).ok()?;
    let (dx, ddx) = chart_derivs(mode, x);
    let (dy, ddy) = chart_derivs(mode, y);
    let j = [1.0, dx, dy];
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = h[r][c] * j[r] * j[c];
        }
    }
    out[1][1] += g[1] * ddx;
    out[2][2] += g[2] * ddy;
    out.iter().flatten().all(|v| v.is_finite()).then_some(out)
}

/// Solves `(H² + μI) d = −H g`, the Levenberg–Marquardt step for the
/// symmetric `H`. The regularisation keeps the step small along the
/// manifold, where `H` is singular.
fn lm_step(h: &[[f64; 3]; 3], g: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    let mut scale = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            a[r][c] = (0..3).map(|k| h[k][r] * h[k][c]).sum();
        }
        rhs[r] = -(0..3).map(|k| h[k][r] * g[k]).sum::<f64>();
        scale += a[r][r];
    }
    let mu = 1e-14 * scale + f64::MIN_POSITIVE;
    for (r, row) in a.iter_mut().enumerate() {
        row[r] += mu;
    }
    solve3(a, rhs)
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col];
        for r in col + 1..3 {
            let f = a[r][col] / pivot[col];
            for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Distance of a compact point to the manifold line.
pub fn manifold_distance(mode: Mode, z: [f64; 3]) -> f64 {
    let m = manifold_compact(mode, z[0]);
    (z[1] - m).abs().max((z[2] - m).abs())
}

/// Whether a compact point is on the domain boundary.
pub fn on_boundary(mode: Mode, z: [f64; 3]) -> bool {
    let tol = BOUNDARY_TOL;
    match mode {
        Mode::Trig => {
            let corner = PI - z[0] <= CORNER_RADIUS && z[1].max(z[2]) <= CORNER_RADIUS;
            corner || z[0] <= tol || z[0] >= PI - tol || z[1].min(z[2]) <= tol || z[1].max(z[2]) >= FRAC_PI_2 - tol
        }
        Mode::Hyp => z[0] <= tol || z[1].min(z[2]) <= tol,
    }
}

pub fn classify(mode: Mode, z: [f64; 3]) -> Classification {
    if on_boundary(mode, z) {
        Classification::Boundary
    } else if manifold_distance(mode, z) <= MANIFOLD_TOL {
        Classification::Manifold
    } else {
        Classification::Spurious
    }
}

fn original_residual(mode: Mode, z: [f64; 3]) -> f64 {
    let p = EvalPoint { mode, t: z[0], x: from_compact(mode, z[1]), y: from_compact(mode, z[2]) };
    match scalar::grad(&p) {
        Ok(g) if g.iter().all(|v| v.is_finite()) => max_abs(&g),
        _ => f64::INFINITY,
    }
}

struct Run {
    z: [f64; 3],
    g: [f64; 3],
    iterations: u32,
    failure: Option<&'static str>,
}

/// Damped Newton on the compact gradient. With `free_t = false` the first
/// coordinate is frozen and only `(∂u, ∂v)` is driven to zero.
fn damped(mode: Mode, z0: [f64; 3], free_t: bool, max_iter: u32) -> Run {
    let mask = |mut g: [f64; 3]| {
        if !free_t {
            g[0] = 0.0;
        }
        g
    };
    let gc = |z: [f64; 3]| mask(grad_compact(mode, z[0], z[1], z[2]));
    let mut run = Run { z: z0, g: gc(z0), iterations: 0, failure: None };
    let mut done = max_abs(&run.g) <= RESIDUAL_TOL;
    while !done {
        if run.iterations >= max_iter {
            run.failure = Some("iteration limit reached");
            return run;
        }
        run.iterations += 1;
        let Some(mut h) = hessian_compact(mode, run.z) else {
            run.failure = Some("left the finite part of the domain");
            return run;
        };
        if !free_t {
            h[0] = [1.0, 0.0, 0.0];
            h[1][0] = 0.0;
            h[2][0] = 0.0;
        }
        let Some(d) = lm_step(&h, &run.g) else {
            run.failure = Some("singular Newton system");
            return run;
        };
        let current = norm(&run.g);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = clip(mode, core::array::from_fn(|i| run.z[i] + lambda * d[i]));
            let gt = gc(trial);
            if gt.iter().all(|v| v.is_finite()) && norm(&gt) < current {
                accepted = Some((trial, gt));
                break;
            }
            lambda *= 0.5;
        }
        let Some((next, gn)) = accepted else {
            if max_abs(&run.g) > REPORT_TOL {
                run.failure = Some("damping failed to decrease the gradient");
            }
            // Otherwise stalled at the rounding floor.
            return run;
        };
        let step = (0..3).fold(0.0f64, |m, i| m.max((next[i] - run.z[i]).abs()));
        run.z = next;
        run.g = gn;
        done = max_abs(&run.g) <= RESIDUAL_TOL || step <= STEP_TOL;
    }
    run
}

/// Stationary point of G (resp. F) near `start`, by damped Newton in compact
/// coordinates so that the domain is a box; steps are halved until the
/// gradient norm decreases.
///
/// The full three-variable flow is attracted by the quartic zero at
/// `(π, 0, 0)` (resp. the zero at infinity for ℓ → 0) from much of the
/// domain, so the angle is first frozen and `(x, y)` solved alone; the full
/// system then polishes that point. When the frozen phase fails, the full
/// system starts from `start` itself.
pub fn newton_stationary(start: &EvalPoint, max_iter: u32) -> NewtonResult {
    newton_stationary_with(start, max_iter, Strategy::AngleFirst)
}

/// How [`newton_stationary_with`] iterates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Freeze the angle, solve `(x, y)`, then polish with the full system.
    #[default]
    AngleFirst,
    /// The full three-variable system from the start.
    Full,
}

pub fn newton_stationary_with(start: &EvalPoint, max_iter: u32, strategy: Strategy) -> NewtonResult {
    let mode = start.mode;
    let z0 = clip(mode, [start.t, to_compact(mode, start.x), to_compact(mode, start.y)]);
    let (from, used) = match strategy {
        Strategy::AngleFirst => {
            let frozen = damped(mode, z0, false, max_iter);
            if frozen.failure.is_none() {
                (frozen.z, frozen.iterations)
            } else {
                (z0, 0)
            }
        }
        Strategy::Full => (z0, 0),
    };
    let run = damped(mode, from, true, max_iter.saturating_sub(used).max(1));
    let iterations = used + run.iterations;
    let diverged = |reason: &str| Divergence { reason: reason.into(), compact: run.z, residual: max_abs(&run.g), iterations };
    if let Some(reason) = run.failure {
        return Err(diverged(reason));
    }
    let z = run.z;
    let residual = original_residual(mode, z).min(max_abs(&run.g));
    if residual > REPORT_TOL && !on_boundary(mode, z) {
        return Err(diverged("stopped above the residual tolerance"));
    }
    Ok(StationaryPoint {
        mode,
        point: [z[0], from_compact(mode, z[1]), from_compact(mode, z[2])],
        compact: z,
        residual,
        iterations,
        manifold_distance: manifold_distance(mode, z),
        classification: classify(mode, z),
    })
}

/// Branches of the reduced system after `x = α·m`, `y = β·m` with `m` the
/// manifold coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbBranch {
    AlphaZero,
    BetaZero,
    AlphaEqBeta,
    AlphaBetaOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaState {
    pub branch: AbBranch,
    pub alpha: f64,
    pub beta: f64,
    /// Forced value of `cos θ` (`cosh ℓ`); `None` when any value works.
    pub c: Option<f64>,
    /// The branch is a one-parameter family; `alpha` is a representative.
    pub family: bool,
    /// `c` lies in `(−1, 1)` (trig) resp. `(1, ∞)` (hyp).
    pub c_consistent: bool,
    /// Consistent and inside the `x, y` domain.
    pub admissible: bool,
    /// Off the manifold `α = β = 1`.
    pub off_manifold: bool,
    pub note: String,
}

/// `4α⁴(1−β) − α(α−1)(1 + α + α(1−β))²`, the x-condition with `c`
/// eliminated.
pub fn x_condition(a: f64, b: f64) -> f64 {
    let q = 1.0 + a + a * (1.0 - b);
    4.0 * a.powi(4) * (1.0 - b) - a * (a - 1.0) * q * q
}

/// `4α + (1 − αβ)² − α(1 + αβ)²`, the x-condition divided by α.
pub fn reduced_condition(a: f64, b: f64) -> f64 {
    4.0 * a + (1.0 - a * b).powi(2) - a * (1.0 + a * b).powi(2)
}

/// `(1−α)⁻¹ + (1−β)⁻¹`.
pub fn solved_cosine(a: f64, b: f64) -> f64 {
    1.0 / (1.0 - a) + 1.0 / (1.0 - b)
}

/// Exact `(1−α)⁻¹ + (1−β)⁻¹` for rational representatives.
fn solved_cosine_exact(a: Rational64, b: Rational64) -> f64 {
    let one = Rational64::from_integer(1);
    let c = (one - a).recip() + (one - b).recip();
    c.to_f64().unwrap_or(f64::NAN)
}

fn c_in_range(mode: Mode, c: f64) -> bool {
    match mode {
        Mode::Trig => c > -1.0 && c < 1.0,
        Mode::Hyp => c > 1.0,
    }
}

/// Nonnegative real roots of `β(3β + 1)`.
fn roots_beta_cubic() -> Vec<f64> {
    [0.0, -1.0 / 3.0].into_iter().filter(|b| *b >= 0.0).collect()
}

/// Enumerates the solutions of the reduced system branch by branch.
pub fn solve_alpha_beta(mode: Mode) -> Vec<AlphaBetaState> {
    let mut out = Vec::new();
    // x ≥ 1 in hyp mode rules out α = 0 whatever ℓ is.
    let xy_ok = |a: f64, b: f64| match mode {
        Mode::Trig => a >= 0.0 && b >= 0.0,
        Mode::Hyp => a > 0.0 && b > 0.0,
    };

    // α = 0 kills the x-condition; the y-condition is then β(3β + 1) = 0.
    for (branch, swap) in [(AbBranch::AlphaZero, false), (AbBranch::BetaZero, true)] {
        for other in roots_beta_cubic() {
            let (a, b) = if swap { (other, 0.0) } else { (0.0, other) };
            debug_assert!(x_condition(a, b) == 0.0 && x_condition(b, a) == 0.0);
            let c = solved_cosine_exact(Rational64::from_integer(0), Rational64::from_integer(0));
            let consistent = c_in_range(mode, c);
            let note = match mode {
                Mode::Trig => "forces cos = 2",
                Mode::Hyp => "forces cosh = 2 but x = y = 0 is outside x, y >= 1",
            };
            out.push(AlphaBetaState {
                branch,
                alpha: a,
                beta: b,
                c: Some(c),
                family: false,
                c_consistent: consistent,
                admissible: consistent && xy_ok(a, b),
                off_manifold: true,
                note: note.into(),
            });
        }
    }

    // α = β: (1 − α)(4α + (1 + α²)²) = 0 and the second factor is ≥ 1.
    let a = 1.0;
    debug_assert!(reduced_condition(a, a) == 0.0);
    out.push(AlphaBetaState {
        branch: AbBranch::AlphaEqBeta,
        alpha: a,
        beta: a,
        c: None,
        family: false,
        c_consistent: true,
        admissible: true,
        off_manifold: false,
        note: "the equality manifold; every angle works".into(),
    });

    // αβ = 1: both conditions hold identically and the cosine collapses to 1.
    for (n, d) in [(1, 2), (2, 1), (3, 1)] {
        let ar = Rational64::new(n, d);
        let c = solved_cosine_exact(ar, ar.recip());
        let (a, b) = (ar.to_f64().unwrap_or(f64::NAN), ar.recip().to_f64().unwrap_or(f64::NAN));
        let consistent = c_in_range(mode, c);
        out.push(AlphaBetaState {
            branch: AbBranch::AlphaBetaOne,
            alpha: a,
            beta: b,
            c: Some(c),
            family: true,
            c_consistent: consistent,
            admissible: consistent && xy_ok(a, b),
            off_manifold: true,
            note: match mode {
                Mode::Trig => "forces cos = 1, i.e. theta = 0",
                Mode::Hyp => "forces cosh = 1, i.e. ell = 0",
            }
            .into(),
        });
    }
    out
}

/// Outcome of a grid search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMin {
    pub argmin: [f64; 3],
    pub index: [usize; 3],
    pub value: f64,
    pub evaluated: u64,
    pub skipped: u64,
}

/// `n` equispaced nodes from `lo` to `hi`.
pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

/// Which coordinates a grid lives in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coords {
    /// `(t, x, y)`.
    Plain,
    /// `(t, u, v)`, skipping points inside the tube of radius `rho`
    /// (no skipping for `rho = 0`).
    Compact { rho: f64 },
}

fn check_grid(mode: Mode, bounds: &[[f64; 2]; 3], n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Config("grid needs at least 2 points per axis".into()));
    }
    if bounds.iter().any(|b| !(b[0].is_finite() && b[1].is_finite() && b[0] <= b[1])) {
        return Err(Error::Config("grid bounds must be finite and ordered".into()));
    }
    let _ = mode;
    Ok(())
}

/// Values on the plane `t = t_i`, in `(j, k)` order; `None` marks skipped
/// points.
pub fn grid_plane(mode: Mode, coords: Coords, t: f64, us: &[f64], vs: &[f64]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(us.len() * vs.len());
    let m = manifold_compact(mode, t);
    for &u in us {
        for &v in vs {
            let val = match coords {
                Coords::Plain => Some(scalar::eval(&EvalPoint { mode, t, x: u, y: v }).value),
                Coords::Compact { rho } => {
                    if rho > 0.0 && (u - m).abs() <= rho && (v - m).abs() <= rho {
                        None
                    } else {
                        Some(scalar::eval_compact(mode, t, u, v))
                    }
                }
            };
            out.push(val);
        }
    }
    out
}

/// Exhaustive grid minimum; ties go to the lexicographically smallest index.
pub fn brute_force_min<E: Executor>(mode: Mode, coords: Coords, bounds: [[f64; 2]; 3], n: usize, exec: &E) -> Result<GridMin> {
    check_grid(mode, &bounds, n)?;
    let ax: [Vec<f64>; 3] = core::array::from_fn(|d| axis(bounds[d][0], bounds[d][1], n));
    let planes = exec.map(&ax[0], |t| grid_plane(mode, coords, *t, &ax[1], &ax[2]));
    let mut best = GridMin { argmin: [f64::NAN; 3], index: [0; 3], value: f64::INFINITY, evaluated: 0, skipped: 0 };
    for (i, plane) in planes.iter().enumerate() {
        for (jk, val) in plane.iter().enumerate() {
            let Some(val) = val else {
                best.skipped += 1;
                continue;
            };
            best.evaluated += 1;
            let (j, k) = (jk / n, jk % n);
            // NaN never wins; strict comparison keeps the first index.
            if *val < best.value || best.argmin[0].is_nan() && !val.is_nan() {
                best = GridMin { argmin: [ax[0][i], ax[1][j], ax[2][k]], index: [i, j, k], value: *val, ..best };
            }
        }
    }
    Ok(best)
}

/// One Newton run of a multistart probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub index: u64,
    /// Start in `(t, x, y)`.
    pub start: [f64; 3],
    pub result: NewtonResult,
}

/// Default start box in compact coordinates, away from the boundary.
pub fn default_start_box(mode: Mode) -> [[f64; 2]; 3] {
    match mode {
        Mode::Trig => [[0.05, PI - 0.05], [0.02, FRAC_PI_2 - 0.02], [0.02, FRAC_PI_2 - 0.02]],
        Mode::Hyp => [[0.1, 3.0], [0.05, 3.0], [0.05, 3.0]],
    }
}

/// Newton from `starts` Halton points in the compact box `region`.
pub fn multistart<E: Executor>(mode: Mode, starts: u64, seed: u64, region: [[f64; 2]; 3], max_iter: u32, strategy: Strategy, exec: &E) -> Vec<StartRecord> {
    let halton = Halton::new(3, seed);
    let idx: Vec<u64> = (1..=starts).collect();
    exec.map(&idx, |&i| {
        let q = halton.point(i);
        let z: [f64; 3] = core::array::from_fn(|d| region[d][0] + q[d] * (region[d][1] - region[d][0]));
        let start = [z[0], from_compact(mode, z[1]), from_compact(mode, z[2])];
        let p = EvalPoint { mode, t: start[0], x: start[1], y: start[2] };
        StartRecord { index: i, start, result: newton_stationary_with(&p, max_iter, strategy) }
    })
}

/// Summary of a multistart probe.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub starts: u64,
    pub converged: u64,
    pub manifold: u64,
    pub boundary: u64,
    pub spurious: u64,
    pub diverged: u64,
}

impl ProbeSummary {
    pub fn of(records: &[StartRecord]) -> ProbeSummary {
        let mut s = ProbeSummary { starts: records.len() as u64, ..Default::default() };
        for r in records {
            match &r.result {
                Ok(p) => {
                    s.converged += 1;
                    match p.classification {
                        Classification::Manifold => s.manifold += 1,
                        Classification::Boundary => s.boundary += 1,
                        Classification::Spurious => s.spurious += 1,
                    }
                }
                Err(_) => s.diverged += 1,
            }
        }
        s
    }

    /// No interior convergent off the manifold.
    pub fn clean(&self) -> bool {
        self.spurious == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn newton_reaches_the_manifold() {
        let r = newton_stationary(&EvalPoint::trig(1.5, 0.8, 1.2).unwrap(), 200).unwrap();
        assert_eq!(r.classification, Classification::Manifold, "{r:?}");
        assert!(r.residual <= 1e-10);
        let m = libm::tan(FRAC_PI_2 - r.point[0] / 2.0);
        assert!((r.point[1] - m).abs() < 1e-8 && (r.point[2] - m).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn newton_near_pi() {
        let start = EvalPoint::trig(3.0, 0.05, 0.05).unwrap();
        let full = newton_stationary_with(&start, 500, Strategy::Full).unwrap();
        assert_eq!(full.classification, Classification::Boundary, "{full:?}");
        assert!(PI - full.point[0] < CORNER_RADIUS);
        // With the angle frozen first, the same start finds the manifold at θ = 3.
        let first = newton_stationary(&start, 500).unwrap();
        assert_eq!(first.classification, Classification::Manifold, "{first:?}");
        assert_eq!(first.point[0], 3.0);
    }

    #[test]
    fn newton_hyp() {
        let r = newton_stationary(&EvalPoint::hyp(1.0, 2.5, 2.0).unwrap(), 200).unwrap();
        assert_eq!(r.classification, Classification::Manifold, "{r:?}");
        let m = 1.0 / libm::tanh(r.point[0] / 2.0);
        assert!((r.point[1] - m).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn alpha_beta_cases() {
        for mode in [Mode::Trig, Mode::Hyp] {
            let sols = solve_alpha_beta(mode);
            assert!(sols.iter().all(|s| !(s.admissible && s.off_manifold)), "{sols:?}");
            assert!(sols.iter().any(|s| s.branch == AbBranch::AlphaEqBeta && s.alpha == 1.0));
        }
        assert_eq!(reduced_condition(1.0, 1.0), 0.0);
    }

    #[test]
    fn grid_rejects_single_point() {
        assert!(brute_force_min(Mode::Trig, Coords::Plain, [[0.0, 1.0]; 3], 1, &Sequential).is_err());
    }

    #[test]
    fn grid_tie_breaks_to_first_index() {
        // G is symmetric, so (i, j, k) and (i, k, j) tie; the smaller wins.
        let g = brute_force_min(Mode::Trig, Coords::Plain, [[1.0, 1.2], [0.0, 3.0], [0.0, 3.0]], 7, &Sequential).unwrap();
        assert!(g.index[1] <= g.index[2]);
    }
}
