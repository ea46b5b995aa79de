//! Breadth-wise branch-and-bound over 3-D boxes. Each generation is assessed
//! through the executor (order-preserving), then merged sequentially, so the
//! outcome does not depend on the worker count.

use alloc::vec::Vec;

use crate::exec::Executor;
use crate::interval::CBox;

/// Verdict on a single box.
#[derive(Clone, Copy, Debug)]
pub enum Assess {
    /// Entirely inside an excluded set (tube, chart core); handled elsewhere.
    Excluded,
    /// Contains a point where the function is known to be `≤ threshold`;
    /// subdividing cannot help.
    Hopeless,
    /// Lower bound of the function over the box and split weights per
    /// dimension (`width × |∂|`).
    Bound { lower: f64, weights: [f64; 3], refined: bool },
}

pub trait Problem: Sync {
    fn assess(&self, b: &CBox, threshold: f64) -> Assess;
}

#[derive(Clone, Copy, Debug)]
pub struct BnbParams {
    pub threshold: f64,
    pub budget: u64,
    pub max_depth: u32,
    /// How many failed or pending boxes to keep for reporting.
    pub keep: usize,
}

#[derive(Clone, Debug, Default)]
pub struct BnbOutcome {
    /// Smallest lower bound among accepted leaves (`+∞` if none).
    pub min_accepted: f64,
    pub processed: u64,
    pub accepted: u64,
    pub excluded: u64,
    pub refined: u64,
    pub max_depth: u32,
    pub failed_count: u64,
    /// Smallest lower bound among failed leaves (`+∞` if none).
    pub min_failed: f64,
    pub failed: Vec<(CBox, f64)>,
    pub pending_count: u64,
    pub pending: Vec<CBox>,
}

impl BnbOutcome {
    pub fn complete(&self) -> bool {
        self.failed_count == 0 && self.pending_count == 0
    }

    pub fn budget_exhausted(&self) -> bool {
        self.pending_count > 0
    }
}

/// Dimension to bisect: largest weight, ties and degenerate weights falling
/// back to the widest dimension. `None` when the box cannot be split.
pub fn split_dim(b: &CBox, weights: &[f64; 3]) -> Option<usize> {
    let dims = b.dims();
    let widths: [f64; 3] = core::array::from_fn(|i| if dims[i].is_finite() { dims[i].hi - dims[i].lo } else { f64::INFINITY });
    let splittable = |i: usize| widths[i] > 0.0 && dims[i].mid() > dims[i].lo && dims[i].mid() < dims[i].hi;
    let mut best: Option<usize> = None;
    for i in 0..3 {
        if !splittable(i) || weights[i].is_nan() || weights[i] <= 0.0 {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(j) if weights[i] > weights[j] || (weights[i] == weights[j] && widths[i] > widths[j]) => Some(i),
            keep => keep,
        };
    }
    best.or_else(|| (0..3).filter(|&i| splittable(i)).max_by(|&a, &b| widths[a].total_cmp(&widths[b]).then(b.cmp(&a))))
}

/// The midpoint and the corners of a box, where a box that can never be
/// accepted is most likely to show it.
pub fn probe_points(b: &CBox) -> impl Iterator<Item = [f64; 3]> + '_ {
    let corners = (0..8).map(move |k| {
        let pick = |i: crate::interval::Interval, bit: usize| if k >> bit & 1 == 0 { i.lo } else { i.hi };
        [pick(b.t, 0), pick(b.u, 1), pick(b.v, 2)]
    });
    core::iter::once([b.t.mid(), b.u.mid(), b.v.mid()]).chain(corners)
}

pub fn run<P: Problem, E: Executor>(problem: &P, roots: &[CBox], params: BnbParams, exec: &E) -> BnbOutcome {
    let mut out = BnbOutcome { min_accepted: f64::INFINITY, min_failed: f64::INFINITY, ..Default::default() };
    let mut generation: Vec<(CBox, u32)> = roots.iter().filter(|b| !b.is_empty()).map(|b| (*b, 0)).collect();
    while !generation.is_empty() {
        let remaining = params.budget.saturating_sub(out.processed);
        let take = (remaining.min(generation.len() as u64)) as usize;
        let verdicts = exec.map(&generation[..take], |(b, _)| problem.assess(b, params.threshold));
        out.processed += take as u64;
        let mut next = Vec::new();
        for ((b, depth), v) in generation[..take].iter().zip(verdicts) {
            out.max_depth = out.max_depth.max(*depth);
            match v {
                Assess::Excluded => out.excluded += 1,
                Assess::Hopeless => fail(&mut out, b, f64::NEG_INFINITY, params.keep),
                Assess::Bound { lower, weights, refined } => {
                    if refined {
                        out.refined += 1;
                    }
                    if lower > params.threshold {
                        out.accepted += 1;
                        out.min_accepted = out.min_accepted.min(lower);
                    } else if *depth >= params.max_depth {
                        fail(&mut out, b, lower, params.keep);
                    } else {
                        match split_dim(b, &weights) {
                            Some(d) => {
                                let (l, r) = b.split(d);
                                next.push((l, depth + 1));
                                next.push((r, depth + 1));
                            }
                            None => fail(&mut out, b, lower, params.keep),
                        }
                    }
                }
            }
        }
        if take < generation.len() {
            let rest = generation[take..].iter().map(|(b, _)| *b).chain(next.iter().map(|(b, _)| *b));
            for b in rest {
                out.pending_count += 1;
                if out.pending.len() < params.keep {
                    out.pending.push(b);
                }
            }
            break;
        }
        generation = next;
    }
    out
}

fn fail(out: &mut BnbOutcome, b: &CBox, lower: f64, keep: usize) {
    out.failed_count += 1;
    out.min_failed = out.min_failed.min(lower);
    if out.failed.len() < keep {
        out.failed.push((*b, lower));
    }
}
