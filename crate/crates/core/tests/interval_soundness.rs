//! Every interval enclosure must contain the exact value at every point of
//! its box. Exact values come from a 160-bit oracle with its own derivative
//! formulas; a value that rounds to nearest never leaves an interval with
//! f64 endpoints that holds it, so the oracle cannot raise false alarms.

#![allow(clippy::needless_range_loop)]

use astro_float::BigFloat;
use ineqcert_core::certifier::chart::{chart_grad, chart_hess, chart_value};
use ineqcert_core::hp::{to_f64, Hp};
use ineqcert_core::oracle::jet;
use ineqcert_core::interval::{
    enclose, eval_grad_interval, eval_hessian_xy_interval, eval_interval, grad_compact_interval, value_naive, Box3, CBox,
    Interval,
};
use ineqcert_core::scalar::Mode;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

const BITS: usize = 160;
const POINTS: usize = 100;

thread_local! {
    static HP: std::cell::RefCell<Hp> = std::cell::RefCell::new(Hp::new(BITS));
}

fn sample(rng: &mut ChaCha8Rng, i: Interval) -> f64 {
    // Endpoints are where monotone enclosures are tight; hit them often.
    match rng.gen_range(0..8) {
        0 => i.lo,
        1 => i.hi,
        _ => rng.gen_range(i.lo..=i.hi),
    }
}

fn span(lo: f64, hi: f64, a: f64, w: f64) -> Interval {
    let l = lo + a * (hi - lo);
    Interval::new(l, (l + w).min(hi))
}

fn check(name: &str, enc: Interval, v: f64, at: [f64; 3]) -> Result<(), TestCaseError> {
    prop_assert!(enc.contains(v), "{name} at {at:?}: {v} not in {enc:?}");
    Ok(())
}

fn widths() -> impl Strategy<Value = f64> {
    (-6.0f64..0.5).prop_map(|e| 10f64.powf(e))
}

type Spec = (f64, f64, f64, f64, f64, f64, u64);

fn spec() -> impl Strategy<Value = Spec> {
    (0.0f64..1.0, widths(), 0.0f64..1.0, widths(), 0.0f64..1.0, widths(), any::<u64>())
}

fn xy_case(mode: Mode, (at, wt, ax, wx, ay, wy, seed): Spec) -> Result<(), TestCaseError> {
    let (tr, xr) = match mode {
        Mode::Trig => ((0.0, PI), (0.0, 40.0)),
        Mode::Hyp => ((0.0, 6.0), (1.0 + 1e-6, 40.0)),
    };
    let b = Box3::new(mode, span(tr.0, tr.1, at, wt), span(xr.0, xr.1, ax, wx), span(xr.0, xr.1, ay, wy)).unwrap();
    let val = eval_interval(&b);
    let grad = eval_grad_interval(&b);
    let hess = eval_hessian_xy_interval(&b);
    HP.with(|cell| {
        let hp = &mut *cell.borrow_mut();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..POINTS {
            let p = [sample(&mut rng, b.t), sample(&mut rng, b.x), sample(&mut rng, b.y)];
            let (t, x, y) = (hp.f64(p[0]), hp.f64(p[1]), hp.f64(p[2]));
            let j = jet(hp, mode, &t, &x, &y);
            check("value", val, to_f64(&j.value), p)?;
            for i in 0..3 {
                check("grad", grad[i], to_f64(&j.grad[i]), p)?;
            }
            for r in 0..2 {
                for c in 0..2 {
                    check("hess", hess[r][c], to_f64(&j.hess[r][c]), p)?;
                }
            }
        }
        Ok(())
    })
}

fn compact_case(mode: Mode, (at, wt, ax, wx, ay, wy, seed): Spec) -> Result<(), TestCaseError> {
    let (tr, ur) = match mode {
        Mode::Trig => ((0.0, PI), (0.0, FRAC_PI_2 - 0.05)),
        Mode::Hyp => ((0.0, 6.0), (0.02, 3.5)),
    };
    let t = span(tr.0, tr.1, at, wt);
    let (u, v) = (span(ur.0, ur.1, ax, wx), span(ur.0, ur.1, ay, wy));
    let b = CBox::new((t.lo, t.hi), (u.lo, u.hi), (v.lo, v.hi));
    let naive = value_naive(mode, &b);
    let refined = enclose(mode, &b, f64::INFINITY);
    let grad = grad_compact_interval(mode, &b);
    HP.with(|cell| {
        let hp = &mut *cell.borrow_mut();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..POINTS {
            let p = [sample(&mut rng, t), sample(&mut rng, u), sample(&mut rng, v)];
            let (hu, hv) = (hp.f64(p[1]), hp.f64(p[2]));
            let (x, y) = match mode {
                Mode::Trig => (hp.tan(&hu), hp.tan(&hv)),
                Mode::Hyp => {
                    let one = hp.int(1);
                    let (a, b) = (hp.tanh(&hu), hp.tanh(&hv));
                    (hp.div(&one, &a), hp.div(&one, &b))
                }
            };
            let t = hp.f64(p[0]);
            let j = jet(hp, mode, &t, &x, &y);
            check("compact value", naive, to_f64(&j.value), p)?;
            check("compact value (mvf)", refined.value, to_f64(&j.value), p)?;
            let cg = [j.grad[0].clone(), hp.mul(&j.grad[1], &j.dxdu[0]), hp.mul(&j.grad[2], &j.dxdu[1])];
            for i in 0..3 {
                check("compact grad", grad[i], to_f64(&cg[i]), p)?;
            }
        }
        Ok(())
    })
}

/// Exact `H(ε, X, Y) = G(π − ε, εX, εY)/ε⁵` and its X/Y derivatives.
fn chart_case((ae, we, ax, wx, ay, wy, seed): Spec) -> Result<(), TestCaseError> {
    let e = span(1e-3, 0.2, ae, we);
    let (x, y) = (span(0.0, 2.0, ax, wx), span(0.0, 2.0, ay, wy));
    let val = chart_value(e, x, y);
    let grad = chart_grad(e, x, y);
    let hess = chart_hess(e, x, y);
    HP.with(|cell| {
        let hp = &mut *cell.borrow_mut();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..POINTS {
            let p = [sample(&mut rng, e), sample(&mut rng, x), sample(&mut rng, y)];
            let he = hp.f64(p[0]);
            let pi = hp.pi();
            let th = hp.sub(&pi, &he);
            let (gx, gy) = (hp.mul(&he, &hp.f64(p[1])), hp.mul(&he, &hp.f64(p[2])));
            let j = jet(hp, Mode::Trig, &th, &gx, &gy);
            let scaled = |hp: &Hp, v: &BigFloat, k: i64| to_f64(&hp.div(v, &hp.powi(&he, k as usize)));
            check("chart value", val, scaled(hp, &j.value, 5), p)?;
            for i in 0..2 {
                check("chart grad", grad[i], scaled(hp, &j.grad[i + 1], 4), p)?;
                for k in 0..2 {
                    check("chart hess", hess[i][k], scaled(hp, &j.hess[i][k], 3), p)?;
                }
            }
        }
        Ok(())
    })
}

// The acceptance suite runs every family at 1000 boxes; here they get a
// lighter pass with shrinking.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trig_enclosures_contain_g(s in spec()) {
        xy_case(Mode::Trig, s)?;
    }

    #[test]
    fn hyp_enclosures_contain_f(s in spec()) {
        xy_case(Mode::Hyp, s)?;
    }

    #[test]
    fn trig_compact_enclosures(s in spec()) {
        compact_case(Mode::Trig, s)?;
    }

    #[test]
    fn hyp_compact_enclosures(s in spec()) {
        compact_case(Mode::Hyp, s)?;
    }

    #[test]
    fn chart_enclosures(s in spec()) {
        chart_case(s)?;
    }
}
