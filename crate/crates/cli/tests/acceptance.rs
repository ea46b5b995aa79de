//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when a required check fails. Commands run through the built
//! binary; oracles and grids come from the library.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use ineqcert_core::certifier::chart::{chart_grad, chart_hess, chart_value};
use ineqcert_core::critical::{self, Coords, CORNER_RADIUS};
use ineqcert_core::exec::Sequential;
use ineqcert_core::hp::{to_f64, Hp, DEFAULT_BITS};
use ineqcert_core::identities::{self, StepStatus};
use ineqcert_core::interval::{
    enclose, eval_grad_interval, eval_hessian_xy_interval, eval_interval, grad_compact_interval, value_naive, Box3, CBox,
    Interval,
};
use ineqcert_core::oracle::{jet, jet_f64};
use ineqcert_core::scalar::{self, EvalPoint, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const TEN_MINUTES: Duration = Duration::from_secs(600);

struct Suite {
    dir: tempfile::TempDir,
    failed: Vec<String>,
    gaps: Vec<String>,
}

impl Suite {
    fn verdict(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id.to_string());
        }
    }

    /// A check that cannot be met in floating point; reported, not gating.
    fn gap(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} {id} (known limitation, not gating): {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.gaps.push(id.to_string());
        }
    }

    fn run(&self, args: &[&str]) -> (Output, Duration) {
        let start = Instant::now();
        let o = Command::new(env!("CARGO_BIN_EXE_ineqcert"))
            .args(args)
            .env_remove("INEQCERT_WORKERS")
            .current_dir(self.dir.path())
            .output()
            .expect("spawn ineqcert");
        (o, start.elapsed())
    }

    fn json(&self, name: &str) -> Value {
        std::fs::read_to_string(self.dir.path().join(name))
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or(Value::Null)
    }

    fn text(&self, name: &str) -> String {
        std::fs::read_to_string(self.dir.path().join(name)).unwrap_or_default()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, d| m.max(d.abs()))
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn identity_ledger(s: &mut Suite) {
    let (o, dt) = s.run(&["identities", "--mode", "both", "--out", "identities.json"]);
    let r = s.json("identities.json");
    let steps = r["steps"].as_array().cloned().unwrap_or_default();
    let verified = steps.iter().filter(|st| st["status"] == "verified").count();
    let (mut exact, mut exact_zero, mut reductions, mut sampled, mut worst) = (0, true, 0, true, 0f64);
    for st in &steps {
        let checks = st["checks"].as_array().cloned().unwrap_or_default();
        match st["method"].as_str() {
            Some("exact_poly") => {
                exact += 1;
                exact_zero &= checks.iter().all(|c| c["passed"] == true && c["residual"] == "");
            }
            Some("transcendental_reduction") => {
                reductions += 1;
                let hp: Vec<_> = checks.iter().filter(|c| !c["samples"].is_null()).collect();
                sampled &= !hp.is_empty() && hp.iter().all(|c| c["samples"] == 100);
                for c in hp {
                    worst = worst.max(c["max_abs_residual"].as_f64().unwrap_or(f64::INFINITY));
                }
            }
            _ => {}
        }
    }
    let ok = o.status.code() == Some(0)
        && steps.len() == 44
        && verified == 44
        && exact_zero
        && reductions == 2
        && sampled
        && worst <= 1e-30
        && dt < Duration::from_secs(10);
    s.verdict(
        "1",
        ok,
        format!(
            "identity ledger: {verified}/{} steps verified; {exact} exact_poly steps, residuals all zero: {exact_zero}; \
             {reductions} transcendental reductions at 100 points, max residual {worst:.1e}; {:.2} s",
            steps.len(),
            dt.as_secs_f64()
        ),
    );
}

fn manifold_vanishing(s: &mut Suite) {
    let (mut gv, mut gg) = (0f64, 0f64);
    for th in grid(0.05, PI, 1000) {
        let m = scalar::manifold_x(Mode::Trig, th);
        let p = EvalPoint::trig(th, m, m).unwrap();
        gv = gv.max(scalar::eval(&p).value.abs());
        gg = gg.max(max_abs(&scalar::grad(&p).unwrap()));
    }
    let (mut fv, mut fg) = (0f64, 0f64);
    for l in grid(0.05, 20.0, 1000) {
        let w = scalar::manifold_compact(Mode::Hyp, l);
        fv = fv.max(scalar::eval_compact(Mode::Hyp, l, w, w).abs());
        fg = fg.max(max_abs(&scalar::grad_compact(Mode::Hyp, l, w, w)));
    }
    s.verdict(
        "2",
        gv <= 1e-12 && gg <= 1e-10 && fv <= 1e-12 && fg <= 1e-10,
        format!(
            "manifold vanishing: G at x = y = cot(θ/2), 1000 θ in [0.05, π]: max |G| {gv:.1e}, max |∇G| {gg:.1e}; \
             F at w = ℓ/2 (x = coth w exactly), 1000 ℓ in [0.05, 20]: max |F| {fv:.1e}, max |∇F| {fg:.1e}"
        ),
    );

    // F in x-coordinates: fl(coth(ℓ/2)) is off the manifold by up to half an
    // ulp, and F's curvature there is about sinh³ℓ, so even the exact value
    // at the rounded input exceeds the tolerances for large ℓ.
    let mut hp = Hp::new(DEFAULT_BITS);
    let (mut xv, mut xg, mut dv, mut dg) = (0f64, 0f64, 0f64, 0f64);
    let (mut first_v, mut first_g, mut exact_v, mut exact_g) = (None, None, None, None);
    for l in grid(0.05, 20.0, 1000) {
        let m = scalar::manifold_x(Mode::Hyp, l);
        let p = EvalPoint::hyp(l, m, m).unwrap();
        let v = scalar::eval(&p).value;
        let g = scalar::grad(&p).unwrap();
        let (og, ov, _) = jet_f64(&mut hp, Mode::Hyp, l, m, m);
        xv = xv.max(v.abs());
        xg = xg.max(max_abs(&g));
        dv = dv.max((v - ov).abs());
        dg = dg.max((0..3).map(|i| (g[i] - og[i]).abs() / (1.0 + og[i].abs())).fold(0.0, f64::max));
        if v.abs() > 1e-12 {
            first_v.get_or_insert(l);
        }
        if max_abs(&g) > 1e-10 {
            first_g.get_or_insert(l);
        }
        if ov.abs() > 1e-12 {
            exact_v.get_or_insert(l);
        }
        if max_abs(&og) > 1e-10 {
            exact_g.get_or_insert(l);
        }
    }
    let at = |o: Option<f64>| o.map_or("nowhere".to_string(), |l| format!("ℓ ≈ {l:.2}"));
    s.gap(
        "2x",
        xv <= 1e-12 && xg <= 1e-10,
        format!(
            "F at x = y = fl(coth(ℓ/2)): max |F| {xv:.1e} (above 1e-12 from {}), max |∇F| {xg:.1e} (above 1e-10 from {}); \
             exact values at the same rounded inputs exceed the tolerances from {} and {}; \
             evaluator vs exact: value {dv:.1e}, gradient {dg:.1e} relative",
            at(first_v),
            at(first_g),
            at(exact_v),
            at(exact_g)
        ),
    );
}

fn reference_values(s: &mut Suite) {
    let mut hp = Hp::new(DEFAULT_BITS);
    let pi = hp.pi();
    let w1 = to_f64(&hp.sub(&hp.int(10), &hp.mul(&hp.int(3), &pi)));
    let w2 = to_f64(&hp.sub(&hp.mul(&hp.int(3), &pi), &hp.int(7)));
    let half = hp.div(&hp.int(1), &hp.int(2));
    let a = hp.atanh(&half);
    let w3 = to_f64(&hp.add(&hp.mul(&hp.int(12), &a), &hp.div(&hp.int(8), &hp.int(3))));
    let g1 = scalar::eval(&EvalPoint::trig(PI, 1.0, 1.0).unwrap()).value;
    let g2 = scalar::eval(&EvalPoint::trig(FRAC_PI_2, 0.0, 0.0).unwrap()).value;
    let f3 = scalar::eval(&EvalPoint::hyp(0.0, 2.0, 2.0).unwrap()).value;
    let errs = [(g1 - w1).abs(), (g2 - w2).abs(), (f3 - w3).abs()];
    s.verdict(
        "3",
        errs.iter().all(|e| *e <= 1e-12),
        format!(
            "reference values: G(π,1,1) = {g1:.15} vs 10 − 3π = {w1:.15}; G(π/2,0,0) = {g2:.15} vs 3π − 7 = {w2:.15}; \
             F(0,2,2) = {f3:.15} vs 12 atanh(1/2) + 8/3 = {w3:.15}; max error {:.1e}",
            max_abs(&errs)
        ),
    );
}

fn central(fun: impl Fn([f64; 3]) -> f64, p: [f64; 3], i: usize) -> f64 {
    let h = 1e-5 * (1.0 + p[i].abs());
    let (mut a, mut b) = (p, p);
    a[i] += h;
    b[i] -= h;
    (fun(a) - fun(b)) / (2.0 * h)
}

/// Relative error with a floor: `scale` absorbs cancellation in the
/// difference quotient when the reference is tiny against the function.
fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs()).max(scale)
}

fn derivative_checks(s: &mut Suite) {
    let mut worst = [0f64; 2];
    for (k, mode) in [Mode::Trig, Mode::Hyp].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let val = |q: [f64; 3]| scalar::eval(&EvalPoint::new(mode, q[0], q[1], q[2]).unwrap()).value;
        let grd = |q: [f64; 3]| scalar::grad(&EvalPoint::new(mode, q[0], q[1], q[2]).unwrap()).unwrap();
        for _ in 0..1000 {
            let p = match mode {
                Mode::Trig => [rng.gen_range(0.1..3.0), rng.gen_range(0.05..6.0), rng.gen_range(0.05..6.0)],
                Mode::Hyp => [rng.gen_range(0.1..3.0), rng.gen_range(1.2..6.0), rng.gen_range(1.2..6.0)],
            };
            let e = EvalPoint::new(mode, p[0], p[1], p[2]).unwrap();
            let g = scalar::grad(&e).unwrap();
            let h = scalar::hessian(&e).unwrap();
            let scale = val(p).abs() * 1e-4;
            for i in 0..3 {
                worst[k] = worst[k].max(rel(g[i], central(val, p, i), scale));
                for j in 0..3 {
                    worst[k] = worst[k].max(rel(h[i][j], central(|q| grd(q)[j], p, i), g[j].abs() * 1e-4));
                }
            }
        }
    }
    let (mut ht, mut hh) = (0f64, 0f64);
    for i in 1..1000 {
        let th = PI * i as f64 / 1000.0;
        let m = scalar::manifold_x(Mode::Trig, th);
        let h = scalar::hessian_xy(&EvalPoint::trig(th, m, m).unwrap()).unwrap();
        let s3 = th.sin().powi(3);
        ht = ht.max(max_abs(&[h[0][0] - 2.0 * s3, h[0][1] - s3, h[1][0] - s3, h[1][1] - 2.0 * s3]));
        let l = 6.0 * i as f64 / 1000.0;
        let m = scalar::manifold_x(Mode::Hyp, l);
        let h = scalar::hessian_xy(&EvalPoint::hyp(l, m, m).unwrap()).unwrap();
        let s3 = l.sinh().powi(3);
        hh = hh.max(max_abs(&[h[0][0] - 2.0 * s3, h[0][1] - s3, h[1][0] - s3, h[1][1] - 2.0 * s3]) / (1.0 + s3));
    }
    s.verdict(
        "4",
        worst.iter().all(|w| *w <= 1e-6) && ht <= 1e-8 && hh <= 1e-8,
        format!(
            "derivatives vs central differences at 1000 points per mode: max relative error G {:.1e}, F {:.1e}; \
             Hessian_xy on the manifold: G vs sin³θ[[2,1],[1,2]] {ht:.1e}, F vs sinh³ℓ[[2,1],[1,2]] {hh:.1e} relative",
            worst[0], worst[1]
        ),
    );
}

/// Tallies containment checks and violations.
#[derive(Default)]
struct Tally {
    checks: u64,
    misses: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, what: &str, enc: Interval, v: f64, at: [f64; 3]) {
        self.checks += 1;
        if !enc.contains(v) {
            self.misses += 1;
            self.first.get_or_insert_with(|| format!("{what} at {at:?}: {v} not in [{}, {}]", enc.lo, enc.hi));
        }
    }
}

fn pick(rng: &mut ChaCha8Rng, i: Interval) -> f64 {
    match rng.gen_range(0..8) {
        0 => i.lo,
        1 => i.hi,
        _ => rng.gen_range(i.lo..=i.hi),
    }
}

fn random_span(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Interval {
    let w = 10f64.powf(rng.gen_range(-6.0..0.5));
    let l = lo + rng.gen_range(0.0..1.0) * (hi - lo);
    Interval::new(l, (l + w).min(hi))
}

fn soundness_xy(t: &mut Tally, hp: &mut Hp, rng: &mut ChaCha8Rng, mode: Mode) {
    let (tr, xr) = match mode {
        Mode::Trig => ((0.0, PI), (0.0, 40.0)),
        Mode::Hyp => ((0.0, 6.0), (1.0 + 1e-6, 40.0)),
    };
    let b = Box3::new(mode, random_span(rng, tr.0, tr.1), random_span(rng, xr.0, xr.1), random_span(rng, xr.0, xr.1)).unwrap();
    let (val, grad, hess) = (eval_interval(&b), eval_grad_interval(&b), eval_hessian_xy_interval(&b));
    for _ in 0..100 {
        let p = [pick(rng, b.t), pick(rng, b.x), pick(rng, b.y)];
        let (th, x, y) = (hp.f64(p[0]), hp.f64(p[1]), hp.f64(p[2]));
        let j = jet(hp, mode, &th, &x, &y);
        t.check("value", val, to_f64(&j.value), p);
        for i in 0..3 {
            t.check("gradient", grad[i], to_f64(&j.grad[i]), p);
        }
        for r in 0..2 {
            for c in 0..2 {
                t.check("Hessian_xy", hess[r][c], to_f64(&j.hess[r][c]), p);
            }
        }
    }
}

fn soundness_compact(t: &mut Tally, hp: &mut Hp, rng: &mut ChaCha8Rng, mode: Mode) {
    let (tr, ur) = match mode {
        Mode::Trig => ((0.0, PI), (0.0, FRAC_PI_2 - 0.05)),
        Mode::Hyp => ((0.0, 6.0), (0.02, 3.5)),
    };
    let (th, u, v) = (random_span(rng, tr.0, tr.1), random_span(rng, ur.0, ur.1), random_span(rng, ur.0, ur.1));
    let b = CBox::new((th.lo, th.hi), (u.lo, u.hi), (v.lo, v.hi));
    let (naive, refined, grad) = (value_naive(mode, &b), enclose(mode, &b, f64::INFINITY), grad_compact_interval(mode, &b));
    for _ in 0..100 {
        let p = [pick(rng, th), pick(rng, u), pick(rng, v)];
        let (hu, hv) = (hp.f64(p[1]), hp.f64(p[2]));
        let (x, y) = match mode {
            Mode::Trig => (hp.tan(&hu), hp.tan(&hv)),
            Mode::Hyp => {
                let one = hp.int(1);
                let (a, b) = (hp.tanh(&hu), hp.tanh(&hv));
                (hp.div(&one, &a), hp.div(&one, &b))
            }
        };
        let tt = hp.f64(p[0]);
        let j = jet(hp, mode, &tt, &x, &y);
        t.check("compact value", naive, to_f64(&j.value), p);
        t.check("compact value (mean-value form)", refined.value, to_f64(&j.value), p);
        let cg = [to_f64(&j.grad[0]), to_f64(&hp.mul(&j.grad[1], &j.dxdu[0])), to_f64(&hp.mul(&j.grad[2], &j.dxdu[1]))];
        for i in 0..3 {
            t.check("compact gradient", grad[i], cg[i], p);
        }
    }
}

fn soundness_chart(t: &mut Tally, hp: &mut Hp, rng: &mut ChaCha8Rng) {
    let (e, x, y) = (random_span(rng, 1e-3, 0.2), random_span(rng, 0.0, 2.0), random_span(rng, 0.0, 2.0));
    let (val, grad, hess) = (chart_value(e, x, y), chart_grad(e, x, y), chart_hess(e, x, y));
    for _ in 0..100 {
        let p = [pick(rng, e), pick(rng, x), pick(rng, y)];
        let he = hp.f64(p[0]);
        let pi = hp.pi();
        let th = hp.sub(&pi, &he);
        let (gx, gy) = (hp.mul(&he, &hp.f64(p[1])), hp.mul(&he, &hp.f64(p[2])));
        let j = jet(hp, Mode::Trig, &th, &gx, &gy);
        let (e3, e4, e5) = (hp.powi(&he, 3), hp.powi(&he, 4), hp.powi(&he, 5));
        t.check("chart value", val, to_f64(&hp.div(&j.value, &e5)), p);
        for i in 0..2 {
            t.check("chart gradient", grad[i], to_f64(&hp.div(&j.grad[i + 1], &e4)), p);
            for k in 0..2 {
                t.check("chart Hessian", hess[i][k], to_f64(&hp.div(&j.hess[i][k], &e3)), p);
            }
        }
    }
}

fn interval_soundness(s: &mut Suite) {
    let mut hp = Hp::new(160);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut parts = Vec::new();
    let mut total = Tally::default();
    let mut tally = |name: &str, f: &mut dyn FnMut(&mut Tally, &mut Hp, &mut ChaCha8Rng)| {
        let mut t = Tally::default();
        for _ in 0..1000 {
            f(&mut t, &mut hp, &mut rng);
        }
        parts.push(format!("{name} {}/{}", t.misses, t.checks));
        total.checks += t.checks;
        total.misses += t.misses;
        if total.first.is_none() {
            total.first = t.first;
        }
    };
    tally("G", &mut |t, hp, r| soundness_xy(t, hp, r, Mode::Trig));
    tally("F", &mut |t, hp, r| soundness_xy(t, hp, r, Mode::Hyp));
    tally("G compact", &mut |t, hp, r| soundness_compact(t, hp, r, Mode::Trig));
    tally("F compact", &mut |t, hp, r| soundness_compact(t, hp, r, Mode::Hyp));
    tally("near-π chart", &mut |t, hp, r| soundness_chart(t, hp, r));
    let first = total.first.map(|f| format!("; first: {f}")).unwrap_or_default();
    s.verdict(
        "5",
        total.misses == 0 && total.checks > 0,
        format!(
            "interval soundness, 1000 boxes x 100 points per family, violations/checks: {}{first}",
            parts.join(", ")
        ),
    );
}

fn certification(s: &mut Suite, lemma: u8, mode: Mode, region: [[f64; 2]; 3]) {
    let name = format!("certificate_{lemma}.json");
    let (o, dt) = s.run(&["--workers", "1", "certify", "--lemma", &lemma.to_string(), "--out", &name]);
    let c = s.json(&name);
    let delta = c["delta"].as_f64().unwrap_or(f64::NAN);
    let g = critical::brute_force_min(mode, Coords::Compact { rho: 0.1 }, region, 100, &Sequential).unwrap();
    let ok = c["status"] == "proved_strict" && delta > 0.0 && g.value >= delta - 1e-9 && dt < TEN_MINUTES;
    s.verdict(
        &(lemma + 5).to_string(),
        ok,
        format!(
            "certify --lemma {lemma} --workers 1: status {}, overall {} (corner {}), δ = {delta:.3e}, {:.1} s, exit {:?}; \
             100³ grid over t in [{}, {:.4}], compact coordinates outside the tube: min {:.3e} at {:?} ({} points skipped)",
            c["status"].as_str().unwrap_or("?"),
            c["overall_status"].as_str().unwrap_or("?"),
            c["corner"]["status"].as_str().unwrap_or("none"),
            dt.as_secs_f64(),
            o.status.code(),
            region[0][0],
            region[0][1],
            g.value,
            g.argmin,
            g.skipped
        ),
    );
}

fn negative_controls(s: &mut Suite) {
    let mut notes = Vec::new();
    let mut ok = true;
    for lemma in ["1", "2"] {
        let out = format!("rho0_{lemma}.json");
        let (o, _) = s.run(&["certify", "--lemma", lemma, "--rho", "0", "--out", &out]);
        let st = s.json(&out)["status"].clone();
        ok &= st == "inconclusive" && o.status.code() == Some(1);
        notes.push(format!("lemma {lemma} with ρ = 0: {}", st.as_str().unwrap_or("?")));
        let out = format!("shift_{lemma}.json");
        let (o, _) = s.run(&["certify", "--lemma", lemma, "--shift", "0.01", "--out", &out]);
        let c = s.json(&out);
        ok &= c["status"] != "proved_strict" && c["overall_status"] != "proved_strict" && !c.is_null() && o.status.code() != Some(0);
        notes.push(format!("lemma {lemma} shifted by 0.01: {}", c["status"].as_str().unwrap_or("?")));
    }
    let (o, _) = s.run(&["identities", "--tamper", "G19", "--out", "tamper.json"]);
    let w = s.json("tamper.json")["steps"][0]["witness"].clone();
    let witness_ok = w.as_array().is_some_and(|w| !w.is_empty() && w.iter().all(|x| x.as_str().is_some_and(|x| !x.is_empty() && x != "0")));
    ok &= o.status.code() == Some(1) && witness_ok;
    notes.push(format!("tampered G19: witness {}", w.get(0).and_then(Value::as_str).unwrap_or("none")));
    let mut survived = Vec::new();
    let mut total = 0;
    for mode in [Mode::Trig, Mode::Hyp] {
        for mut step in identities::list_steps(mode) {
            total += 1;
            step.checks[0].tamper();
            let r = identities::run_step(&step);
            if r.status != StepStatus::Failed || r.witness.is_empty() || r.witness.iter().any(|w| w.is_empty()) {
                survived.push(r.id);
            }
        }
    }
    ok &= survived.is_empty();
    notes.push(format!("{}/{total} tampered steps fail with a witness", total - survived.len()));
    s.verdict("8", ok, format!("negative controls: {}", notes.join("; ")));
}

fn boundary_gap(mode: Mode, z: [f64; 3]) -> f64 {
    match mode {
        Mode::Trig => z[0].min(PI - z[0]).min(z[1]).min(z[2]).min(FRAC_PI_2 - z[1]).min(FRAC_PI_2 - z[2]),
        Mode::Hyp => z[0].min(z[1]).min(z[2]),
    }
}

fn stationary_probe(s: &mut Suite) {
    let mut ok = true;
    let mut notes = Vec::new();
    for mode in [Mode::Trig, Mode::Hyp] {
        let (csv_name, sum_name) = (format!("critical_{mode}.csv"), format!("critical_{mode}.json"));
        let (o, _) = s.run(&["critical", "--mode", mode.name(), "--starts", "1000", "--out", &csv_name, "--summary", &sum_name]);
        let sum = s.json(&sum_name);
        let text = s.text(&csv_name);
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let (mut rows, mut interior, mut on, mut corner, mut off, mut mislabeled) = (0, 0, 0, 0, 0, 0);
        for rec in rd.deserialize::<std::collections::HashMap<String, String>>() {
            let Ok(r) = rec else {
                off += 1;
                continue;
            };
            rows += 1;
            if r["converged"] != "true" {
                continue;
            }
            let f = |k: &str| r[k].parse::<f64>().unwrap_or(f64::NAN);
            let z = [f("t"), f("u"), f("v")];
            if boundary_gap(mode, z) <= 1e-6 {
                continue;
            }
            interior += 1;
            let m = scalar::manifold_compact(mode, z[0]);
            let on_manifold = (z[1] - z[2]).abs() <= 1e-6 && (z[1] - m).abs() <= 1e-6;
            let at_corner = mode == Mode::Trig && PI - z[0] <= CORNER_RADIUS && z[1] <= CORNER_RADIUS && z[2] <= CORNER_RADIUS;
            if on_manifold {
                on += 1;
            } else if at_corner {
                corner += 1;
            } else {
                off += 1;
            }
            if (r["classification"] == "manifold") != on_manifold {
                mislabeled += 1;
            }
        }
        let ab = sum["alpha_beta"].as_array().cloned().unwrap_or_default();
        let admissible: Vec<_> = ab.iter().filter(|b| b["admissible"] == true).collect();
        let excluded: std::collections::BTreeSet<_> =
            ab.iter().filter(|b| b["admissible"] == false).filter_map(|b| b["branch"].as_str()).collect();
        let ab_ok = admissible.len() == 1
            && admissible[0]["branch"] == "alpha_eq_beta"
            && admissible[0]["off_manifold"] == false
            && excluded == ["alpha_beta_one", "alpha_zero", "beta_zero"].into_iter().collect()
            && sum["admissible_off_manifold"] == 0;
        ok &= o.status.code() == Some(0) && rows == 1000 && off == 0 && mislabeled == 0 && ab_ok && sum["probe"]["spurious"] == 0;
        notes.push(format!(
            "{mode}: {rows} starts, {interior} convergents more than 1e-6 from the boundary: {on} on the manifold to 1e-6, \
             {corner} classified boundary, stalled within {CORNER_RADIUS} of the zero at (π, 0, 0) where the gradient is quartic, \
             {off} elsewhere; α/β excluded {excluded:?}, admissible only alpha_eq_beta: {ab_ok}"
        ));
    }
    s.verdict("9", ok, format!("stationary-point probe: {}", notes.join("; ")));
}

fn without_run(mut v: Value) -> Value {
    match &mut v {
        Value::Object(m) => {
            m.remove("run");
        }
        Value::Array(a) => {
            for x in a.iter_mut() {
                if let Value::Object(m) = x {
                    m.remove("run");
                }
            }
        }
        _ => {}
    }
    v
}

fn determinism(s: &mut Suite) {
    let mut diffs = Vec::new();
    let mut compared = 0;
    let mut same_json = |s: &Suite, what: &str, a: &str, b: &str| {
        compared += 1;
        let (x, y) = (without_run(s.json(a)), without_run(s.json(b)));
        if x.is_null() || x != y {
            diffs.push(what.to_string());
        }
    };
    for w in ["1", "4"] {
        s.run(&["--workers", w, "identities", "--mode", "both", "--out", &format!("ident_w{w}.json")]);
    }
    same_json(s, "identities 1 vs 4 workers", "ident_w1.json", "ident_w4.json");
    same_json(s, "identities rerun", "identities.json", "ident_w1.json");
    for lemma in ["1", "2"] {
        let four = format!("cert_{lemma}_w4.json");
        s.run(&["--workers", "4", "certify", "--lemma", lemma, "--out", &four]);
        let again = format!("cert_{lemma}_again.json");
        s.run(&["--workers", "1", "certify", "--lemma", lemma, "--out", &again]);
        let first = format!("certificate_{lemma}.json");
        same_json(s, &format!("lemma {lemma} certificate 1 vs 4 workers"), &first, &four);
        same_json(s, &format!("lemma {lemma} certificate rerun"), &first, &again);
    }
    for w in ["1", "4"] {
        s.run(&["--workers", w, "critical", "--mode", "hyp", "--starts", "300", "--out", &format!("crit_w{w}.csv"), "--summary", &format!("crit_w{w}.json")]);
        s.run(&["--workers", w, "scan", "--mode", "trig", "--grid", "30", "--out", &format!("scan_w{w}.csv"), "--summary", &format!("scan_w{w}.json")]);
    }
    same_json(s, "critical summary 1 vs 4 workers", "crit_w1.json", "crit_w4.json");
    same_json(s, "scan summary 1 vs 4 workers", "scan_w1.json", "scan_w4.json");
    let mut same_text = |what: &str, a: &str, b: &str| {
        compared += 1;
        let (x, y) = (s.text(a), s.text(b));
        if x.is_empty() || x != y {
            diffs.push(what.to_string());
        }
    };
    same_text("critical CSV 1 vs 4 workers", "crit_w1.csv", "crit_w4.csv");
    same_text("scan CSV 1 vs 4 workers", "scan_w1.csv", "scan_w4.csv");
    s.verdict(
        "10",
        diffs.is_empty(),
        format!("determinism: {compared} comparisons of outputs minus the run block, differing: {diffs:?}"),
    );
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; they have no
    // meaning here.
    let mut s = Suite { dir: tempfile::tempdir().expect("tempdir"), failed: Vec::new(), gaps: Vec::new() };
    let start = Instant::now();
    identity_ledger(&mut s);
    manifold_vanishing(&mut s);
    reference_values(&mut s);
    derivative_checks(&mut s);
    interval_soundness(&mut s);
    certification(&mut s, 1, Mode::Trig, [[0.2, PI], [0.0, FRAC_PI_2], [0.0, FRAC_PI_2]]);
    certification(&mut s, 2, Mode::Hyp, [[0.2, 6.0], [0.05, 3.0], [0.05, 3.0]]);
    negative_controls(&mut s);
    stationary_probe(&mut s);
    determinism(&mut s);
    println!(
        "acceptance: {} failing, {} known limitations {:?}, {:.0} s",
        s.failed.len(),
        s.gaps.len(),
        s.gaps,
        start.elapsed().as_secs_f64()
    );
    if !s.failed.is_empty() {
        println!("failing criteria: {:?}", s.failed);
        std::process::exit(1);
    }
}
