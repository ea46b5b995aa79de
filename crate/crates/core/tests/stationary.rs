use ineqcert_core::critical::{
    self, solve_alpha_beta, AbBranch, Classification, Coords, ProbeSummary, Strategy, CORNER_RADIUS,
};
use ineqcert_core::exec::Sequential;
use ineqcert_core::scalar::{self, EvalPoint, Mode};
use std::f64::consts::{FRAC_PI_2, PI};

/// Distance to the domain boundary in compact coordinates.
fn boundary_gap(mode: Mode, z: [f64; 3]) -> f64 {
    match mode {
        Mode::Trig => z[0].min(PI - z[0]).min(z[1]).min(z[2]).min(FRAC_PI_2 - z[1]).min(FRAC_PI_2 - z[2]),
        Mode::Hyp => z[0].min(z[1]).min(z[2]),
    }
}

#[test]
fn interior_stationary_points_lie_on_the_manifold() {
    for mode in [Mode::Trig, Mode::Hyp] {
        let region = critical::default_start_box(mode);
        let recs = critical::multistart(mode, 1000, 7, region, 200, Strategy::AngleFirst, &Sequential);
        let s = ProbeSummary::of(&recs);
        assert_eq!(s.starts, 1000);
        assert_eq!(s.spurious, 0, "{mode}: {s:?}");
        assert!(s.manifold >= 500, "{mode}: {s:?}");
        for r in &recs {
            let Ok(p) = &r.result else { continue };
            let z = p.compact;
            let g = scalar::grad_compact(mode, z[0], z[1], z[2]);
            assert!(g.iter().map(|d| d * d).sum::<f64>().sqrt() <= 1e-10, "{mode} residual at {z:?}");
            if boundary_gap(mode, z) <= 1e-6 {
                continue;
            }
            let on_manifold = (z[1] - z[2]).abs() <= 1e-6
                && (z[1] - scalar::manifold_compact(mode, z[0])).abs() <= 1e-6;
            // G's zero at (π, 0, 0) is the degenerate end of the manifold;
            // Newton approaches it sublinearly.
            let at_corner = mode == Mode::Trig && PI - z[0] <= CORNER_RADIUS && z[1] <= CORNER_RADIUS && z[2] <= CORNER_RADIUS;
            assert!(on_manifold || at_corner, "{mode} start {:?} converged off the manifold to {z:?}", r.start);
            assert_eq!(p.classification == Classification::Manifold, on_manifold);
        }
    }
}

#[test]
fn probe_is_reproducible() {
    let region = critical::default_start_box(Mode::Hyp);
    let a = critical::multistart(Mode::Hyp, 50, 3, region, 200, Strategy::AngleFirst, &Sequential);
    let b = critical::multistart(Mode::Hyp, 50, 3, region, 200, Strategy::AngleFirst, &Sequential);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn alpha_beta_branches() {
    for mode in [Mode::Trig, Mode::Hyp] {
        let sols = solve_alpha_beta(mode);
        let admissible: Vec<_> = sols.iter().filter(|s| s.admissible).collect();
        assert_eq!(admissible.len(), 1, "{mode}: {sols:?}");
        assert_eq!(admissible[0].branch, AbBranch::AlphaEqBeta);
        assert!(!admissible[0].off_manifold);
        for s in &sols {
            match s.branch {
                AbBranch::AlphaZero | AbBranch::BetaZero => assert_eq!(s.c, Some(2.0)),
                AbBranch::AlphaBetaOne => {
                    assert_eq!(s.c, Some(1.0));
                    assert_eq!(s.alpha * s.beta, 1.0);
                }
                AbBranch::AlphaEqBeta => assert_eq!((s.alpha, s.beta, s.c), (1.0, 1.0, None)),
            }
        }
        for b in [AbBranch::AlphaZero, AbBranch::BetaZero, AbBranch::AlphaEqBeta, AbBranch::AlphaBetaOne] {
            assert!(sols.iter().any(|s| s.branch == b), "{mode}: {b:?} missing");
        }
    }
    // The reduced x-condition vanishes identically on αβ = 1.
    for a in [0.25, 0.5, 2.0, 3.0, 7.0] {
        assert!(critical::reduced_condition(a, 1.0 / a).abs() <= 1e-12);
    }
}

#[test]
fn newton_from_a_manifold_neighbour() {
    let th = 1.3;
    let m = scalar::manifold_x(Mode::Trig, th);
    let p = EvalPoint::trig(th + 0.01, m * 1.05, m * 0.97).unwrap();
    let r = critical::newton_stationary(&p, 100).unwrap();
    assert_eq!(r.classification, Classification::Manifold);
    assert!(r.manifold_distance <= 1e-6);
}

#[test]
fn grid_minimum_matches_direct_evaluation() {
    let b = [[1.0, 2.0], [0.5, 1.5], [0.5, 1.5]];
    let g = critical::brute_force_min(Mode::Trig, Coords::Plain, b, 9, &Sequential).unwrap();
    let mut best = f64::INFINITY;
    for t in critical::axis(1.0, 2.0, 9) {
        for x in critical::axis(0.5, 1.5, 9) {
            for y in critical::axis(0.5, 1.5, 9) {
                best = best.min(scalar::eval(&EvalPoint::trig(t, x, y).unwrap()).value);
            }
        }
    }
    assert_eq!(g.value, best);
    assert_eq!(g.evaluated, 729);
}
