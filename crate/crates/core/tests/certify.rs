use ineqcert_core::certifier::{self, CertifyConfig, SliceVerdict, Status, TubeSpec};
use ineqcert_core::critical::{self, Coords};
use ineqcert_core::exec::Sequential;
use ineqcert_core::interval::{CBox, Interval};
use ineqcert_core::scalar::Mode;

fn cfg(outer: CBox) -> CertifyConfig {
    CertifyConfig { outer: Some(vec![outer]), corner_samples: 1000, ..CertifyConfig::default() }
}

#[test]
fn region_away_from_the_manifold() {
    let b = CBox::new((1.0, 1.2), (0.0, 0.2), (0.0, 0.2));
    let c = certifier::certify_lemma(1, &cfg(b), &Sequential).unwrap();
    assert_eq!(c.status, Status::ProvedStrict);
    let delta = c.delta.unwrap();
    assert!(delta > 0.0);
    let g = critical::brute_force_min(Mode::Trig, Coords::Plain, [[1.0, 1.2], [0.0, 0.2f64.tan()], [0.0, 0.2f64.tan()]], 30, &Sequential).unwrap();
    assert!(g.value >= delta - 1e-9, "grid {} below certified {delta}", g.value);
}

#[test]
fn region_across_the_manifold() {
    let b = CBox::new((2.0, 2.1), (0.8, 1.3), (0.8, 1.3));
    let c = certifier::certify_lemma(2, &cfg(b), &Sequential).unwrap();
    assert_eq!(c.status, Status::ProvedStrict);
    assert!(c.tube.slices > 0 && c.tube.failed == 0);
}

#[test]
fn single_slices_close() {
    let tube = TubeSpec::default();
    for (mode, t) in [(Mode::Trig, 1.0), (Mode::Trig, 2.5), (Mode::Hyp, 0.5), (Mode::Hyp, 4.0)] {
        let s = certifier::certify_tube_slice(mode, Interval::new(t, t + 0.01), &tube, &Sequential);
        assert_eq!(s.verdict, SliceVerdict::Certified, "{mode} {t}: {:?}", s.reason);
        assert!(s.krawczyk_iterations.is_some() && s.core_radius.is_some());
    }
}

#[test]
fn negative_controls() {
    let b = CBox::new((2.0, 2.1), (0.8, 1.3), (0.8, 1.3));
    let no_tube = CertifyConfig { tube: TubeSpec { rho: 0.0, ..TubeSpec::default() }, budget: 20_000, ..cfg(b) };
    let c = certifier::certify_lemma(2, &no_tube, &Sequential).unwrap();
    assert_eq!(c.status, Status::Inconclusive);

    for lemma in [1, 2] {
        let b = if lemma == 1 { CBox::new((1.0, 1.1), (0.9, 1.2), (0.9, 1.2)) } else { b };
        let shifted = CertifyConfig { shift: 0.01, budget: 200_000, ..cfg(b) };
        let c = certifier::certify_lemma(lemma, &shifted, &Sequential).unwrap();
        assert_ne!(c.status, Status::ProvedStrict, "lemma {lemma}");
        assert_ne!(c.overall_status, Status::ProvedStrict, "lemma {lemma}");
    }
}

#[test]
fn hopeless_regions_stop_early() {
    // Every box outside the tube has a certain counterexample, so nothing is
    // worth splitting; this used to run the full budget.
    for (lemma, b) in [(1, CBox::new((1.0, 1.1), (0.9, 1.2), (0.9, 1.2))), (2, CBox::new((2.0, 2.1), (0.8, 1.3), (0.8, 1.3)))] {
        let c = certifier::certify_lemma(lemma, &CertifyConfig { shift: 1e3, ..cfg(b) }, &Sequential).unwrap();
        assert_eq!(c.status, Status::Inconclusive);
        assert!(c.stats.boxes_processed < 100, "lemma {lemma}: {} boxes", c.stats.boxes_processed);
    }
}

#[test]
fn certificates_are_reproducible() {
    let b = CBox::new((1.5, 1.6), (0.6, 0.9), (0.6, 0.9));
    let mut a = certifier::certify_lemma(1, &cfg(b), &Sequential).unwrap();
    let mut c = certifier::certify_lemma(1, &cfg(b), &Sequential).unwrap();
    a.run = None;
    c.run = None;
    assert_eq!(a, c);
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        CertifyConfig { tube: TubeSpec { rho: -1.0, ..TubeSpec::default() }, ..CertifyConfig::default() },
        CertifyConfig { tube: TubeSpec { slice_width: 0.0, ..TubeSpec::default() }, ..CertifyConfig::default() },
        CertifyConfig { shift: f64::NAN, ..CertifyConfig::default() },
    ];
    for c in bad {
        assert!(c.validate().is_err(), "{c:?}");
    }
    assert!(certifier::certify_lemma(3, &CertifyConfig::default(), &Sequential).is_err());
}
