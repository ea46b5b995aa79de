use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ineqcert"));
    c.env_remove("INEQCERT_WORKERS");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("spawn ineqcert")
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        &["scan", "--grid", "1"][..],
        &["certify", "--lemma", "3"],
        &["certify", "--rho", "-1"],
        &["certify", "--region", "0:1,0:1"],
        &["certify", "--corner-policy", "ignore"],
        &["certify", "--budget", "lots"],
        &["scan", "--mode", "trig", "--box", "0:4,0:1,0:1"],
        &["identities", "--step", "G999"],
        &["frobnicate"],
        &["critical", "--starts", "0"],
        &["--workers", "0", "identities"],
    ] {
        let o = run(args, d.path());
        assert_eq!(o.status.code(), Some(64), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(run(&["--help"], d.path()).status.code(), Some(0));
}

#[test]
fn identities_report_and_fixture() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["identities", "--mode", "trig", "--out", "r.json", "--export-fixture", "fx.txt"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&d.path().join("r.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["steps_total"], r["steps_verified"]);
    assert_eq!(r["all_verified"], true);
    assert!(r["run"]["timestamp"].is_string());

    let o = run(&["identities", "--fixture", "fx.txt", "--out", "f.json"], d.path());
    assert_eq!(o.status.code(), Some(0));

    let text = std::fs::read_to_string(d.path().join("fx.txt")).unwrap();
    let first = text.lines().find(|l| l.contains(" = 1 * ")).unwrap().to_string();
    std::fs::write(d.path().join("bad.txt"), text.replacen(&first, &first.replacen(" = 1 * ", " = 2 * ", 1), 1)).unwrap();
    let o = run(&["identities", "--fixture", "bad.txt", "--out", "b.json"], d.path());
    assert_eq!(o.status.code(), Some(1));
    let id = first.split(':').next().unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains(id));
}

#[test]
fn tampered_step_fails() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["identities", "--tamper", "F_subtract", "--out", "t.json"], d.path());
    assert_eq!(o.status.code(), Some(1));
    let r = json(&d.path().join("t.json"));
    assert_eq!(r["all_verified"], false);
    let w = r["steps"][0]["witness"].as_array().unwrap();
    assert!(!w.is_empty() && w.iter().all(|s| s.as_str().is_some_and(|s| !s.is_empty() && s != "0")));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.conf"), "# scan defaults\nmode = hyp\ngrid = 5\nbox = 0.5:1,1.1:2,1.1:2\nsummary = s.json\n").unwrap();
    let o = run(&["--config", "c.conf", "scan", "--out", "a.csv"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&d.path().join("s.json"));
    assert_eq!(s["mode"], "hyp");
    assert_eq!(s["grid"], 5);
    assert_eq!(s["min"]["evaluated"], 125);
    let o = run(&["--config", "c.conf", "scan", "--grid", "3", "--out", "b.csv"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&d.path().join("s.json"))["grid"], 3);
    let rows = std::fs::read_to_string(d.path().join("b.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 27);

    std::fs::write(d.path().join("bad.conf"), "grid = many\n").unwrap();
    assert_eq!(run(&["--config", "bad.conf", "scan"], d.path()).status.code(), Some(64));
}

#[test]
fn workers_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["identities", "--mode", "hyp", "--out", "r.json"])
        .env("INEQCERT_WORKERS", "3")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&d.path().join("r.json"))["run"]["workers"], 3);
    let o = bin().args(["--workers", "2", "identities", "--mode", "hyp", "--out", "r.json"]).env("INEQCERT_WORKERS", "3").current_dir(d.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&d.path().join("r.json"))["run"]["workers"], 2);
}

#[test]
fn scan_matches_library_grid() {
    use ineqcert_core::critical::{brute_force_min, Coords};
    use ineqcert_core::exec::Sequential;
    use ineqcert_core::scalar::Mode;
    let d = tempfile::tempdir().unwrap();
    let o = run(&["scan", "--mode", "trig", "--grid", "12", "--compact", "--rho", "0.1", "--box", "0.3:3,0:1.5,0:1.5", "--summary", "s.json", "--out", "g.csv"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let s = json(&d.path().join("s.json"));
    let g = brute_force_min(Mode::Trig, Coords::Compact { rho: 0.1 }, [[0.3, 3.0], [0.0, 1.5], [0.0, 1.5]], 12, &Sequential).unwrap();
    assert_eq!(s["min"]["value"].as_f64().unwrap(), g.value);
    assert_eq!(s["min"]["skipped"].as_u64().unwrap(), g.skipped as u64);
    let mut rd = csv::Reader::from_path(d.path().join("g.csv")).unwrap();
    assert_eq!(rd.records().count() as u64, g.evaluated);
}

#[test]
fn critical_writes_rows_and_summary() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["critical", "--mode", "hyp", "--starts", "40", "--seed", "1", "--out", "c.csv", "--summary", "c.json"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let s = json(&d.path().join("c.json"));
    assert_eq!(s["probe"]["starts"], 40);
    assert_eq!(s["clean"], true);
    assert_eq!(s["strategy"], "angle_first");
    let mut rd = csv::Reader::from_path(d.path().join("c.csv")).unwrap();
    assert_eq!(rd.records().count(), 40);
}

#[test]
fn certify_small_region_and_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["certify", "--lemma", "2", "--region", "1:1.2,0.3:0.7,0.3:0.7", "--out", "c.json"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = json(&d.path().join("c.json"));
    assert_eq!(c["status"], "proved_strict");
    assert_eq!(c["lemma"], 2);
    assert!(c["delta"].as_f64().unwrap() > 0.0);

    let o = run(&["certify", "--lemma", "2", "--region", "1:1.2,0.3:0.7,0.3:0.7", "--shift", "1e3", "--out", "c.json"], d.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&d.path().join("c.json"))["status"], "inconclusive");
}
