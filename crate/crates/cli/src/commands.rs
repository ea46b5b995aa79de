use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use ineqcert_core::certifier::{self, Certificate, CertifyConfig, CornerPolicy, RunInfo, Status, EPSILON};
use ineqcert_core::critical::{self, AlphaBetaState, Coords, ProbeSummary, Strategy};
use ineqcert_core::identities::{self, FixtureLine, StepStatus, VerificationReport};
use ineqcert_core::interval::CBox;
use ineqcert_core::scalar::{self, Mode};
use serde::Serialize;

use crate::args::{CertifyArgs, Cli, Command, CriticalArgs, IdentitiesArgs, ModeSel, ScanArgs, SingleMode};
use crate::config::{self, ConfigFile, ConfigValue};
use crate::exec::RayonExecutor;
use crate::output::{run_info, sink, write_json};
use crate::{exit, usage};

/// Report schema shared by the JSON outputs of this binary.
pub const REPORT_SCHEMA: u32 = 1;

pub fn dispatch(cli: &Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(|e| crate::UsageError(format!("{e:#}")))?,
        None => ConfigFile::default(),
    };
    let workers = config::workers(cli.workers, &file).map_err(|e| crate::UsageError(format!("{e:#}")))?;
    let exec = RayonExecutor::new(workers)?;
    let ctx = Ctx { file, exec, started: Instant::now() };
    match &cli.command {
        Command::Identities(a) => identities_cmd(a, &ctx),
        Command::Certify(a) => certify_cmd(a, &ctx),
        Command::Critical(a) => critical_cmd(a, &ctx),
        Command::Scan(a) => scan_cmd(a, &ctx),
    }
}

struct Ctx {
    file: ConfigFile,
    exec: RayonExecutor,
    started: Instant,
}

impl Ctx {
    fn run_info(&self) -> RunInfo {
        use ineqcert_core::exec::Executor;
        run_info(self.started, self.exec.workers())
    }

    /// Flag, then config file, then default; parse failures are usage errors.
    fn pick<T: ConfigValue>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        self.file.pick(flag, key, default).map_err(|e| crate::UsageError(format!("{e:#}")).into())
    }

    /// As [`Ctx::pick`] for flags taken as text (counts such as `2e6`).
    fn pick_parsed<T: ConfigValue>(&self, flag: Option<&String>, key: &str, default: T) -> Result<T> {
        let flag = match flag {
            Some(s) => Some(T::from_config(s).map_err(|e| crate::UsageError(format!("--{key}: {e:#}")))?),
            None => None,
        };
        self.pick(flag, key, default)
    }

    fn pick_path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| self.file.get_str(key).map(PathBuf::from))
    }
}

fn parse_mode(s: &str) -> Result<Mode> {
    match Mode::parse(s) {
        Some(m) => Ok(m),
        None => usage(format!("unknown mode `{s}`")),
    }
}

fn single_mode(flag: Option<SingleMode>, ctx: &Ctx) -> Result<Mode> {
    match flag {
        Some(SingleMode::Trig) => Ok(Mode::Trig),
        Some(SingleMode::Hyp) => Ok(Mode::Hyp),
        None => parse_mode(ctx.file.get_str("mode").unwrap_or("trig")),
    }
}

// ---- identities ----

#[derive(Serialize)]
struct IdentitiesReport {
    schema_version: u32,
    steps_total: usize,
    steps_verified: usize,
    failed_steps: Vec<String>,
    #[serde(flatten)]
    report: VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    tampered: Option<String>,
    run: RunInfo,
}

#[derive(Serialize)]
struct FixtureReport {
    schema_version: u32,
    fixture: String,
    lines: Vec<FixtureLine>,
    failed_steps: Vec<String>,
    all_verified: bool,
    run: RunInfo,
}

fn identities_cmd(a: &IdentitiesArgs, ctx: &Ctx) -> Result<i32> {
    let modes = match a.mode {
        Some(ModeSel::Trig) => vec![Mode::Trig],
        Some(ModeSel::Hyp) => vec![Mode::Hyp],
        Some(ModeSel::Both) => vec![Mode::Trig, Mode::Hyp],
        None => match ctx.file.get_str("mode").unwrap_or("both") {
            "both" => vec![Mode::Trig, Mode::Hyp],
            other => vec![parse_mode(other)?],
        },
    };
    let out = ctx.pick_path(&a.out, "out");

    if let Some(path) = &a.export_fixture {
        let text = identities::export_fixture(&modes)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("identities: fixture written to {}", path.display());
    }

    if let Some(path) = &a.fixture {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let lines = identities::verify_fixture(&text).with_context(|| format!("fixture {}", path.display()))?;
        let mut failed: Vec<String> = lines.iter().filter(|l| !l.passed).map(|l| l.id.clone()).collect();
        failed.dedup();
        let all = failed.is_empty() && !lines.is_empty();
        if !failed.is_empty() {
            eprintln!("identities: fixture claims failed for steps: {}", failed.join(", "));
        }
        eprintln!("identities: {}/{} fixture claims hold", lines.iter().filter(|l| l.passed).count(), lines.len());
        let rep = FixtureReport { schema_version: REPORT_SCHEMA, fixture: path.display().to_string(), lines, failed_steps: failed, all_verified: all, run: ctx.run_info() };
        emit_json(out.as_deref(), &rep)?;
        return Ok(if all { exit::SUCCESS } else { exit::FAILURE });
    }

    let (report, tampered) = if let Some(key) = &a.tamper {
        let mut step = identities::find_step(key).map_err(|e| crate::UsageError(e.to_string()))?;
        for c in step.checks.iter_mut().take(1) {
            c.tamper();
        }
        let o = identities::run_step(&step);
        let all = o.status != StepStatus::Failed;
        (VerificationReport { modes: vec![step.mode], steps: vec![o], all_verified: all, mirror: None, engine_version: ineqcert_core::VERSION.into() }, Some(step.id))
    } else if !a.steps.is_empty() {
        let mut steps = Vec::new();
        for key in &a.steps {
            steps.push(identities::find_step(key).map_err(|e| crate::UsageError(e.to_string()))?);
        }
        let outcomes: Vec<_> = steps.iter().map(identities::run_step).collect();
        let all = outcomes.iter().all(|o| o.status != StepStatus::Failed);
        let mut ms: Vec<Mode> = steps.iter().map(|s| s.mode).collect();
        ms.dedup();
        (VerificationReport { modes: ms, steps: outcomes, all_verified: all, mirror: None, engine_version: ineqcert_core::VERSION.into() }, None)
    } else {
        (identities::verify_all(&modes, !a.no_mirror, &ctx.exec), None)
    };

    let failed: Vec<String> = report.steps.iter().filter(|s| s.status == StepStatus::Failed).map(|s| s.id.clone()).collect();
    let verified = report.steps.iter().filter(|s| s.status == StepStatus::Verified).count();
    for s in report.steps.iter().filter(|s| s.status == StepStatus::Failed) {
        eprintln!("identities: {} ({}) failed: {}", s.id, s.name, s.witness.join("; "));
    }
    if let Some(m) = &report.mirror {
        if !(m.equal && m.negative_control_differs) {
            eprintln!("identities: mirror check failed");
        }
    }
    eprintln!("identities: {verified}/{} steps verified", report.steps.len());
    let code = if report.all_verified { exit::SUCCESS } else { exit::FAILURE };
    let rep = IdentitiesReport { schema_version: REPORT_SCHEMA, steps_total: report.steps.len(), steps_verified: verified, failed_steps: failed, report, tampered, run: ctx.run_info() };
    emit_json(out.as_deref(), &rep)?;
    Ok(code)
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let mut w = sink(None)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            w.write_all(b"\n")?;
            w.flush()?;
            Ok(())
        }
    }
}

// ---- certify ----

/// `a:b,c:d,e:f` → three closed ranges.
pub fn parse_box(s: &str) -> Result<[[f64; 2]; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return usage(format!("box `{s}` needs three ranges `lo:hi` separated by commas"));
    }
    let mut out = [[0.0; 2]; 3];
    for (i, p) in parts.iter().enumerate() {
        let Some((lo, hi)) = p.split_once(':') else {
            return usage(format!("range `{p}` must be `lo:hi`"));
        };
        let num = |v: &str| -> Result<f64> {
            match v.trim() {
                "pi" => Ok(std::f64::consts::PI),
                "pi/2" => Ok(std::f64::consts::FRAC_PI_2),
                t => t.parse::<f64>().map_err(|_| crate::UsageError(format!("`{t}` is not a number")).into()),
            }
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return usage(format!("range `{p}` must be finite with lo <= hi"));
        }
        out[i] = [lo, hi];
    }
    Ok(out)
}

fn lemmas(sel: &str) -> Result<Vec<u8>> {
    match sel {
        "1" => Ok(vec![1]),
        "2" => Ok(vec![2]),
        "both" => Ok(vec![1, 2]),
        other => usage(format!("--lemma must be 1, 2 or both, not `{other}`")),
    }
}

fn exit_for(status: Status) -> i32 {
    match status {
        Status::ProvedStrict => exit::SUCCESS,
        Status::ProvedUpToEpsilon => exit::PARTIAL,
        Status::Inconclusive => exit::FAILURE,
    }
}

fn certify_config(a: &CertifyArgs, ctx: &Ctx) -> Result<CertifyConfig> {
    let d = CertifyConfig::default();
    let mut cfg = d.clone();
    cfg.tube.rho = ctx.pick(a.rho, "rho", d.tube.rho)?;
    cfg.tube.slice_width = ctx.pick(a.slice_width, "slice-width", d.tube.slice_width)?;
    cfg.budget = ctx.pick_parsed(a.budget.as_ref(), "budget", d.budget)?;
    cfg.slice_budget = ctx.pick_parsed(a.slice_budget.as_ref(), "slice-budget", d.slice_budget)?;
    cfg.max_depth = ctx.pick(a.max_depth, "max-depth", d.max_depth)?;
    cfg.target_delta = ctx.pick(a.target_delta, "target-delta", d.target_delta)?;
    cfg.shift = ctx.pick(a.shift, "shift", d.shift)?;
    cfg.corner_samples = ctx.pick_parsed(a.corner_samples.as_ref(), "corner-samples", d.corner_samples)?;
    cfg.seed = ctx.pick(a.seed, "seed", d.seed)?;
    cfg.keep_boxes = ctx.pick(a.keep_boxes, "keep-boxes", d.keep_boxes)?;
    let policy: String = ctx.pick(a.corner_policy.clone(), "corner-policy", "sample".into())?;
    cfg.corner_policy = match CornerPolicy::parse(&policy) {
        Some(p) => p,
        None => return usage(format!("corner policy must be `sample` or `exclude`, not `{policy}`")),
    };
    let mut regions = a.regions.clone();
    if regions.is_empty() {
        if let Some(r) = ctx.file.get_str("region") {
            regions = r.split(';').map(str::to_string).collect();
        }
    }
    if !regions.is_empty() {
        let mut boxes = Vec::new();
        for r in &regions {
            let b = parse_box(r)?;
            boxes.push(CBox::new((b[0][0], b[0][1]), (b[1][0], b[1][1]), (b[2][0], b[2][1])));
        }
        cfg.outer = Some(boxes);
    }
    if let Err(e) = cfg.validate() {
        return usage(e.to_string());
    }
    Ok(cfg)
}

fn certify_cmd(a: &CertifyArgs, ctx: &Ctx) -> Result<i32> {
    let sel: String = ctx.pick(a.lemma.clone(), "lemma", "both".into())?;
    let which = lemmas(&sel)?;
    let cfg = certify_config(a, ctx)?;
    let out = ctx.pick_path(&a.out, "out");
    let mut certs: Vec<Certificate> = Vec::new();
    for &l in &which {
        let t0 = Instant::now();
        let mut c = certifier::certify_lemma(l, &cfg, &ctx.exec).map_err(|e| crate::UsageError(e.to_string()))?;
        c.run = Some(RunInfo { wall_time_s: t0.elapsed().as_secs_f64(), ..ctx.run_info() });
        eprintln!(
            "certify: lemma {l}: status {}, overall {}, delta {}, {} boxes, {} slices ({} failed), {:.1}s",
            c.status.as_str(),
            c.overall_status.as_str(),
            c.delta.map_or("none".into(), |d| format!("{d:.6e}")),
            c.stats.boxes_processed,
            c.stats.slices,
            c.tube.failed,
            t0.elapsed().as_secs_f64(),
        );
        if let Some(k) = &c.corner {
            eprintln!("certify: lemma {l}: corner sampled {} points, min {:.6e}, {}", k.samples, k.min_value, k.status.as_str());
        }
        if !c.residual_boxes.is_empty() {
            eprintln!("certify: lemma {l}: {} residual boxes listed in the certificate", c.residual_boxes.len());
        }
        certs.push(c);
    }
    match (&out, certs.as_slice()) {
        (Some(p), [c]) => write_json(p, c)?,
        (Some(p), many) => write_json(p, &many)?,
        (None, many) => {
            for c in many {
                let p = PathBuf::from(format!("certificate_lemma{}.json", c.lemma));
                write_json(&p, c)?;
                eprintln!("certify: wrote {}", p.display());
            }
        }
    }
    let worst = certs.iter().map(|c| c.overall_status).min().unwrap_or(Status::Inconclusive);
    Ok(exit_for(worst))
}

// ---- critical ----

#[derive(Serialize)]
struct CriticalRow {
    index: u64,
    t0: f64,
    x0: f64,
    y0: f64,
    converged: bool,
    t: f64,
    x: f64,
    y: f64,
    u: f64,
    v: f64,
    residual: f64,
    manifold_distance: f64,
    classification: String,
    iterations: u32,
    reason: String,
}

#[derive(Serialize)]
struct CriticalSummary {
    schema_version: u32,
    mode: Mode,
    seed: u64,
    strategy: Strategy,
    start_box: [[f64; 2]; 3],
    max_iter: u32,
    probe: ProbeSummary,
    alpha_beta: Vec<AlphaBetaState>,
    admissible_off_manifold: usize,
    clean: bool,
    run: RunInfo,
}

fn critical_cmd(a: &CriticalArgs, ctx: &Ctx) -> Result<i32> {
    let mode = single_mode(a.mode, ctx)?;
    let starts: u64 = ctx.pick_parsed(a.starts.as_ref(), "starts", 1000)?;
    let seed = ctx.pick(a.seed, "seed", 0)?;
    let max_iter = ctx.pick(a.max_iter, "max-iter", 200)?;
    let full = a.full || ctx.file.get::<bool>("full").map_err(|e| crate::UsageError(format!("{e:#}")))?.unwrap_or(false);
    let strategy = if full { Strategy::Full } else { Strategy::AngleFirst };
    if starts == 0 {
        return usage("--starts must be at least 1");
    }
    let region = critical::default_start_box(mode);
    let records = critical::multistart(mode, starts, seed, region, max_iter, strategy, &ctx.exec);

    let mut w = csv::Writer::from_writer(sink(ctx.pick_path(&a.out, "out").as_deref())?);
    for r in &records {
        let row = match &r.result {
            Ok(p) => CriticalRow {
                index: r.index,
                t0: r.start[0],
                x0: r.start[1],
                y0: r.start[2],
                converged: true,
                t: p.point[0],
                x: p.point[1],
                y: p.point[2],
                u: p.compact[1],
                v: p.compact[2],
                residual: p.residual,
                manifold_distance: p.manifold_distance,
                classification: p.classification.as_str().into(),
                iterations: p.iterations,
                reason: String::new(),
            },
            Err(d) => CriticalRow {
                index: r.index,
                t0: r.start[0],
                x0: r.start[1],
                y0: r.start[2],
                converged: false,
                t: d.compact[0],
                x: scalar::from_compact(mode, d.compact[1]),
                y: scalar::from_compact(mode, d.compact[2]),
                u: d.compact[1],
                v: d.compact[2],
                residual: d.residual,
                manifold_distance: critical::manifold_distance(mode, d.compact),
                classification: "diverged".into(),
                iterations: d.iterations,
                reason: d.reason.clone(),
            },
        };
        w.serialize(row)?;
    }
    w.flush()?;

    let probe = ProbeSummary::of(&records);
    let ab = critical::solve_alpha_beta(mode);
    let bad_ab = ab.iter().filter(|s| s.admissible && s.off_manifold).count();
    let clean = probe.clean() && bad_ab == 0;
    eprintln!(
        "critical: {mode}: {} starts, {} converged ({} manifold, {} boundary, {} spurious), {} diverged; alpha/beta: {} admissible off-manifold",
        probe.starts, probe.converged, probe.manifold, probe.boundary, probe.spurious, probe.diverged, bad_ab
    );
    if let Some(p) = ctx.pick_path(&a.summary, "summary") {
        let s = CriticalSummary { schema_version: REPORT_SCHEMA, mode, seed, strategy, start_box: region, max_iter, probe, alpha_beta: ab, admissible_off_manifold: bad_ab, clean, run: ctx.run_info() };
        write_json(&p, &s)?;
    }
    Ok(if clean { exit::SUCCESS } else { exit::FAILURE })
}

// ---- scan ----

#[derive(Serialize)]
struct ScanSummary {
    schema_version: u32,
    mode: Mode,
    coordinates: &'static str,
    grid: usize,
    bounds: [[f64; 2]; 3],
    rho: f64,
    min: critical::GridMin,
    threshold: f64,
    passed: bool,
    run: RunInfo,
}

fn default_scan_box(mode: Mode, compact: bool) -> [[f64; 2]; 3] {
    use std::f64::consts::{FRAC_PI_2, PI};
    match (mode, compact) {
        (Mode::Trig, false) => [[0.3, PI], [0.0, 10.0], [0.0, 10.0]],
        (Mode::Hyp, false) => [[0.5, 3.0], [1.05, 10.0], [1.05, 10.0]],
        (Mode::Trig, true) => [[0.2, PI], [0.0, FRAC_PI_2], [0.0, FRAC_PI_2]],
        (Mode::Hyp, true) => [[0.2, 6.0], [0.05, 3.0], [0.05, 3.0]],
    }
}

fn check_scan_box(mode: Mode, compact: bool, b: &[[f64; 2]; 3]) -> Result<()> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let ok = match (mode, compact) {
        (Mode::Trig, false) => b[0][0] >= 0.0 && b[0][1] <= PI && b[1][0] >= 0.0 && b[2][0] >= 0.0,
        (Mode::Hyp, false) => b[0][0] >= 0.0 && b[1][0] >= 1.0 && b[2][0] >= 1.0,
        (Mode::Trig, true) => b[0][0] >= 0.0 && b[0][1] <= PI && b[1][0] >= 0.0 && b[2][0] >= 0.0 && b[1][1] <= FRAC_PI_2 && b[2][1] <= FRAC_PI_2,
        (Mode::Hyp, true) => b[0][0] >= 0.0 && b[1][0] > 0.0 && b[2][0] > 0.0,
    };
    if ok {
        Ok(())
    } else {
        usage(format!("scan box {b:?} leaves the {mode} domain"))
    }
}

#[derive(Serialize)]
struct ScanRow {
    i: usize,
    j: usize,
    k: usize,
    t: f64,
    x: f64,
    y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
    value: f64,
}

fn scan_cmd(a: &ScanArgs, ctx: &Ctx) -> Result<i32> {
    use ineqcert_core::exec::Executor;
    let mode = single_mode(a.mode, ctx)?;
    let n: usize = ctx.pick_parsed(a.grid.as_ref(), "grid", 100)?;
    if n < 2 {
        return usage("--grid must be at least 2");
    }
    let compact = a.compact || ctx.file.get::<bool>("compact").map_err(|e| crate::UsageError(format!("{e:#}")))?.unwrap_or(false);
    let bounds = match a.bx.clone().or_else(|| ctx.file.get_str("box").map(str::to_string)) {
        Some(s) => parse_box(&s)?,
        None => default_scan_box(mode, compact),
    };
    check_scan_box(mode, compact, &bounds)?;
    let rho = ctx.pick(a.rho, "rho", 0.0)?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return usage("--rho must be a finite nonnegative number");
    }
    let coords = if compact { Coords::Compact { rho } } else { Coords::Plain };
    let ax: [Vec<f64>; 3] = std::array::from_fn(|d| critical::axis(bounds[d][0], bounds[d][1], n));

    let mut w = csv::Writer::from_writer(sink(ctx.pick_path(&a.out, "out").as_deref())?);
    let mut best = critical::GridMin { argmin: [f64::NAN; 3], index: [0; 3], value: f64::INFINITY, evaluated: 0, skipped: 0 };
    let batch = 4 * ctx.exec.workers().max(1);
    for (c, chunk) in ax[0].chunks(batch).enumerate() {
        let planes = ctx.exec.map(chunk, |t| critical::grid_plane(mode, coords, *t, &ax[1], &ax[2]));
        for (di, plane) in planes.iter().enumerate() {
            let i = c * batch + di;
            for (jk, val) in plane.iter().enumerate() {
                let Some(val) = *val else {
                    best.skipped += 1;
                    continue;
                };
                let (j, k) = (jk / n, jk % n);
                best.evaluated += 1;
                if val < best.value || best.argmin[0].is_nan() && !val.is_nan() {
                    best = critical::GridMin { argmin: [ax[0][i], ax[1][j], ax[2][k]], index: [i, j, k], value: val, ..best };
                }
                let (x, y, u, v) = if compact {
                    (scalar::from_compact(mode, ax[1][j]), scalar::from_compact(mode, ax[2][k]), Some(ax[1][j]), Some(ax[2][k]))
                } else {
                    (ax[1][j], ax[2][k], None, None)
                };
                w.serialize(ScanRow { i, j, k, t: ax[0][i], x, y, u, v, value: val })?;
            }
        }
    }
    w.flush()?;
    let passed = best.value >= -EPSILON;
    eprintln!(
        "scan: {mode}: {} points ({} skipped), min {:.6e} at {:?}",
        best.evaluated, best.skipped, best.value, best.argmin
    );
    if let Some(p) = ctx.pick_path(&a.summary, "summary") {
        let s = ScanSummary {
            schema_version: REPORT_SCHEMA,
            mode,
            coordinates: if compact { "compact" } else { "plain" },
            grid: n,
            bounds,
            rho,
            min: best,
            threshold: -EPSILON,
            passed,
            run: ctx.run_info(),
        };
        write_json(&p, &s)?;
    }
    Ok(if passed { exit::SUCCESS } else { exit::FAILURE })
}
