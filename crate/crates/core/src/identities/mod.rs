//! The proof-step ledger: every algebraic transition of the two positivity
//! proofs as a machine-checkable claim.
//!
//! Claims are expression pairs; an equality holds when the difference clears
//! (over the fixed denominator atoms) to the zero polynomial in the mode's
//! normal form. The cleared denominator factors are side conditions and are
//! checked to be nonzero at exact rational sample points of the step's branch.

mod ledger;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use ledger::{f_expr, family, g_expr, ray_conditions};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::expr::{dsl, Expr, HpEnv};
use crate::hp::{self, Hp};
use crate::poly::{Relation, TrigPoly, Var, NVARS};
use crate::scalar::Mode;

/// Verification method, named after the primary check of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactPoly,
    TranscendentalReduction,
    BoundaryConstant,
}

/// The case branch a step lives on; selects the sample points used to check
/// side conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `x`, `y` free; `s`, `c` on the unit circle (hyperbola).
    Unrestricted,
    /// `x = αt, y = βt` with `α, β ∉ {0, 1}`, `α ≠ β`, `αβ ≠ 1`.
    Generic,
    AlphaZero,
    AlphaEqBeta,
    AlphaBetaOne,
    Manifold,
    /// `θ = π` or `ℓ = 0`.
    Boundary,
}

/// The two admitted transcendental identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    /// `atan(cot(θ/2)) = π/2 − θ/2` for `θ ∈ (0, π)`.
    #[serde(rename = "R1")]
    ArctanCotHalf,
    /// `atanh(1/coth(ℓ/2)) = ℓ/2` for `ℓ > 0`.
    #[serde(rename = "R2")]
    ArtanhInvCothHalf,
}

impl Reduction {
    pub fn describe(self) -> &'static str {
        match self {
            Reduction::ArctanCotHalf => "R1: atan(cot(theta/2)) = pi/2 - theta/2",
            Reduction::ArtanhInvCothHalf => "R2: atanh(1/coth(ell/2)) = ell/2",
        }
    }

    fn pattern(self) -> Expr {
        match self {
            Reduction::ArctanCotHalf => dsl::atan(dsl::t()),
            Reduction::ArtanhInvCothHalf => dsl::atanh(dsl::inv(dsl::t())),
        }
    }

    fn replacement(self) -> Expr {
        match self {
            Reduction::ArctanCotHalf => dsl::q(1, 2) * dsl::pi() - dsl::q(1, 2) * dsl::th(),
            Reduction::ArtanhInvCothHalf => dsl::q(1, 2) * dsl::th(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Check {
    /// `lhs − rhs` clears to zero.
    Equal { label: &'static str, lhs: Expr, rhs: Expr, extra_atoms: Vec<&'static str> },
    /// High-precision value at an anchor point is zero.
    Anchor { label: &'static str, expr: Expr, at: Vec<(Var, i64)>, angle: Option<i64> },
    /// Zero after the named reduction (exact), and zero before it at 100
    /// high-precision sample points.
    Reduced { label: &'static str, expr: Expr, reduction: Reduction },
    /// Clears to a polynomial with nonnegative coefficients and positive
    /// constant term.
    Positive { label: &'static str, expr: Expr },
    /// `lhs(α)` and `rhs(α)` have strictly opposite signs at every sampled
    /// `α ∈ (0,1) ∪ (1,∞)`.
    OppositeSigns { label: &'static str, lhs: Expr, rhs: Expr },
}

impl Check {
    pub fn label(&self) -> &'static str {
        match self {
            Check::Equal { label, .. }
            | Check::Anchor { label, .. }
            | Check::Reduced { label, .. }
            | Check::Positive { label, .. }
            | Check::OppositeSigns { label, .. } => label,
        }
    }

    /// Negates the first nonzero numeric coefficient of the claim.
    pub fn tamper(&mut self) {
        let e = match self {
            Check::Equal { lhs, .. } => lhs,
            Check::Anchor { expr, .. } | Check::Reduced { expr, .. } | Check::Positive { expr, .. } => expr,
            Check::OppositeSigns { lhs, .. } => lhs,
        };
        let mut done = false;
        *e = flip_first(e, &mut done);
        if !done {
            *e = e.clone() + Expr::one();
        }
    }
}

fn flip_first(e: &Expr, done: &mut bool) -> Expr {
    if *done {
        return e.clone();
    }
    match e {
        Expr::Num(n) if !n.is_zero() && n != &BigRational::from_integer(BigInt::from(1)) => {
            *done = true;
            Expr::Num(-n.clone())
        }
        Expr::Add(v) => Expr::Add(v.iter().map(|x| flip_first(x, done)).collect()),
        Expr::Mul(v) => Expr::Mul(v.iter().map(|x| flip_first(x, done)).collect()),
        Expr::Pow(x, n) => Expr::Pow(alloc::boxed::Box::new(flip_first(x, done)), *n),
        Expr::Inv(x) => Expr::Inv(alloc::boxed::Box::new(flip_first(x, done))),
        other => other.clone(),
    }
}

/// One displayed step of a proof.
#[derive(Clone, Debug)]
pub struct ProofStep {
    pub id: String,
    pub name: &'static str,
    pub mode: Mode,
    pub statement: &'static str,
    /// Short locator of the step within its lemma.
    pub source: &'static str,
    pub method: Method,
    pub branch: Branch,
    pub checks: Vec<Check>,
}

/// Serializable description of a step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub id: String,
    pub name: String,
    pub mode: Mode,
    pub statement: String,
    pub source: String,
    pub method: Method,
    pub branch: Branch,
    pub checks: Vec<String>,
}

impl ProofStep {
    pub fn info(&self) -> StepInfo {
        StepInfo {
            id: self.id.clone(),
            name: self.name.to_string(),
            mode: self.mode,
            statement: self.statement.to_string(),
            source: self.source.to_string(),
            method: self.method,
            branch: self.branch,
            checks: self.checks.iter().map(|c| c.label().to_string()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Verified,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub label: String,
    pub passed: bool,
    /// Residual polynomial, empty when zero.
    pub residual: String,
    /// Largest absolute high-precision residual, for numeric checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub id: String,
    pub name: String,
    pub mode: Mode,
    pub method: Method,
    pub status: StepStatus,
    /// Residuals and violated side conditions; empty iff verified.
    pub witness: Vec<String>,
    pub side_conditions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorOutcome {
    pub equal: bool,
    pub trig: Vec<String>,
    pub hyp: Vec<String>,
    /// The hyperbolic derivation reduced with the trigonometric relation; must
    /// differ from the trigonometric set.
    pub negative_control_differs: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub modes: Vec<Mode>,
    pub steps: Vec<StepOutcome>,
    pub all_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mirror: Option<MirrorOutcome>,
    pub engine_version: String,
}

/// Ordered, complete step list for a mode.
pub fn list_steps(mode: Mode) -> Vec<ProofStep> {
    match mode {
        Mode::Trig => ledger::trig_steps(),
        Mode::Hyp => ledger::hyp_steps(),
    }
}

/// Looks a step up by id (`G19`) or name (`G_subtract`).
pub fn find_step(key: &str) -> Result<ProofStep> {
    [Mode::Trig, Mode::Hyp]
        .into_iter()
        .flat_map(list_steps)
        .find(|s| s.id.eq_ignore_ascii_case(key) || s.name == key)
        .ok_or_else(|| Error::UnknownStep(key.to_string()))
}

pub fn verify_step(key: &str) -> Result<StepOutcome> {
    Ok(run_step(&find_step(key)?))
}

fn rel(mode: Mode) -> Relation {
    Relation::from(mode)
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact sample points: `(s, c)` rationally parametrized on the unit circle
/// (trig) or the hyperbola (hyp), `t = (1+c)/s`, and branch-specific
/// `α, β, x, y`.
pub fn sample_points(mode: Mode, branch: Branch) -> Vec<[Option<BigRational>; NVARS]> {
    let ms: Vec<BigRational> = match mode {
        Mode::Trig => vec![r(1, 3), r(1, 2), r(2, 3), r(2, 1), r(3, 1)],
        Mode::Hyp => vec![r(1, 5), r(1, 2), r(2, 3), r(3, 4)],
    };
    let generic = vec![(r(1, 3), r(5, 2)), (r(2, 1), r(3, 7)), (r(5, 4), r(4, 1)), (r(3, 1), r(2, 5))];
    let pairs: Vec<(BigRational, BigRational)> = match branch {
        Branch::Unrestricted | Branch::Generic | Branch::Boundary => generic,
        Branch::AlphaZero => vec![(r(0, 1), r(1, 2)), (r(0, 1), r(2, 1)), (r(1, 2), r(0, 1)), (r(0, 1), r(0, 1))],
        Branch::AlphaEqBeta => vec![(r(1, 3), r(1, 3)), (r(2, 1), r(2, 1)), (r(5, 2), r(5, 2))],
        Branch::AlphaBetaOne => vec![(r(1, 3), r(3, 1)), (r(2, 1), r(1, 2)), (r(5, 2), r(2, 5))],
        Branch::Manifold => vec![(r(1, 1), r(1, 1))],
    };
    let free_xy = [(r(3, 2), r(3, 1)), (r(2, 1), r(5, 2)), (r(7, 3), r(4, 1))];
    let one = BigRational::from_integer(BigInt::from(1));
    let mut out = Vec::new();
    for m in &ms {
        let m2 = m * m;
        let (s, c) = match (mode, branch) {
            (Mode::Trig, Branch::Boundary) => (BigRational::zero(), -one.clone()),
            (Mode::Hyp, Branch::Boundary) => (BigRational::zero(), one.clone()),
            (Mode::Trig, _) => (r(2, 1) * m / (&one + &m2), (&one - &m2) / (&one + &m2)),
            (Mode::Hyp, _) => (r(2, 1) * m / (&one - &m2), (&one + &m2) / (&one - &m2)),
        };
        let t = m.recip();
        for (i, (a, b)) in pairs.iter().enumerate() {
            let (x, y) = match branch {
                Branch::Unrestricted | Branch::Boundary => free_xy[i % free_xy.len()].clone(),
                _ => (a * &t, b * &t),
            };
            let mut v: [Option<BigRational>; NVARS] = Default::default();
            v[Var::S.index()] = Some(s.clone());
            v[Var::C.index()] = Some(c.clone());
            v[Var::A.index()] = Some(a.clone());
            v[Var::B.index()] = Some(b.clone());
            v[Var::X.index()] = Some(x);
            v[Var::Y.index()] = Some(y);
            v[Var::T.index()] = Some(t.clone());
            out.push(v);
        }
    }
    out
}

fn extra_atoms(mode: Mode, names: &[&str]) -> Vec<TrigPoly> {
    names.iter().map(|n| TrigPoly::parse(rel(mode), n).expect("built-in atom parses")).collect()
}

struct Ctx {
    witness: Vec<String>,
    side: Vec<String>,
    reduction: Option<Reduction>,
}

impl Ctx {
    fn side_conditions(&mut self, step: &ProofStep, factors: &[(TrigPoly, u32)]) {
        let pts = sample_points(step.mode, step.branch);
        for (f, e) in factors {
            let name = if *e == 1 { format!("{f}") } else { format!("({f})^{e}") };
            if !self.side.contains(&name) {
                self.side.push(name.clone());
            }
            for p in &pts {
                match f.eval_rational(p) {
                    Some(v) if !v.is_zero() => {}
                    _ => {
                        let w = format!("side condition {name} vanishes on branch {:?}", step.branch);
                        if !self.witness.contains(&w) {
                            self.witness.push(w);
                        }
                        break;
                    }
                }
            }
        }
    }
}

fn hp_point(mode: Mode, i: usize, hp: &mut Hp) -> HpEnv {
    let mut env = HpEnv::default();
    match mode {
        Mode::Trig => {
            let pi = hp.pi();
            let th = hp.mul(&pi, &hp.div(&hp.f64(i as f64 + 0.5), &hp.int(100)));
            let half = hp.div(&th, &hp.int(2));
            let (s, c) = (hp.sin(&th), hp.cos(&th));
            let t = {
                let (hs, hc) = (hp.sin(&half), hp.cos(&half));
                hp.div(&hc, &hs)
            };
            env.set(Var::S, s).set(Var::C, c).set(Var::T, t);
            env.angle = Some(th);
        }
        Mode::Hyp => {
            let l = hp.div(&hp.int(i as i64 + 1), &hp.int(10));
            let half = hp.div(&l, &hp.int(2));
            let (s, c) = (hp.sinh(&l), hp.cosh(&l));
            let t = {
                let th = hp.tanh(&half);
                hp.div(&hp.int(1), &th)
            };
            env.set(Var::S, s).set(Var::C, c).set(Var::T, t);
            env.angle = Some(l);
        }
    }
    env
}

/// Tolerance for high-precision residuals.
pub const HP_TOL: f64 = 1e-30;
/// Sample count for transcendental reductions.
pub const HP_SAMPLES: usize = 100;

fn run_check(step: &ProofStep, check: &Check, ctx: &mut Ctx) -> CheckOutcome {
    let mode = step.mode;
    let label = check.label().to_string();
    let fail = |residual: String| CheckOutcome { label: label.clone(), passed: false, residual, max_abs_residual: None, samples: None };
    match check {
        Check::Equal { lhs, rhs, extra_atoms: ex, .. } => {
            let diff = lhs.clone() - rhs.clone();
            match diff.clear_denominators(rel(mode), &extra_atoms(mode, ex)) {
                Ok(cl) => {
                    ctx.side_conditions(step, &cl.factors);
                    let residual = if cl.numerator.is_zero() { String::new() } else { cl.numerator.to_string() };
                    CheckOutcome { label, passed: residual.is_empty(), residual, max_abs_residual: None, samples: None }
                }
                Err(e) => fail(e.to_string()),
            }
        }
        Check::Anchor { expr, at, angle, .. } => {
            let mut hp = Hp::new(hp::DEFAULT_BITS);
            let mut env = HpEnv::default();
            for (v, n) in at {
                let val = hp.int(*n);
                env.set(*v, val);
            }
            env.angle = angle.map(|a| hp.int(a));
            let v = expr.eval_hp(&env, &mut hp);
            let passed = hp::abs_le(&v, HP_TOL);
            let mag = hp::to_f64(&v).abs();
            CheckOutcome {
                label,
                passed,
                residual: if passed { String::new() } else { format!("{mag:e}") },
                max_abs_residual: Some(mag),
                samples: Some(1),
            }
        }
        Check::Reduced { expr, reduction, .. } => {
            ctx.reduction = Some(*reduction);
            let reduced = expr.replace(&reduction.pattern(), &reduction.replacement()).subst(Var::T, &((dsl::k(1) + dsl::c()) / dsl::s()));
            let exact = match reduced.clear_denominators(rel(mode), &[]) {
                Ok(cl) => {
                    ctx.side_conditions(step, &cl.factors);
                    if cl.numerator.is_zero() {
                        String::new()
                    } else {
                        cl.numerator.to_string()
                    }
                }
                Err(e) => e.to_string(),
            };
            let mut hp = Hp::new(hp::DEFAULT_BITS);
            let identity = reduction.pattern() - reduction.replacement();
            let mut worst = 0.0f64;
            let mut ok = true;
            for i in 0..HP_SAMPLES {
                let env = hp_point(mode, i, &mut hp);
                for e in [expr, &identity] {
                    let v = e.eval_hp(&env, &mut hp);
                    ok &= hp::abs_le(&v, HP_TOL);
                    worst = worst.max(hp::to_f64(&v).abs());
                }
            }
            let residual = match (exact.is_empty(), ok) {
                (true, true) => String::new(),
                (false, _) => exact,
                (true, false) => format!("high-precision residual {worst:e} exceeds {HP_TOL:e}"),
            };
            CheckOutcome { label, passed: residual.is_empty(), residual, max_abs_residual: Some(worst), samples: Some(HP_SAMPLES) }
        }
        Check::Positive { expr, .. } => match expr.clear_denominators(rel(mode), &[]) {
            Ok(cl) => {
                let ok = cl.factors.is_empty() && cl.numerator.positive_on_orthant();
                CheckOutcome {
                    label,
                    passed: ok,
                    residual: if ok { String::new() } else { format!("not manifestly positive: {}", cl.numerator) },
                    max_abs_residual: None,
                    samples: None,
                }
            }
            Err(e) => fail(e.to_string()),
        },
        Check::OppositeSigns { lhs, rhs, .. } => {
            let (l, rr) = match (lhs.clear_denominators(rel(mode), &[]), rhs.clear_denominators(rel(mode), &[])) {
                (Ok(l), Ok(rr)) if l.factors.is_empty() && rr.factors.is_empty() => (l.numerator, rr.numerator),
                _ => return fail("sign check needs polynomial sides".to_string()),
            };
            let mut bad = None;
            let mut n = 0;
            for k in 1..=64i64 {
                let a = r(k, 16);
                if a == r(1, 1) {
                    continue;
                }
                let mut v: [Option<BigRational>; NVARS] = Default::default();
                v[Var::A.index()] = Some(a.clone());
                let (x, y) = (l.eval_rational(&v), rr.eval_rational(&v));
                n += 1;
                match (x, y) {
                    (Some(x), Some(y)) if (x.is_positive() && y.is_negative()) || (x.is_negative() && y.is_positive()) => {}
                    _ => {
                        bad = Some(a);
                        break;
                    }
                }
            }
            CheckOutcome {
                label,
                passed: bad.is_none(),
                residual: bad.map(|a| format!("same sign at alpha = {a}")).unwrap_or_default(),
                max_abs_residual: None,
                samples: Some(n),
            }
        }
    }
}

/// Runs all checks of one step.
pub fn run_step(step: &ProofStep) -> StepOutcome {
    let mut ctx = Ctx { witness: Vec::new(), side: Vec::new(), reduction: None };
    let mut checks = Vec::with_capacity(step.checks.len());
    for c in &step.checks {
        let out = run_check(step, c, &mut ctx);
        if !out.passed {
            ctx.witness.push(format!("{}: {}", out.label, out.residual));
        }
        checks.push(out);
    }
    let status = if ctx.witness.is_empty() { StepStatus::Verified } else { StepStatus::Failed };
    StepOutcome {
        id: step.id.clone(),
        name: step.name.to_string(),
        mode: step.mode,
        method: step.method,
        status,
        witness: ctx.witness,
        side_conditions: ctx.side,
        reduction: ctx.reduction,
        checks,
    }
}

/// Verifies every step of the given modes, optionally in parallel; the
/// report order is the ledger order regardless of completion order.
pub fn verify_all<E: Executor>(modes: &[Mode], with_mirror: bool, exec: &E) -> VerificationReport {
    let steps: Vec<ProofStep> = modes.iter().flat_map(|m| list_steps(*m)).collect();
    let outcomes = exec.map(&steps, run_step);
    let mirror = with_mirror.then(mirror_check);
    let all_verified = outcomes.iter().all(|o| o.status != StepStatus::Failed) && mirror.as_ref().is_none_or(|m| m.equal && m.negative_control_differs);
    VerificationReport {
        modes: modes.to_vec(),
        steps: outcomes,
        all_verified,
        mirror,
        engine_version: crate::VERSION.to_string(),
    }
}

const MIRROR_ATOMS: [&str; 4] = ["a^2 c - c + a^2 + 1", "b^2 c - c + b^2 + 1", "a^2 c + c + a^2 - 1", "b^2 c + c + b^2 - 1"];

/// Derives the three stationarity conditions on the rays for `mode`, reduces
/// them with `relation` and normalizes: the factors `s`, `c ± 1`, `α`, `β` and the
/// atoms above are divided out, then the result is made monic.
pub fn condition_set(mode: Mode, relation: Relation) -> Result<Vec<TrigPoly>> {
    let atoms: Vec<TrigPoly> = MIRROR_ATOMS.iter().map(|a| TrigPoly::parse(relation, a).expect("atom parses")).collect();
    let mut divisors = vec![
        TrigPoly::parse(relation, "s").expect("atom"),
        TrigPoly::parse(relation, "c + 1").expect("atom"),
        TrigPoly::parse(relation, "c - 1").expect("atom"),
        TrigPoly::parse(relation, "a").expect("atom"),
        TrigPoly::parse(relation, "b").expect("atom"),
    ];
    divisors.extend(atoms.iter().cloned());
    let mut out = Vec::new();
    for cond in ray_conditions(mode) {
        let cl = cond.clear_denominators(relation, &atoms)?;
        let mut p = cl.numerator;
        for d in &divisors {
            while p.as_constant().is_none() {
                match p.div_exact(d) {
                    Some(q) => p = q,
                    None => break,
                }
            }
        }
        out.push(p.monic().with_relation(Relation::Free));
    }
    Ok(out)
}

/// Swaps the relation tag of a condition set (the literal cos ↔ cosh
/// exchange); the sets are free of `s`, so this is an involution.
pub fn swap_relation(set: &[TrigPoly], to: Relation) -> Vec<TrigPoly> {
    set.iter().map(|p| p.with_relation(to)).collect()
}

pub fn mirror_check() -> MirrorOutcome {
    let trig = condition_set(Mode::Trig, Relation::Trig);
    let hyp = condition_set(Mode::Hyp, Relation::Hyp);
    let control = condition_set(Mode::Hyp, Relation::Trig);
    let show = |r: &Result<Vec<TrigPoly>>| match r {
        Ok(v) => v.iter().map(|p| p.to_string()).collect(),
        Err(e) => vec![e.to_string()],
    };
    let equal = match (&trig, &hyp) {
        (Ok(a), Ok(b)) => swap_relation(b, Relation::Trig).iter().map(|p| p.with_relation(Relation::Free)).collect::<Vec<_>>() == *a,
        _ => false,
    };
    let negative_control_differs = match (&trig, &control) {
        (Ok(a), Ok(b)) => a != b,
        _ => true,
    };
    MirrorOutcome { equal, trig: show(&trig), hyp: show(&hyp), negative_control_differs }
}

/// Exact claim lines `ID: lhs = rhs` (cross-multiplied numerators) for every
/// polynomial check; reading them back re-verifies the ledger offline.
pub fn export_fixture(modes: &[Mode]) -> Result<String> {
    let mut out = String::new();
    for m in modes {
        for step in list_steps(*m) {
            for c in &step.checks {
                let (lhs, rhs, ex): (Expr, Expr, &[&str]) = match c {
                    Check::Equal { lhs, rhs, extra_atoms, .. } => (lhs.clone(), rhs.clone(), extra_atoms),
                    Check::Reduced { expr, reduction, .. } => {
                        let red = expr.replace(&reduction.pattern(), &reduction.replacement()).subst(Var::T, &((dsl::k(1) + dsl::c()) / dsl::s()));
                        (red, Expr::zero(), &[])
                    }
                    _ => continue,
                };
                let atoms = extra_atoms(*m, ex);
                let l = lhs.clear_denominators(rel(*m), &atoms)?;
                let rr = rhs.clear_denominators(rel(*m), &atoms)?;
                if l.transcendental_atoms != rr.transcendental_atoms && !(l.transcendental_atoms.is_empty() || rr.transcendental_atoms.is_empty()) {
                    // Slot numbering must agree across sides; clear the difference instead.
                    let d = (lhs - rhs).clear_denominators(rel(*m), &atoms)?;
                    out.push_str(&format!("{}: {} = 0\n", step.id, d.numerator));
                    continue;
                }
                let den = |fs: &[(TrigPoly, u32)]| fs.iter().fold(TrigPoly::int(rel(*m), 1), |acc, (f, e)| acc.mul(&f.pow(*e)));
                let left = l.numerator.mul(&den(&rr.factors));
                let right = rr.numerator.mul(&den(&l.factors));
                out.push_str(&format!("{}: {} = {}\n", step.id, left, right));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureLine {
    pub line: usize,
    pub id: String,
    pub passed: bool,
    pub residual: String,
}

/// Re-checks fixture lines. Blank lines and `#` comments are ignored.
pub fn verify_fixture(text: &str) -> Result<Vec<FixtureLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("line {}: {msg}", i + 1) };
        let (id, body) = line.split_once(':').ok_or_else(|| bad("missing `ID:` prefix"))?;
        let id = id.trim();
        let mode = match id.chars().next() {
            Some('G') => Mode::Trig,
            Some('F') => Mode::Hyp,
            _ => return Err(bad("id must start with G or F")),
        };
        let (l, rr) = body.split_once('=').ok_or_else(|| bad("missing `=`"))?;
        let l = TrigPoly::parse(rel(mode), l.trim())?;
        let rr = TrigPoly::parse(rel(mode), rr.trim())?;
        let d = l.sub(&rr);
        out.push(FixtureLine {
            line: i + 1,
            id: id.to_string(),
            passed: d.is_zero(),
            residual: if d.is_zero() { String::new() } else { d.to_string() },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn step_counts_and_ids() {
        let g = list_steps(Mode::Trig);
        let f = list_steps(Mode::Hyp);
        assert_eq!(g.len(), 23);
        assert_eq!(f.len(), 21);
        for (i, s) in g.iter().enumerate() {
            assert_eq!(s.id, format!("G{}", i + 1));
            assert!(!s.source.is_empty() && !s.checks.is_empty());
        }
        assert_eq!(find_step("G_subtract").unwrap().id, "G19");
        assert_eq!(find_step("F20").unwrap().name, "F_manifold_zero");
        assert!(matches!(find_step("G99"), Err(Error::UnknownStep(_))));
    }

    #[test]
    fn named_examples_verify() {
        for key in ["G_alpha_chain", "G_subtract", "G_alpha_beta_one", "F_alpha_eq_beta"] {
            let o = verify_step(key).unwrap();
            assert_eq!(o.status, StepStatus::Verified, "{key}: {:?}", o.witness);
        }
    }

    #[test]
    fn alpha_beta_one_side_conditions() {
        let o = verify_step("G_alpha_beta_one").unwrap();
        assert!(o.side_conditions.contains(&"1 * a - 1".to_string()), "{:?}", o.side_conditions);
        let chain = verify_step("G_alpha_chain").unwrap();
        assert!(chain.side_conditions.contains(&"1 * a".to_string()), "{:?}", chain.side_conditions);
    }

    #[test]
    fn every_step_verifies() {
        let rep = verify_all(&[Mode::Trig, Mode::Hyp], true, &Sequential);
        for s in &rep.steps {
            assert_eq!(s.status, StepStatus::Verified, "{} {}: {:?}", s.id, s.name, s.witness);
        }
        let m = rep.mirror.as_ref().unwrap();
        assert!(m.equal, "{m:?}");
        assert!(m.negative_control_differs);
        assert!(rep.all_verified);
    }

    #[test]
    fn tampering_is_detected() {
        for key in ["G19", "G8", "F11", "G22", "F21"] {
            let mut st = find_step(key).unwrap();
            st.checks[0].tamper();
            let o = run_step(&st);
            assert_eq!(o.status, StepStatus::Failed, "{key}");
            assert!(!o.witness.is_empty());
        }
    }

    #[test]
    fn side_condition_violation_is_reported() {
        let mut st = find_step("G_alpha_beta_one").unwrap();
        st.branch = Branch::Manifold;
        let o = run_step(&st);
        assert_eq!(o.status, StepStatus::Failed);
        assert!(o.witness.iter().any(|w| w.contains("side condition")));
    }

    #[test]
    fn fixture_round_trip_and_mutation() {
        let text = export_fixture(&[Mode::Trig]).unwrap();
        let lines = verify_fixture(&text).unwrap();
        assert!(lines.len() > 40);
        assert!(lines.iter().all(|l| l.passed));
        let line = text.lines().find(|l| l.starts_with("G19:")).unwrap();
        let mutated = line.replacen("+ 3 * a", "+ 5 * a", 1);
        assert_ne!(mutated, line);
        let res = verify_fixture(&mutated).unwrap();
        assert!(!res[0].passed);
    }

    #[test]
    fn mirror_swap_is_an_involution() {
        let set = condition_set(Mode::Trig, Relation::Trig).unwrap();
        let twice = swap_relation(&swap_relation(&set, Relation::Hyp), Relation::Free);
        assert_eq!(twice, set);
    }
}
