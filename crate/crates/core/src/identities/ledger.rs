//! The step tables. Each builder returns the claims of one displayed step;
//! the trig and hyp tables share builders wherever the algebra coincides.

use alloc::vec;
use alloc::vec::Vec;

use super::{Branch, Check, Method, ProofStep, Reduction};
use crate::expr::dsl::*;
use crate::expr::{Expr, Wrt};
use crate::poly::Var;
use crate::scalar::Mode;

/// G(θ, x, y).
pub fn g_expr() -> Expr {
    let bx = -6 * atan(x()) + 2 * x() / (1 + pw(x(), 2));
    let by = -6 * atan(y()) + 2 * y() / (1 + pw(y(), 2));
    pw(s(), 3) * x() * y() + (pw(c(), 3) - 3 * c() + 2) * (x() + y()) - pw(s(), 3) - 6 * s() - 6 * th()
        + 6 * pi()
        + bx
        + by
}

/// F(ℓ, x, y).
pub fn f_expr() -> Expr {
    pw(s(), 3) * x() * y() - (pw(c(), 3) - 3 * c() + 2) * (x() + y()) + pw(s(), 3) - 6 * s() - 6 * th()
        + hyp_term(x())
        + hyp_term(y())
}

pub fn family(mode: Mode) -> Expr {
    match mode {
        Mode::Trig => g_expr(),
        Mode::Hyp => f_expr(),
    }
}

/// `4x − 6 atan x + 2x/(1+x²)`.
fn integral_term(z: Expr) -> Expr {
    4 * z.clone() - 6 * atan(z.clone()) + 2 * z.clone() / (1 + pw(z, 2))
}

/// `6 atanh(1/x) + 2x/(x²−1)`.
fn hyp_term(z: Expr) -> Expr {
    6 * atanh(inv(z.clone())) + 2 * z.clone() / (pw(z, 2) - 1)
}

/// The lemma's left-hand side, typed independently of [`g_expr`].
fn trig_statement_lhs() -> Expr {
    let s3 = s() * s() * s();
    let kk = c() * c() * c() - 3 * c() + 2;
    Expr::sum(vec![
        s3.clone() * x() * y(),
        kk.clone() * x(),
        kk * y(),
        -s3,
        -6 * s(),
        -6 * th(),
        6 * pi(),
        -6 * atan(x()),
        2 * x() * inv(1 + x() * x()),
        -6 * atan(y()),
        2 * y() * inv(1 + y() * y()),
    ])
}

fn hyp_statement_lhs() -> Expr {
    let s3 = s() * s() * s();
    let kk = c() * c() * c() - 3 * c() + 2;
    Expr::sum(vec![
        s3.clone() * x() * y(),
        -kk.clone() * x(),
        -kk * y(),
        s3,
        -6 * s(),
        -6 * th(),
        6 * atanh(inv(x())),
        2 * x() * inv(x() * x() - 1),
        6 * atanh(inv(y())),
        2 * y() * inv(y() * y() - 1),
    ])
}

/// `cot(θ/2)` or `coth(ℓ/2)` written through the full angle.
fn half() -> Expr {
    (1 + c()) / s()
}

fn with_half(e: Expr) -> Expr {
    e.subst(Var::T, &half())
}

/// `x = α t, y = β t`, then `t = (1+c)/s`.
fn on_rays(e: Expr) -> Expr {
    with_half(e.subst(Var::X, &(a() * t())).subst(Var::Y, &(b() * t())))
}

fn at_angle_zero(e: Expr) -> Expr {
    e.replace(&th(), &k(0)).subst(Var::S, &k(0)).subst(Var::C, &k(1))
}

fn at_angle_pi(e: Expr) -> Expr {
    e.replace(&th(), &pi()).subst(Var::S, &k(0)).subst(Var::C, &k(-1))
}

fn d_alpha() -> Expr {
    (pw(a(), 2) - 1) * c() + pw(a(), 2) + 1
}

fn e_beta() -> Expr {
    1 + (1 - b()) * (1 - c())
}

/// `cos θ = (1−α)⁻¹ + (1−β)⁻¹` (or `cosh ℓ`).
fn c_solved() -> Expr {
    inv(1 - a()) + inv(1 - b())
}

fn with_c_solved(e: Expr) -> Expr {
    e.subst(Var::C, &c_solved())
}

/// `(1−α)(1−β)c − (1−α) − (1−β)`.
fn cond_simplified() -> Expr {
    (1 - a()) * (1 - b()) * c() - (1 - a()) - (1 - b())
}

/// `(1−αβ)c − ((α−1)+(β−1))(1−c)`.
fn cond_substituted() -> Expr {
    (1 - a() * b()) * c() - ((a() - 1) + (b() - 1)) * (1 - c())
}

fn eq9() -> Expr {
    4 * pw(a(), 4) * (1 - b()) - a() * (a() - 1) * pw(1 + a() + a() * (1 - b()), 2)
}

fn eq10() -> Expr {
    4 * a() * (1 - b()) - (a() - 1) * pw(1 + a() * b(), 2)
}

fn eq10_simplified() -> Expr {
    4 * a() + pw(1 - a() * b(), 2) - a() * pw(1 + a() * b(), 2)
}

fn swap_ab(e: &Expr) -> Expr {
    e.swap(Var::A, Var::B)
}

fn swap_xy(e: &Expr) -> Expr {
    e.swap(Var::X, Var::Y)
}

fn eq(label: &'static str, lhs: Expr, rhs: Expr) -> Check {
    Check::Equal { label, lhs, rhs, extra_atoms: Vec::new() }
}

fn eq_with(label: &'static str, lhs: Expr, rhs: Expr, extra: &[&'static str]) -> Check {
    Check::Equal { label, lhs, rhs, extra_atoms: extra.to_vec() }
}

const D_ATOM: &str = "a^2 c - c + a^2 + 1";

struct Spec {
    name: &'static str,
    statement: &'static str,
    source: &'static str,
    method: Method,
    branch: Branch,
    checks: Vec<Check>,
}

fn finish(mode: Mode, specs: Vec<Spec>) -> Vec<ProofStep> {
    let prefix = match mode {
        Mode::Trig => 'G',
        Mode::Hyp => 'F',
    };
    specs
        .into_iter()
        .enumerate()
        .map(|(i, sp)| ProofStep {
            id: alloc::format!("{prefix}{}", i + 1),
            name: sp.name,
            mode,
            statement: sp.statement,
            source: sp.source,
            method: sp.method,
            branch: sp.branch,
            checks: sp.checks,
        })
        .collect()
}

// Builders shared by both tables. They only involve α, β and c.

fn simplified_checks() -> Vec<Check> {
    vec![
        eq("two forms of the angle condition sum to zero", cond_substituted(), -cond_simplified()),
        eq("alpha = 1 leaves beta - 1 = 0", cond_simplified().subst(Var::A, &k(1)), b() - 1),
        eq(
            "dividing by (1-alpha)(1-beta) isolates the cosine",
            cond_simplified() / ((1 - a()) * (1 - b())),
            c() - inv(1 - a()) - inv(1 - b()),
        ),
    ]
}

fn bracket_one_checks() -> Vec<Check> {
    vec![eq("1 + (1-beta)(1-c) after eliminating c", with_c_solved(e_beta()), a() * (1 - b()) / (a() - 1))]
}

fn bracket_two_checks() -> Vec<Check> {
    vec![
        eq("regrouping of D", d_alpha(), (a() + 1) * ((a() - 1) * c() + 1) + a() * (a() - 1)),
        eq(
            "D after eliminating c",
            with_c_solved(d_alpha()),
            (a() - 1) / (1 - b()) * (2 * a() + 1 - a() * b()),
        ),
    ]
}

fn eq9_checks(mode: Mode) -> Vec<Check> {
    let core = 4 * pw(a(), 4) - pw(d_alpha(), 2) * e_beta();
    let core = match mode {
        Mode::Trig => core,
        Mode::Hyp => -core,
    };
    let sign = match mode {
        Mode::Trig => 1,
        Mode::Hyp => -1,
    };
    vec![eq("x-condition with c eliminated, times (1-beta)", with_c_solved(core) * (1 - b()), sign * eq9())]
}

fn alpha_zero_checks() -> Vec<Check> {
    vec![
        eq("swapped equation at alpha = 0", swap_ab(&eq9()).subst(Var::A, &k(0)), b() * (3 * b() + 1)),
        Check::Positive { label: "3 beta + 1 > 0 for beta >= 0", expr: 3 * b() + 1 },
        eq("equation at beta = 0", eq9().subst(Var::B, &k(0)), a() * (3 * a() + 1)),
        eq(
            "alpha = beta = 0 forces c = 2",
            cond_simplified().subst(Var::A, &k(0)).subst(Var::B, &k(0)),
            c() - 2,
        ),
    ]
}

fn divide_rewrite_checks() -> Vec<Check> {
    vec![
        eq(
            "rewrite of 4 alpha^3 (1-beta)",
            4 * pw(a(), 3) * (1 - b()),
            4 * a() * (1 + a()) * (a() - 1) * (1 - b()) + 4 * a() * (1 - b()),
        ),
        eq(
            "division by alpha",
            eq9() / a(),
            4 * pw(a(), 3) * (1 - b()) - (a() - 1) * pw(1 + 2 * a() - a() * b(), 2),
        ),
    ]
}

fn alpha_chain_checks() -> Vec<Check> {
    vec![
        eq(
            "difference of squares collapses",
            (a() - 1) * (pw(1 + 2 * a() - a() * b(), 2) - pw(1 + a() * b(), 2)),
            4 * a() * (pw(a(), 2) - 1) * (1 - b()),
        ),
        eq("x-equation divided by alpha is the reduced equation", eq9() / a(), eq10()),
    ]
}

fn eq10_simplified_checks() -> Vec<Check> {
    vec![eq("expanded reduced equation", eq10(), eq10_simplified())]
}

fn subtract_checks() -> Vec<Check> {
    let diff = 4 * (a() - b()) - (a() - b()) * pw(1 + a() * b(), 2);
    vec![
        eq("alpha-equation minus beta-equation", eq10_simplified() - swap_ab(&eq10_simplified()), diff.clone()),
        eq("factored difference", diff, (a() - b()) * (1 - a() * b()) * (3 + a() * b())),
        Check::Positive { label: "3 + alpha beta > 0", expr: 3 + a() * b() },
    ]
}

fn alpha_eq_beta_checks() -> Vec<Check> {
    let on_diag = 4 * a() * (1 - a()) - (a() - 1) * pw(1 + pw(a(), 2), 2);
    vec![
        eq("reduced equation on alpha = beta", eq10().subst(Var::B, &a()), on_diag.clone()),
        eq("factor (1 - alpha)", on_diag, (1 - a()) * (4 * a() + pw(1 + pw(a(), 2), 2))),
        Check::Positive { label: "4 alpha + (1 + alpha^2)^2 > 0", expr: 4 * a() + pw(1 + pw(a(), 2), 2) },
        Check::OppositeSigns { label: "sides have opposite signs off alpha = 1", lhs: 4 * a() * (1 - a()), rhs: (a() - 1) * pw(1 + pw(a(), 2), 2) },
    ]
}

fn alpha_beta_one_checks() -> Vec<Check> {
    vec![
        eq("cosine at beta = 1/alpha", inv(1 - a()) + inv(1 - inv(a())), k(1)),
        eq("solved cosine at beta = 1/alpha", c_solved().subst(Var::B, &inv(a())), k(1)),
    ]
}

fn gradient_checks(mode: Mode) -> Vec<Check> {
    let f = family(mode);
    let dt = f.diff(Wrt::Angle, mode);
    let dx = f.diff(Wrt::X, mode);
    let dy = f.diff(Wrt::Y, mode);
    let (s2, s3) = (pw(s(), 2), pw(s(), 3));
    match mode {
        Mode::Trig => {
            let kk = pw(1 - c(), 2) * (2 + c());
            let r = |z: Expr| (4 + 8 * pw(z.clone(), 2)) / pw(1 + pw(z, 2), 2);
            vec![
                eq("d/dtheta", dt.clone(), 3 * s2.clone() * c() * x() * y() + 3 * s3.clone() * (x() + y()) + 3 * pw(1 + c(), 2) * (c() - 2)),
                eq("d/dx", dx.clone(), s3.clone() * y() + kk.clone() - r(x())),
                eq("d/dy", dy.clone(), s3.clone() * x() + kk - r(y())),
                eq("d2/dx2", dx.diff(Wrt::X, mode), 16 * pw(x(), 3) / pw(1 + pw(x(), 2), 3)),
                eq("d2/dy2", dy.diff(Wrt::Y, mode), 16 * pw(y(), 3) / pw(1 + pw(y(), 2), 3)),
                eq("d2/dxdy", dx.diff(Wrt::Y, mode), s3.clone()),
                eq(
                    "d2/dtheta2",
                    dt.diff(Wrt::Angle, mode),
                    3 * (2 * s() * pw(c(), 2) - s3.clone()) * x() * y() + 9 * s2.clone() * c() * (x() + y()) + 9 * s3.clone(),
                ),
                eq("d2/dtheta dx", dt.diff(Wrt::X, mode), 3 * s2 * c() * y() + 3 * s3),
            ]
        }
        Mode::Hyp => {
            let tail = pw(1 + c(), 2) * (2 - c());
            let q = |z: Expr| 4 * pw(z.clone(), 4) / pw(pw(z, 2) - 1, 2);
            vec![
                eq("d/dell", dt.clone(), 3 * s2.clone() * c() * x() * y() - 3 * s3.clone() * (x() + y()) + 3 * pw(c() + 1, 2) * (c() - 2)),
                eq("d/dx", dx.clone(), s3.clone() * y() - q(x()) + tail.clone()),
                eq("d/dy", dy.clone(), s3.clone() * x() - q(y()) + tail),
                eq("d2/dx2", dx.diff(Wrt::X, mode), 16 * pw(x(), 3) / pw(pw(x(), 2) - 1, 3)),
                eq("d2/dy2", dy.diff(Wrt::Y, mode), 16 * pw(y(), 3) / pw(pw(y(), 2) - 1, 3)),
                eq("d2/dxdy", dx.diff(Wrt::Y, mode), s3.clone()),
                eq(
                    "d2/dell2",
                    dt.diff(Wrt::Angle, mode),
                    3 * (2 * s() * pw(c(), 2) + s3.clone()) * x() * y() - 9 * s2.clone() * c() * (x() + y()) + 9 * s3.clone(),
                ),
                eq("d2/dell dx", dt.diff(Wrt::X, mode), 3 * s2 * c() * y() - 3 * s3),
            ]
        }
    }
}

fn swapped_checks(mode: Mode) -> Vec<Check> {
    let f = family(mode);
    let dx = f.diff(Wrt::X, mode);
    let dy = f.diff(Wrt::Y, mode);
    vec![
        eq("symmetry in x and y", f.clone(), swap_xy(&f)),
        eq("d/dy is the swapped d/dx", dy, swap_xy(&dx)),
        eq("beta-equation", swap_ab(&eq10_simplified()), 4 * b() + pw(1 - a() * b(), 2) - b() * pw(1 + a() * b(), 2)),
    ]
}

fn manifold_check(mode: Mode) -> Check {
    let on = family(mode).subst(Var::X, &t()).subst(Var::Y, &t());
    let reduction = match mode {
        Mode::Trig => Reduction::ArctanCotHalf,
        Mode::Hyp => Reduction::ArtanhInvCothHalf,
    };
    Check::Reduced { label: "value on the diagonal x = y = t", expr: on, reduction }
}

pub fn trig_steps() -> Vec<ProofStep> {
    let m = Mode::Trig;
    let g = g_expr();
    let dt = g.diff(Wrt::Angle, m);
    let dx = g.diff(Wrt::X, m);
    let dy = g.diff(Wrt::Y, m);
    let (s2, s3) = (pw(s(), 2), pw(s(), 3));
    let eq7 = c() * (pw(t(), 2) - x() * y()) - s() * (x() + y() - 2 * t());
    let rhs_x = pw(1 + c(), 2) + s2.clone() * (1 + c());
    let specs = vec![
        Spec {
            name: "G_definition",
            statement: "The lemma's left-hand side is the function G; at theta = 0 only the arctangent terms survive.",
            source: "lemma 1, statement and definition of G",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("statement equals definition", trig_statement_lhs(), g.clone()),
                eq(
                    "face theta = 0",
                    at_angle_zero(g.clone()),
                    6 * pi() - 6 * atan(x()) + 2 * x() / (1 + pw(x(), 2)) - 6 * atan(y()) + 2 * y() / (1 + pw(y(), 2)),
                ),
            ],
        },
        Spec {
            name: "G_integral_identity",
            statement: "4x - 6 atan x + 2x/(1+x^2) has derivative 4x^4/(1+x^2)^2 and vanishes at x = 0.",
            source: "lemma 1, integral representation",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("derivative", integral_term(x()).diff(Wrt::X, m), 4 * pw(x(), 4) / pw(1 + pw(x(), 2), 2)),
                Check::Anchor { label: "value at x = 0", expr: integral_term(x()), at: vec![(Var::X, 0)], angle: None },
            ],
        },
        Spec {
            name: "G_coefficient_shift",
            statement: "Moving 4(x+y) into the integral terms turns c^3 - 3c + 2 into c^3 - 3c - 2.",
            source: "lemma 1, equivalent integral form",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![eq(
                "shifted form",
                g.clone(),
                s3.clone() * x() * y() + (pw(c(), 3) - 3 * c() - 2) * (x() + y()) - s3.clone() - 6 * s() - 6 * th() + 6 * pi()
                    + integral_term(x())
                    + integral_term(y()),
            )],
        },
        Spec {
            name: "G_factorization",
            statement: "c^3 - 3c - 2 = -(1+c)^2(2-c) = -(1+c)^2 - s^2(1+c), which gives the x- and y-stationarity equations.",
            source: "lemma 1, stationarity system",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("first factorization", pw(c(), 3) - 3 * c() - 2, -(pw(1 + c(), 2) * (2 - c()))),
                eq("second factorization", -(pw(1 + c(), 2) * (2 - c())), -pw(1 + c(), 2) - s2.clone() * (1 + c())),
                eq("constant-side factorization", pw(c(), 3) - 3 * c() + 2, pw(1 - c(), 2) * (2 + c())),
                eq("x-equation", dx.clone(), s3.clone() * y() + 4 * pw(x(), 4) / pw(1 + pw(x(), 2), 2) - rhs_x.clone()),
                eq("y-equation", dy.clone(), s3.clone() * x() + 4 * pw(y(), 4) / pw(1 + pw(y(), 2), 2) - rhs_x),
                eq(
                    "theta-equation",
                    dt.clone(),
                    3 * (s2.clone() * (c() * x() * y() + s() * (x() + y())) - 2 * (1 + c()) - s2.clone() * c()),
                ),
            ],
        },
        Spec {
            name: "G_cot_half_rewrite",
            statement: "cot(theta/2) = (1+c)/s, so 2(1+c) + s^2 c = s^2 (c t^2 + 2 s t) and the theta-equation becomes s^2 [c(xy - t^2) + s(x + y - 2t)] = 0.",
            source: "lemma 1, half-angle rewrite of the theta-equation",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("half-angle formula (s, c of theta/2)", c() / s(), (1 + pw(c(), 2) - pw(s(), 2)) / (2 * s() * c())),
                eq("constant side", 2 * (1 + c()) + s2.clone() * c(), with_half(s2.clone() * (c() * pw(t(), 2) + 2 * s() * t()))),
                eq(
                    "bracketed form",
                    s2.clone() * (c() * x() * y() + s() * (x() + y())) - 2 * (1 + c()) - s2.clone() * c(),
                    with_half(s2.clone() * (c() * (x() * y() - pw(t(), 2)) + s() * (x() + y() - 2 * t()))),
                ),
            ],
        },
        Spec {
            name: "G_theta_condition",
            statement: "d/dtheta G = 3 s^2 [c(xy - t^2) + s(x + y - 2t)], so either theta = pi or c(t^2 - xy) = s(x + y - 2t).",
            source: "lemma 1, theta-stationarity",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("mechanical derivative", dt.clone(), with_half(3 * s2.clone() * (c() * (x() * y() - pw(t(), 2)) + s() * (x() + y() - 2 * t())))),
                eq("sign rearrangement", c() * (x() * y() - pw(t(), 2)) + s() * (x() + y() - 2 * t()), -eq7.clone()),
            ],
        },
        Spec {
            name: "G_theta_pi",
            statement: "G(pi, x, y) is the sum of the two integral terms, which is zero at x = y = 0.",
            source: "lemma 1, boundary theta = pi",
            method: Method::ExactPoly,
            branch: Branch::Boundary,
            checks: vec![
                eq("value at theta = pi", at_angle_pi(g.clone()), integral_term(x()) + integral_term(y())),
                Check::Anchor {
                    label: "zero at the origin",
                    expr: integral_term(x()) + integral_term(y()),
                    at: vec![(Var::X, 0), (Var::Y, 0)],
                    angle: None,
                },
            ],
        },
        Spec {
            name: "G_substitution",
            statement: "With x = alpha t, y = beta t the angle condition is (1+c)^2/s^2 times (1 - alpha beta) c - ((alpha-1) + (beta-1))(1-c).",
            source: "lemma 1, ray substitution",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: vec![eq("ray substitution", on_rays(eq7.clone()), pw(1 + c(), 2) / s2.clone() * cond_substituted())],
        },
        Spec {
            name: "G_simplified",
            statement: "The angle condition equals (1-alpha)(1-beta) c = (1-alpha) + (1-beta); alpha = 1 forces beta = 1, otherwise c = 1/(1-alpha) + 1/(1-beta).",
            source: "lemma 1, simplified angle condition",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: simplified_checks(),
        },
        Spec {
            name: "G_dx_alpha_form",
            statement: "On the rays, d/dx G = (1+c)^2 (4 alpha^4 - D^2 E)/D^2 with D = (alpha^2 - 1)c + alpha^2 + 1 and E = 1 + (1-beta)(1-c).",
            source: "lemma 1, x-stationarity on the rays",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: vec![eq_with(
                "x-derivative on the rays",
                on_rays(dx.clone()),
                pw(1 + c(), 2) * (4 * pw(a(), 4) - pw(d_alpha(), 2) * e_beta()) / pw(d_alpha(), 2),
                &[D_ATOM],
            )],
        },
        Spec {
            name: "G_bracket_one",
            statement: "With c eliminated, 1 + (1-beta)(1-c) = alpha(1-beta)/(alpha-1).",
            source: "lemma 1, first auxiliary identity",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: bracket_one_checks(),
        },
        Spec {
            name: "G_bracket_two",
            statement: "D = (alpha+1)((alpha-1)c + 1) + alpha(alpha-1), which equals (alpha-1)(2 alpha + 1 - alpha beta)/(1-beta) once c is eliminated.",
            source: "lemma 1, second auxiliary identity",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: bracket_two_checks(),
        },
        Spec {
            name: "G_eq9",
            statement: "Eliminating c from the x-condition gives 4 alpha^4 (1-beta) = alpha(alpha-1)(1 + alpha + alpha(1-beta))^2.",
            source: "lemma 1, x-condition after elimination",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: eq9_checks(m),
        },
        Spec {
            name: "G_alpha_zero",
            statement: "alpha = 0 forces beta(3 beta + 1) = 0, hence beta = 0 and c = 2; symmetrically beta = 0 forces alpha = 0.",
            source: "lemma 1, case alpha = 0",
            method: Method::ExactPoly,
            branch: Branch::AlphaZero,
            checks: alpha_zero_checks(),
        },
        Spec {
            name: "G_divide_rewrite",
            statement: "Divide by alpha and split 4 alpha^3 (1-beta) = 4 alpha(1+alpha)(alpha-1)(1-beta) + 4 alpha(1-beta).",
            source: "lemma 1, division by alpha",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: divide_rewrite_checks(),
        },
        Spec {
            name: "G_alpha_chain",
            statement: "The divided equation is 4 alpha(1-beta) = (alpha-1)(1 + alpha beta)^2.",
            source: "lemma 1, reduced x-equation",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: alpha_chain_checks(),
        },
        Spec {
            name: "G_eq10_simplified",
            statement: "4 alpha(1-beta) - (alpha-1)(1+alpha beta)^2 = 4 alpha + (1 - alpha beta)^2 - alpha(1 + alpha beta)^2.",
            source: "lemma 1, expanded reduced equation",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: eq10_simplified_checks(),
        },
        Spec {
            name: "G_swapped",
            statement: "G is symmetric in x and y, so the y-condition is the x-condition with alpha and beta exchanged.",
            source: "lemma 1, symmetry",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: swapped_checks(m),
        },
        Spec {
            name: "G_subtract",
            statement: "Subtracting the alpha- and beta-equations gives 4(alpha - beta) = (alpha - beta)(1 + alpha beta)^2, so alpha = beta or alpha beta = 1.",
            source: "lemma 1, subtraction of the two equations",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: subtract_checks(),
        },
        Spec {
            name: "G_alpha_eq_beta",
            statement: "On alpha = beta the equation is (1 - alpha)(4 alpha + (1 + alpha^2)^2) = 0, so alpha = 1.",
            source: "lemma 1, case alpha = beta",
            method: Method::ExactPoly,
            branch: Branch::AlphaEqBeta,
            checks: alpha_eq_beta_checks(),
        },
        Spec {
            name: "G_alpha_beta_one",
            statement: "On alpha beta = 1 the cosine equals 1, impossible for theta in (0, pi).",
            source: "lemma 1, case alpha beta = 1",
            method: Method::ExactPoly,
            branch: Branch::AlphaBetaOne,
            checks: alpha_beta_one_checks(),
        },
        Spec {
            name: "G_manifold_zero",
            statement: "G(theta, cot(theta/2), cot(theta/2)) = 0.",
            source: "lemma 1, equality case",
            method: Method::TranscendentalReduction,
            branch: Branch::Manifold,
            checks: vec![manifold_check(m)],
        },
        Spec {
            name: "G_gradients",
            statement: "Closed-form gradient and Hessian entries of G agree with mechanical differentiation.",
            source: "lemma 1, stationarity system",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: gradient_checks(m),
        },
    ];
    finish(m, specs)
}

pub fn hyp_steps() -> Vec<ProofStep> {
    let m = Mode::Hyp;
    let f = f_expr();
    let dt = f.diff(Wrt::Angle, m);
    let dx = f.diff(Wrt::X, m);
    let dy = f.diff(Wrt::Y, m);
    let (s2, s3) = (pw(s(), 2), pw(s(), 3));
    let eq13 = c() * (x() * y() - pw(t(), 2)) - s() * (x() + y() - 2 * t());
    let rhs_x = -pw(1 + c(), 2) + s2.clone() * (1 + c());
    let specs = vec![
        Spec {
            name: "F_derivative_identity",
            statement: "6 atanh(1/x) + 2x/(x^2-1) has derivative 4 - 4x^4/(x^2-1)^2; F restates the lemma's expression.",
            source: "lemma 2, definition of F",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("statement equals definition", hyp_statement_lhs(), f.clone()),
                eq("derivative", hyp_term(x()).diff(Wrt::X, m), 4 - 4 * pw(x(), 4) / pw(pw(x(), 2) - 1, 2)),
            ],
        },
        Spec {
            name: "F_factorization",
            statement: "C^3 - 3C - 2 = -(1+C)^2(2-C) = -(1+C)^2 + S^2(1+C), which gives the x- and y-stationarity equations.",
            source: "lemma 2, stationarity system",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("first factorization", pw(c(), 3) - 3 * c() - 2, -(pw(1 + c(), 2) * (2 - c()))),
                eq("second factorization", -(pw(1 + c(), 2) * (2 - c())), -pw(1 + c(), 2) + s2.clone() * (1 + c())),
                eq("constant-side factorization", pw(c(), 3) - 3 * c() + 2, pw(c() - 1, 2) * (c() + 2)),
                eq("x-equation", dx.clone(), s3.clone() * y() - 4 * pw(x(), 4) / pw(pw(x(), 2) - 1, 2) - rhs_x.clone()),
                eq("y-equation", dy.clone(), s3.clone() * x() - 4 * pw(y(), 4) / pw(pw(y(), 2) - 1, 2) - rhs_x),
            ],
        },
        Spec {
            name: "F_coth_half_rewrite",
            statement: "coth(ell/2) = (1+C)/S, so 2(1+C) - S^2 C = S^2 (C t^2 - 2 S t).",
            source: "lemma 2, half-angle rewrite",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("half-angle formula (S, C of ell/2)", c() / s(), (1 + pw(c(), 2) + pw(s(), 2)) / (2 * s() * c())),
                eq("constant side", 2 * (1 + c()) - s2.clone() * c(), with_half(s2.clone() * (c() * pw(t(), 2) - 2 * s() * t()))),
                eq(
                    "bracketed form",
                    s2.clone() * (c() * x() * y() - s() * (x() + y())) - 2 * (1 + c()) + s2.clone() * c(),
                    with_half(s2.clone() * (c() * (x() * y() - pw(t(), 2)) - s() * (x() + y() - 2 * t()))),
                ),
            ],
        },
        Spec {
            name: "F_ell_condition",
            statement: "d/dell F = 3 S^2 [C(xy - t^2) - S(x + y - 2t)] with t = coth(ell/2).",
            source: "lemma 2, ell-stationarity",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: vec![
                eq("mechanical derivative", dt.clone(), with_half(3 * s2.clone() * eq13.clone())),
                eq(
                    "expanded form",
                    dt.clone(),
                    3 * (s2.clone() * (c() * x() * y() - s() * (x() + y())) - 2 * (1 + c()) + s2.clone() * c()),
                ),
            ],
        },
        Spec {
            name: "F_ell_zero",
            statement: "F(0, x, y) is the sum of the two atanh terms, each positive for x > 1.",
            source: "lemma 2, boundary ell = 0",
            method: Method::ExactPoly,
            branch: Branch::Boundary,
            checks: vec![eq("value at ell = 0", at_angle_zero(f.clone()), hyp_term(x()) + hyp_term(y()))],
        },
        Spec {
            name: "F_substitution",
            statement: "With x = alpha t, y = beta t the ell-condition is -(1+C)^2/S^2 times (1 - alpha beta) C - ((alpha-1) + (beta-1))(1-C).",
            source: "lemma 2, ray substitution",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: vec![eq("ray substitution", on_rays(eq13), -(pw(1 + c(), 2) / s2.clone() * cond_substituted()))],
        },
        Spec {
            name: "F_simplified",
            statement: "The ell-condition equals (1-alpha)(1-beta) C = (1-alpha) + (1-beta); otherwise C = 1/(1-alpha) + 1/(1-beta).",
            source: "lemma 2, simplified ell-condition",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: simplified_checks(),
        },
        Spec {
            name: "F_dx_alpha_form",
            statement: "On the rays, d/dx F = (1+C)^2 (D^2 E - 4 alpha^4)/D^2 with the same D and E as in the trigonometric case.",
            source: "lemma 2, x-stationarity on the rays",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: vec![eq_with(
                "x-derivative on the rays",
                on_rays(dx.clone()),
                pw(1 + c(), 2) * (pw(d_alpha(), 2) * e_beta() - 4 * pw(a(), 4)) / pw(d_alpha(), 2),
                &[D_ATOM],
            )],
        },
        Spec {
            name: "F_bracket_one",
            statement: "With C eliminated, 1 + (1-beta)(1-C) = alpha(1-beta)/(alpha-1).",
            source: "lemma 2, first auxiliary identity",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: bracket_one_checks(),
        },
        Spec {
            name: "F_bracket_two",
            statement: "D regrouped and with C eliminated, as in the trigonometric case.",
            source: "lemma 2, second auxiliary identity",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: bracket_two_checks(),
        },
        Spec {
            name: "F_eq9",
            statement: "Eliminating C from the x-condition gives 4 alpha^4 (1-beta) = alpha(alpha-1)(1 + alpha + alpha(1-beta))^2.",
            source: "lemma 2, x-condition after elimination",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: eq9_checks(m),
        },
        Spec {
            name: "F_alpha_zero",
            statement: "alpha = 0 forces beta = 0 and C = 2; it is also excluded outright because x = alpha t >= 1.",
            source: "lemma 2, case alpha = 0",
            method: Method::ExactPoly,
            branch: Branch::AlphaZero,
            checks: alpha_zero_checks(),
        },
        Spec {
            name: "F_divide_rewrite",
            statement: "Divide by alpha and split 4 alpha^3 (1-beta) as in the trigonometric case.",
            source: "lemma 2, division by alpha",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: divide_rewrite_checks(),
        },
        Spec {
            name: "F_alpha_chain",
            statement: "The divided equation is 4 alpha(1-beta) = (alpha-1)(1 + alpha beta)^2.",
            source: "lemma 2, reduced x-equation",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: alpha_chain_checks(),
        },
        Spec {
            name: "F_eq10_simplified",
            statement: "Expanded reduced equation 4 alpha + (1 - alpha beta)^2 = alpha(1 + alpha beta)^2.",
            source: "lemma 2, expanded reduced equation",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: eq10_simplified_checks(),
        },
        Spec {
            name: "F_swapped",
            statement: "F is symmetric in x and y, so the y-condition is the x-condition with alpha and beta exchanged.",
            source: "lemma 2, symmetry",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: swapped_checks(m),
        },
        Spec {
            name: "F_subtract",
            statement: "Subtracting the two equations gives alpha = beta or alpha beta = 1.",
            source: "lemma 2, subtraction of the two equations",
            method: Method::ExactPoly,
            branch: Branch::Generic,
            checks: subtract_checks(),
        },
        Spec {
            name: "F_alpha_eq_beta",
            statement: "On alpha = beta the equation forces alpha = 1.",
            source: "lemma 2, case alpha = beta",
            method: Method::ExactPoly,
            branch: Branch::AlphaEqBeta,
            checks: alpha_eq_beta_checks(),
        },
        Spec {
            name: "F_alpha_beta_one",
            statement: "On alpha beta = 1 the hyperbolic cosine equals 1, impossible for ell > 0.",
            source: "lemma 2, case alpha beta = 1",
            method: Method::ExactPoly,
            branch: Branch::AlphaBetaOne,
            checks: alpha_beta_one_checks(),
        },
        Spec {
            name: "F_manifold_zero",
            statement: "F(ell, coth(ell/2), coth(ell/2)) = 0.",
            source: "lemma 2, equality case",
            method: Method::TranscendentalReduction,
            branch: Branch::Manifold,
            checks: vec![manifold_check(m)],
        },
        Spec {
            name: "F_gradients",
            statement: "Closed-form gradient and Hessian entries of F agree with mechanical differentiation.",
            source: "lemma 2, stationarity system",
            method: Method::ExactPoly,
            branch: Branch::Unrestricted,
            checks: gradient_checks(m),
        },
    ];
    finish(m, specs)
}

/// The three stationarity conditions of `mode`, mechanically derived and
/// restricted to the rays `x = α t, y = β t`.
pub fn ray_conditions(mode: Mode) -> [Expr; 3] {
    let f = family(mode);
    [on_rays(f.diff(Wrt::Angle, mode)), on_rays(f.diff(Wrt::X, mode)), on_rays(f.diff(Wrt::Y, mode))]
}
