//! Expression trees over the polynomial variables plus the angle θ (or ℓ),
//! π, `atan` and `atanh`. They are differentiated mechanically, evaluated in
//! high precision, and cleared into `TrigPoly` numerators for exact checks.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::ops;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hp::Hp;
use crate::poly::{Relation, TrigPoly, Var, NVARS};
use crate::scalar::Mode;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Var(Var),
    /// θ in trig mode, ℓ in hyp mode.
    Angle,
    Pi,
    Atan(Box<Expr>),
    Atanh(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Inv(Box<Expr>),
}

/// Differentiation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrt {
    Angle,
    X,
    Y,
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::Num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_zero())
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_one())
    }

    /// Flattening sum that drops zeros and folds constants.
    pub fn sum(items: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(items.len());
        let mut k = BigRational::zero();
        for e in items {
            match e {
                Expr::Num(n) => k += n,
                Expr::Add(inner) => {
                    for i in inner {
                        match i {
                            Expr::Num(n) => k += n,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if !k.is_zero() {
            out.push(Expr::Num(k));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().expect("one element"),
            _ => Expr::Add(out),
        }
    }

    /// Flattening product that short-circuits on zero and folds constants.
    pub fn product(items: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(items.len());
        let mut k = BigRational::one();
        for e in items {
            match e {
                Expr::Num(n) => k *= n,
                Expr::Mul(inner) => {
                    for i in inner {
                        match i {
                            Expr::Num(n) => k *= n,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if k.is_zero() {
            return Expr::zero();
        }
        if !k.is_one() || out.is_empty() {
            out.insert(0, Expr::Num(k));
        }
        match out.len() {
            1 => out.pop().expect("one element"),
            _ => Expr::Mul(out),
        }
    }

    pub fn pow(self, n: u32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self,
            _ if self.is_zero() => Expr::zero(),
            _ if self.is_one() => Expr::one(),
            _ => Expr::Pow(Box::new(self), n),
        }
    }

    pub fn inv(self) -> Expr {
        match self {
            Expr::Num(n) if !n.is_zero() => Expr::Num(n.recip()),
            other => Expr::Inv(Box::new(other)),
        }
    }

    pub fn atan(self) -> Expr {
        Expr::Atan(Box::new(self))
    }

    pub fn atanh(self) -> Expr {
        Expr::Atanh(Box::new(self))
    }

    /// Mechanical derivative. The chain rules for `s`, `c` and `t` depend on
    /// the mode: `t` stands for `cot(θ/2)` or `coth(ℓ/2)`.
    pub fn diff(&self, wrt: Wrt, mode: Mode) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => Expr::zero(),
            Expr::Angle => {
                if wrt == Wrt::Angle {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Var(v) => match (v, wrt) {
                (Var::X, Wrt::X) | (Var::Y, Wrt::Y) => Expr::one(),
                (Var::S, Wrt::Angle) => Expr::Var(Var::C),
                (Var::C, Wrt::Angle) => match mode {
                    Mode::Trig => -Expr::Var(Var::S),
                    Mode::Hyp => Expr::Var(Var::S),
                },
                (Var::T, Wrt::Angle) => {
                    let t2 = Expr::Var(Var::T).pow(2);
                    match mode {
                        Mode::Trig => Expr::ratio(-1, 2) * (Expr::one() + t2),
                        Mode::Hyp => Expr::ratio(1, 2) * (Expr::one() - t2),
                    }
                }
                _ => Expr::zero(),
            },
            Expr::Atan(e) => {
                let d = e.diff(wrt, mode);
                if d.is_zero() {
                    return d;
                }
                d * (Expr::one() + (**e).clone().pow(2)).inv()
            }
            Expr::Atanh(e) => {
                let d = e.diff(wrt, mode);
                if d.is_zero() {
                    return d;
                }
                d * (Expr::one() - (**e).clone().pow(2)).inv()
            }
            Expr::Add(v) => Expr::sum(v.iter().map(|e| e.diff(wrt, mode)).collect()),
            Expr::Mul(v) => {
                let mut terms = Vec::new();
                for i in 0..v.len() {
                    let d = v[i].diff(wrt, mode);
                    if d.is_zero() {
                        continue;
                    }
                    let mut f: Vec<Expr> = v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e.clone()).collect();
                    f.push(d);
                    terms.push(Expr::product(f));
                }
                Expr::sum(terms)
            }
            Expr::Pow(e, n) => {
                let d = e.diff(wrt, mode);
                if d.is_zero() {
                    return d;
                }
                Expr::product(vec![Expr::int(*n as i64), (**e).clone().pow(n - 1), d])
            }
            Expr::Inv(e) => {
                let d = e.diff(wrt, mode);
                if d.is_zero() {
                    return d;
                }
                -(d * (**e).clone().pow(2).inv())
            }
        }
    }

    fn map(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        match self {
            Expr::Atan(e) => Expr::Atan(Box::new(e.map(f))),
            Expr::Atanh(e) => Expr::Atanh(Box::new(e.map(f))),
            Expr::Add(v) => Expr::sum(v.iter().map(|e| e.map(f)).collect()),
            Expr::Mul(v) => Expr::product(v.iter().map(|e| e.map(f)).collect()),
            Expr::Pow(e, n) => e.map(f).pow(*n),
            Expr::Inv(e) => e.map(f).inv(),
            other => other.clone(),
        }
    }

    /// Substitutes `val` for every occurrence of `v`.
    pub fn subst(&self, v: Var, val: &Expr) -> Expr {
        self.map(&|e| match e {
            Expr::Var(w) if *w == v => Some(val.clone()),
            _ => None,
        })
    }

    /// Replaces every subtree structurally equal to `from`.
    pub fn replace(&self, from: &Expr, to: &Expr) -> Expr {
        self.map(&|e| if e == from { Some(to.clone()) } else { None })
    }

    /// Exchanges two variables.
    pub fn swap(&self, a: Var, b: Var) -> Expr {
        self.map(&|e| match e {
            Expr::Var(w) if *w == a => Some(Expr::Var(b)),
            Expr::Var(w) if *w == b => Some(Expr::Var(a)),
            _ => None,
        })
    }

    pub fn contains(&self, pred: &impl Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Atan(e) | Expr::Atanh(e) | Expr::Pow(e, _) | Expr::Inv(e) => e.contains(pred),
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.contains(pred)),
            _ => false,
        }
    }

    /// Evaluates in high precision. Unassigned variables yield NaN.
    pub fn eval_hp(&self, env: &HpEnv, hp: &mut Hp) -> BigFloat {
        match self {
            Expr::Num(n) => hp.rational(n),
            Expr::Var(v) => env.vars[v.index()].clone().unwrap_or_else(|| hp.f64(f64::NAN)),
            Expr::Angle => env.angle.clone().unwrap_or_else(|| hp.f64(f64::NAN)),
            Expr::Pi => hp.pi(),
            Expr::Atan(e) => {
                let a = e.eval_hp(env, hp);
                hp.atan(&a)
            }
            Expr::Atanh(e) => {
                let a = e.eval_hp(env, hp);
                hp.atanh(&a)
            }
            Expr::Add(v) => {
                let mut acc = hp.int(0);
                for e in v {
                    let a = e.eval_hp(env, hp);
                    acc = hp.add(&acc, &a);
                }
                acc
            }
            Expr::Mul(v) => {
                let mut acc = hp.int(1);
                for e in v {
                    let a = e.eval_hp(env, hp);
                    acc = hp.mul(&acc, &a);
                }
                acc
            }
            Expr::Pow(e, n) => {
                let a = e.eval_hp(env, hp);
                hp.powi(&a, *n as usize)
            }
            Expr::Inv(e) => {
                let a = e.eval_hp(env, hp);
                hp.div(&hp.int(1), &a)
            }
        }
    }

    /// Double-precision evaluation; `vals` follows `Var::ALL`.
    pub fn eval_f64(&self, angle: f64, vals: &[f64; NVARS]) -> f64 {
        match self {
            Expr::Num(n) => crate::poly::rational_to_f64(n),
            Expr::Var(v) => vals[v.index()],
            Expr::Angle => angle,
            Expr::Pi => core::f64::consts::PI,
            Expr::Atan(e) => libm::atan(e.eval_f64(angle, vals)),
            Expr::Atanh(e) => libm::atanh(e.eval_f64(angle, vals)),
            Expr::Add(v) => v.iter().map(|e| e.eval_f64(angle, vals)).sum(),
            Expr::Mul(v) => v.iter().map(|e| e.eval_f64(angle, vals)).product(),
            Expr::Pow(e, n) => libm::pow(e.eval_f64(angle, vals), *n as f64),
            Expr::Inv(e) => 1.0 / e.eval_f64(angle, vals),
        }
    }

    /// Brings the expression to a single fraction `numerator / Π factorᵢ^eᵢ`
    /// whose denominator factors come from a fixed atom list (plus `extra`).
    /// Transcendental subterms become the auxiliary variables `z0…z3`.
    pub fn clear_denominators(&self, relation: Relation, extra: &[TrigPoly]) -> Result<Cleared> {
        let mut ctx = ClearCtx::new(relation, extra);
        let f = ctx.conv(self)?;
        let factors = f
            .den
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (ctx.atoms[i].clone(), e))
            .collect();
        Ok(Cleared { numerator: f.num, factors, transcendental_atoms: ctx.slots })
    }
}

/// Result of [`Expr::clear_denominators`].
#[derive(Clone, Debug)]
pub struct Cleared {
    pub numerator: TrigPoly,
    /// Cleared denominator factors with multiplicities; each is a side
    /// condition (it must not vanish where the claim is used).
    pub factors: Vec<(TrigPoly, u32)>,
    /// Subterms mapped to `z0, z1, …` in order.
    pub transcendental_atoms: Vec<Expr>,
}

/// Variable assignment for [`Expr::eval_hp`].
#[derive(Clone, Default)]
pub struct HpEnv {
    pub vars: [Option<BigFloat>; NVARS],
    pub angle: Option<BigFloat>,
}

impl HpEnv {
    pub fn set(&mut self, v: Var, val: BigFloat) -> &mut Self {
        self.vars[v.index()] = Some(val);
        self
    }
}

/// Denominator atoms accepted by `clear_denominators`, in trial order.
pub const DEFAULT_ATOMS: [&str; 15] = [
    "s", "c", "c + 1", "c - 1", "a", "b", "a - 1", "b - 1", "x", "y", "x^2 + 1", "y^2 + 1", "x^2 - 1", "y^2 - 1", "t",
];

struct Frac {
    num: TrigPoly,
    den: Vec<u32>,
}

struct ClearCtx {
    relation: Relation,
    atoms: Vec<TrigPoly>,
    slots: Vec<Expr>,
}

impl ClearCtx {
    fn new(relation: Relation, extra: &[TrigPoly]) -> Self {
        let mut atoms: Vec<TrigPoly> = DEFAULT_ATOMS
            .iter()
            .map(|s| TrigPoly::parse(relation, s).expect("built-in atom parses"))
            .collect();
        for e in extra {
            let e = e.with_relation(relation).monic();
            if !atoms.contains(&e) {
                atoms.push(e);
            }
        }
        ClearCtx { relation, atoms, slots: Vec::new() }
    }

    fn poly(&self, p: TrigPoly) -> Frac {
        Frac { num: p, den: vec![0; self.atoms.len()] }
    }

    fn slot(&mut self, e: &Expr) -> Result<Frac> {
        let idx = match self.slots.iter().position(|s| s == e) {
            Some(i) => i,
            None => {
                if self.slots.len() == Var::AUX.len() {
                    return Err(Error::TooManyAtoms(Var::AUX.len()));
                }
                self.slots.push(e.clone());
                self.slots.len() - 1
            }
        };
        Ok(self.poly(TrigPoly::var(self.relation, Var::AUX[idx])))
    }

    fn den_poly(&self, den: &[u32]) -> TrigPoly {
        let mut p = TrigPoly::int(self.relation, 1);
        for (i, &e) in den.iter().enumerate() {
            if e > 0 {
                p = p.mul(&self.atoms[i].pow(e));
            }
        }
        p
    }

    fn conv(&mut self, e: &Expr) -> Result<Frac> {
        match e {
            Expr::Num(n) => Ok(self.poly(TrigPoly::constant(self.relation, n.clone()))),
            Expr::Var(v) => Ok(self.poly(TrigPoly::var(self.relation, *v))),
            Expr::Angle | Expr::Pi | Expr::Atan(_) | Expr::Atanh(_) => self.slot(e),
            Expr::Add(v) => {
                let parts: Vec<Frac> = v.iter().map(|x| self.conv(x)).collect::<Result<_>>()?;
                let n = self.atoms.len();
                let mut lcm = vec![0u32; n];
                for p in &parts {
                    for (l, d) in lcm.iter_mut().zip(&p.den) {
                        *l = (*l).max(*d);
                    }
                }
                let mut num = TrigPoly::zero(self.relation);
                for p in parts {
                    let missing: Vec<u32> = (0..n).map(|i| lcm[i] - p.den[i]).collect();
                    num = num.add(&p.num.mul(&self.den_poly(&missing)));
                }
                Ok(Frac { num, den: lcm })
            }
            Expr::Mul(v) => {
                let mut acc = self.poly(TrigPoly::int(self.relation, 1));
                for x in v {
                    let p = self.conv(x)?;
                    acc.num = acc.num.mul(&p.num);
                    for (a, b) in acc.den.iter_mut().zip(p.den.iter()) {
                        *a += b;
                    }
                }
                Ok(acc)
            }
            Expr::Pow(x, k) => {
                let p = self.conv(x)?;
                Ok(Frac { num: p.num.pow(*k), den: p.den.iter().map(|d| d * k).collect() })
            }
            Expr::Inv(x) => {
                let p = self.conv(x)?;
                if p.num.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let mut rest = p.num.clone();
                let mut den = vec![0u32; self.atoms.len()];
                for (i, atom) in self.atoms.iter().enumerate() {
                    while rest.as_constant().is_none() {
                        match rest.div_exact(atom) {
                            Some(q) => {
                                rest = q;
                                den[i] += 1;
                            }
                            None => break,
                        }
                    }
                }
                let k = match rest.as_constant() {
                    Some(k) if !k.is_zero() => k,
                    _ => return Err(Error::UnsupportedDenominator(rest.to_string())),
                };
                let num = self.den_poly(&p.den).scale(&k.recip());
                Ok(Frac { num, den })
            }
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::sum(vec![self, o])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::sum(vec![self, -o])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::product(vec![self, o])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Expr) -> Expr {
        Expr::product(vec![self, o.inv()])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product(vec![Expr::int(-1), self])
    }
}

impl ops::Add<i64> for Expr {
    type Output = Expr;
    fn add(self, o: i64) -> Expr {
        self + Expr::int(o)
    }
}

impl ops::Sub<i64> for Expr {
    type Output = Expr;
    fn sub(self, o: i64) -> Expr {
        self - Expr::int(o)
    }
}

impl ops::Mul<Expr> for i64 {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::int(self) * o
    }
}

impl ops::Sub<Expr> for i64 {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::int(self) - o
    }
}

impl ops::Add<Expr> for i64 {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::int(self) + o
    }
}

/// Short constructors used to write the ledger.
pub mod dsl {
    use super::Expr;
    use crate::poly::Var;

    pub fn s() -> Expr {
        Expr::Var(Var::S)
    }
    pub fn c() -> Expr {
        Expr::Var(Var::C)
    }
    pub fn a() -> Expr {
        Expr::Var(Var::A)
    }
    pub fn b() -> Expr {
        Expr::Var(Var::B)
    }
    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }
    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }
    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }
    pub fn th() -> Expr {
        Expr::Angle
    }
    pub fn pi() -> Expr {
        Expr::Pi
    }
    pub fn k(n: i64) -> Expr {
        Expr::int(n)
    }
    pub fn q(n: i64, d: i64) -> Expr {
        Expr::ratio(n, d)
    }
    pub fn inv(e: Expr) -> Expr {
        e.inv()
    }
    pub fn pw(e: Expr, n: u32) -> Expr {
        e.pow(n)
    }
    pub fn atan(e: Expr) -> Expr {
        e.atan()
    }
    pub fn atanh(e: Expr) -> Expr {
        e.atanh()
    }
}
