//! Exact multivariate polynomials over ℚ in `s, c, α, β, x, y, t` (plus four
//! auxiliary slots), kept in normal form modulo `s² = 1 − c²` (trig) or
//! `s² = c² − 1` (hyp). Free mode applies no relation.
//!
//! Monomials are ordered graded-lexicographically with
//! `s > c > α > β > x > y > t > z0 > … > z3`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Mode;

pub const NVARS: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    S,
    C,
    A,
    B,
    X,
    Y,
    T,
    Z0,
    Z1,
    Z2,
    Z3,
}

impl Var {
    pub const ALL: [Var; NVARS] =
        [Var::S, Var::C, Var::A, Var::B, Var::X, Var::Y, Var::T, Var::Z0, Var::Z1, Var::Z2, Var::Z3];
    pub const AUX: [Var; 4] = [Var::Z0, Var::Z1, Var::Z2, Var::Z3];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["s", "c", "a", "b", "x", "y", "t", "z0", "z1", "z2", "z3"][self.index()]
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "alpha" => Some(Var::A),
            "beta" => Some(Var::B),
            _ => Var::ALL.iter().copied().find(|v| v.name() == s),
        }
    }
}

/// Relation used for normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `s² = 1 − c²`
    Trig,
    /// `s² = c² − 1`
    Hyp,
    Free,
}

impl From<Mode> for Relation {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Trig => Relation::Trig,
            Mode::Hyp => Relation::Hyp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var, e: u16) -> Monomial {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Monomial(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        Monomial(m)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= b;
        }
        Some(Monomial(m))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigPoly {
    relation: Relation,
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

impl TrigPoly {
    pub fn zero(relation: Relation) -> Self {
        TrigPoly { relation, terms: BTreeMap::new() }
    }

    pub fn constant(relation: Relation, c: BigRational) -> Self {
        let mut p = Self::zero(relation);
        p.push(Monomial::ONE, c);
        p
    }

    pub fn int(relation: Relation, n: i64) -> Self {
        Self::constant(relation, rat(n))
    }

    pub fn var(relation: Relation, v: Var) -> Self {
        Self::monomial(relation, Monomial::var(v, 1), BigRational::one())
    }

    pub fn monomial(relation: Relation, m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero(relation);
        p.push(m, c);
        p
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.leading().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    fn add_raw(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `c·m`, reducing powers of `s` according to the relation.
    fn push(&mut self, m: Monomial, c: BigRational) {
        let e = m.exp(Var::S);
        if self.relation == Relation::Free || e < 2 {
            self.add_raw(m, c);
            return;
        }
        let k = (e / 2) as u32;
        let mut base = m;
        base.0[Var::S.index()] = e % 2;
        for j in 0..=k {
            let sign = match self.relation {
                Relation::Trig => j % 2 == 1,
                Relation::Hyp => (k - j) % 2 == 1,
                Relation::Free => unreachable!(),
            };
            let mut b = BigRational::from_integer(binomial(k, j));
            if sign {
                b = -b;
            }
            let mut mm = base;
            mm.0[Var::C.index()] += 2 * j as u16;
            self.add_raw(mm, &c * b);
        }
    }

    /// Re-normalizes under another relation.
    pub fn with_relation(&self, relation: Relation) -> TrigPoly {
        let mut p = TrigPoly::zero(relation);
        for (m, c) in &self.terms {
            p.push(*m, c.clone());
        }
        p
    }

    pub fn add(&self, o: &TrigPoly) -> TrigPoly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.push(*m, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &TrigPoly) -> TrigPoly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.push(*m, -c.clone());
        }
        p
    }

    pub fn neg(&self) -> TrigPoly {
        TrigPoly { relation: self.relation, terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> TrigPoly {
        if k.is_zero() {
            return TrigPoly::zero(self.relation);
        }
        TrigPoly { relation: self.relation, terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, o: &TrigPoly) -> TrigPoly {
        let mut p = TrigPoly::zero(self.relation);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.push(m1.mul(m2), c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> TrigPoly {
        let mut result = TrigPoly::int(self.relation, 1);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> TrigPoly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Exact division in the free polynomial ring; `None` if `d` does not
    /// divide `self` there.
    pub fn div_exact(&self, d: &TrigPoly) -> Option<TrigPoly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (*dm, dc.clone());
        let mut rem = self.with_relation(Relation::Free);
        let dfree = d.with_relation(Relation::Free);
        let mut q = TrigPoly::zero(Relation::Free);
        while let Some((lm, lc)) = rem.leading() {
            let qm = lm.div(&dm)?;
            let qc = lc / &dc;
            let step = TrigPoly::monomial(Relation::Free, qm, qc.clone());
            rem = rem.sub(&step.mul(&dfree));
            q.add_raw(qm, qc);
        }
        Some(q.with_relation(self.relation))
    }

    /// Substitutes polynomial `val` for `v`.
    pub fn subst(&self, v: Var, val: &TrigPoly) -> TrigPoly {
        let d = self.degree_in(v);
        let mut powers = Vec::with_capacity(d as usize + 1);
        powers.push(TrigPoly::int(self.relation, 1));
        for i in 1..=d as usize {
            let next = powers[i - 1].mul(val);
            powers.push(next);
        }
        let mut out = TrigPoly::zero(self.relation);
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            let mut rest = *m;
            rest.0[v.index()] = 0;
            let term = TrigPoly::monomial(self.relation, rest, c.clone()).mul(&powers[e]);
            out = out.add(&term);
        }
        out
    }

    /// Substitutes `v = num/den` and multiplies through by `den^deg_v`,
    /// returning the homogenized numerator.
    pub fn subst_fraction(&self, v: Var, num: &TrigPoly, den: &TrigPoly) -> TrigPoly {
        let d = self.degree_in(v) as usize;
        let mut np = Vec::with_capacity(d + 1);
        let mut dp = Vec::with_capacity(d + 1);
        np.push(TrigPoly::int(self.relation, 1));
        dp.push(TrigPoly::int(self.relation, 1));
        for i in 1..=d {
            let a = np[i - 1].mul(num);
            let b = dp[i - 1].mul(den);
            np.push(a);
            dp.push(b);
        }
        let mut out = TrigPoly::zero(self.relation);
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            let mut rest = *m;
            rest.0[v.index()] = 0;
            let term = TrigPoly::monomial(self.relation, rest, c.clone()).mul(&np[e]).mul(&dp[d - e]);
            out = out.add(&term);
        }
        out
    }

    /// Exchanges two variables.
    pub fn swap(&self, a: Var, b: Var) -> TrigPoly {
        let mut p = TrigPoly::zero(self.relation);
        for (m, c) in &self.terms {
            let mut mm = *m;
            mm.0.swap(a.index(), b.index());
            p.push(mm, c.clone());
        }
        p
    }

    /// Exact evaluation; every variable that occurs must be assigned.
    pub fn eval_rational(&self, vals: &[Option<BigRational>; NVARS]) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let v = vals[i].as_ref()?;
                    t *= num_traits::pow(v.clone(), e as usize);
                }
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, vals: &[f64; NVARS]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= libm::pow(vals[i], e as f64);
                }
            }
            acc += t;
        }
        acc
    }

    /// True when every coefficient is nonnegative and the constant term is
    /// strictly positive: then the polynomial is positive whenever all its
    /// variables are nonnegative.
    pub fn positive_on_orthant(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
            && self.terms.get(&Monomial::ONE).is_some_and(|c| c.is_positive())
    }

    pub fn parse(relation: Relation, text: &str) -> Result<TrigPoly> {
        Parser { src: text.as_bytes(), pos: 0, relation }.poly()
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for TrigPoly {
    /// `coef * s^i c^j …` terms in descending order; the parser reads it back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&fmt_rational(&abs))?;
            let mut first = true;
            for v in Var::ALL {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                f.write_str(if first { " * " } else { " " })?;
                first = false;
                f.write_str(v.name())?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    relation: Relation,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse::<BigInt>().or_else(|_| self.err("bad integer"))
    }

    fn poly(&mut self) -> Result<TrigPoly> {
        let mut out = TrigPoly::zero(self.relation);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            Some(_) => 1,
            None => return self.err("empty polynomial"),
        };
        loop {
            let (m, c) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            out.push(m, c);
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                None => return Ok(out),
                Some(_) => return self.err("expected `+`, `-` or end of input"),
            }
        }
    }

    fn term(&mut self) -> Result<(Monomial, BigRational)> {
        let mut coef = BigRational::one();
        let mut mono = Monomial::ONE;
        let mut any = false;
        loop {
            match self.peek() {
                Some(b'*') if any => {
                    self.pos += 1;
                    continue;
                }
                Some(d) if d.is_ascii_digit() => {
                    let n = self.number()?;
                    let mut r = BigRational::from_integer(n);
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let d = self.number()?;
                        if d.is_zero() {
                            return self.err("zero denominator");
                        }
                        r /= BigRational::from_integer(d);
                    }
                    coef *= r;
                }
                Some(ch) if ch.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                        self.pos += 1;
                    }
                    let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                    let v = match Var::from_name(name) {
                        Some(v) => v,
                        None => {
                            self.pos = start;
                            return self.err("unknown variable");
                        }
                    };
                    let mut e: u16 = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let n = self.number()?;
                        e = match u16::try_from(n) {
                            Ok(e) => e,
                            Err(_) => return self.err("exponent too large"),
                        };
                    }
                    mono.0[v.index()] += e;
                }
                _ => break,
            }
            any = true;
        }
        if !any {
            return self.err("expected a term");
        }
        Ok((mono, coef))
    }
}
