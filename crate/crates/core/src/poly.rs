//! Sparse polynomials with arbitrary-precision integer coefficients in the
//! four variables `xi`, `h`, `q1`, `q2`.
//!
//! A [`Polynomial`] is a map from [`Monomial`] to nonzero [`BigInt`]; zero
//! coefficients are never stored, so structural equality is ring equality.
//! Terms are kept in a `BTreeMap` ordered lexicographically on
//! `(xi, h, q1, q2)`, and every printed or serialized form lists them in
//! descending order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four ring variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Xi,
    H,
    Q1,
    Q2,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Xi, Var::H, Var::Q1, Var::Q2];

    /// ASCII name used for printing and parsing.
    pub fn name(self) -> &'static str {
        match self {
            Var::Xi => "xi",
            Var::H => "h",
            Var::Q1 => "q1",
            Var::Q2 => "q2",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A power product `xi^a h^b q1^c q2^d`.
///
/// The derived ordering is lexicographic on `(xi, h, q1, q2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub xi: u32,
    pub h: u32,
    pub q1: u32,
    pub q2: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        xi: 0,
        h: 0,
        q1: 0,
        q2: 0,
    };

    pub const fn new(xi: u32, h: u32, q1: u32, q2: u32) -> Self {
        Monomial { xi, h, q1, q2 }
    }

    /// `xi^l h^m`.
    pub const fn classical(l: u32, m: u32) -> Self {
        Monomial::new(l, m, 0, 0)
    }

    pub fn var(v: Var) -> Self {
        Monomial::ONE.with_exponent(v, 1)
    }

    pub fn exponent(&self, v: Var) -> u32 {
        match v {
            Var::Xi => self.xi,
            Var::H => self.h,
            Var::Q1 => self.q1,
            Var::Q2 => self.q2,
        }
    }

    pub fn with_exponent(mut self, v: Var, e: u32) -> Self {
        match v {
            Var::Xi => self.xi = e,
            Var::H => self.h = e,
            Var::Q1 => self.q1 = e,
            Var::Q2 => self.q2 = e,
        }
        self
    }

    pub fn is_one(&self) -> bool {
        *self == Monomial::ONE
    }

    /// True when no `q1` or `q2` appears.
    pub fn is_classical(&self) -> bool {
        self.q1 == 0 && self.q2 == 0
    }

    /// Degree in `xi` and `h` only.
    pub fn classical_degree(&self) -> u64 {
        u64::from(self.xi) + u64::from(self.h)
    }

    pub fn weighted_degree(&self, g: &Grading) -> u64 {
        self.classical_degree()
            + u64::from(self.q1) * u64::from(g.deg_q1())
            + u64::from(self.q2) * u64::from(g.deg_q2())
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.xi <= other.xi && self.h <= other.h && self.q1 <= other.q1 && self.q2 <= other.q2
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other).then(|| Monomial {
            xi: other.xi - self.xi,
            h: other.h - self.h,
            q1: other.q1 - self.q1,
            q2: other.q2 - self.q2,
        })
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial {
            xi: self.xi + other.xi,
            h: self.h + other.h,
            q1: self.q1 + other.q1,
            q2: self.q2 + other.q2,
        }
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        self.product(&rhs)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Weights of the four variables. `xi` and `h` always weigh 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Grading {
    deg_q1: u32,
    deg_q2: u32,
}

impl Grading {
    pub fn new(deg_q1: i64, deg_q2: i64) -> Result<Self> {
        match (u32::try_from(deg_q1), u32::try_from(deg_q2)) {
            (Ok(a), Ok(b)) if a >= 1 && b >= 1 => Ok(Grading { deg_q1: a, deg_q2: b }),
            _ => Err(Error::InvalidGrading { deg_q1, deg_q2 }),
        }
    }

    pub fn deg_q1(&self) -> u32 {
        self.deg_q1
    }

    pub fn deg_q2(&self) -> u32 {
        self.deg_q2
    }

    pub fn weight(&self, v: Var) -> u32 {
        match v {
            Var::Xi | Var::H => 1,
            Var::Q1 => self.deg_q1,
            Var::Q2 => self.deg_q2,
        }
    }
}

/// Result of [`Polynomial::weighted_degree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightedDegree {
    Homogeneous(u64),
    /// The distinct degrees present, ascending.
    Inhomogeneous(BTreeSet<u64>),
}

impl WeightedDegree {
    pub fn homogeneous(&self) -> Option<u64> {
        match self {
            WeightedDegree::Homogeneous(d) => Some(*d),
            WeightedDegree::Inhomogeneous(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Polynomial::term(c, Monomial::ONE)
    }

    pub fn var(v: Var) -> Self {
        Polynomial::term(1, Monomial::var(v))
    }

    pub fn xi() -> Self {
        Polynomial::var(Var::Xi)
    }

    pub fn h() -> Self {
        Polynomial::var(Var::H)
    }

    pub fn q1() -> Self {
        Polynomial::var(Var::Q1)
    }

    pub fn q2() -> Self {
        Polynomial::var(Var::Q2)
    }

    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c.into());
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Polynomial::term(1, m)
    }

    /// Builds a polynomial from (coefficient, monomial) pairs, merging
    /// repeated monomials.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (C, Monomial)>) -> Self {
        let mut p = Polynomial::zero();
        for (c, m) in terms {
            p.add_term(m, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> + '_ {
        self.terms.iter()
    }

    /// Terms in canonical (descending) order.
    pub fn canonical_terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> + '_ {
        self.terms.iter().rev()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains_key(m)
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The largest monomial with a nonzero coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Removes and returns the coefficient of `m`.
    pub fn take_term(&mut self, m: &Monomial) -> Option<BigInt> {
        self.terms.remove(m)
    }

    /// `self += c * shift * other`.
    pub fn add_scaled(&mut self, other: &Polynomial, c: &BigInt, shift: Monomial) {
        for (m, d) in &other.terms {
            self.add_term(*m * shift, c * d);
        }
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, d)| (*m, d * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// True when no term involves `q1` or `q2`.
    pub fn is_classical(&self) -> bool {
        self.terms.keys().all(Monomial::is_classical)
    }

    /// Largest exponent of `v` over all terms (0 for the zero polynomial).
    pub fn max_exponent(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^k` as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, v: Var, k: u32) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == k)
                .map(|(m, c)| (m.with_exponent(v, 0), c.clone()))
                .collect(),
        }
    }

    /// Keeps only the terms where `v` does not appear.
    pub fn drop_var(&self, v: Var) -> Polynomial {
        self.coefficient_of(v, 0)
    }

    /// Projection onto the terms of weighted degree `d`.
    pub fn homogeneous_part(&self, g: &Grading, d: u64) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weighted_degree(g) == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn weighted_degree(&self, g: &Grading) -> Result<WeightedDegree> {
        let degrees: BTreeSet<u64> = self.terms.keys().map(|m| m.weighted_degree(g)).collect();
        match degrees.len() {
            0 => Err(Error::ZeroPolynomial),
            1 => Ok(WeightedDegree::Homogeneous(*degrees.first().unwrap())),
            _ => Ok(WeightedDegree::Inhomogeneous(degrees)),
        }
    }

    /// Evaluates at the point `(xi, h, q1, q2)`.
    pub fn eval(&self, point: &[BigInt; 4]) -> BigInt {
        self.terms
            .iter()
            .map(|(m, c)| {
                Var::ALL.iter().zip(point).fold(c.clone(), |acc, (v, x)| {
                    acc * num_traits::pow(x.clone(), m.exponent(*v) as usize)
                })
            })
            .sum()
    }
}

impl From<Monomial> for Polynomial {
    fn from(m: Monomial) -> Self {
        Polynomial::monomial(m)
    }
}

impl From<i64> for Polynomial {
    fn from(c: i64) -> Self {
        Polynomial::constant(c)
    }
}

impl From<BigInt> for Polynomial {
    fn from(c: BigInt) -> Self {
        Polynomial::constant(c)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c);
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_scaled(rhs, c, *m);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;

            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }

        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;

            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }

        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;

            fn $method(self, rhs: Polynomial) -> Polynomial {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(mut self) -> Polynomial {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |mut acc, p| {
            acc += &p;
            acc
        })
    }
}

impl std::iter::Product for Polynomial {
    fn product<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::one(), |acc, p| &acc * &p)
    }
}

/// Canonical text form, e.g. `3*xi*h - 2*xi*q2 + 4*h*q2 + q1`.
///
/// The output re-parses under the expression grammar of the CLI.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.canonical_terms().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// One term in the JSON representation of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: String,
    pub xi: u32,
    pub h: u32,
    pub q1: u32,
    pub q2: u32,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRecord {
    terms: Vec<TermRecord>,
}

impl Polynomial {
    /// Term records in canonical (descending) order.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.canonical_terms()
            .map(|(m, c)| TermRecord {
                coeff: c.to_string(),
                xi: m.xi,
                h: m.h,
                q1: m.q1,
                q2: m.q2,
            })
            .collect()
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRecord {
            terms: self.to_records(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        let record = PolynomialRecord::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for t in record.terms {
            let c: BigInt = t
                .coeff
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient {:?}", t.coeff)))?;
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficient in term list"));
            }
            let m = Monomial::new(t.xi, t.h, t.q1, t.q2);
            if terms.insert(m, c).is_some() {
                return Err(D::Error::custom(format!("repeated monomial {m}")));
            }
        }
        Ok(Polynomial { terms })
    }
}
