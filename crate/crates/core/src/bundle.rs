//! The split bundle `V = O(m_1) + ... + O(m_r)` over `P^n` and the numerical
//! data of its projectivization: Chern classes, the anticanonical class,
//! curve classes in the Mori cone, the grading of the Novikov variables and
//! virtual dimensions.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Grading, Monomial, Polynomial};

/// A validated `(n; m_1 <= ... <= m_r)` with `n >= 1`, `r >= 2`, `m_i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BundleSpec {
    n: u32,
    m: Vec<u32>,
}

/// Validates and sorts a bundle description.
pub fn validate_spec(n: i64, m: &[i64]) -> Result<BundleSpec> {
    if n < 1 {
        return Err(Error::InvalidSpec(format!("base dimension n = {n} must be at least 1")));
    }
    if m.len() < 2 {
        return Err(Error::InvalidSpec(format!("rank r = {} must be at least 2", m.len())));
    }
    if let Some(bad) = m.iter().find(|&&mi| mi < 1) {
        return Err(Error::InvalidSpec(format!("twist {bad} must be at least 1")));
    }
    let n = u32::try_from(n).map_err(|_| Error::InvalidSpec(format!("n = {n} is too large")))?;
    let mut twists = m
        .iter()
        .map(|&mi| u32::try_from(mi).map_err(|_| Error::InvalidSpec(format!("twist {mi} is too large"))))
        .collect::<Result<Vec<_>>>()?;
    twists.sort_unstable();
    Ok(BundleSpec { n, m: twists })
}

impl BundleSpec {
    pub fn new(n: u32, m: &[u32]) -> Result<Self> {
        let m: Vec<i64> = m.iter().map(|&x| i64::from(x)).collect();
        validate_spec(i64::from(n), &m)
    }

    /// Dimension of the base `P^n`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Rank of `V`.
    pub fn r(&self) -> u32 {
        self.m.len() as u32
    }

    /// The twists, ascending.
    pub fn m(&self) -> &[u32] {
        &self.m
    }

    /// `c_1(V) = m_1 + ... + m_r`.
    pub fn c1(&self) -> u64 {
        self.m.iter().map(|&x| u64::from(x)).sum()
    }

    /// Complex dimension of `P(V)`.
    pub fn dim(&self) -> u32 {
        self.n + self.r() - 1
    }

    /// `c_1 <= n + r`.
    pub fn is_fano(&self) -> bool {
        self.c1() <= u64::from(self.n) + u64::from(self.r())
    }

    /// `m_1 = 1 < m_2`.
    pub fn theorem_hypothesis(&self) -> bool {
        self.m[0] == 1 && self.m[1] > 1
    }

    pub fn qin_ruan_condition(&self) -> bool {
        qin_ruan_condition(self)
    }

    pub fn flags(&self) -> SpecFlags {
        SpecFlags {
            fano: self.is_fano(),
            theorem_hypothesis: self.theorem_hypothesis(),
            qin_ruan_condition: self.qin_ruan_condition(),
        }
    }

    /// `-K . A2 = n + 1 + r - c1`, which may be non-positive off the Fano range.
    pub fn anticanonical_degree_a2(&self) -> i64 {
        i64::from(self.n) + 1 + i64::from(self.r()) - self.c1() as i64
    }
}

impl fmt::Display for BundleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.m.iter().map(u32::to_string).collect();
        write!(f, "n={} m=[{}]", self.n, m.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpecFlags {
    pub fano: bool,
    pub theorem_hypothesis: bool,
    pub qin_ruan_condition: bool,
}

/// `cbar[j] = e_j(m_1, ..., m_r)`, so that
/// `prod (xi - m_i h) = sum_j (-1)^j cbar[j] xi^(r-j) h^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChernData {
    #[serde(serialize_with = "serialize_bigints")]
    pub cbar: Vec<BigInt>,
    pub c1: u64,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(BigInt::to_string))
}

impl ChernData {
    /// `sum_j (-1)^j cbar[j]`.
    pub fn alternating_sum(&self) -> BigInt {
        self.cbar
            .iter()
            .enumerate()
            .map(|(j, c)| if j % 2 == 0 { c.clone() } else { -c })
            .sum()
    }
}

pub fn chern(spec: &BundleSpec) -> ChernData {
    // Coefficients of prod (1 + m_i t), built one factor at a time.
    let mut e = vec![BigInt::one()];
    for &mi in spec.m() {
        let mut next = e.clone();
        next.push(BigInt::from(0));
        for j in 1..next.len() {
            next[j] += &e[j - 1] * mi;
        }
        e = next;
    }
    ChernData { cbar: e, c1: spec.c1() }
}

/// The divisor class `xi * xi + h * h` (integer coefficients).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorClass {
    pub xi: i64,
    pub h: i64,
}

impl DivisorClass {
    pub fn to_polynomial(self) -> Polynomial {
        Polynomial::from_terms([
            (self.xi, Monomial::classical(1, 0)),
            (self.h, Monomial::classical(0, 1)),
        ])
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_polynomial().fmt(f)
    }
}

/// `a A1 + b A2` with `A1` a line in a fiber and `A2` a minimal section
/// over a line of the base.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CurveClass {
    pub a: u32,
    pub b: u32,
}

impl CurveClass {
    pub const A1: CurveClass = CurveClass { a: 1, b: 0 };
    pub const A2: CurveClass = CurveClass { a: 0, b: 1 };

    pub fn new(a: u32, b: u32) -> Self {
        CurveClass { a, b }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}A1+{}A2", self.a, self.b)
    }
}

/// `-K = r xi + (n + 1 - c1) h`.
pub fn anticanonical(spec: &BundleSpec) -> DivisorClass {
    DivisorClass {
        xi: i64::from(spec.r()),
        h: i64::from(spec.n()) + 1 - spec.c1() as i64,
    }
}

/// `D . B` from `xi.A1 = 1`, `h.A1 = 0`, `xi.A2 = 1`, `h.A2 = 1`.
pub fn intersect_curve(d: DivisorClass, b: CurveClass) -> i64 {
    let (a, b) = (i64::from(b.a), i64::from(b.b));
    d.xi * (a + b) + d.h * b
}

/// Weights `deg q1 = r`, `deg q2 = n + 1 + r - c1`; only defined for Fano
/// bundles, where both are positive.
pub fn grading(spec: &BundleSpec) -> Result<Grading> {
    if !spec.is_fano() {
        return Err(not_fano(spec));
    }
    Grading::new(i64::from(spec.r()), spec.anticanonical_degree_a2())
}

pub(crate) fn not_fano(spec: &BundleSpec) -> Error {
    Error::NotFano {
        c1: spec.c1(),
        bound: u64::from(spec.n()) + u64::from(spec.r()),
    }
}

/// `a r + b (n + 1 + r - c1) + n + r - 1`.
pub fn virtual_dimension(spec: &BundleSpec, class: CurveClass) -> i64 {
    i64::from(class.a) * i64::from(spec.r())
        + i64::from(class.b) * spec.anticanonical_degree_a2()
        + i64::from(spec.dim())
}

/// `sum m_i < min(2r, (n + 1 + 2r)/2, (2n + 2 + r)/2)`, compared exactly by
/// doubling both sides.
pub fn qin_ruan_condition(spec: &BundleSpec) -> bool {
    let (n, r) = (u64::from(spec.n()), u64::from(spec.r()));
    let bound = (4 * r).min(n + 1 + 2 * r).min(2 * n + 2 + r);
    2 * spec.c1() < bound
}
