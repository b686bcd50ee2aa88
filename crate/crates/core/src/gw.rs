//! Rule-based evaluation of genus-0 three-point Gromov-Witten invariants
//! `I_B(alpha, beta, gamma)`.
//!
//! Only four facts are known to this module:
//!
//! - R4 (dimension): the invariant vanishes unless the degrees of the three
//!   classes add up to the virtual dimension for `B`;
//! - R1 (fiber line): `I_A1(xi, xi^(r-1), xi^(r-1) h^n) = 1`;
//! - R2 (fiber vanishing): `I_A1(xi^l1 h^m1, xi^l2 h^m2, -) = 0` when
//!   `l1 + l2 < r`;
//! - R3 (sections miss Z): `I_{bA2}((xi - h) g, -, -) = 0` for `b >= 1`.
//!
//! All four are multilinear statements, so they are applied after
//! normalizing the arguments in the classical ring and extended by
//! linearity where the pattern allows it. Anything else is `Unknown`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bundle::{virtual_dimension, BundleSpec, CurveClass};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{Grading, Monomial, Polynomial};
use crate::rewrite::{basis_coordinates, build_presentation, RingKind, RingPresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl Rule {
    pub fn description(self) -> &'static str {
        match self {
            Rule::R1 => "fiber line normalization",
            Rule::R2 => "fiber vanishing for l1 + l2 < r",
            Rule::R3 => "A2-curves miss the hypersurface xi - h",
            Rule::R4 => "degree sum differs from virtual dimension",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Known(BigInt),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnownValue {
    pub status: Status,
    pub rule: Option<Rule>,
}

impl KnownValue {
    fn known(v: impl Into<BigInt>, rule: Rule) -> Self {
        KnownValue {
            status: Status::Known(v.into()),
            rule: Some(rule),
        }
    }

    fn unknown() -> Self {
        KnownValue {
            status: Status::Unknown,
            rule: None,
        }
    }

    pub fn value(&self) -> Option<&BigInt> {
        match &self.status {
            Status::Known(v) => Some(v),
            Status::Unknown => None,
        }
    }
}

impl Serialize for KnownValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;

        let mut map = s.serialize_map(None)?;
        match &self.status {
            Status::Known(v) => {
                map.serialize_entry("status", "known")?;
                map.serialize_entry("value", &v.to_string())?;
            }
            Status::Unknown => map.serialize_entry("status", "unknown")?,
        }
        map.serialize_entry("rule", &self.rule)?;
        map.end()
    }
}

impl fmt::Display for KnownValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.status, self.rule) {
            (Status::Known(v), Some(rule)) => write!(f, "known {v} ({rule}: {})", rule.description()),
            (Status::Known(v), None) => write!(f, "known {v}"),
            (Status::Unknown, _) => f.write_str("unknown"),
        }
    }
}

/// `I_B(args[0], args[1], args[2])` on a given bundle.
#[derive(Clone, Debug)]
pub struct InvariantQuery {
    spec: BundleSpec,
    class: CurveClass,
    /// Arguments as supplied.
    raw: [Polynomial; 3],
    /// Classical normal forms of the arguments.
    args: [Polynomial; 3],
    degrees: [u64; 3],
    ring: RingPresentation,
}

impl InvariantQuery {
    /// Normalizes the arguments in the classical ring. Each must be a
    /// nonzero homogeneous class without Novikov variables.
    pub fn new(spec: &BundleSpec, class: CurveClass, args: [Polynomial; 3]) -> Result<Self> {
        let ring = build_presentation(spec, RingKind::Classical)?;
        let classical = classical_grading();
        let mut normalized = Vec::with_capacity(3);
        let mut degrees = [0u64; 3];
        for (i, a) in args.iter().enumerate() {
            if !a.is_classical() {
                return Err(Error::InvalidQuery(format!(
                    "argument {} involves q1 or q2: {a}",
                    i + 1
                )));
            }
            let nf = ring.normal_form(a)?;
            let deg = match nf.weighted_degree(&classical) {
                Err(Error::ZeroPolynomial) => {
                    return Err(Error::InvalidQuery(format!(
                        "argument {} is zero in cohomology: {a}",
                        i + 1
                    )))
                }
                Err(e) => return Err(e),
                Ok(d) => d
                    .homogeneous()
                    .ok_or_else(|| Error::InvalidQuery(format!("argument {} is not homogeneous: {a}", i + 1)))?,
            };
            degrees[i] = deg;
            normalized.push(nf);
        }
        let args_nf: [Polynomial; 3] = normalized.try_into().expect("three arguments");
        Ok(InvariantQuery {
            spec: spec.clone(),
            class,
            raw: args,
            args: args_nf,
            degrees,
            ring,
        })
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn class(&self) -> CurveClass {
        self.class
    }

    pub fn args(&self) -> &[Polynomial; 3] {
        &self.args
    }

    pub fn degree_sum(&self) -> u64 {
        self.degrees.iter().sum()
    }
}

fn classical_grading() -> Grading {
    // Only xi and h occur, so the Novikov weights are irrelevant.
    Grading::new(1, 1).expect("positive weights")
}

/// Applies R4, then R1, R2, R3; the first rule that fires decides.
pub fn evaluate(q: &InvariantQuery) -> KnownValue {
    firing_rules(q)
        .into_iter()
        .next()
        .map(|(rule, v)| KnownValue::known(v, rule))
        .unwrap_or_else(KnownValue::unknown)
}

/// Every rule that fires on `q`, with its value, in evaluation order.
pub fn firing_rules(q: &InvariantQuery) -> Vec<(Rule, BigInt)> {
    let mut out = Vec::new();
    if rule_dimension(q) {
        out.push((Rule::R4, BigInt::zero()));
    }
    if let Some(v) = rule_fiber_line(q) {
        out.push((Rule::R1, v));
    }
    if rule_fiber_vanishing(q) {
        out.push((Rule::R2, BigInt::zero()));
    }
    if rule_section_vanishing(q) {
        out.push((Rule::R3, BigInt::zero()));
    }
    out
}

/// True when two firing rules disagree on the value.
pub fn rules_conflict(q: &InvariantQuery) -> bool {
    let fired = firing_rules(q);
    fired.windows(2).any(|w| w[0].1 != w[1].1)
}

fn rule_dimension(q: &InvariantQuery) -> bool {
    q.degree_sum() as i64 != virtual_dimension(&q.spec, q.class)
}

/// If `p` is `c * m` for a single monomial, returns `c`.
fn scalar_multiple_of(p: &Polynomial, m: &Monomial) -> Option<BigInt> {
    match p.len() {
        1 => {
            let (pm, c) = p.leading()?;
            (pm == m).then(|| c.clone())
        }
        _ => None,
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// R1, up to permutation of the arguments and integer scaling of each.
fn rule_fiber_line(q: &InvariantQuery) -> Option<BigInt> {
    if q.class != CurveClass::A1 {
        return None;
    }
    let (r, n) = (q.spec.r(), q.spec.n());
    let pattern = [
        Monomial::classical(1, 0),
        Monomial::classical(r - 1, 0),
        Monomial::classical(r - 1, n),
    ];
    PERMUTATIONS.iter().find_map(|perm| {
        let mut value = BigInt::one();
        for (slot, &arg) in perm.iter().enumerate() {
            value *= scalar_multiple_of(&q.args[arg], &pattern[slot])?;
        }
        Some(value)
    })
}

/// R2 on any pair of arguments, extended by linearity: every pair of terms
/// must satisfy `l1 + l2 < r`.
fn rule_fiber_vanishing(q: &InvariantQuery) -> bool {
    if q.class != CurveClass::A1 {
        return false;
    }
    let r = q.spec.r();
    let max_xi = |p: &Polynomial| p.terms().map(|(m, _)| m.xi).max().unwrap_or(0);
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .any(|&(i, j)| max_xi(&q.args[i]) + max_xi(&q.args[j]) < r)
}

/// R3: some argument is a multiple of `xi - h`.
fn rule_section_vanishing(q: &InvariantQuery) -> bool {
    if q.class.a != 0 || q.class.b == 0 {
        return false;
    }
    (0..3).any(|i| divisible_in_free_ring(&q.raw[i]) || divisible_in_cohomology(&q.ring, &q.args[i]))
}

/// `(xi - h) | p` in `Z[xi, h]`, tested by substituting `xi = h`.
pub fn divisible_in_free_ring(p: &Polynomial) -> bool {
    let mut collapsed = Polynomial::zero();
    for (m, c) in p.terms() {
        collapsed.add_term(Monomial::new(0, m.xi + m.h, m.q1, m.q2), c.clone());
    }
    collapsed.is_zero()
}

/// `p = (xi - h) g` for some rational class `g`, decided by an exact
/// linear solve over the monomial basis.
pub fn divisible_in_cohomology(ring: &RingPresentation, p: &Polynomial) -> bool {
    let factor = Polynomial::xi() - Polynomial::h();
    let basis = ring.basis();
    let columns: Option<Vec<Vec<BigInt>>> = basis
        .iter()
        .map(|b| {
            let image = ring.multiply(&factor, &Polynomial::monomial(*b)).ok()?;
            basis_coordinates(basis, &image).ok()
        })
        .collect();
    let (Some(columns), Ok(target)) = (columns, basis_coordinates(basis, p)) else {
        return false;
    };
    linalg::solve_in_span(&columns, &target).is_some()
}
