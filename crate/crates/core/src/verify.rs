//! The identity and property suite for one bundle, and scans over families
//! of bundles.
//!
//! [`run_suite`] always produces the same eleven checks in the same order.
//! Checks that need the quantum ring are skipped, not failed, when the bundle
//! is not Fano or `m_1 != 1`. Randomized checks draw from a ChaCha stream
//! keyed by the seed and the check's position, so a report is a
//! deterministic function of `(spec, seed)`.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{self, anticanonical, chern, intersect_curve, BundleSpec, CurveClass};
use crate::error::Error;
use crate::gw::{self, InvariantQuery};
use crate::pairing::{self, PairingData};
use crate::poly::{Monomial, Polynomial, Var};
use crate::rewrite::{build_presentation, chern_leray_product, reduce_mod, QVar, RingKind, RingPresentation};

/// Random cases per randomized check.
pub const DEFAULT_CASES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Theorem,
    TCoefficients,
    ClassicalChernLeray,
    CbarAlternatingSum,
    GradingHomogeneity,
    Confluence,
    ClassicalLimit,
    BasisIdempotence,
    Pairing,
    GradingIntersection,
    FiberLineCrossCheck,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::Theorem,
        CheckName::TCoefficients,
        CheckName::ClassicalChernLeray,
        CheckName::CbarAlternatingSum,
        CheckName::GradingHomogeneity,
        CheckName::Confluence,
        CheckName::ClassicalLimit,
        CheckName::BasisIdempotence,
        CheckName::Pairing,
        CheckName::GradingIntersection,
        CheckName::FiberLineCrossCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Theorem => "theorem",
            CheckName::TCoefficients => "t_coefficients",
            CheckName::ClassicalChernLeray => "classical_chern_leray",
            CheckName::CbarAlternatingSum => "cbar_alternating_sum",
            CheckName::GradingHomogeneity => "grading_homogeneity",
            CheckName::Confluence => "confluence",
            CheckName::ClassicalLimit => "classical_limit",
            CheckName::BasisIdempotence => "basis_idempotence",
            CheckName::Pairing => "pairing",
            CheckName::GradingIntersection => "grading_intersection",
            CheckName::FiberLineCrossCheck => "fiber_line_cross_check",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: CheckName,
    pub status: CheckStatus,
    pub detail: String,
    /// Reported but not counted towards pass/fail (hypothesis boundary).
    pub informational: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub spec: BundleSpec,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock time of the run. Not serialized, so that reports stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn check(&self, name: CheckName) -> &Check {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .expect("every check is present")
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail && !c.informational)
    }

    /// Human-readable table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} seed={} {verdict}", self.spec, self.seed);
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skip",
            };
            let info = if c.informational { " (informational)" } else { "" };
            let _ = writeln!(out, "  {status:<4}  {:<24} {}{info}", c.name.as_str(), c.detail);
        }
        out
    }
}

/// Why quantum checks cannot run on a spec, if they cannot.
fn quantum_gate(spec: &BundleSpec) -> Option<&'static str> {
    if spec.m()[0] != 1 {
        Some("HypothesisUnmet")
    } else if !spec.is_fano() {
        Some("NotFano")
    } else {
        None
    }
}

type Outcome = std::result::Result<String, String>;

struct Context<'a> {
    spec: &'a BundleSpec,
    seed: u64,
    cases: usize,
    classical: RingPresentation,
    quantum: Option<RingPresentation>,
}

impl Context<'_> {
    fn rng(&self, name: CheckName) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(name as u64);
        rng
    }

    /// The quantum ring when the gate allows it, otherwise the classical one.
    fn preferred_ring(&self) -> &RingPresentation {
        self.quantum.as_ref().unwrap_or(&self.classical)
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// Runs every check on `spec` with [`DEFAULT_CASES`] random cases.
pub fn run_suite(spec: &BundleSpec, seed: u64) -> Report {
    run_suite_with(spec, seed, DEFAULT_CASES)
}

pub fn run_suite_with(spec: &BundleSpec, seed: u64, cases: usize) -> Report {
    let start = Instant::now();
    let gate = quantum_gate(spec);
    let ctx = Context {
        spec,
        seed,
        cases,
        classical: build_presentation(spec, RingKind::Classical).expect("classical presentation"),
        quantum: match gate {
            None => build_presentation(spec, RingKind::Quantum).ok(),
            Some(_) => None,
        },
    };

    let mut checks = Vec::with_capacity(CheckName::ALL.len());
    for name in CheckName::ALL {
        let quantum_only = matches!(
            name,
            CheckName::Theorem
                | CheckName::TCoefficients
                | CheckName::GradingHomogeneity
                | CheckName::ClassicalLimit
                | CheckName::FiberLineCrossCheck
        );
        let mut informational = false;
        let skip = match name {
            CheckName::Theorem => {
                // m_1 = m_2 = 1 sits on the boundary of the hypothesis; it is
                // run and reported, but not asserted.
                informational = gate.is_none() && !spec.theorem_hypothesis();
                gate
            }
            CheckName::CbarAlternatingSum if spec.m()[0] != 1 => Some("HypothesisUnmet"),
            _ if quantum_only => gate,
            _ => None,
        };
        let check = match skip {
            Some(reason) => Check {
                name,
                status: CheckStatus::Skipped,
                detail: reason.to_string(),
                informational,
                elapsed: Duration::ZERO,
            },
            None => {
                let started = Instant::now();
                let outcome = run_check(&ctx, name);
                let (status, detail) = match outcome {
                    Ok(d) => (CheckStatus::Pass, d),
                    Err(d) => (CheckStatus::Fail, d),
                };
                Check {
                    name,
                    status,
                    detail,
                    informational,
                    elapsed: started.elapsed(),
                }
            }
        };
        checks.push(check);
    }
    let passed = !checks.iter().any(|c| c.status == CheckStatus::Fail && !c.informational);
    Report {
        spec: spec.clone(),
        seed,
        passed,
        checks,
        elapsed: start.elapsed(),
    }
}

fn run_check(ctx: &Context<'_>, name: CheckName) -> Outcome {
    match name {
        CheckName::Theorem => check_theorem(ctx),
        CheckName::TCoefficients => check_t_coefficients(ctx),
        CheckName::ClassicalChernLeray => check_classical_chern_leray(ctx),
        CheckName::CbarAlternatingSum => check_alternating_sum(ctx),
        CheckName::GradingHomogeneity => check_grading(ctx),
        CheckName::Confluence => check_confluence(ctx),
        CheckName::ClassicalLimit => check_classical_limit(ctx),
        CheckName::BasisIdempotence => check_basis(ctx),
        CheckName::Pairing => check_pairing(ctx),
        CheckName::GradingIntersection => check_grading_intersection(ctx),
        CheckName::FiberLineCrossCheck => check_fiber_line(ctx),
    }
}

fn quantum<'a>(ctx: &'a Context<'_>) -> std::result::Result<&'a RingPresentation, String> {
    ctx.quantum
        .as_ref()
        .ok_or_else(|| "quantum presentation unavailable".to_string())
}

fn check_theorem(ctx: &Context<'_>) -> Outcome {
    let ring = quantum(ctx)?;
    let reduction = ring.reduce(&chern_leray_product(ctx.spec)).map_err(err)?;
    if reduction.normal_form == Polynomial::q1() {
        Ok(format!("NF(prod(xi - m_i h)) = q1 in {} steps", reduction.steps))
    } else {
        Err(format!("NF(prod(xi - m_i h)) = {}", reduction.normal_form))
    }
}

/// For `0 <= i <= r`, the `q1`-coefficient of `NF(xi^(r-i) h^i) mod q2`.
pub fn t_coefficients(ring: &RingPresentation) -> crate::Result<Vec<Polynomial>> {
    let r = ring.spec().r();
    (0..=r)
        .map(|i| {
            let nf = ring.normal_form(&Polynomial::monomial(Monomial::classical(r - i, i)))?;
            Ok(reduce_mod(&nf, QVar::Q2).coefficient_of(Var::Q1, 1))
        })
        .collect()
}

fn check_t_coefficients(ctx: &Context<'_>) -> Outcome {
    let t = t_coefficients(quantum(ctx)?).map_err(err)?;
    for (i, ti) in t.iter().enumerate() {
        let expected = if i == 0 { Polynomial::one() } else { Polynomial::zero() };
        if *ti != expected {
            return Err(format!("t_{i} = {ti}, expected {expected}"));
        }
    }
    Ok(format!("t_0 = 1 and t_1..t_{} = 0", t.len() - 1))
}

fn check_classical_chern_leray(ctx: &Context<'_>) -> Outcome {
    let nf = ctx.classical.normal_form(&chern_leray_product(ctx.spec)).map_err(err)?;
    if nf.is_zero() {
        Ok("NF_classical(prod(xi - m_i h)) = 0".into())
    } else {
        Err(format!("NF_classical(prod(xi - m_i h)) = {nf}"))
    }
}

fn check_alternating_sum(ctx: &Context<'_>) -> Outcome {
    let data = chern(ctx.spec);
    let sum = data.alternating_sum();
    let product: BigInt = ctx
        .spec
        .m()
        .iter()
        .map(|&mi| BigInt::one() - BigInt::from(mi))
        .product();
    if sum != product {
        return Err(format!("sum (-1)^j cbar_j = {sum} but prod (1 - m_i) = {product}"));
    }
    if !sum.is_zero() {
        return Err(format!("sum (-1)^j cbar_j = {sum}"));
    }
    Ok("sum (-1)^j cbar_j = 0".into())
}

/// Seeded generator of test polynomials: at most 6 terms, `xi` exponent up
/// to `2r`, `h` exponent up to `2n + 2`, Novikov exponents up to 2 and
/// coefficients in `[-9, 9]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, spec: &BundleSpec, with_q: bool) -> Polynomial {
    let terms = rng.random_range(1..=6);
    let mut p = Polynomial::zero();
    for _ in 0..terms {
        let m = Monomial::new(
            rng.random_range(0..=2 * spec.r()),
            rng.random_range(0..=2 * spec.n() + 2),
            if with_q { rng.random_range(0..=2) } else { 0 },
            if with_q { rng.random_range(0..=2) } else { 0 },
        );
        p.add_term(m, BigInt::from(rng.random_range(-9..=9)));
    }
    p
}

fn check_grading(ctx: &Context<'_>) -> Outcome {
    let ring = quantum(ctx)?;
    let g = *ring.grading().ok_or("quantum ring without grading")?;
    for rule in ring.rules() {
        let head = rule.head.weighted_degree(&g);
        match rule.replacement.weighted_degree(&g) {
            Ok(d) if d.homogeneous() == Some(head) => {}
            other => {
                return Err(format!(
                    "rule {rule} is not homogeneous: head {head}, replacement {other:?}"
                ))
            }
        }
    }
    let mut rng = ctx.rng(CheckName::GradingHomogeneity);
    let mut done = 0;
    while done < ctx.cases {
        let p = random_polynomial(&mut rng, ctx.spec, true);
        let Some((lead, _)) = p.leading() else { continue };
        let d = lead.weighted_degree(&g);
        let p = p.homogeneous_part(&g, d);
        let nf = ring.normal_form(&p).map_err(err)?;
        if !nf.is_zero() && nf.weighted_degree(&g).map_err(err)?.homogeneous() != Some(d) {
            return Err(format!("NF({p}) = {nf} is not homogeneous of degree {d}"));
        }
        done += 1;
    }
    Ok(format!(
        "both rules homogeneous; {done} homogeneous inputs keep their degree"
    ))
}

fn check_confluence(ctx: &Context<'_>) -> Outcome {
    let ring = ctx.preferred_ring();
    let with_q = ring.kind() == RingKind::Quantum;
    let mut rng = ctx.rng(CheckName::Confluence);
    for _ in 0..ctx.cases {
        let p = random_polynomial(&mut rng, ctx.spec, with_q);
        let canonical = ring.normal_form(&p).map_err(err)?;
        let shuffled = ring.normal_form_randomized(&p, &mut rng).map_err(err)?;
        if canonical != shuffled {
            return Err(format!("NF({p}): canonical {canonical}, randomized {shuffled}"));
        }
    }
    Ok(format!(
        "{} random inputs agree under random rule order ({} ring)",
        ctx.cases,
        ring.kind()
    ))
}

fn check_classical_limit(ctx: &Context<'_>) -> Outcome {
    let ring = quantum(ctx)?;
    let mut rng = ctx.rng(CheckName::ClassicalLimit);
    for _ in 0..ctx.cases {
        let p = random_polynomial(&mut rng, ctx.spec, false);
        let q = ring.normal_form(&p).map_err(err)?;
        let limit = reduce_mod(&reduce_mod(&q, QVar::Q1), QVar::Q2);
        let c = ctx.classical.normal_form(&p).map_err(err)?;
        if limit != c {
            return Err(format!("NF({p}): quantum at q = 0 gives {limit}, classical {c}"));
        }
    }
    Ok(format!("{} random classical inputs agree at q1 = q2 = 0", ctx.cases))
}

fn check_basis(ctx: &Context<'_>) -> Outcome {
    let ring = ctx.preferred_ring();
    let basis = ring.basis();
    let expected = (ctx.spec.r() * (ctx.spec.n() + 1)) as usize;
    if basis.len() != expected {
        return Err(format!("basis has {} elements, expected {expected}", basis.len()));
    }
    if let Some(m) = basis.iter().find(|m| !ring.is_normal(m)) {
        return Err(format!("basis element {m} is reducible"));
    }
    for a in basis {
        for b in basis {
            let nf = ring.normal_form(&Polynomial::monomial(*a * *b)).map_err(err)?;
            let again = ring.normal_form(&nf).map_err(err)?;
            if again != nf {
                return Err(format!("NF is not idempotent on {a}*{b}"));
            }
        }
    }
    let with_q = ring.kind() == RingKind::Quantum;
    let mut rng = ctx.rng(CheckName::BasisIdempotence);
    for _ in 0..ctx.cases {
        let p = random_polynomial(&mut rng, ctx.spec, with_q);
        let q = random_polynomial(&mut rng, ctx.spec, with_q);
        let direct = ring.normal_form(&(&p * &q)).map_err(err)?;
        let np = ring.normal_form(&p).map_err(err)?;
        let nq = ring.normal_form(&q).map_err(err)?;
        let staged = ring.normal_form(&(&np * &nq)).map_err(err)?;
        if direct != staged {
            return Err(format!("NF(pq) != NF(NF(p) NF(q)) for p = {p}, q = {q}"));
        }
        if ring.normal_form(&direct).map_err(err)? != direct {
            return Err(format!("NF is not idempotent on ({p})*({q})"));
        }
    }
    Ok(format!(
        "rank {expected}; idempotent on all basis products; {} multiplicative pairs ({} ring)",
        ctx.cases,
        ring.kind()
    ))
}

fn check_pairing(ctx: &Context<'_>) -> Outcome {
    let data = PairingData::compute(ctx.spec).map_err(err)?;
    let size = data.basis.len();
    let dim = u64::from(ctx.spec.dim());
    for i in 0..size {
        for j in 0..size {
            if data.matrix[i][j] != data.matrix[j][i] {
                return Err(format!("matrix not symmetric at ({i}, {j})"));
            }
            let complementary = data.basis[i].classical_degree() + data.basis[j].classical_degree() == dim;
            if !complementary && !data.matrix[i][j].is_zero() {
                return Err(format!(
                    "<{}, {}> != 0 off complementary degree",
                    data.basis[i], data.basis[j]
                ));
            }
        }
    }
    let det = data.determinant();
    if !det.abs().is_one() {
        return Err(format!("determinant {det}"));
    }
    for (i, b) in data.basis.iter().enumerate() {
        for (j, dual) in data.duals.iter().enumerate() {
            let v = pairing::pair(&ctx.classical, &Polynomial::monomial(*b), dual).map_err(err)?;
            let expected = if i == j { BigInt::one() } else { BigInt::zero() };
            if v != expected {
                return Err(format!("<{b}, dual_{j}> = {v}"));
            }
        }
    }
    Ok(format!("{size}x{size} symmetric, det {det}, biorthogonal duals"))
}

fn check_grading_intersection(ctx: &Context<'_>) -> Outcome {
    let k = anticanonical(ctx.spec);
    let (d1, d2) = (intersect_curve(k, CurveClass::A1), intersect_curve(k, CurveClass::A2));
    let (w1, w2) = (i64::from(ctx.spec.r()), ctx.spec.anticanonical_degree_a2());
    if (d1, d2) != (w1, w2) {
        return Err(format!("-K.A1 = {d1}, -K.A2 = {d2}; formulas give {w1}, {w2}"));
    }
    match bundle::grading(ctx.spec) {
        Ok(g) if (i64::from(g.deg_q1()), i64::from(g.deg_q2())) != (d1, d2) => Err(format!(
            "grading ({}, {}) disagrees with ({d1}, {d2})",
            g.deg_q1(),
            g.deg_q2()
        )),
        Ok(_) => Ok(format!("deg q1 = -K.A1 = {d1}, deg q2 = -K.A2 = {d2}")),
        Err(_) => Ok(format!("-K.A1 = {d1}, -K.A2 = {d2} (no grading: not Fano)")),
    }
}

fn check_fiber_line(ctx: &Context<'_>) -> Outcome {
    let ring = quantum(ctx)?;
    let (r, n) = (ctx.spec.r(), ctx.spec.n());
    let xi_r = ring
        .normal_form(&Polynomial::monomial(Monomial::classical(r, 0)))
        .map_err(err)?;
    let t0 = reduce_mod(&xi_r, QVar::Q2).coefficient_of(Var::Q1, 1);
    if t0 != Polynomial::one() {
        return Err(format!("q1-coefficient of NF(xi^{r}) mod q2 is {t0}"));
    }
    let top = Polynomial::monomial(pairing::top_class(ctx.spec));
    let paired = pairing::pair(&ctx.classical, &t0, &top).map_err(err)?;
    let query = InvariantQuery::new(
        ctx.spec,
        CurveClass::A1,
        [
            Polynomial::monomial(Monomial::classical(1, 0)),
            Polynomial::monomial(Monomial::classical(r - 1, 0)),
            top,
        ],
    )
    .map_err(err)?;
    let rule = gw::evaluate(&query);
    match rule.value() {
        Some(v) if *v == paired && paired.is_one() => Ok(format!(
            "R1 gives {v}; presented ring gives <1, xi^{} h^{n}> = {paired}",
            r - 1
        )),
        _ => Err(format!("R1 gives {rule}; presented ring gives {paired}")),
    }
}

/// Result of [`scan`].
#[derive(Clone, Debug, Serialize)]
pub struct Scan {
    pub reports: Vec<Report>,
    /// Set when the bounds were rejected.
    pub note: Option<String>,
}

impl Scan {
    pub fn passed(&self) -> bool {
        self.note.is_none() && self.reports.iter().all(|r| r.passed)
    }
}

/// Fano specs with `m_1 = 1`, `1 <= m_i <= m_max`, `2 <= r <= r_max`,
/// `1 <= n <= n_max`, ordered by `n`, then `r`, then `m` lexicographically.
pub fn scan_family(n_max: u32, r_max: u32, m_max: u32) -> Vec<BundleSpec> {
    fn tails(len: u32, lo: u32, hi: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in lo..=hi {
            prefix.push(v);
            tails(len - 1, v, hi, prefix, out);
            prefix.pop();
        }
    }
    let mut specs = Vec::new();
    for n in 1..=n_max {
        for r in 2..=r_max {
            let mut all = Vec::new();
            tails(r - 1, 1, m_max, &mut vec![1], &mut all);
            specs.extend(
                all.iter()
                    .filter_map(|m| BundleSpec::new(n, m).ok())
                    .filter(BundleSpec::is_fano),
            );
        }
    }
    specs
}

/// Runs [`run_suite`] on every spec of [`scan_family`], in parallel. The
/// report order is the enumeration order.
pub fn scan(n_max: i64, r_max: i64, m_max: i64, seed: u64) -> Scan {
    let bounds = [("n_max", n_max), ("r_max", r_max), ("m_max", m_max)];
    if let Some((name, v)) = bounds.iter().find(|(_, v)| *v < 1 || *v > i64::from(u32::MAX)) {
        return Scan {
            reports: Vec::new(),
            note: Some(Error::InvalidSpec(format!("scan bound {name} = {v} must be at least 1")).to_string()),
        };
    }
    let specs = scan_family(n_max as u32, r_max as u32, m_max as u32);
    let reports = specs.par_iter().map(|s| run_suite(s, seed)).collect();
    Scan { reports, note: None }
}
