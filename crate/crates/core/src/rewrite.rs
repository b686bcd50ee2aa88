//! Ring presentations as two-rule rewrite systems, and normal forms.
//!
//! Both rings are generated by `xi` and `h` subject to one rule headed by
//! `xi^r` and one headed by `h^(n+1)`:
//!
//! | ring      | `xi^r ->`                                        | `h^(n+1) ->`                          |
//! |-----------|--------------------------------------------------|---------------------------------------|
//! | classical | `sum_{j>=1} (-1)^(j+1) cbar_j xi^(r-j) h^j`      | `0`                                   |
//! | quantum   | same, `+ q1`                                     | `prod (xi - m_i h)^(m_i - 1) * q2`    |
//!
//! Reduction is exhaustive single-term rewriting. Every term of a normal
//! form satisfies `xi <= r - 1` and `h <= n`, so normal forms are integer
//! combinations of the basis monomials `xi^l h^m` times powers of `q1`, `q2`.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock, RwLockReadGuard};

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::bundle::{self, BundleSpec};
use crate::error::{Error, Result};
use crate::poly::{Grading, Monomial, Polynomial, Var};

/// Default cap on single-term rewrites per normal-form computation.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Classical,
    Quantum,
}

impl std::fmt::Display for RingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RingKind::Classical => "classical",
            RingKind::Quantum => "quantum",
        })
    }
}

/// `head -> replacement`, where `head` is a pure power of `xi` or of `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteRule {
    pub head: Monomial,
    pub replacement: Polynomial,
}

impl RewriteRule {
    pub fn applies_to(&self, m: &Monomial) -> bool {
        self.head.divides(m)
    }

    /// Rewrites the single term `c * m` in place inside `p`. The caller
    /// guarantees that `m` is present and divisible by the head.
    fn rewrite_term(&self, p: &mut Polynomial, m: &Monomial) {
        let c = p.take_term(m).expect("rewritten term is present");
        let cofactor = self.head.quotient_of(m).expect("head divides term");
        p.add_scaled(&self.replacement, &c, cofactor);
    }
}

impl std::fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.head, self.replacement)
    }
}

fn lookup<'a>(
    cache: &'a HashMap<Monomial, Polynomial>,
    local: &'a HashMap<Monomial, Memo>,
    key: &Monomial,
) -> Option<&'a Polynomial> {
    match local.get(key) {
        Some(Memo::Done(p)) => Some(p),
        Some(Memo::Expanded) => None,
        None => cache.get(key),
    }
}

/// Normal forms of reducible classical monomials, shared between clones of
/// a presentation. Entries are pure functions of the rules, so the cache
/// never affects results and is ignored by equality.
#[derive(Clone, Default)]
struct NormalFormCache(Arc<RwLock<HashMap<Monomial, Polynomial>>>);

impl NormalFormCache {
    fn read(&self) -> RwLockReadGuard<'_, HashMap<Monomial, Polynomial>> {
        self.0.read().unwrap_or_else(|e| e.into_inner())
    }

    fn store(&self, local: HashMap<Monomial, Memo>) {
        let mut cache = self.0.write().unwrap_or_else(|e| e.into_inner());
        for (m, memo) in local {
            if let Memo::Done(p) = memo {
                cache.entry(m).or_insert(p);
            }
        }
    }
}

impl PartialEq for NormalFormCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for NormalFormCache {}

impl std::fmt::Debug for NormalFormCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NormalFormCache({} entries)", self.read().len())
    }
}

enum Memo {
    /// Children pushed, normal form not yet assembled.
    Expanded,
    Done(Polynomial),
}

/// Which rule to prefer when several apply to a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RuleChoice {
    Xi,
    H,
}

/// Normal form together with the number of single-term rewrites it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub normal_form: Polynomial,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    spec: BundleSpec,
    kind: RingKind,
    xi_rule: RewriteRule,
    h_rule: RewriteRule,
    grading: Option<Grading>,
    basis: Vec<Monomial>,
    max_steps: u64,
    cache: NormalFormCache,
}

/// Builds the classical or quantum presentation of the cohomology of `P(V)`.
///
/// The quantum presentation needs a Fano bundle so that both Novikov
/// variables have positive degree; otherwise this returns `NotFano`.
pub fn build_presentation(spec: &BundleSpec, kind: RingKind) -> Result<RingPresentation> {
    match kind {
        RingKind::Classical => Ok(RingPresentation::assemble(spec, kind, None)),
        RingKind::Quantum => {
            let g = bundle::grading(spec)?;
            Ok(RingPresentation::assemble(spec, kind, Some(g)))
        }
    }
}

/// `prod_i (xi - m_i h)^e_i` for the given exponents.
fn linear_factor_product(spec: &BundleSpec, exponent: impl Fn(u32) -> u32) -> Polynomial {
    spec.m()
        .iter()
        .map(|&mi| {
            let factor = Polynomial::xi() - Polynomial::term(mi, Monomial::classical(0, 1));
            factor.pow(exponent(mi))
        })
        .product()
}

/// `prod_i (xi - m_i h)`, the Chern-Leray product.
pub fn chern_leray_product(spec: &BundleSpec) -> Polynomial {
    linear_factor_product(spec, |_| 1)
}

impl RingPresentation {
    /// Quantum presentation without the Fano check.
    ///
    /// Off the Fano range `deg q2 <= 0` and rewriting need not terminate; the
    /// step bound is the only guard. Intended for experiments.
    pub fn quantum_unchecked(spec: &BundleSpec) -> Self {
        let grading = bundle::grading(spec).ok();
        RingPresentation::assemble(spec, RingKind::Quantum, grading)
    }

    fn assemble(spec: &BundleSpec, kind: RingKind, grading: Option<Grading>) -> Self {
        let r = spec.r();
        let n = spec.n();
        // xi^r = xi^r - prod (xi - m_i h) (+ q1)
        let xi_head = Monomial::classical(r, 0);
        let mut xi_replacement = Polynomial::monomial(xi_head) - chern_leray_product(spec);
        let mut h_replacement = Polynomial::zero();
        if kind == RingKind::Quantum {
            xi_replacement += &Polynomial::q1();
            h_replacement = linear_factor_product(spec, |mi| mi - 1) * Polynomial::q2();
        }
        RingPresentation {
            spec: spec.clone(),
            kind,
            xi_rule: RewriteRule {
                head: xi_head,
                replacement: xi_replacement,
            },
            h_rule: RewriteRule {
                head: Monomial::classical(0, n + 1),
                replacement: h_replacement,
            },
            grading,
            basis: enumerate_basis(spec),
            max_steps: DEFAULT_MAX_STEPS,
            cache: NormalFormCache::default(),
        }
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    /// The `xi^r` rule followed by the `h^(n+1)` rule.
    pub fn rules(&self) -> [&RewriteRule; 2] {
        [&self.xi_rule, &self.h_rule]
    }

    pub fn xi_rule(&self) -> &RewriteRule {
        &self.xi_rule
    }

    pub fn h_rule(&self) -> &RewriteRule {
        &self.h_rule
    }

    pub fn is_normal(&self, m: &Monomial) -> bool {
        !self.xi_rule.applies_to(m) && !self.h_rule.applies_to(m)
    }

    fn check_input(&self, p: &Polynomial) -> Result<()> {
        if self.kind == RingKind::Classical && !p.is_classical() {
            return Err(Error::QuantumVariable(p.to_string()));
        }
        Ok(())
    }

    fn step_guard(&self, steps: u64, p: &Polynomial) -> Result<()> {
        if steps > self.max_steps {
            return Err(Error::NonTermination {
                limit: self.max_steps,
                terms: p.len(),
            });
        }
        Ok(())
    }

    /// Normal form, computed monomial by monomial with memoization.
    ///
    /// The rule heads do not involve `q1`, `q2`, so the normal form of
    /// `xi^a h^b q1^c q2^d` is that of `xi^a h^b` times `q1^c q2^d`. Each
    /// distinct `xi^a h^b` is rewritten once, by the `xi`-rule when it
    /// applies and by the `h`-rule otherwise, and its normal form is kept in
    /// a cache shared by all calls on this presentation. By confluence the
    /// result equals that of [`Self::reduce`]; `max_steps` bounds the number
    /// of monomials rewritten per call.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial> {
        self.check_input(p)?;
        let mut local: HashMap<Monomial, Memo> = HashMap::new();
        let mut steps = 0u64;
        let mut out = Polynomial::zero();
        {
            let cache = self.cache.read();
            for (m, c) in p.terms() {
                let (key, shift) = split_classical(m);
                if self.is_normal(&key) {
                    out.add_term(*m, c.clone());
                    continue;
                }
                if !cache.contains_key(&key) {
                    self.normal_form_monomial(key, &cache, &mut local, &mut steps)?;
                }
                let nf = lookup(&cache, &local, &key).expect("root is finished");
                out.add_scaled(nf, c, shift);
            }
        }
        if !local.is_empty() {
            self.cache.store(local);
        }
        Ok(out)
    }

    /// Fills `local[root]` for a reducible classical monomial not in `cache`.
    fn normal_form_monomial(
        &self,
        root: Monomial,
        cache: &HashMap<Monomial, Polynomial>,
        local: &mut HashMap<Monomial, Memo>,
        steps: &mut u64,
    ) -> Result<()> {
        let known = |local: &HashMap<Monomial, Memo>, key: &Monomial| {
            self.is_normal(key) || cache.contains_key(key) || local.contains_key(key)
        };
        let mut stack = vec![root];
        while let Some(&m) = stack.last() {
            let rule = if self.xi_rule.applies_to(&m) {
                &self.xi_rule
            } else {
                &self.h_rule
            };
            let cofactor = rule.head.quotient_of(&m).expect("monomial on the stack is reducible");
            let children = rule.replacement.terms().map(|(t, c)| {
                let (key, shift) = split_classical(&(*t * cofactor));
                (key, shift, c)
            });
            match local.get(&m) {
                Some(Memo::Done(_)) => {
                    stack.pop();
                }
                Some(Memo::Expanded) => {
                    let mut nf = Polynomial::zero();
                    for (key, shift, c) in children {
                        if self.is_normal(&key) {
                            nf.add_term(key * shift, c.clone());
                        } else if let Some(sub) = lookup(cache, local, &key) {
                            nf.add_scaled(sub, c, shift);
                        } else {
                            // A child still in progress means a rewrite cycle.
                            return Err(Error::NonTermination {
                                limit: self.max_steps,
                                terms: stack.len(),
                            });
                        }
                    }
                    local.insert(m, Memo::Done(nf));
                    stack.pop();
                }
                None if cache.contains_key(&m) => {
                    stack.pop();
                }
                None => {
                    local.insert(m, Memo::Expanded);
                    *steps += 1;
                    if *steps > self.max_steps {
                        return Err(Error::NonTermination {
                            limit: self.max_steps,
                            terms: stack.len(),
                        });
                    }
                    let pending: Vec<Monomial> = children
                        .filter(|(key, _, _)| !known(local, key))
                        .map(|(key, _, _)| key)
                        .collect();
                    stack.extend(pending);
                }
            }
        }
        Ok(())
    }

    /// Canonical strategy: rewrite the largest term divisible by `xi^r`; when
    /// there is none, the largest term divisible by `h^(n+1)`.
    pub fn reduce(&self, p: &Polynomial) -> Result<Reduction> {
        self.check_input(p)?;
        let r = self.spec.r();
        let mut current = p.clone();
        let mut steps = 0u64;
        loop {
            // Terms are ordered by xi exponent first, so a term reducible by
            // the xi-rule is always the leading one.
            let target = match current.leading() {
                Some((m, _)) if m.xi >= r => Some((*m, RuleChoice::Xi)),
                _ => current
                    .terms()
                    .rev()
                    .find(|(m, _)| self.h_rule.applies_to(m))
                    .map(|(m, _)| (*m, RuleChoice::H)),
            };
            let Some((m, choice)) = target else {
                return Ok(Reduction {
                    normal_form: current,
                    steps,
                });
            };
            self.rule(choice).rewrite_term(&mut current, &m);
            steps += 1;
            self.step_guard(steps, &current)?;
        }
    }

    /// Reduction under a random strategy: at each step a uniformly random
    /// reducible term is rewritten, by a uniformly random applicable rule.
    pub fn normal_form_randomized<R: Rng + ?Sized>(&self, p: &Polynomial, rng: &mut R) -> Result<Polynomial> {
        self.check_input(p)?;
        let mut current = p.clone();
        let mut steps = 0u64;
        // Candidate redexes; entries that cancelled away are dropped lazily.
        let mut pool: Vec<Monomial> = Vec::new();
        let mut pooled: HashSet<Monomial> = HashSet::new();
        let offer = |m: Monomial, pool: &mut Vec<Monomial>, pooled: &mut HashSet<Monomial>| {
            if !self.is_normal(&m) && pooled.insert(m) {
                pool.push(m);
            }
        };
        for (m, _) in current.terms() {
            offer(*m, &mut pool, &mut pooled);
        }
        while !pool.is_empty() {
            let m = pool.swap_remove(rng.random_range(0..pool.len()));
            pooled.remove(&m);
            if !current.contains(&m) {
                continue;
            }
            let choice = match (self.xi_rule.applies_to(&m), self.h_rule.applies_to(&m)) {
                (true, true) if rng.random_bool(0.5) => RuleChoice::H,
                (true, _) => RuleChoice::Xi,
                _ => RuleChoice::H,
            };
            let rule = self.rule(choice);
            rule.rewrite_term(&mut current, &m);
            let cofactor = rule.head.quotient_of(&m).expect("head divides term");
            for (t, _) in rule.replacement.terms() {
                offer(*t * cofactor, &mut pool, &mut pooled);
            }
            steps += 1;
            self.step_guard(steps, &current)?;
        }
        Ok(current)
    }

    fn rule(&self, choice: RuleChoice) -> &RewriteRule {
        match choice {
            RuleChoice::Xi => &self.xi_rule,
            RuleChoice::H => &self.h_rule,
        }
    }

    /// Normal form of a product.
    pub fn multiply(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.normal_form(&(a * b))
    }
}

/// `m = classical * shift` with `classical` free of `q1`, `q2`.
fn split_classical(m: &Monomial) -> (Monomial, Monomial) {
    (Monomial::classical(m.xi, m.h), Monomial::new(0, 0, m.q1, m.q2))
}

/// The Novikov variable used by [`reduce_mod`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QVar {
    Q1,
    Q2,
}

impl From<QVar> for Var {
    fn from(q: QVar) -> Var {
        match q {
            QVar::Q1 => Var::Q1,
            QVar::Q2 => Var::Q2,
        }
    }
}

/// Image in the quotient by `q1` or `q2`: drops every term containing it.
pub fn reduce_mod(p: &Polynomial, which: QVar) -> Polynomial {
    p.drop_var(which.into())
}

/// `xi^l h^m` for `0 <= l <= r - 1`, `0 <= m <= n`, ordered by degree and
/// then lexicographically on `(l, m)`.
pub fn enumerate_basis(spec: &BundleSpec) -> Vec<Monomial> {
    let mut basis: Vec<Monomial> = (0..spec.r())
        .flat_map(|l| (0..=spec.n()).map(move |m| Monomial::classical(l, m)))
        .collect();
    basis.sort_by_key(|m| (m.classical_degree(), *m));
    basis
}

/// Coordinates of a classical normal form in the basis of
/// [`enumerate_basis`]. Terms outside the basis are reported as an error.
pub fn basis_coordinates(basis: &[Monomial], p: &Polynomial) -> Result<Vec<BigInt>> {
    let mut coords = vec![BigInt::from(0); basis.len()];
    for (m, c) in p.terms() {
        let idx = basis
            .iter()
            .position(|b| b == m)
            .ok_or_else(|| Error::NotNormalForm(format!("term {m} is not a basis monomial")))?;
        coords[idx] = c.clone();
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(n: u32, m: &[u32]) -> BundleSpec {
        BundleSpec::new(n, m).unwrap()
    }

    fn poly(terms: &[(i64, (u32, u32, u32, u32))]) -> Polynomial {
        Polynomial::from_terms(terms.iter().map(|&(c, (a, b, x, y))| (c, Monomial::new(a, b, x, y))))
    }

    fn quantum_12() -> RingPresentation {
        build_presentation(&spec(1, &[1, 2]), RingKind::Quantum).unwrap()
    }

    /// Independent oracle: repeatedly applies random single-term rewrites.
    fn oracle(p: &Polynomial, ring: &RingPresentation, seed: u64) -> Polynomial {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ring.normal_form_randomized(p, &mut rng).unwrap()
    }

    #[test]
    fn rules_for_small_instances() {
        let q = quantum_12();
        assert_eq!(q.xi_rule().to_string(), "xi^2 -> 3*xi*h - 2*h^2 + q1");
        assert_eq!(q.h_rule().to_string(), "h^2 -> xi*q2 - 2*h*q2");

        let c = build_presentation(&spec(1, &[1, 2]), RingKind::Classical).unwrap();
        assert_eq!(c.xi_rule().to_string(), "xi^2 -> 3*xi*h - 2*h^2");
        assert_eq!(c.h_rule().to_string(), "h^2 -> 0");

        let q = build_presentation(&spec(2, &[1, 1, 1]), RingKind::Quantum).unwrap();
        assert_eq!(q.xi_rule().to_string(), "xi^3 -> 3*xi^2*h - 3*xi*h^2 + h^3 + q1");
        assert_eq!(q.h_rule().to_string(), "h^3 -> q2");
    }

    #[test]
    fn quantum_requires_fano() {
        let s = spec(1, &[1, 3]);
        assert_eq!(
            build_presentation(&s, RingKind::Quantum),
            Err(Error::NotFano { c1: 4, bound: 3 })
        );
        assert!(build_presentation(&s, RingKind::Classical).is_ok());
    }

    #[test]
    fn golden_normal_forms() {
        let q = quantum_12();
        let xi2 = Polynomial::monomial(Monomial::classical(2, 0));
        let expected = poly(&[
            (3, (1, 1, 0, 0)),
            (-2, (1, 0, 0, 1)),
            (4, (0, 1, 0, 1)),
            (1, (0, 0, 1, 0)),
        ]);
        assert_eq!(q.normal_form(&xi2).unwrap(), expected);
        for seed in 0..20 {
            assert_eq!(oracle(&xi2, &q, seed), expected);
        }

        let product = chern_leray_product(q.spec());
        assert_eq!(q.normal_form(&product).unwrap(), Polynomial::q1());

        let xi2h = Polynomial::monomial(Monomial::classical(2, 1));
        let expected = poly(&[
            (1, (1, 1, 0, 1)),
            (1, (0, 1, 1, 0)),
            (3, (0, 0, 1, 1)),
            (-2, (1, 0, 0, 2)),
            (4, (0, 1, 0, 2)),
        ]);
        assert_eq!(q.normal_form(&xi2h).unwrap(), expected);
        for seed in 0..20 {
            assert_eq!(oracle(&xi2h, &q, seed), expected);
        }

        let xih = Polynomial::monomial(Monomial::classical(1, 1));
        assert_eq!(q.normal_form(&xih).unwrap(), xih);
    }

    #[test]
    fn reduce_mod_drops_terms() {
        let q = quantum_12();
        let nf = q.normal_form(&Polynomial::monomial(Monomial::classical(2, 0))).unwrap();
        assert_eq!(reduce_mod(&nf, QVar::Q2), poly(&[(3, (1, 1, 0, 0)), (1, (0, 0, 1, 0))]));
        assert_eq!(
            reduce_mod(&nf, QVar::Q1),
            poly(&[(3, (1, 1, 0, 0)), (-2, (1, 0, 0, 1)), (4, (0, 1, 0, 1))])
        );
        let classical = poly(&[(3, (1, 1, 0, 0))]);
        assert_eq!(reduce_mod(&classical, QVar::Q1), classical);
    }

    #[test]
    fn basis_enumeration() {
        let b = enumerate_basis(&spec(1, &[1, 2]));
        let names: Vec<String> = b.iter().map(ToString::to_string).collect();
        assert_eq!(names, ["1", "h", "xi", "xi*h"]);
        assert_eq!(enumerate_basis(&spec(2, &[1, 1, 1])).len(), 9);
        let b = enumerate_basis(&spec(2, &[1, 2]));
        let names: Vec<String> = b.iter().map(ToString::to_string).collect();
        assert_eq!(names, ["1", "h", "xi", "h^2", "xi*h", "xi*h^2"]);
    }

    #[test]
    fn classical_ring_rejects_q_input() {
        let c = build_presentation(&spec(1, &[1, 2]), RingKind::Classical).unwrap();
        assert!(matches!(
            c.normal_form(&Polynomial::q1()),
            Err(Error::QuantumVariable(_))
        ));
    }

    #[test]
    fn step_guard_fires_off_the_fano_range() {
        // c1 = 4 > n + r = 3: deg q2 = 0 and the h-rule loops.
        let ring = RingPresentation::quantum_unchecked(&spec(1, &[1, 3])).with_max_steps(10_000);
        let h2 = Polynomial::monomial(Monomial::classical(0, 2));
        assert!(matches!(
            ring.normal_form(&h2),
            Err(Error::NonTermination { limit: 10_000, .. })
        ));
    }

    #[test]
    fn step_guard_respects_small_limits() {
        let q = quantum_12().with_max_steps(1);
        let xi2h = Polynomial::monomial(Monomial::classical(2, 1));
        assert!(matches!(
            q.normal_form(&xi2h),
            Err(Error::NonTermination { limit: 1, .. })
        ));
        // xi^2 h, xi h^2, xi^2 q2, h^3, h^2 q2
        assert_eq!(quantum_12().reduce(&xi2h).unwrap().steps, 5);
    }

    #[test]
    fn basis_coordinates_rejects_non_basis_terms() {
        let b = enumerate_basis(&spec(1, &[1, 2]));
        let coords = basis_coordinates(&b, &poly(&[(5, (1, 0, 0, 0))])).unwrap();
        assert_eq!(coords, vec![0.into(), 0.into(), 5.into(), 0.into()]);
        assert!(basis_coordinates(&b, &poly(&[(1, (2, 0, 0, 0))])).is_err());
    }
}
