//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qchern::gw::{self, InvariantQuery, Rule};
use qchern::pairing::{self, PairingData};
use qchern::verify::{self, CheckName, CheckStatus};
use qchern::{
    anticanonical, build_presentation, chern_leray_product, intersect_curve, reduce_mod, BundleSpec, CurveClass, Error,
    Monomial, Polynomial, QVar, RingKind, RingPresentation, Var, DEFAULT_MAX_STEPS,
};

const SEED: u64 = 20_240_601;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

/// Fano specs with `n <= 4`, `r <= 4`, `m_1 = 1 < m_2`, `m_i <= 6`.
fn theorem_family() -> Vec<BundleSpec> {
    verify::scan_family(4, 4, 6)
        .into_iter()
        .filter(|s| s.theorem_hypothesis())
        .collect()
}

fn quantum(spec: &BundleSpec) -> Result<RingPresentation, String> {
    build_presentation(spec, RingKind::Quantum).map_err(|e| format!("{spec}: {e}"))
}

fn criterion_theorem(family: &[BundleSpec]) -> Verdict {
    let start = Instant::now();
    for spec in family {
        let ring = quantum(spec)?;
        let nf = ring
            .normal_form(&chern_leray_product(spec))
            .map_err(|e| format!("{spec}: {e}"))?;
        if nf != Polynomial::q1() {
            return Err(format!("{spec}: NF = {nf}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("took {elapsed:.2?}, limit 10s"));
    }
    Ok(format!("{} instances, NF = q1 exactly, {elapsed:.2?}", family.len()))
}

fn criterion_t_coefficients(family: &[BundleSpec]) -> Verdict {
    let mut checked = 0;
    for spec in family {
        let ring = quantum(spec)?;
        let r = spec.r();
        for i in 0..=r {
            let nf = ring
                .normal_form(&Polynomial::monomial(Monomial::classical(r - i, i)))
                .map_err(|e| format!("{spec}: {e}"))?;
            let t = reduce_mod(&nf, QVar::Q2).coefficient_of(Var::Q1, 1);
            let expected = if i == 0 { Polynomial::one() } else { Polynomial::zero() };
            if t != expected {
                return Err(format!("{spec}: t_{i} = {t}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} coefficients over {} instances", family.len()))
}

fn criterion_golden() -> Verdict {
    let spec = BundleSpec::new(1, &[1, 2]).map_err(|e| e.to_string())?;
    let ring = quantum(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut nf = |m: Monomial| -> Result<String, String> {
        let p = Polynomial::monomial(m);
        let canonical = ring.normal_form(&p).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let other = ring.normal_form_randomized(&p, &mut rng).map_err(|e| e.to_string())?;
            if other != canonical {
                return Err(format!("NF({m}) is order dependent: {canonical} vs {other}"));
            }
        }
        Ok(canonical.to_string())
    };
    let expect = |what: &str, got: String, want: &str| -> Result<(), String> {
        if got == want {
            Ok(())
        } else {
            Err(format!("{what} = {got}, expected {want}"))
        }
    };
    expect(
        "NF(xi^2)",
        nf(Monomial::classical(2, 0))?,
        "3*xi*h - 2*xi*q2 + 4*h*q2 + q1",
    )?;
    expect("NF(h^2)", nf(Monomial::classical(0, 2))?, "xi*q2 - 2*h*q2")?;

    let data = PairingData::compute(&spec).map_err(|e| e.to_string())?;
    let duals: BTreeSet<String> = data.duals.iter().map(ToString::to_string).collect();
    let want: BTreeSet<String> = ["xi*h", "h", "xi - 3*h", "1"].into_iter().map(String::from).collect();
    if duals != want {
        return Err(format!("dual basis {duals:?}"));
    }
    let det = data.determinant();
    if det != BigInt::one() && det != -BigInt::one() {
        return Err(format!("pairing determinant {det}"));
    }
    let g = ring.grading().ok_or("no grading")?;
    if (g.deg_q1(), g.deg_q2()) != (2, 1) {
        return Err(format!("deg q1 = {}, deg q2 = {}", g.deg_q1(), g.deg_q2()));
    }
    let k = anticanonical(&spec);
    let (a1, a2) = (intersect_curve(k, CurveClass::A1), intersect_curve(k, CurveClass::A2));
    if (a1, a2) != (2, 1) {
        return Err(format!("-K.A1 = {a1}, -K.A2 = {a2}"));
    }
    if spec.qin_ruan_condition() || !spec.theorem_hypothesis() {
        return Err("flag mismatch".into());
    }
    Ok(format!(
        "NF(xi^2), NF(h^2), duals {{xi*h, h, xi - 3*h, 1}}, det {det}, grading (2, 1), -K.A = (2, 1), flags"
    ))
}

fn criterion_properties() -> Verdict {
    let props = [
        CheckName::Confluence,
        CheckName::BasisIdempotence,
        CheckName::GradingHomogeneity,
        CheckName::ClassicalLimit,
        CheckName::Pairing,
    ];
    let scan = verify::scan(4, 4, 6, SEED);
    if let Some(note) = scan.note {
        return Err(note);
    }
    for report in &scan.reports {
        for name in props {
            let c = report.check(name);
            if c.status != CheckStatus::Pass {
                return Err(format!("{}: {name} {:?}: {}", report.spec, c.status, c.detail));
            }
        }
    }
    Ok(format!(
        "{} instances x {} properties, {} seeded cases each",
        scan.reports.len(),
        props.len(),
        verify::DEFAULT_CASES
    ))
}

/// Basis monomials of the classical ring in degree `d`.
fn monomials_of_degree(spec: &BundleSpec, d: i64) -> Vec<Monomial> {
    if d < 0 {
        return Vec::new();
    }
    (0..spec.r())
        .filter_map(|l| {
            let m = d - i64::from(l);
            (0..=i64::from(spec.n()))
                .contains(&m)
                .then(|| Monomial::classical(l, m as u32))
        })
        .collect()
}

fn random_class_of_degree(rng: &mut ChaCha8Rng, spec: &BundleSpec, d: i64) -> Option<Polynomial> {
    let ms = monomials_of_degree(spec, d);
    if ms.is_empty() {
        return None;
    }
    let mut p = Polynomial::zero();
    while p.is_zero() {
        for m in &ms {
            if rng.random_bool(0.6) {
                p.add_term(*m, BigInt::from(rng.random_range(-3..=3)));
            }
        }
    }
    Some(p)
}

fn random_class(rng: &mut ChaCha8Rng, spec: &BundleSpec) -> Polynomial {
    loop {
        let d = rng.random_range(0..=i64::from(spec.dim()));
        if let Some(p) = random_class_of_degree(rng, spec, d) {
            return p;
        }
    }
}

fn vdim(spec: &BundleSpec, class: CurveClass) -> i64 {
    qchern::virtual_dimension(spec, class)
}

fn degree(p: &Polynomial) -> i64 {
    p.leading().map(|(m, _)| m.classical_degree() as i64).unwrap_or(0)
}

/// Completes two arguments with a third one that makes the degrees add up
/// to the virtual dimension, when such a class exists.
fn completion(
    rng: &mut ChaCha8Rng,
    spec: &BundleSpec,
    class: CurveClass,
    a: &Polynomial,
    b: &Polynomial,
) -> Polynomial {
    random_class_of_degree(rng, spec, vdim(spec, class) - degree(a) - degree(b))
        .unwrap_or_else(|| random_class(rng, spec))
}

struct Battery {
    queries: usize,
    fired: [usize; 4],
}

fn rule_index(r: Rule) -> usize {
    match r {
        Rule::R1 => 0,
        Rule::R2 => 1,
        Rule::R3 => 2,
        Rule::R4 => 3,
    }
}

fn gw_battery(spec: &BundleSpec, seed: u64) -> Result<Battery, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r, n) = (spec.r(), spec.n());
    let mut battery = Battery {
        queries: 0,
        fired: [0; 4],
    };
    let mut run = |class: CurveClass, args: [Polynomial; 3], must: Option<Rule>, expect: Option<BigInt>| {
        let q = match InvariantQuery::new(spec, class, args) {
            Ok(q) => q,
            Err(Error::InvalidQuery(_)) => return Ok(()),
            Err(e) => return Err(format!("{spec}: {e}")),
        };
        let fired = gw::firing_rules(&q);
        if gw::rules_conflict(&q) {
            return Err(format!("{spec} {class}: rules disagree {fired:?} on {:?}", q.args()));
        }
        for (rule, v) in &fired {
            battery.fired[rule_index(*rule)] += 1;
            let ok = match rule {
                Rule::R1 => expect.as_ref().is_none_or(|e| e == v),
                _ => v.is_zero(),
            };
            if !ok {
                return Err(format!("{spec} {class}: {rule} gave {v} on {:?}", q.args()));
            }
        }
        if let Some(rule) = must {
            if !fired.iter().any(|(f, _)| *f == rule) {
                return Err(format!("{spec} {class}: {rule} did not fire on {:?}", q.args()));
            }
        }
        battery.queries += 1;
        Ok(())
    };

    // R1 in every argument order, then with integer scalars.
    let pattern = [
        Polynomial::monomial(Monomial::classical(1, 0)),
        Polynomial::monomial(Monomial::classical(r - 1, 0)),
        Polynomial::monomial(Monomial::classical(r - 1, n)),
    ];
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let args = perm.map(|i| pattern[i].clone());
        run(CurveClass::A1, args, Some(Rule::R1), Some(BigInt::one()))?;
    }
    for _ in 0..6 {
        let c: [i64; 3] = [0, 1, 2].map(|_| rng.random_range(1..=5) * if rng.random_bool(0.5) { 1 } else { -1 });
        let args = [0, 1, 2].map(|i| Polynomial::term(c[i], *pattern[i].leading().unwrap().0));
        run(
            CurveClass::A1,
            args,
            Some(Rule::R1),
            Some(BigInt::from(c[0] * c[1] * c[2])),
        )?;
    }

    // R2: two arguments with xi-degrees adding up to less than r.
    for _ in 0..30 {
        let l1 = rng.random_range(0..r);
        let l2 = rng.random_range(0..r - l1);
        let a = Polynomial::term(
            rng.random_range(1..=4),
            Monomial::classical(l1, rng.random_range(0..=n)),
        );
        let b = Polynomial::term(
            rng.random_range(1..=4),
            Monomial::classical(l2, rng.random_range(0..=n)),
        );
        let c = completion(&mut rng, spec, CurveClass::A1, &a, &b);
        let mut args = [a, b, c];
        let k = rng.random_range(0..3);
        args.swap(2, k);
        run(CurveClass::A1, args, Some(Rule::R2), None)?;
    }

    // R3: one argument a multiple of xi - h, class b A2.
    let z = Polynomial::xi() - Polynomial::h();
    for _ in 0..30 {
        let class = CurveClass::new(0, rng.random_range(1..=2));
        let d = rng.random_range(0..i64::from(spec.dim()));
        let g = random_class_of_degree(&mut rng, spec, d).unwrap_or_else(Polynomial::one);
        let a = &z * &g;
        let b = random_class(&mut rng, spec);
        let c = completion(&mut rng, spec, class, &a, &b);
        let mut args = [a, b, c];
        let k = rng.random_range(0..3);
        args.swap(0, k);
        run(class, args, Some(Rule::R3), None)?;
    }

    // R4 and unconstrained queries over a spread of curve classes.
    let classes = [
        CurveClass::A1,
        CurveClass::A2,
        CurveClass::new(0, 2),
        CurveClass::new(1, 1),
        CurveClass::new(2, 0),
    ];
    for i in 0..60 {
        let class = classes[rng.random_range(0..classes.len())];
        let args = [0, 1, 2].map(|_| random_class(&mut rng, spec));
        let sum: i64 = args.iter().map(degree).sum();
        let must = (i < 30 && sum != vdim(spec, class)).then_some(Rule::R4);
        run(class, args, must, None)?;
    }
    Ok(battery)
}

fn r1_cross_check(spec: &BundleSpec) -> Result<(), String> {
    let ring = quantum(spec)?;
    let classical = build_presentation(spec, RingKind::Classical).map_err(|e| e.to_string())?;
    let r = spec.r();
    let nf = ring
        .normal_form(&(Polynomial::xi() * Polynomial::monomial(Monomial::classical(r - 1, 0))))
        .map_err(|e| e.to_string())?;
    let t0 = reduce_mod(&nf, QVar::Q2).coefficient_of(Var::Q1, 1);
    let top = Polynomial::monomial(pairing::top_class(spec));
    let paired = pairing::pair(&classical, &t0, &top).map_err(|e| e.to_string())?;
    let q = InvariantQuery::new(
        spec,
        CurveClass::A1,
        [
            Polynomial::xi(),
            Polynomial::monomial(Monomial::classical(r - 1, 0)),
            top,
        ],
    )
    .map_err(|e| e.to_string())?;
    let v = gw::evaluate(&q);
    if t0 != Polynomial::one() || !paired.is_one() || v.value() != Some(&paired) || v.rule != Some(Rule::R1) {
        return Err(format!("{spec}: t_0 = {t0}, pairing {paired}, rule gives {v}"));
    }
    Ok(())
}

fn criterion_gw(family: &[BundleSpec]) -> Verdict {
    let mut total = 0;
    let mut fired = [0usize; 4];
    let mut fewest = usize::MAX;
    for (i, spec) in family.iter().enumerate() {
        r1_cross_check(spec)?;
        let b = gw_battery(spec, SEED + i as u64)?;
        if b.queries < 100 {
            return Err(format!("{spec}: only {} valid queries", b.queries));
        }
        fewest = fewest.min(b.queries);
        total += b.queries;
        for (f, k) in fired.iter_mut().zip(b.fired) {
            *f += k;
        }
    }
    Ok(format!(
        "{total} queries over {} instances (min {fewest}); fired R1 {} R2 {} R3 {} R4 {}; no conflicts",
        family.len(),
        fired[0],
        fired[1],
        fired[2],
        fired[3]
    ))
}

fn criterion_negative(family: &[BundleSpec]) -> Verdict {
    let bad = BundleSpec::new(1, &[1, 3]).map_err(|e| e.to_string())?;
    match build_presentation(&bad, RingKind::Quantum) {
        Err(Error::NotFano { c1: 4, bound: 3 }) => {}
        other => return Err(format!("(1,[1,3]) quantum construction gave {other:?}")),
    }
    let mut max_steps = 0;
    for spec in family {
        let ring = quantum(spec)?;
        let r = spec.r();
        let mut inputs = vec![chern_leray_product(spec)];
        inputs.extend((0..=r).map(|i| Polynomial::monomial(Monomial::classical(r - i, i))));
        for p in &inputs {
            match ring.reduce(p) {
                Ok(red) if red.steps <= DEFAULT_MAX_STEPS => max_steps = max_steps.max(red.steps),
                Ok(red) => return Err(format!("{spec}: {} steps on {p}", red.steps)),
                Err(e) => return Err(format!("{spec}: {e} on {p}")),
            }
        }
    }
    Ok(format!(
        "NotFano for (1,[1,3]); step guard idle over {} instances (max {max_steps} of {DEFAULT_MAX_STEPS} steps)",
        family.len()
    ))
}

fn main() {
    let family = theorem_family();
    let criteria: [Criterion; 6] = [
        ("1 theorem reproduction", Box::new(|| criterion_theorem(&family))),
        ("2 t-coefficients", Box::new(|| criterion_t_coefficients(&family))),
        ("3 golden instance (n=1, m=[1,2])", Box::new(criterion_golden)),
        ("4 property suites", Box::new(criterion_properties)),
        ("5 GW pattern rules", Box::new(|| criterion_gw(&family))),
        ("6 negative path", Box::new(|| criterion_negative(&family))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
