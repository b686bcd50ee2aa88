//! The `qchern` command line, as a library so it can be driven in tests.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 domain error.

pub mod expr;

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qchern::gw::{self, InvariantQuery};
use qchern::pairing::PairingData;
use qchern::verify;
use qchern::{
    anticanonical, build_presentation, chern, enumerate_basis, intersect_curve, reduce_mod, validate_spec, BundleSpec,
    CurveClass, Polynomial, QVar, RingKind, RingPresentation,
};

use crate::expr::{parse_polynomial, ParseError};

#[derive(Parser, Debug)]
#[command(
    name = "qchern",
    version,
    about = "Quantum cohomology rings of projectivized split bundles over P^n"
)]
struct Cli {
    /// Dimension of the base P^n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    n: Option<i64>,
    /// Twists m_1,...,m_r of the bundle, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    m: Option<Vec<i64>>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Rewrite step bound per normal form.
    #[arg(long, global = true)]
    max_steps: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ring {
    Classical,
    Quantum,
}

impl From<Ring> for RingKind {
    fn from(r: Ring) -> Self {
        match r {
            Ring::Classical => RingKind::Classical,
            Ring::Quantum => RingKind::Quantum,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bundle invariants, flags, anticanonical class and grading.
    Info,
    /// The two rewrite rules of the ring.
    Present {
        #[arg(long, value_enum, default_value = "quantum")]
        ring: Ring,
    },
    /// The monomial basis.
    Basis,
    /// Normal form of an expression.
    Nf {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum, default_value = "quantum")]
        ring: Ring,
        /// Set q1 = 0 afterwards.
        #[arg(long)]
        mod_q1: bool,
        /// Set q2 = 0 afterwards.
        #[arg(long)]
        mod_q2: bool,
    },
    /// Normal form of a product.
    Mul {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, value_enum, default_value = "quantum")]
        ring: Ring,
    },
    /// Poincare pairing matrix on the basis.
    Pairing,
    /// Dual basis.
    Dual,
    /// Rule-based value of I_{a A1 + b A2}(e1, e2, e3).
    Gw {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(allow_hyphen_values = true)]
        e1: String,
        #[arg(allow_hyphen_values = true)]
        e2: String,
        #[arg(allow_hyphen_values = true)]
        e3: String,
    },
    /// Run the verification suite.
    Verify,
    /// Run the verification suite on a family of Fano bundles with m_1 = 1.
    Scan {
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        n_max: i64,
        #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
        r_max: i64,
        #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
        m_max: i64,
    },
}

/// What a command printed and how it exited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Parse(String, ParseError),
    Domain(qchern::Error),
}

impl From<qchern::Error> for Failure {
    fn from(e: qchern::Error) -> Self {
        Failure::Domain(e)
    }
}

struct Ctx {
    json: bool,
    seed: u64,
    max_steps: Option<u64>,
    out: String,
    err: String,
    code: i32,
}

impl Ctx {
    fn emit(&mut self, value: Value, text: impl FnOnce() -> String) {
        if self.json {
            self.out = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
        } else {
            self.out = text();
        }
    }

    fn ring(&self, spec: &BundleSpec, kind: RingKind) -> Result<RingPresentation, Failure> {
        let ring = build_presentation(spec, kind)?;
        Ok(match self.max_steps {
            Some(k) => ring.with_max_steps(k),
            None => ring,
        })
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        seed: cli.seed,
        max_steps: cli.max_steps,
        out: String::new(),
        err: String::new(),
        code: 0,
    };
    match dispatch(&cli, &mut ctx) {
        Ok(()) => Outcome {
            code: ctx.code,
            stdout: ctx.out,
            stderr: ctx.err,
        },
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, format!("error: {m}")),
                Failure::Parse(input, e) => (2, format!("error: cannot parse `{input}`: {e}")),
                Failure::Domain(e) => (3, format!("error: {e}")),
            };
            ctx.err.push_str(&msg);
            ctx.err.push('\n');
            Outcome {
                code,
                stdout: String::new(),
                stderr: ctx.err,
            }
        }
    }
}

fn spec_from(cli: &Cli, ctx: &mut Ctx) -> Result<BundleSpec, Failure> {
    let n = cli.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
    let m = cli.m.as_ref().ok_or_else(|| Failure::Usage("--m is required".into()))?;
    let spec = validate_spec(n, m)?;
    if m.windows(2).any(|w| w[0] > w[1]) {
        let sorted: Vec<String> = spec.m().iter().map(u32::to_string).collect();
        let _ = writeln!(ctx.err, "warning: --m reordered to {}", sorted.join(","));
    }
    Ok(spec)
}

fn parse(text: &str) -> Result<Polynomial, Failure> {
    parse_polynomial(text).map_err(|e| Failure::Parse(text.to_string(), e))
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<(), Failure> {
    if let Command::Scan { n_max, r_max, m_max } = cli.command {
        return scan(ctx, n_max, r_max, m_max);
    }
    let spec = spec_from(cli, ctx)?;
    match &cli.command {
        Command::Info => info(ctx, &spec),
        Command::Present { ring } => present(ctx, &spec, (*ring).into()),
        Command::Basis => basis(ctx, &spec),
        Command::Nf {
            expr,
            ring,
            mod_q1,
            mod_q2,
        } => {
            let p = parse(expr)?;
            let ring = ctx.ring(&spec, (*ring).into())?;
            let mut nf = ring.normal_form(&p)?;
            if *mod_q1 {
                nf = reduce_mod(&nf, QVar::Q1);
            }
            if *mod_q2 {
                nf = reduce_mod(&nf, QVar::Q2);
            }
            emit_polynomial(ctx, &spec, &ring, nf);
            Ok(())
        }
        Command::Mul { lhs, rhs, ring } => {
            let (a, b) = (parse(lhs)?, parse(rhs)?);
            let ring = ctx.ring(&spec, (*ring).into())?;
            let nf = ring.multiply(&a, &b)?;
            emit_polynomial(ctx, &spec, &ring, nf);
            Ok(())
        }
        Command::Pairing => pairing(ctx, &spec),
        Command::Dual => dual(ctx, &spec),
        Command::Gw { a, b, e1, e2, e3 } => {
            let args = [parse(e1)?, parse(e2)?, parse(e3)?];
            let class = CurveClass::new(*a, *b);
            let v = gw::evaluate(&InvariantQuery::new(&spec, class, args)?);
            ctx.emit(
                json!({ "spec": spec, "class": { "a": a, "b": b }, "invariant": v }),
                || format!("{v}\n"),
            );
            Ok(())
        }
        Command::Verify => {
            let report = verify::run_suite(&spec, ctx.seed);
            ctx.code = if report.passed { 0 } else { 1 };
            ctx.emit(serde_json::to_value(&report).expect("serializable"), || report.table());
            Ok(())
        }
        Command::Scan { .. } => unreachable!("handled above"),
    }
}

fn emit_polynomial(ctx: &mut Ctx, spec: &BundleSpec, ring: &RingPresentation, nf: Polynomial) {
    ctx.emit(json!({ "spec": spec, "ring": ring.kind(), "normal_form": nf }), || {
        format!("{nf}\n")
    });
}

fn info(ctx: &mut Ctx, spec: &BundleSpec) -> Result<(), Failure> {
    let k = anticanonical(spec);
    let (ka1, ka2) = (intersect_curve(k, CurveClass::A1), intersect_curve(k, CurveClass::A2));
    let grading = qchern::grading(spec).ok();
    let cbar: Vec<String> = chern(spec).cbar.iter().map(ToString::to_string).collect();
    let flags = spec.flags();
    ctx.emit(
        json!({
            "spec": spec,
            "r": spec.r(),
            "c1": spec.c1(),
            "dim": spec.dim(),
            "cbar": cbar,
            "flags": flags,
            "anticanonical": k,
            "anticanonical_text": k.to_string(),
            "k_dot_a1": ka1,
            "k_dot_a2": ka2,
            "grading": grading,
        }),
        || {
            let mut s = String::new();
            let _ = writeln!(s, "spec               {spec}");
            let _ = writeln!(s, "r                  {}", spec.r());
            let _ = writeln!(s, "c1                 {}", spec.c1());
            let _ = writeln!(s, "dim                {}", spec.dim());
            let _ = writeln!(s, "cbar               [{}]", cbar.join(", "));
            let _ = writeln!(s, "fano               {}", flags.fano);
            let _ = writeln!(s, "theorem_hypothesis {}", flags.theorem_hypothesis);
            let _ = writeln!(s, "qin_ruan_condition {}", flags.qin_ruan_condition);
            let _ = writeln!(s, "-K                 {k}");
            let _ = writeln!(s, "-K.A1              {ka1}");
            let _ = writeln!(s, "-K.A2              {ka2}");
            match grading {
                Some(g) => {
                    let _ = writeln!(s, "deg(q1)            {}", g.deg_q1());
                    let _ = writeln!(s, "deg(q2)            {}", g.deg_q2());
                }
                None => {
                    let _ = writeln!(s, "deg(q1)            undefined (not Fano)");
                    let _ = writeln!(s, "deg(q2)            undefined (not Fano)");
                }
            }
            s
        },
    );
    Ok(())
}

fn present(ctx: &mut Ctx, spec: &BundleSpec, kind: RingKind) -> Result<(), Failure> {
    let ring = ctx.ring(spec, kind)?;
    let rules = ring.rules();
    ctx.emit(
        json!({
            "spec": spec,
            "ring": kind,
            "rules": rules,
            "grading": ring.grading(),
        }),
        || rules.iter().map(|r| format!("{r}\n")).collect(),
    );
    Ok(())
}

fn basis(ctx: &mut Ctx, spec: &BundleSpec) -> Result<(), Failure> {
    let basis = enumerate_basis(spec);
    ctx.emit(json!({ "spec": spec, "basis": basis }), || {
        basis.iter().map(|m| format!("{m}\n")).collect()
    });
    Ok(())
}

fn pairing(ctx: &mut Ctx, spec: &BundleSpec) -> Result<(), Failure> {
    let data = PairingData::compute(spec)?;
    let det = data.determinant();
    let mut value = serde_json::to_value(&data).expect("serializable");
    value["determinant"] = json!(det.to_string());
    ctx.emit(value, || {
        let labels: Vec<String> = data.basis.iter().map(ToString::to_string).collect();
        let width = data
            .matrix
            .iter()
            .flatten()
            .map(|x| x.to_string().len())
            .chain(labels.iter().map(String::len))
            .max()
            .unwrap_or(1);
        let mut s = String::new();
        let _ = writeln!(s, "basis {}", labels.join(", "));
        for row in &data.matrix {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
        let _ = writeln!(s, "det {det}");
        s
    });
    Ok(())
}

fn dual(ctx: &mut Ctx, spec: &BundleSpec) -> Result<(), Failure> {
    let data = PairingData::compute(spec)?;
    let pairs: Vec<Value> = data
        .basis
        .iter()
        .zip(&data.duals)
        .map(|(b, d)| json!({ "basis": b, "dual": d }))
        .collect();
    ctx.emit(json!({ "spec": spec, "duals": pairs }), || {
        data.basis
            .iter()
            .zip(&data.duals)
            .map(|(b, d)| format!("dual({b}) = {d}\n"))
            .collect()
    });
    Ok(())
}

fn scan(ctx: &mut Ctx, n_max: i64, r_max: i64, m_max: i64) -> Result<(), Failure> {
    let scan = verify::scan(n_max, r_max, m_max, ctx.seed);
    if let Some(note) = &scan.note {
        if ctx.json {
            ctx.emit(serde_json::to_value(&scan).expect("serializable"), String::new);
        }
        let _ = writeln!(ctx.err, "error: {note}");
        ctx.code = 3;
        return Ok(());
    }
    ctx.code = if scan.passed() { 0 } else { 1 };
    let passed = scan.reports.iter().filter(|r| r.passed).count();
    ctx.emit(serde_json::to_value(&scan).expect("serializable"), || {
        let mut s: String = scan.reports.iter().map(|r| r.table()).collect();
        let _ = writeln!(s, "{passed}/{} instances passed", scan.reports.len());
        s
    });
    Ok(())
}
