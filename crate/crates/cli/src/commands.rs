use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use sgl_core::cocycles::{
    self, compare_psi_restriction, decompose_in_ackp, theorem_table, verify_cocycle_condition, verify_mumford,
    verify_oracle, verify_psi_cocycle_condition, virasoro_factor, Violation,
};
use sgl_core::krichever::{check_chi, krichever_point, stabilizer, KricheverDatum};
use sgl_core::laurent::{rat, ratio};
use sgl_core::sampling::{random_diffop, random_triples, SampleShape};
use sgl_core::{BasisTerm, CocycleKind, LaurentPoly};

use crate::limits::*;
use crate::parse::{parse_degrees, parse_expr, ParseError};
use crate::report::{Entry, Format, Report, TableLayout, ViolationRecord};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] sgl_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "sgl", version, about = "Exact cocycle computations for first-order differential operators on C((z))^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,

    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps (output does not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Print elapsed wall time to stderr.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Closed,
    VirN,
    Vir,
    Trace,
    Psi,
    Alpha1,
    Alpha2,
    Alpha3,
}

impl KindArg {
    fn resolve(self, n: usize, beta: i64) -> CocycleKind {
        match self {
            KindArg::Closed => CocycleKind::Closed { n, beta },
            KindArg::VirN => CocycleKind::VirN { n, beta },
            KindArg::Vir => CocycleKind::Vir { beta },
            KindArg::Trace => CocycleKind::Trace { n, beta },
            KindArg::Psi => CocycleKind::Psi { n },
            KindArg::Alpha1 => CocycleKind::Alpha1,
            KindArg::Alpha2 => CocycleKind::Alpha2,
            KindArg::Alpha3 => CocycleKind::Alpha3,
        }
    }

    fn uses_beta(self) -> bool {
        matches!(self, KindArg::Closed | KindArg::VirN | KindArg::Vir | KindArg::Trace)
    }

    fn rank_one_only(self) -> bool {
        matches!(self, KindArg::Alpha1 | KindArg::Alpha2 | KindArg::Alpha3)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lie bracket of two operator expressions.
    Bracket {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Twisted action of an operator on a vector of Laurent polynomials (one argument per component).
    Apply {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        beta: i64,
        #[arg(allow_hyphen_values = true)]
        op: String,
        #[arg(required = true, allow_hyphen_values = true)]
        vector: Vec<String>,
    },
    /// Value of a cocycle on two operator expressions.
    Cocycle {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        beta: i64,
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// The four rows vir_{n,1}, c_{n,0}, c_{n,1}, c_{n,beta} on a degree window.
    Table {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        beta: i64,
        #[arg(long, default_value_t = DEFAULT_RANGE)]
        range: i64,
    },
    /// Verification sweeps.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Index and stabilizer of the Krichever point of O(d_1) + ... + O(d_n) on P^1.
    Krichever {
        #[arg(long, allow_hyphen_values = true)]
        degrees: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// c_{n,b} = b c_{n,1} + (1-b) c_{n,0} + 6nb(b-1) vir_1 on every basis pair, closed form and trace.
    Mumford {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_RANGE)]
        range: i64,
    },
    /// Antisymmetry and the 2-cocycle identity on random triples.
    CocycleCondition {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<i64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Jacobi identity of the bracket on random triples.
    Jacobi {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Constant relating Psi restricted to first order and c_{n,0}.
    PsiRestriction {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RANGE)]
        range: i64,
    },
    /// Coefficients of c_{1,b} in the residue cocycles alpha_1..alpha_3.
    Ackp {
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_RANGE)]
        range: i64,
    },
    /// Closed form against the trace cocycle on every basis pair.
    Oracle {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_RANGE)]
        range: i64,
    },
    /// Index = n + d and stabilizer = C[z^-1] for split bundles on P^1.
    KricheverChi {
        /// Comma-separated degree vector; may be repeated.
        #[arg(long, allow_hyphen_values = true)]
        degrees: Vec<String>,
    },
}

fn usage<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Usage(msg.into()))
}

fn check_rank(n: usize) -> Result<usize, RunError> {
    if !(1..=MAX_RANK).contains(&n) {
        return usage(format!("--n must be in 1..={MAX_RANK}, got {n}"));
    }
    Ok(n)
}

fn check_beta(beta: i64) -> Result<i64, RunError> {
    if beta.abs() > MAX_ABS_BETA {
        return usage(format!("--beta must satisfy |beta| <= {MAX_ABS_BETA}, got {beta}"));
    }
    Ok(beta)
}

fn check_range(range: i64, min: i64) -> Result<i64, RunError> {
    if !(min..=MAX_RANGE).contains(&range) {
        return usage(format!("--range must be in {min}..={MAX_RANGE}, got {range}"));
    }
    Ok(range)
}

fn check_samples(samples: usize) -> Result<usize, RunError> {
    if samples == 0 || samples > MAX_SAMPLES {
        return usage(format!("--samples must be in 1..={MAX_SAMPLES}, got {samples}"));
    }
    Ok(samples)
}

fn ranks(n: Option<usize>) -> Result<Vec<usize>, RunError> {
    match n {
        Some(n) => Ok(vec![check_rank(n)?]),
        None => Ok(DEFAULT_RANKS.collect()),
    }
}

fn betas(beta: Option<i64>) -> Result<Vec<i64>, RunError> {
    match beta {
        Some(b) => Ok(vec![check_beta(b)?]),
        None => Ok(DEFAULT_BETAS.collect()),
    }
}

fn record(context: &str, v: Violation) -> ViolationRecord {
    ViolationRecord {
        context: context.to_string(),
        lhs: v.lhs.to_string(),
        rhs: v.rhs.to_string(),
        expected: v.expected.to_string(),
        actual: v.actual.to_string(),
        note: v.note,
    }
}

fn sample_violation(context: String, index: usize, note: &str) -> ViolationRecord {
    ViolationRecord {
        context,
        lhs: format!("sample {index}"),
        rhs: String::new(),
        expected: "0".into(),
        actual: "nonzero".into(),
        note: note.into(),
    }
}

fn opt_json<T: Into<serde_json::Value>>(v: Option<T>) -> serde_json::Value {
    v.map_or(serde_json::Value::Null, Into::into)
}

/// Executes a parsed command. Usage and parse errors map to exit code 2 in the binary.
pub fn run(cli: &Cli) -> Result<Report, RunError> {
    match &cli.command {
        Command::Bracket { n, lhs, rhs } => {
            let n = check_rank(*n)?;
            let a = parse_expr(lhs, n)?.to_op()?;
            let b = parse_expr(rhs, n)?.to_op()?;
            let value = a.bracket(&b)?.to_basis();
            let mut r = Report::new("bracket").param("n", n);
            r.entries.push(Entry::new(lhs.trim(), rhs.trim(), value));
            Ok(r)
        }
        Command::Apply { n, beta, op, vector } => {
            let n = check_rank(*n)?;
            let beta = check_beta(*beta)?;
            if vector.len() != n {
                return usage(format!("expected {n} vector components, got {}", vector.len()));
            }
            let d = parse_expr(op, n)?.to_op()?;
            let v = vector.iter().map(|s| s.parse::<LaurentPoly>()).collect::<Result<Vec<_>, _>>()?;
            let out = d.apply(&v, beta)?;
            let mut r = Report::new("apply").param("n", n).param("beta", beta);
            for (i, (input, image)) in v.iter().zip(out).enumerate() {
                r.entries.push(Entry::new(format!("component {}", i + 1), input.to_string(), image));
            }
            Ok(r)
        }
        Command::Cocycle { kind, n, beta, lhs, rhs } => {
            let n = check_rank(*n)?;
            let beta = check_beta(*beta)?;
            if kind.rank_one_only() && n != 1 {
                return usage("alpha cocycles are defined in rank 1 only");
            }
            let k = kind.resolve(n, beta);
            let a = parse_expr(lhs, n)?.to_op()?;
            let b = parse_expr(rhs, n)?.to_op()?;
            let value = k.eval_ops(&a, &b)?;
            let mut r = Report::new("cocycle")
                .param("kind", k.name())
                .param("n", n)
                .param("beta", opt_json(k.beta()));
            r.entries.push(Entry::new(lhs.trim(), rhs.trim(), value).with_kind(k.to_string()));
            Ok(r)
        }
        Command::Table { n, beta, range } => table(check_rank(*n)?, check_beta(*beta)?, check_range(*range, 0)?),
        Command::Verify { check } => verify(check),
        Command::Krichever { degrees } => {
            let datum = KricheverDatum::new(parse_degrees(degrees)?)?;
            let w = krichever_point(&datum, datum.default_window())?;
            let s = stabilizer(&w)?;
            let label = format!("({degrees})");
            let mut r = Report::new("krichever").param("degrees", datum.degrees.clone()).param("genus", 0);
            r.entries.push(Entry::new(label.clone(), "index", w.index()));
            r.entries.push(Entry::new(label.clone(), "chi", datum.euler_characteristic()));
            r.entries.push(Entry::new(label.clone(), "stabilizer index", s.index));
            let stab = if s.is_inverse_polynomials { "C[z^-1]" } else { "other" };
            r.entries.push(Entry::new(label, "stabilizer", stab));
            if w.index() != datum.euler_characteristic() || !s.is_inverse_polynomials || s.index != 1 {
                r.violations.push(ViolationRecord {
                    context: "krichever".into(),
                    lhs: format!("{:?}", datum.degrees),
                    rhs: String::new(),
                    expected: format!("index {} and stabilizer C[z^-1]", datum.euler_characteristic()),
                    actual: format!("index {} and stabilizer {stab}", w.index()),
                    note: String::new(),
                });
            }
            Ok(r.settle())
        }
    }
}

fn table(n: usize, beta: i64, range: i64) -> Result<Report, RunError> {
    let rows = theorem_table(n, beta, range)?;
    let mut r = Report::new("table").param("n", n).param("beta", beta).param("range", range);
    let mut layout = TableLayout::default();
    for t in &rows {
        let name = t.kind.to_string();
        layout.row_names.push(name.clone());
        layout.symbolic.push([0, 1, 2].map(|f| cocycles::symbolic_cell(t.kind, f)));
        for ((a, b), v) in t.entries() {
            r.entries.push(Entry::new(a.to_string(), b.to_string(), v).with_kind(name.clone()));
        }
    }
    let mut pairs: Vec<(BasisTerm, BasisTerm)> = rows.iter().flat_map(|t| t.entries().map(|(p, _)| *p)).collect();
    pairs.sort();
    pairs.dedup();
    for (a, b) in pairs {
        let vals = rows.iter().map(|t| t.get(a, b).to_string()).collect();
        layout.values.push((a.to_string(), b.to_string(), vals));
    }
    r.layout = Some(layout);
    Ok(r)
}

fn all_kinds(n: usize) -> Vec<KindArg> {
    let mut kinds = vec![KindArg::Closed, KindArg::VirN, KindArg::Vir, KindArg::Trace, KindArg::Psi];
    if n == 1 {
        kinds.extend([KindArg::Alpha1, KindArg::Alpha2, KindArg::Alpha3]);
    }
    kinds
}

fn verify(check: &Check) -> Result<Report, RunError> {
    match check {
        Check::Mumford { n, beta, range } => {
            let range = check_range(*range, 2)?;
            let mut r = Report::new("verify mumford")
                .param("n", opt_json(*n))
                .param("beta", opt_json(*beta))
                .param("range", range);
            for n in ranks(*n)? {
                for beta in betas(*beta)? {
                    let rep = verify_mumford(n, beta, range)?;
                    let ctx = format!("n={n} beta={beta}");
                    r.entries.push(Entry::new(ctx.clone(), "pairs checked", rep.pairs_checked));
                    let kind = CocycleKind::Closed { n, beta };
                    let spot = kind.basis_value(n, BasisTerm::L(2), BasisTerm::L(-2))?;
                    r.entries.push(Entry::new("L(2)", "L(-2)", spot).with_kind(kind.to_string()));
                    r.violations.extend(rep.violations.into_iter().map(|v| record(&ctx, v)));
                }
            }
            Ok(r.settle())
        }
        Check::CocycleCondition { kind, n, beta, samples, seed } => {
            let samples = check_samples(*samples)?;
            let mut r = Report::new("verify cocycle-condition")
                .param("kind", opt_json(kind.map(|k| format!("{k:?}").to_lowercase())))
                .param("n", opt_json(*n))
                .param("beta", opt_json(*beta))
                .param("samples", samples)
                .param("seed", *seed);
            let shape = SampleShape::default();
            let mut config = 0u64;
            for n in ranks(*n)? {
                let kinds = match kind {
                    Some(k) if k.rank_one_only() && n != 1 => return usage("alpha cocycles are defined in rank 1 only"),
                    Some(k) => vec![*k],
                    None => all_kinds(n),
                };
                for k in kinds {
                    let bs = if k.uses_beta() { betas(*beta)? } else { vec![0] };
                    for b in bs {
                        config += 1;
                        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(config));
                        let ck = k.resolve(n, b);
                        let rep = if k == KindArg::Psi {
                            let triples: Vec<_> = (0..samples)
                                .map(|_| {
                                    let small = SampleShape { support: 4, max_exp: 4 };
                                    [0, 1, 2].map(|_| random_diffop(&mut rng, n, 2, small))
                                })
                                .collect();
                            verify_psi_cocycle_condition(&triples)?
                        } else {
                            verify_cocycle_condition(ck, &random_triples(&mut rng, n, samples, shape))?
                        };
                        let ctx = format!("{ck} n={n}");
                        r.entries.push(Entry::new(ctx.clone(), "samples", rep.samples).with_kind(ck.name()));
                        for i in &rep.antisymmetry_failures {
                            r.violations.push(sample_violation(ctx.clone(), *i, "c(x,y) + c(y,x)"));
                        }
                        for i in &rep.cocycle_failures {
                            r.violations.push(sample_violation(ctx.clone(), *i, "c([x,y],z) + cyclic"));
                        }
                    }
                }
            }
            Ok(r.settle())
        }
        Check::Jacobi { n, samples, seed } => {
            let samples = check_samples(*samples)?;
            let mut r = Report::new("verify jacobi")
                .param("n", opt_json(*n))
                .param("samples", samples)
                .param("seed", *seed);
            for n in ranks(*n)? {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
                let triples = random_triples(&mut rng, n, samples, SampleShape::default());
                let ctx = format!("n={n}");
                for (i, [x, y, z]) in triples.iter().enumerate() {
                    let s = x
                        .bracket(y)?
                        .bracket(z)?
                        .add(&y.bracket(z)?.bracket(x)?)?
                        .add(&z.bracket(x)?.bracket(y)?)?;
                    if !s.is_zero() {
                        r.violations.push(sample_violation(ctx.clone(), i, "[[x,y],z] + cyclic"));
                    }
                }
                r.entries.push(Entry::new(ctx, "samples", samples));
            }
            Ok(r.settle())
        }
        Check::PsiRestriction { n, range } => {
            let range = check_range(*range, 1)?;
            let mut r = Report::new("verify psi-restriction")
                .param("n", opt_json(*n))
                .param("range", range);
            let mut global: Option<sgl_core::Rational> = None;
            for n in ranks(*n)? {
                let rep = compare_psi_restriction(n, range)?;
                let ctx = format!("n={n}");
                r.entries.push(Entry::new(ctx.clone(), "constrained pairs", rep.constrained_pairs));
                r.entries.push(Entry::new(ctx.clone(), "skipped pairs", rep.skipped_pairs));
                match (&rep.sigma, &rep.conflict) {
                    (Some(s), _) => {
                        r.entries.push(Entry::new(ctx.clone(), "sigma", s));
                        match &global {
                            None => global = Some(s.clone()),
                            Some(g) if g != s => r.violations.push(ViolationRecord {
                                context: ctx,
                                lhs: String::new(),
                                rhs: String::new(),
                                expected: g.to_string(),
                                actual: s.to_string(),
                                note: "sigma differs between ranks".into(),
                            }),
                            _ => {}
                        }
                    }
                    (None, Some((a, b, p, c))) => r.violations.push(ViolationRecord {
                        context: ctx,
                        lhs: a.to_string(),
                        rhs: b.to_string(),
                        expected: format!("psi = sigma * {c}"),
                        actual: p.to_string(),
                        note: "no single constant".into(),
                    }),
                    (None, None) => r.entries.push(Entry::new(ctx, "sigma", "unconstrained")),
                }
            }
            if let Some(s) = &global {
                r.notes.push(format!(
                    "Psi restricted to first-order operators equals sigma * c_{{n,0}} with sigma = {s} on every basis pair; \
                     the two cocycles coincide only up to this overall constant."
                ));
            }
            Ok(r.settle())
        }
        Check::Ackp { beta, range } => {
            let range = check_range(*range, 2)?;
            let mut r = Report::new("verify ackp").param("beta", opt_json(*beta)).param("range", range);
            for beta in betas(*beta)? {
                let rep = decompose_in_ackp(beta, range)?;
                let ctx = format!("beta={beta}");
                r.violations.extend(rep.violations.iter().cloned().map(|v| record(&ctx, v)));
                let expected = [
                    -virasoro_factor(beta) / rat(6),
                    ratio(1 - 2 * beta, 2),
                    rat(1),
                ];
                if let Some(coeffs) = &rep.coefficients {
                    for (i, (a, e)) in coeffs.iter().zip(&expected).enumerate() {
                        r.entries.push(Entry::new(ctx.clone(), format!("a{}", i + 1), a));
                        if a != e {
                            r.violations.push(ViolationRecord {
                                context: ctx.clone(),
                                lhs: format!("a{}", i + 1),
                                rhs: String::new(),
                                expected: e.to_string(),
                                actual: a.to_string(),
                                note: "coefficient differs from -(1-6b+6b^2)/6, (1-2b)/2, 1".into(),
                            });
                        }
                    }
                } else if rep.violations.is_empty() {
                    r.violations.push(ViolationRecord {
                        context: ctx,
                        lhs: String::new(),
                        rhs: String::new(),
                        expected: "consistent decomposition".into(),
                        actual: "none".into(),
                        note: String::new(),
                    });
                }
            }
            Ok(r.settle())
        }
        Check::Oracle { n, beta, range } => {
            let range = check_range(*range, 0)?;
            let mut r = Report::new("verify oracle")
                .param("n", opt_json(*n))
                .param("beta", opt_json(*beta))
                .param("range", range);
            for n in ranks(*n)? {
                for beta in betas(*beta)? {
                    let ctx = format!("n={n} beta={beta}");
                    let pairs = BasisTerm::window(n, range).len().pow(2);
                    r.entries.push(Entry::new(ctx.clone(), "pairs checked", pairs));
                    r.violations.extend(verify_oracle(n, beta, range)?.into_iter().map(|v| record(&ctx, v)));
                }
            }
            Ok(r.settle())
        }
        Check::KricheverChi { degrees } => {
            let vectors: Vec<Vec<i64>> = if degrees.is_empty() {
                vec![vec![3], vec![-1], vec![0, 0], vec![2, -1], vec![1, 1, 1]]
            } else {
                degrees.iter().map(|d| parse_degrees(d)).collect::<Result<_, _>>()?
            };
            let mut r = Report::new("verify krichever-chi")
                .param("degrees", serde_json::to_value(&vectors).expect("serializable"))
                .param("genus", 0);
            for d in vectors {
                let datum = KricheverDatum::new(d.clone())?;
                let chi = check_chi(&datum)?;
                let w = krichever_point(&datum, datum.default_window())?;
                let s = stabilizer(&w)?;
                let label = format!("{d:?}");
                r.entries.push(Entry::new(label.clone(), "index", chi.index));
                r.entries.push(Entry::new(label.clone(), "chi", chi.chi));
                r.entries.push(Entry::new(label.clone(), "stabilizer index", s.index));
                if !chi.passed() {
                    r.violations.push(ViolationRecord {
                        context: label.clone(),
                        lhs: "index".into(),
                        rhs: "chi".into(),
                        expected: chi.chi.to_string(),
                        actual: chi.index.to_string(),
                        note: String::new(),
                    });
                }
                if !s.is_inverse_polynomials || s.index != 1 || !s.closed_under_products {
                    r.violations.push(ViolationRecord {
                        context: label,
                        lhs: "stabilizer".into(),
                        rhs: String::new(),
                        expected: "C[z^-1], index 1".into(),
                        actual: format!("exponents {:?}, index {}", s.exponents, s.index),
                        note: String::new(),
                    });
                }
            }
            Ok(r.settle())
        }
    }
}
