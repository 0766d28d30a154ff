use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hfsplice_core::cfd_builder::{build_cfd, extremal_subspaces, extremal_violations};
use hfsplice_core::cfk_complex::{CfkComplex, CfkJson, KnotNormalForm};
use hfsplice_core::knot_library;
use hfsplice_core::pairing::{box_tensor, boundedness_bound, default_budget, splice_with_budget, SpliceReport};
use hfsplice_core::type_a::{check_ainfty, extremal_violations_a, round_trip, ImplicitTypeA, RoundTrip};
use hfsplice_core::type_d::{format_half, label_text, TypeDJson, TypeDStructure};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hfsplice", version, about = "hat-HF of spliced knot complements via bordered Floer homology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of hat-HF of the splice of two knot complements.
    Splice {
        /// Built-in fixture name or path to a JSON file.
        k1: String,
        /// Second input, same forms as the first.
        k2: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Longest label sequence to enumerate in the box differential.
        #[arg(long)]
        budget: Option<usize>,
        /// Write the box complex as Graphviz to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Summary of the type D structure of a knot complement.
    Cfd {
        /// Built-in fixture name or path to a JSON file.
        knot: String,
        /// Print the structure as JSON.
        #[arg(long)]
        json: bool,
        /// Write the structure as Graphviz to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Nonzero multiplications of the induced type A module.
    Cfa {
        /// Built-in fixture name or path to a JSON file.
        knot: String,
        /// Longest input sequence to evaluate.
        #[arg(long, default_value_t = 8)]
        max_ainfty_len: usize,
        /// Write the multiplications as Graphviz to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the validation suites on one input.
    Check {
        /// Built-in fixture name or path to a JSON file.
        knot: String,
        /// Longest sequence used for the A-infinity relations.
        #[arg(long, default_value_t = 8)]
        max_ainfty_len: usize,
        /// Print the suite results as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write a Graphviz diagram.
    ExportDot {
        #[arg(value_enum)]
        kind: DotKind,
        /// One input for `cfd`/`cfa`, two for `box`.
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<String>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Longest sequence evaluated for `cfa`.
        #[arg(long, default_value_t = 8)]
        max_ainfty_len: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DotKind {
    Cfd,
    Cfa,
    Box,
}

enum Input {
    Knot { complex: CfkComplex, nf: KnotNormalForm },
    Raw(TypeDStructure),
}

impl Input {
    fn cfd(&self) -> Result<TypeDStructure> {
        Ok(match self {
            Input::Knot { nf, .. } => build_cfd(nf)?.structure,
            Input::Raw(d) => d.clone(),
        })
    }

    fn genus(&self) -> u32 {
        match self {
            Input::Knot { nf, .. } => nf.genus().unsigned_abs(),
            Input::Raw(d) => d
                .alexander2()
                .and_then(|a| a.iter().map(|x| x.unsigned_abs().div_ceil(2)).max())
                .unwrap_or(0),
        }
    }
}

fn load(arg: &str) -> Result<Input> {
    let path = Path::new(arg);
    if !path.exists() {
        let entry = knot_library::get(arg)?;
        return Ok(match entry.payload {
            knot_library::Payload::Complex(complex) => {
                let nf = complex.simplify()?;
                Input::Knot { complex, nf }
            }
            knot_library::Payload::TypeD(d) => Input::Raw(d),
        });
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{arg}: malformed JSON"))?;
    if value.get("arrows").is_some() {
        let doc: TypeDJson = serde_path_to_error::deserialize(value).with_context(|| format!("{arg}: not a type D structure"))?;
        Ok(Input::Raw(TypeDStructure::from_json(&doc).with_context(|| arg.to_string())?))
    } else {
        let doc: CfkJson = serde_path_to_error::deserialize(value).with_context(|| format!("{arg}: not a knot complex"))?;
        let complex = CfkComplex::from_json(&doc).with_context(|| arg.to_string())?;
        let report = complex.validate();
        if !report.passed() {
            bail!("{arg}: {}", report.failures().join("; "));
        }
        let nf = complex.simplify().with_context(|| arg.to_string())?;
        Ok(Input::Knot { complex, nf })
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn emit_json(text: &str) {
    emit(&format!("{text}\n"));
}

fn format_report(r: &SpliceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "total rank       {}", r.total_rank);
    match (r.lower_bound, r.lower_bound_holds) {
        (Some(lb), Some(ok)) => {
            let _ = writeln!(out, "lower bound      {lb} ({})", if ok { "holds" } else { "VIOLATED" });
        }
        _ => {
            let _ = writeln!(out, "lower bound      skipped (trivial knot)");
        }
    }
    if !r.bold_generators.is_empty() {
        let _ = writeln!(out, "surviving        {}", r.bold_generators.join(", "));
    }
    let _ = writeln!(out, "s      dim C_s");
    for (s, d) in &r.ranks_by_grading {
        let _ = writeln!(out, "{s:<6} {d}");
    }
    out
}

fn splice(k1: &str, k2: &str, json: bool, budget: Option<usize>, dot: Option<&Path>) -> Result<()> {
    let (a, b) = (load(k1)?, load(k2)?);
    if let (Input::Knot { nf: n1, .. }, Input::Knot { nf: n2, .. }) = (&a, &b) {
        let s = splice_with_budget(n1, n2, budget.unwrap_or_else(|| default_budget(n1, n2)))?;
        if let Some(p) = dot {
            let bold: Vec<usize> = s
                .report
                .bold_generators
                .iter()
                .filter_map(|n| s.complex.index_of(n))
                .collect();
            write_out(Some(p), &s.complex.to_dot(&format!("{k1} x {k2}"), &bold))?;
        }
        if json {
            emit_json(&serde_json::to_string_pretty(&s.report)?);
        } else {
            emit(&format_report(&s.report));
        }
        return Ok(());
    }
    let budget = budget.unwrap_or_else(|| boundedness_bound(a.genus(), b.genus()) + 4);
    let module = ImplicitTypeA::new(a.cfd()?)?;
    let complex = box_tensor(&module, &b.cfd()?, budget)?;
    let report = SpliceReport {
        total_rank: complex.homology_rank()?,
        ranks_by_grading: complex.summand_dims(),
        lower_bound: None,
        lower_bound_holds: None,
        bold_generators: Vec::new(),
    };
    if let Some(p) = dot {
        write_out(Some(p), &complex.to_dot(&format!("{k1} x {k2}"), &[]))?;
    }
    if json {
        emit_json(&serde_json::to_string_pretty(&report)?);
    } else {
        emit(&format_report(&report));
    }
    Ok(())
}

fn cfd(knot: &str, json: bool, dot: Option<&Path>) -> Result<()> {
    let d = load(knot)?.cfd()?;
    if let Some(p) = dot {
        write_out(Some(p), &d.to_dot(knot))?;
    }
    if json {
        emit_json(&serde_json::to_string_pretty(&d.to_json())?);
        return Ok(());
    }
    let mut out = String::new();
    let _ = writeln!(out, "{} generators ({} in i0, {} in i1)", d.dim(), d.dim0(), d.dim1());
    for i in 0..d.dim() {
        let grading = d.alexander2().map(|a| format_half(a[i])).unwrap_or_default();
        let _ = writeln!(out, "  {:<8} {}  {}", d.name(i), d.idempotent(i), grading);
    }
    for (s, l, t) in d.arrows() {
        let _ = writeln!(out, "  {} --D{}--> {}", d.name(s), label_text(l), d.name(t));
    }
    emit(&out);
    Ok(())
}

fn cfa(knot: &str, max_len: usize, dot: Option<&Path>) -> Result<()> {
    let a = ImplicitTypeA::new(load(knot)?.cfd()?)?;
    if let Some(p) = dot {
        write_out(Some(p), &a.to_dot(knot, max_len))?;
    }
    let mut out = String::new();
    for (s, rhos, t) in a.multiplications(max_len) {
        let args: Vec<String> = rhos.iter().map(|r| format!("r{}", r.label())).collect();
        let _ = writeln!(out, "m{}({}, {}) -> {}", rhos.len() + 1, a.name(s), args.join(", "), a.name(t));
    }
    emit(&out);
    Ok(())
}

#[derive(Serialize)]
struct SuiteResult {
    suite: &'static str,
    passed: bool,
    detail: String,
}

fn check(knot: &str, max_len: usize, json: bool) -> Result<bool> {
    let input = load(knot)?;
    let mut results = Vec::new();
    let mut push = |suite, passed, detail: String| results.push(SuiteResult { suite, passed, detail });
    if let Input::Knot { complex, nf } = &input {
        let v = complex.validate();
        push("complex", v.passed(), v.failures().join("; "));
        let nf_ok = nf.validate();
        push(
            "normal form",
            nf_ok.is_ok(),
            match nf_ok {
                Ok(()) => format!("n={} tau={} epsilon={}", nf.n, nf.tau, nf.epsilon),
                Err(e) => e.to_string(),
            },
        );
    }
    let d = input.cfd()?;
    let s = d.check_structure();
    push("type D structure", s.passed() && d.is_reduced(), s.describe(&d).join("; "));
    let a = ImplicitTypeA::new(d.clone())?;
    let ai = check_ainfty(&a, max_len);
    push(
        "A-infinity relations",
        ai.passed(),
        format!("{} sequences, {} failures", ai.sequences_checked, ai.failures.len()),
    );
    let (ok, detail) = match round_trip(&d)? {
        RoundTrip::Exact => (true, "exact".to_string()),
        RoundTrip::ExtraTripleComposite => (true, "equal up to D1 D2 D3 added to the r123 coefficient".to_string()),
        RoundTrip::Mismatch(labels) => (
            false,
            format!(
                "differs in {}",
                labels.into_iter().map(label_text).collect::<Vec<_>>().join(", ")
            ),
        ),
    };
    push("DD round trip", ok, detail);
    if let Input::Knot { nf, .. } = &input {
        let layout = build_cfd(nf)?;
        if layout.genus > 0 {
            let (b, v, h) = extremal_subspaces(&layout)?;
            let n = 8 * layout.genus as usize + 4;
            let mut bad: Vec<String> = extremal_violations(&layout.structure, &b, &v, &h, n)
                .into_iter()
                .chain(extremal_violations_a(&a, &b, &v, n))
                .map(|x| format!("{} at {}", x.rule, layout.structure.name(x.generator)))
                .collect();
            bad.dedup();
            push("extremal subspaces", bad.is_empty(), bad.join("; "));
        }
    }
    let all = results.iter().all(|r| r.passed);
    if json {
        emit_json(&serde_json::to_string_pretty(&results)?);
    } else {
        let mut out = String::new();
        for r in &results {
            let mark = if r.passed { "ok  " } else { "FAIL" };
            if r.detail.is_empty() {
                let _ = writeln!(out, "{mark} {}", r.suite);
            } else {
                let _ = writeln!(out, "{mark} {}: {}", r.suite, r.detail);
            }
        }
        emit(&out);
    }
    Ok(all)
}

fn export_dot(kind: DotKind, inputs: &[String], output: Option<&Path>, max_len: usize) -> Result<()> {
    let one = || -> Result<&String> {
        match inputs {
            [k] => Ok(k),
            _ => bail!("expected exactly one input"),
        }
    };
    match kind {
        DotKind::Cfd => write_out(output, &load(one()?)?.cfd()?.to_dot(one()?)),
        DotKind::Cfa => {
            let a = ImplicitTypeA::new(load(one()?)?.cfd()?)?;
            write_out(output, &a.to_dot(one()?, max_len))
        }
        DotKind::Box => {
            let [k1, k2] = inputs else {
                bail!("box needs two inputs");
            };
            let (Input::Knot { nf: n1, .. }, Input::Knot { nf: n2, .. }) = (load(k1)?, load(k2)?) else {
                bail!("box diagrams need knot complexes");
            };
            let s = splice_with_budget(&n1, &n2, default_budget(&n1, &n2))?;
            let bold: Vec<usize> = s
                .report
                .bold_generators
                .iter()
                .filter_map(|n| s.complex.index_of(n))
                .collect();
            write_out(output, &s.complex.to_dot(&format!("{k1} x {k2}"), &bold))
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Splice { k1, k2, json, budget, dot } => splice(&k1, &k2, json, budget, dot.as_deref()).map(|_| true),
        Command::Cfd { knot, json, dot } => cfd(&knot, json, dot.as_deref()).map(|_| true),
        Command::Cfa { knot, max_ainfty_len, dot } => cfa(&knot, max_ainfty_len, dot.as_deref()).map(|_| true),
        Command::Check { knot, max_ainfty_len, json } => check(&knot, max_ainfty_len, json),
        Command::ExportDot { kind, inputs, output, max_ainfty_len } => {
            export_dot(kind, &inputs, output.as_deref(), max_ainfty_len).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
