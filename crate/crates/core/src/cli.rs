//! Command-line surface. Exit codes: 0 pass, 1 fail, 2 cap exceeded,
//! 3 bad input (usage, parse, validation, I/O).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use regmat_ef::decomp::{find_1sums, g_bound, parse_tree_file, validate, write_tree_files, DecompError, Node};
use regmat_ef::extform::ExtendedFormulation;
use regmat_ef::gf2::Gf2Matrix;
use regmat_ef::matroid::{BinaryMatroid, MatroidError, DEFAULT_ENUMERATION_CAP};
use regmat_ef::par::Execution;
use regmat_ef::samples;
use regmat_ef::verify::{
    certify_equality_with, greedy_cross_check, rectangle_cover, validity_of_exchange_claim, CertifyOptions,
    IndependenceFamily, VerifyError, DEFAULT_CERTIFY_CAP, DEFAULT_RECTANGLE_CAP, SCHEMA_VERSION,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "regmat-ef", version, about = "Extended formulations for independence polytopes of regular matroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Lp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the formulation of a decomposition tree and print its size.
    Build {
        tree: PathBuf,
        /// Also write the formulation in LP format to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        inject_fault: bool,
    },
    /// Certify that the formulation projects exactly onto the independence
    /// polytope, then cross-check LP optima against greedy.
    Certify {
        tree: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CERTIFY_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random objectives for the greedy cross-check (0 to skip).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        inject_fault: bool,
        /// Include wall-clock timings (makes the output non-reproducible).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        sequential: bool,
    },
    /// Check a tree file and report per-node sizes and warnings.
    Validate {
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Queries on the matroid `M(A)` of a matrix file.
    Matroid {
        matrix: PathBuf,
        #[command(subcommand)]
        query: MatroidQuery,
    },
    /// Split a matrix into its 1-sum blocks.
    #[command(name = "find-1sums")]
    Find1Sums {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate the leaf-size bound g(n).
    Gbound { n: usize },
    /// Rectangle cover of the non-incident (face, vertex) pairs of `M(A)`.
    Rectcover {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RECTANGLE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write the built-in sample trees as tree files.
    GenCorpus {
        dir: PathBuf,
        /// Write the growing 1-/2-sum family instead of the small corpus.
        #[arg(long)]
        scaling: bool,
    },
}

#[derive(Debug, Subcommand)]
enum MatroidQuery {
    /// Rank of the given elements (all elements if none are given).
    Rank { labels: Vec<String> },
    /// Whether the given elements are independent.
    Indep { labels: Vec<String> },
    /// List all independent sets.
    Enum {
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
}

enum Outcome {
    Pass,
    Fail,
}

/// Parses `args` (program name first) and runs the command, writing to
/// `out`. Errors go to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command, out) {
        Ok(Outcome::Pass) => EXIT_PASS,
        Ok(Outcome::Fail) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        let cap = matches!(cause.downcast_ref::<VerifyError>(), Some(VerifyError::CapExceeded { .. }))
            || matches!(cause.downcast_ref::<MatroidError>(), Some(MatroidError::CapExceeded { .. }))
            || matches!(cause.downcast_ref::<DecompError>(), Some(DecompError::Matroid(MatroidError::CapExceeded { .. })));
        if cap {
            return EXIT_CAP;
        }
    }
    EXIT_INPUT
}

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn load_tree(path: &Path) -> Result<Node> {
    let tree = parse_tree_file(path)?;
    let report = validate(&tree);
    if !report.is_valid() {
        bail!("{}: invalid tree: {}", path.display(), report.errors.join("; "));
    }
    Ok(tree)
}

fn load_matrix(path: &Path) -> Result<BinaryMatroid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let a = Gf2Matrix::parse_text(&text).with_context(|| path.display().to_string())?;
    Ok(BinaryMatroid::from_matrix(&a, None)?)
}

fn build(tree: &Node, inject_fault: bool, exec: Execution) -> Result<ExtendedFormulation> {
    let ef = tree.build_ef_with(exec)?;
    Ok(if inject_fault { ef.with_injected_fault() } else { ef })
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Build { tree, output, format, inject_fault } => {
            let t = load_tree(&tree)?;
            let ef = build(&t, inject_fault, Execution::default())?;
            if let Some(path) = &output {
                fs::write(path, ef.to_lp_string(&[], true)).with_context(|| format!("writing {}", path.display()))?;
            }
            let size = ef.size();
            let n = ef.projected_labels().len();
            let ratio = if n == 0 { 0.0 } else { size.inequalities as f64 / (n * n) as f64 };
            match format {
                Format::Lp => write!(out, "{}", ef.to_lp_string(&[], true))?,
                Format::Json => json_line(
                    out,
                    &json!({
                        "schema_version": SCHEMA_VERSION,
                        "inequalities": size.inequalities,
                        "equations": size.equations,
                        "variables": size.variables,
                        "elements": n,
                        "ratio": ratio,
                    }),
                )?,
                Format::Text => writeln!(
                    out,
                    "inequalities {}\nequations {}\nvariables {}\nelements {n}\ninequalities/|E|^2 {ratio:.4}",
                    size.inequalities, size.equations, size.variables
                )?,
            }
            Ok(Outcome::Pass)
        }
        Command::Certify { tree, cap, seed, trials, format, inject_fault, timings, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            let t = load_tree(&tree)?;
            let m = t.matroid()?;
            if m.len() > cap {
                return Err(VerifyError::CapExceeded { size: m.len(), cap }.into());
            }
            let ef = build(&t, inject_fault, exec)?;
            let report = certify_equality_with(&ef, &m, CertifyOptions { cap, exec, timings })?;
            let greedy = if trials > 0 { Some(greedy_cross_check(&ef, &m, trials, seed, (-10, 10), exec)?) } else { None };
            let pass = report.pass && greedy.as_ref().is_none_or(|g| g.pass);
            match format {
                Format::Json | Format::Lp => json_line(
                    out,
                    &json!({
                        "schema_version": SCHEMA_VERSION,
                        "pass": pass,
                        "certification": report,
                        "greedy": greedy,
                    }),
                )?,
                Format::Text => {
                    write!(out, "{}", report.to_text())?;
                    if let Some(g) = &greedy {
                        write!(out, "{}", g.to_text())?;
                    }
                    writeln!(out, "result: {}", if pass { "PASS" } else { "FAIL" })?;
                }
            }
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Validate { tree, format } => {
            let t = parse_tree_file(&tree)?;
            let report = validate(&t);
            match format {
                Format::Json | Format::Lp => json_line(out, &report)?,
                Format::Text => {
                    for n in &report.nodes {
                        writeln!(out, "{} {} |E|={}{}", n.id, n.kind, n.ground_set, n.case.map(|c| format!(" ({c})")).unwrap_or_default())?;
                    }
                    writeln!(out, "leaf total {} <= g({}) = {}", report.leaf_total, report.root_ground_set, report.g_bound)?;
                    for w in &report.warnings {
                        writeln!(out, "warning: {w}")?;
                    }
                    for e in &report.errors {
                        writeln!(out, "error: {e}")?;
                    }
                }
            }
            if !report.is_valid() {
                bail!("{}: invalid tree", tree.display());
            }
            Ok(Outcome::Pass)
        }
        Command::Matroid { matrix, query } => {
            let m = load_matrix(&matrix)?;
            match query {
                MatroidQuery::Rank { labels } => {
                    let r = if labels.is_empty() { m.rank() } else { m.rank_of_labels(&labels)? };
                    writeln!(out, "{r}")?;
                }
                MatroidQuery::Indep { labels } => writeln!(out, "{}", m.is_independent_labels(&labels)?)?,
                MatroidQuery::Enum { cap } => {
                    let mut sets = m.enumerate_independent_sets(cap)?;
                    sets.sort_by_key(|s| (s.len(), s.indices()));
                    writeln!(out, "{} independent sets", sets.len())?;
                    for s in sets {
                        writeln!(out, "{{{}}}", m.set_labels(s).join(","))?;
                    }
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Find1Sums { matrix, format } => {
            let text = fs::read_to_string(&matrix).with_context(|| format!("reading {}", matrix.display()))?;
            let a = Gf2Matrix::parse_text(&text).with_context(|| matrix.display().to_string())?;
            let blocks = find_1sums(&a);
            match format {
                Format::Json | Format::Lp => json_line(out, &json!({ "schema_version": SCHEMA_VERSION, "blocks": blocks }))?,
                Format::Text => {
                    writeln!(out, "{} blocks", blocks.len())?;
                    for b in &blocks {
                        writeln!(out, "rows {:?} cols {:?}", b.rows, b.cols)?;
                    }
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Gbound { n } => {
            if n == 0 {
                bail!("g is defined for n >= 1");
            }
            writeln!(out, "{}", g_bound(n))?;
            Ok(Outcome::Pass)
        }
        Command::Rectcover { matrix, cap, format } => {
            let m = load_matrix(&matrix)?;
            let fam = IndependenceFamily::from_matroid(&m, cap)?;
            let (_, report) = rectangle_cover(&fam);
            let exchange = validity_of_exchange_claim(&fam);
            let pass = report.pass && exchange.holds;
            match format {
                Format::Json | Format::Lp => json_line(
                    out,
                    &json!({ "schema_version": SCHEMA_VERSION, "pass": pass, "cover": report, "exchange": exchange }),
                )?,
                Format::Text => {
                    write!(out, "{}", report.to_text())?;
                    writeln!(out, "exchange claim: {} ({} pairs)", if exchange.holds { "holds" } else { "FAILS" }, exchange.pairs_checked)?;
                    if let Some((s, i)) = &exchange.counterexample {
                        writeln!(out, "counterexample: S = {{{}}}, I = {{{}}}", s.join(","), i.join(","))?;
                    }
                }
            }
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::GenCorpus { dir, scaling } => {
            let set = if scaling { samples::scaling_family() } else { samples::corpus() };
            for s in &set {
                let path = write_tree_files(&dir, &s.name, &s.tree)?;
                writeln!(out, "{}", path.display())?;
            }
            Ok(Outcome::Pass)
        }
    }
}
