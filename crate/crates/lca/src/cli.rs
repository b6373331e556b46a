//! The `lca` command line.
//!
//! Subcommands: `analyze`, `enumerate`, `count`, `verify`, `flow`,
//! `perturb-compare`. Spectra are given as inline JSON or file paths, in
//! either margin form `{"distinct": […], "multiplicities": […]}` or raw
//! diagonal form `{"diagonal": […], "cluster_tol": t}`. Exit codes:
//! 0 success, 1 failed verification checks, 2 invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::flow::{FlowParams, StartKind};
use crate::oracle;
use crate::report::{
    big_number, AnalyzeDoc, CheckDoc, ClosedFormDoc, CountDoc, EnumerateDoc, FlowDoc,
    LevelCountDoc, PerturbCompareDoc, PerturbSideDoc, ProfilesDoc, RecordDoc, TrajectoryDoc,
    VerifyDoc,
};
use crate::spectra::Spectrum;
use crate::tables;
use crate::topology::{self, AnalyzeLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "lca",
    version,
    about = "Critical topology of quantum ensemble control landscapes"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full landscape report: one record per critical submanifold.
    Analyze(SpectraArgs),
    /// List every contingency table for the margins of a spectrum pair.
    Enumerate(SpectraArgs),
    /// Exact table count (works far beyond the enumeration budget).
    Count(SpectraArgs),
    /// Cross-check the closed forms against brute-force and numeric oracles.
    Verify(VerifyArgs),
    /// Gradient-ascent trap audit on the unitary group.
    Flow(FlowArgs),
    /// Compare the landscape before and after splitting all degeneracies.
    PerturbCompare(PerturbArgs),
}

#[derive(Args, Debug)]
struct SpectraArgs {
    /// Spectrum of rho: inline JSON or a file path.
    #[arg(long)]
    rho: String,
    /// Spectrum of theta: inline JSON or a file path.
    #[arg(long)]
    theta: String,
    /// Clustering tolerance for raw diagonal input.
    #[arg(long, default_value_t = 1e-9)]
    cluster_tol: f64,
    /// Enumeration budget.
    #[arg(long, default_value_t = 1_000_000)]
    max_tables: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Sweep every margin pair built from the partitions of 1..=max_n.
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    /// Additional random margin pairs at N = 7 and N = 8.
    #[arg(long, default_value_t = 0)]
    random_pairs: usize,
    /// Random strictly-decreasing value assignments per margin pair for the
    /// maximum-attainment check.
    #[arg(long, default_value_t = 10)]
    j_assignments: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[command(flatten)]
    spectra: SpectraArgs,
    /// Haar-random starts.
    #[arg(long, default_value_t = 20)]
    starts: usize,
    /// Initial line-search step; defaults to a scale set by the spectra.
    #[arg(long)]
    step0: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[command(flatten)]
    spectra: SpectraArgs,
    /// Degeneracy-splitting offset applied to both spectra.
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INVALID_INPUT
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Enumerate(args) => run_enumerate(args),
        Command::Count(args) => run_count(args),
        Command::Verify(args) => run_verify(args),
        Command::Flow(args) => run_flow(args),
        Command::PerturbCompare(args) => run_perturb_compare(args),
    }
}

/// Accepted spectrum JSON: margin form, diagonal form, or margins only
/// (synthetic eigenvalues, flagged in the warnings).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumInput {
    #[serde(default)]
    distinct: Option<Vec<f64>>,
    #[serde(default)]
    multiplicities: Option<Vec<usize>>,
    #[serde(default)]
    diagonal: Option<Vec<f64>>,
    #[serde(default)]
    cluster_tol: Option<f64>,
}

fn parse_spectrum(
    arg: &str,
    default_tol: f64,
    name: &str,
    warnings: &mut Vec<String>,
) -> Result<Spectrum> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| {
            Error::InvalidSpectrum(format!("{name}: cannot read spectrum file {arg}: {e}"))
        })?
    };
    let input: SpectrumInput = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidSpectrum(format!("{name}: invalid spectrum JSON: {e}")))?;
    match (input.diagonal, input.distinct, input.multiplicities) {
        (Some(diag), None, None) => {
            Spectrum::from_values(&diag, input.cluster_tol.unwrap_or(default_tol))
        }
        (None, Some(distinct), Some(mults)) => Spectrum::new(distinct, mults),
        (None, None, Some(mults)) => {
            // Margins-only input: synthesize descending integer eigenvalues.
            let r = mults.len();
            let distinct: Vec<f64> = (0..r).map(|i| (r - i) as f64).collect();
            warnings.push(format!(
                "{name}: multiplicities given without eigenvalues; using synthetic distinct \
                 values {distinct:?} (landscape values are placeholders)"
            ));
            Spectrum::new(distinct, mults)
        }
        _ => Err(Error::InvalidSpectrum(format!(
            "{name}: give either {{\"distinct\", \"multiplicities\"}}, \
             {{\"diagonal\"[, \"cluster_tol\"]}}, or {{\"multiplicities\"}} alone"
        ))),
    }
}

fn parse_pair(args: &SpectraArgs, warnings: &mut Vec<String>) -> Result<(Spectrum, Spectrum)> {
    let rho = parse_spectrum(&args.rho, args.cluster_tol, "rho", warnings)?;
    let theta = parse_spectrum(&args.theta, args.cluster_tol, "theta", warnings)?;
    Ok((rho, theta))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("reports serialize");
    s.push('\n');
    s
}

/// Column-oriented text table: one labelled row per characteristic.
fn columns_table(labels: &[&str], columns: &[Vec<String>]) -> String {
    let label_width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    let col_widths: Vec<usize> = columns
        .iter()
        .map(|col| col.iter().map(|c| c.len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (row, label) in labels.iter().enumerate() {
        let _ = write!(out, "{label:<label_width$}");
        for (c, col) in columns.iter().enumerate() {
            let _ = write!(out, "  {:>width$}", col[row], width = col_widths[c]);
        }
        out.push('\n');
    }
    out
}

fn spectrum_line(s: &crate::report::SpectrumDoc) -> String {
    format!(
        "distinct {:?}  multiplicities {:?}",
        s.distinct, s.multiplicities
    )
}

fn render_analyze(doc: &AnalyzeDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Landscape critical topology");
    let _ = writeln!(out, "N: {}", doc.n);
    let _ = writeln!(out, "rho:   {}", spectrum_line(&doc.profiles.rho));
    let _ = writeln!(out, "theta: {}", spectrum_line(&doc.profiles.theta));
    let _ = writeln!(out, "critical submanifolds: {}", doc.summary.table_count);
    let _ = writeln!(out, "J max: {}", doc.summary.j_max);
    let _ = writeln!(out, "J min: {}", doc.summary.j_min);
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out.push('\n');
    let labels = [
        "No.",
        "Manifold dimension",
        "Positive axis direction",
        "Negative axis direction",
        "Landscape value",
        "Type",
    ];
    let columns: Vec<Vec<String>> = doc
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.d0.to_string(),
                r.dplus.to_string(),
                r.dminus.to_string(),
                r.j.to_string(),
                r.kind.clone(),
            ]
        })
        .collect();
    out.push_str(&columns_table(&labels, &columns));
    out
}

fn render_enumerate(doc: &EnumerateDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Contingency tables");
    let _ = writeln!(out, "N: {}", doc.n);
    let _ = writeln!(out, "rows: {:?}", doc.profiles.rho.multiplicities);
    let _ = writeln!(out, "cols: {:?}", doc.profiles.theta.multiplicities);
    let _ = writeln!(out, "count: {}", doc.count);
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for (idx, table) in doc.tables.iter().enumerate() {
        let _ = writeln!(out, "\ntable {}:", idx + 1);
        let width = table
            .iter()
            .flatten()
            .map(|k| k.to_string().len())
            .max()
            .unwrap_or(1);
        for row in table {
            out.push_str("  ");
            for (j, k) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{k:>width$}");
            }
            out.push('\n');
        }
    }
    out
}

fn render_count(doc: &CountDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Contingency table count");
    let _ = writeln!(out, "N: {}", doc.n);
    let _ = writeln!(out, "rows: {:?}", doc.profiles.rho.multiplicities);
    let _ = writeln!(out, "cols: {:?}", doc.profiles.theta.multiplicities);
    let _ = writeln!(out, "count: {}", doc.count);
    for cf in &doc.closed_forms {
        let _ = writeln!(out, "closed form ({}): {}", cf.case, cf.count);
    }
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn render_verify(doc: &VerifyDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Oracle verification sweep: {} margin pairs (partitions of N <= {}, {} random pairs)",
        doc.pairs, doc.max_n, doc.random_pairs
    );
    let name_width = doc.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &doc.checks {
        let _ = writeln!(
            out,
            "{:<name_width$}  {:>7} cases  {:>3} failures  {}",
            c.name,
            c.cases,
            c.failures,
            if c.passed { "PASS" } else { "FAIL" }
        );
        if let Some(f) = &c.first_failure {
            let _ = writeln!(out, "{:name_width$}  first failure: {f}", "");
        }
    }
    let _ = writeln!(out, "overall: {}", if doc.passed { "PASS" } else { "FAIL" });
    out
}

fn render_flow(doc: &FlowDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Gradient-flow trap audit");
    let _ = writeln!(out, "N: {}", doc.n);
    let _ = writeln!(out, "rho:   {}", spectrum_line(&doc.profiles.rho));
    let _ = writeln!(out, "theta: {}", spectrum_line(&doc.profiles.theta));
    let _ = writeln!(out, "predicted J levels: {:?}", doc.levels);
    let _ = writeln!(out, "J max: {}", doc.j_max);
    let _ = writeln!(
        out,
        "random starts: {}  saddle starts: {}",
        doc.starts, doc.saddle_starts
    );
    let _ = writeln!(
        out,
        "fraction of random starts at J max: {}",
        doc.fraction_at_max
    );
    let _ = writeln!(
        out,
        "converged values off the predicted levels: {}",
        doc.unmatched
    );
    for h in &doc.histogram {
        let _ = writeln!(out, "level J = {}: {} trajectories", h.j, h.count);
    }
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out.push('\n');
    for t in &doc.trajectories {
        let _ = writeln!(
            out,
            "{:<10}  J = {:<22}  iters {:>6}  grad {:>9.3e}  {}",
            t.start, t.converged_to, t.iterations, t.grad_norm, t.termination
        );
    }
    let _ = writeln!(out, "overall: {}", if doc.passed { "PASS" } else { "FAIL" });
    out
}

fn render_perturb(doc: &PerturbCompareDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Degeneracy perturbation comparison (delta = {})",
        doc.delta
    );
    let _ = writeln!(out, "N: {}", doc.n);
    let side = |s: &PerturbSideDoc, title: &str| {
        let mut o = String::new();
        let _ = writeln!(o, "{title}:");
        let _ = writeln!(o, "  rho:   {}", spectrum_line(&s.profiles.rho));
        let _ = writeln!(o, "  theta: {}", spectrum_line(&s.profiles.theta));
        let _ = writeln!(o, "  tables: {}", s.table_count);
        let _ = writeln!(o, "  max dimension: {}", s.max_dimension);
        let _ = writeln!(
            o,
            "  extrema: {} with D+ = 0, {} with D- = 0",
            s.dplus_zero_records, s.dminus_zero_records
        );
        let _ = writeln!(o, "  J max: {}  J min: {}", s.j_max, s.j_min);
        o
    };
    out.push_str(&side(&doc.original, "original"));
    out.push_str(&side(&doc.perturbed, "perturbed"));
    let _ = writeln!(
        out,
        "table count: {} -> {}",
        doc.table_count_before, doc.table_count_after
    );
    let _ = writeln!(out, "max dimension delta: {}", doc.max_dimension_delta);
    let _ = writeln!(
        out,
        "exactly two extrema remain: {}",
        if doc.extrema_preserved { "yes" } else { "no" }
    );
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn run_analyze(args: SpectraArgs) -> Result<i32> {
    let mut warnings = Vec::new();
    let (rho, theta) = parse_pair(&args, &mut warnings)?;
    let seed = args.seed.unwrap_or(0);
    let report = topology::analyze(
        &rho,
        &theta,
        &AnalyzeLimits {
            max_tables: args.max_tables,
        },
    )?;
    let doc = AnalyzeDoc::from_report(&report, &rho, &theta, seed, warnings);
    let text = match args.format {
        Format::Json => to_json(&doc),
        Format::Table => render_analyze(&doc),
    };
    emit(&text, &args.out)?;
    Ok(EXIT_OK)
}

fn run_enumerate(args: SpectraArgs) -> Result<i32> {
    let mut warnings = Vec::new();
    let (rho, theta) = parse_pair(&args, &mut warnings)?;
    let seed = args.seed.unwrap_or(0);
    let list = tables::enumerate_tables(&rho.profile(), &theta.profile(), args.max_tables)?;
    let doc = EnumerateDoc {
        n: rho.dim(),
        profiles: ProfilesDoc {
            rho: (&rho).into(),
            theta: (&theta).into(),
        },
        count: list.len(),
        tables: list.iter().map(|t| t.to_nested()).collect(),
        seed,
        warnings,
    };
    let text = match args.format {
        Format::Json => to_json(&doc),
        Format::Table => render_enumerate(&doc),
    };
    emit(&text, &args.out)?;
    Ok(EXIT_OK)
}

fn run_count(args: SpectraArgs) -> Result<i32> {
    let mut warnings = Vec::new();
    let (rho, theta) = parse_pair(&args, &mut warnings)?;
    let seed = args.seed.unwrap_or(0);
    let count = tables::count_tables(&rho.profile(), &theta.profile())?;
    let closed_forms = topology::closed_form_counts(&rho.profile(), &theta.profile())
        .iter()
        .map(|c| ClosedFormDoc {
            case: c.name().to_string(),
            count: big_number(c.count()),
        })
        .collect();
    let doc = CountDoc {
        n: rho.dim(),
        profiles: ProfilesDoc {
            rho: (&rho).into(),
            theta: (&theta).into(),
        },
        count: big_number(&count),
        closed_forms,
        seed,
        warnings,
    };
    let text = match args.format {
        Format::Json => to_json(&doc),
        Format::Table => render_count(&doc),
    };
    emit(&text, &args.out)?;
    Ok(EXIT_OK)
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("seed: {s}");
            s
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    let seed = seed_or_entropy(args.seed);
    let mut corpus = oracle::partition_pair_corpus(args.max_n);
    if args.random_pairs > 0 {
        let mut rng = crate::linalg::task_rng(seed, 1);
        let per_dim = args.random_pairs.div_ceil(2);
        let mut random = oracle::random_pair_corpus(&[7, 8], per_dim, &mut rng);
        random.truncate(args.random_pairs);
        corpus.extend(random);
    }
    let sweep = oracle::oracle_sweep(&corpus, args.j_assignments, seed)?;
    let doc = VerifyDoc {
        max_n: args.max_n,
        random_pairs: args.random_pairs,
        pairs: sweep.pairs,
        checks: sweep.checks.iter().map(CheckDoc::from).collect(),
        passed: sweep.passed(),
        seed,
        warnings: vec![],
    };
    let text = match args.format {
        Format::Json => to_json(&doc),
        Format::Table => render_verify(&doc),
    };
    emit(&text, &args.out)?;
    Ok(if doc.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn run_flow(args: FlowArgs) -> Result<i32> {
    let mut warnings = Vec::new();
    let (rho, theta) = parse_pair(&args.spectra, &mut warnings)?;
    let seed = seed_or_entropy(args.spectra.seed);
    let mut params = FlowParams::for_spectra(&rho, &theta);
    if let Some(step0) = args.step0 {
        params.step0 = step0;
    }
    params.grad_tol = args.grad_tol;
    params.max_iters = args.max_iters;
    let audit = crate::flow::trap_audit(&rho, &theta, args.starts, seed, &params)?;

    let saddle_starts = audit
        .entries
        .iter()
        .filter(|e| matches!(e.start, StartKind::SaddlePerturbed(_)))
        .count();
    let passed = audit.fraction_at_max == 1.0 && audit.unmatched == 0;
    let doc = FlowDoc {
        n: rho.dim(),
        profiles: ProfilesDoc {
            rho: (&rho).into(),
            theta: (&theta).into(),
        },
        levels: audit.levels.clone(),
        j_max: audit.report.summary.j_max,
        starts: args.starts,
        saddle_starts,
        fraction_at_max: audit.fraction_at_max,
        unmatched: audit.unmatched,
        histogram: audit
            .levels
            .iter()
            .zip(&audit.histogram)
            .map(|(&j, &count)| LevelCountDoc { j, count })
            .collect(),
        trajectories: audit
            .entries
            .iter()
            .map(|e| TrajectoryDoc {
                start: match e.start {
                    StartKind::Haar(i) => format!("haar-{i}"),
                    StartKind::SaddlePerturbed(i) => format!("saddle-{i}"),
                },
                converged_to: e.converged_to,
                iterations: e.iterations,
                grad_norm: e.final_grad_norm,
                termination: e.termination.as_str().to_string(),
                matched_level: e.matched_level,
                reached_max: e.reached_max,
            })
            .collect(),
        passed,
        seed,
        warnings,
    };
    let text = match args.spectra.format {
        Format::Json => to_json(&doc),
        Format::Table => render_flow(&doc),
    };
    emit(&text, &args.spectra.out)?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn perturb_side(
    rho: &Spectrum,
    theta: &Spectrum,
    max_tables: usize,
) -> Result<(PerturbSideDoc, num_bigint::BigUint)> {
    let count = tables::count_tables(&rho.profile(), &theta.profile())?;
    let report = topology::analyze(rho, theta, &AnalyzeLimits { max_tables })?;
    let max_dimension = report.records.iter().map(|r| r.d0).max().unwrap_or(0);
    let dplus_zero = report.records.iter().filter(|r| r.d_plus == 0).count();
    let dminus_zero = report.records.iter().filter(|r| r.d_minus == 0).count();
    Ok((
        PerturbSideDoc {
            profiles: ProfilesDoc {
                rho: rho.into(),
                theta: theta.into(),
            },
            table_count: big_number(&count),
            max_dimension,
            dplus_zero_records: dplus_zero,
            dminus_zero_records: dminus_zero,
            j_max: report.summary.j_max,
            j_min: report.summary.j_min,
            records: report.records.iter().map(RecordDoc::from).collect(),
        },
        count,
    ))
}

fn run_perturb_compare(args: PerturbArgs) -> Result<i32> {
    let mut warnings = Vec::new();
    let (rho, theta) = parse_pair(&args.spectra, &mut warnings)?;
    let seed = args.spectra.seed.unwrap_or(0);
    let rho_p = rho.perturbed(args.delta)?;
    let theta_p = theta.perturbed(args.delta)?;

    let (original, count_before) = perturb_side(&rho, &theta, args.spectra.max_tables)?;
    let (perturbed, count_after) = perturb_side(&rho_p, &theta_p, args.spectra.max_tables)?;

    let extrema_preserved = perturbed.dplus_zero_records == 1 && perturbed.dminus_zero_records == 1;
    let doc = PerturbCompareDoc {
        n: rho.dim(),
        delta: args.delta,
        max_dimension_delta: perturbed.max_dimension as i64 - original.max_dimension as i64,
        table_count_before: big_number(&count_before),
        table_count_after: big_number(&count_after),
        original,
        perturbed,
        extrema_preserved,
        seed,
        warnings,
    };
    let text = match args.spectra.format {
        Format::Json => to_json(&doc),
        Format::Table => render_perturb(&doc),
    };
    emit(&text, &args.spectra.out)?;
    Ok(if doc.extrema_preserved {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
