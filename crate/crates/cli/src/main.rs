//! Command-line front end: solve, audit, factor, gen, bench.
//!
//! Exit codes follow the SAT-competition convention where a verdict exists:
//! 10 satisfiable, 20 unsatisfiable. Everything else is diagnostic: 1 for
//! unusable input (or an oracle disagreement), 2 for a node-budget abort,
//! 3 for an audit violation under strict auditing or the audit verb.
//! Verdict lines go to stdout alone so runs can be diffed; stats, traces
//! and audit records go to files or stderr.

use brsat::analysis::{branching_factor, BranchingVector};
use brsat::bench::{self, BenchError, StatsDoc};
use brsat::dimacs::{self, ParsedCnf, Verdict};
use brsat::formula::{Assignment, Var};
use brsat::oracle;
use brsat::search::{self, BranchOrder, NodeAuditRecord, SolveConfig, SolveError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "brsat",
    version,
    about = "Exact CNF-SAT solver that audits its own branching guarantees"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Decide a DIMACS instance and print the verdict
    Solve(SolveArgs),
    /// Solve with every branching node fully expanded, printing the audit log
    Audit(AuditArgs),
    /// Print the branching factor of a two-component vector
    Factor { c1: u32, c2: u32 },
    /// Emit a generated instance as DIMACS on stdout
    Gen(GenArgs),
    /// Run a manifest of generated instances, one stats row per instance
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunFlags {
    /// Write the stats document (JSON) to this path
    #[arg(long, value_name = "PATH")]
    stats: Option<PathBuf>,
    /// Abort on the first audit violation instead of counting it
    #[arg(long)]
    strict_audit: bool,
    /// Expand both children of every branching node, auditing all of them
    #[arg(long)]
    exhaustive_audit: bool,
    /// Print search and reduction steps to standard error
    #[arg(long)]
    trace: bool,
    /// Maximum branching nodes before giving up
    #[arg(long, value_name = "N", default_value_t = 10_000_000)]
    node_budget: u64,
    /// Which child of a split to explore first
    #[arg(long, value_enum, default_value_t = OrderArg::TrueFirst)]
    branch_order: OrderArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    TrueFirst,
    FalseFirst,
}

#[derive(Args)]
struct SolveArgs {
    /// Input path, or '-' for standard input
    #[arg(default_value = "-")]
    input: String,
    /// Cross-check the verdict by exhaustive enumeration (refused above 14 variables)
    #[arg(long)]
    oracle_check: bool,
    /// Print per-node audit records to standard error
    #[arg(long)]
    audit: bool,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args)]
struct AuditArgs {
    /// Input path, or '-' for standard input
    #[arg(default_value = "-")]
    input: String,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Variable count
    #[arg(long)]
    n: u32,
    /// Clause count (required for uniform and reduced modes)
    #[arg(long)]
    m: Option<u32>,
    /// uniform, degree3, or reduced
    #[arg(long, default_value = "uniform")]
    mode: String,
    /// Clause width: a single value like 3 or a range like 1-4
    #[arg(long, value_name = "W|LO-HI")]
    widths: Option<String>,
    /// degree3 only: pin every literal to degree (3,3)
    #[arg(long)]
    regular: bool,
    /// degree3 only: forbid coincident literal pairs
    #[arg(long)]
    pairfree: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Manifest path, or '-' for standard input
    #[arg(default_value = "-")]
    manifest: String,
    #[command(flatten)]
    run: RunFlags,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.verb {
        Verb::Solve(args) => solve_verb(args),
        Verb::Audit(args) => audit_verb(args),
        Verb::Factor { c1, c2 } => factor_verb(c1, c2),
        Verb::Gen(args) => gen_verb(args),
        Verb::Bench(args) => bench_verb(args),
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("reading standard input: {e}"))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn solve_config(run: &RunFlags, collect_audit_log: bool) -> SolveConfig {
    SolveConfig {
        exhaustive_audit: run.exhaustive_audit,
        strict_audit: run.strict_audit,
        collect_audit_log,
        node_budget: run.node_budget,
        branch_order: match run.branch_order {
            OrderArg::TrueFirst => BranchOrder::TrueFirst,
            OrderArg::FalseFirst => BranchOrder::FalseFirst,
        },
        trace: run.trace,
    }
}

fn solve_exit_code(e: &SolveError) -> i32 {
    match e {
        SolveError::BudgetExceeded(_) => 2,
        SolveError::AuditViolation(_) => 3,
        _ => 1,
    }
}

fn parse_instance(path: &str) -> Result<ParsedCnf, i32> {
    let text = read_input(path).map_err(|e| {
        eprintln!("error: {e}");
        1
    })?;
    let parsed = dimacs::parse(&text).map_err(|e| {
        eprintln!("error: {e}");
        1
    })?;
    for w in &parsed.warnings {
        eprintln!("c warning: {w}");
    }
    Ok(parsed)
}

fn model_line(a: &Assignment, n: u32) -> String {
    let mut s = String::from("v");
    for v in 1..=n {
        s.push(' ');
        if !a.value(Var(v)).unwrap_or(false) {
            s.push('-');
        }
        s.push_str(&v.to_string());
    }
    s.push_str(" 0");
    s
}

fn write_stats(
    path: &PathBuf,
    verdict: &Verdict,
    parsed: &ParsedCnf,
    report: &search::SolveReport,
    elapsed_ms: u64,
) -> Result<(), i32> {
    let doc = StatsDoc::new(verdict, parsed.formula.m(), parsed.num_vars, report, elapsed_ms);
    let json = serde_json::to_string(&doc).expect("stats serialize");
    std::fs::write(path, json + "\n").map_err(|e| {
        eprintln!("error: writing stats to {}: {e}", path.display());
        1
    })
}

fn audit_record_line(r: &NodeAuditRecord) -> String {
    let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
    format!(
        "node {} depth {} m {} class {} case {} literal {} vector ({},{}) \
         measured ({},{}) children {}/{} phi {} cover {} claims {}",
        r.index,
        r.depth,
        r.m,
        r.class,
        r.case,
        r.literal,
        r.vector.0,
        r.vector.1,
        r.decreases.0,
        r.decreases.1,
        r.child_classes.0,
        r.child_classes.1,
        flag(r.phi_ok),
        flag(r.cover_ok),
        flag(r.claims_ok)
    )
}

fn emit_trace(report: &search::SolveReport) {
    for line in &report.trace_lines {
        eprintln!("{line}");
    }
}

fn solve_verb(args: SolveArgs) -> i32 {
    let parsed = match parse_instance(&args.input) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let cfg = solve_config(&args.run, args.audit);
    let started = Instant::now();
    let (verdict, report) = match search::solve(&parsed.formula, &cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return solve_exit_code(&e);
        }
    };
    let elapsed_ms = started.elapsed().as_millis() as u64;

    emit_trace(&report);
    if args.audit {
        for record in &report.audit_log {
            eprintln!("{}", audit_record_line(record));
        }
        eprintln!(
            "c audited {} fully expanded nodes, {} violations",
            report.audit_log.len(),
            report.audit_violations
        );
    }

    if args.oracle_check {
        if parsed.num_vars > 14 {
            eprintln!(
                "c oracle check refused: {} variables exceeds the limit of 14",
                parsed.num_vars
            );
        } else {
            match oracle::is_satisfiable(&parsed.formula) {
                Ok(expected) if expected == verdict.is_sat() => {
                    eprintln!("c oracle check: verdicts agree");
                }
                Ok(expected) => {
                    eprintln!(
                        "error: oracle disagreement, solver says {} but enumeration says {}",
                        verdict_word(&verdict),
                        if expected { "SATISFIABLE" } else { "UNSATISFIABLE" }
                    );
                    return 1;
                }
                Err(e) => {
                    eprintln!("error: oracle check failed: {e}");
                    return 1;
                }
            }
        }
    }

    if let Some(path) = &args.run.stats {
        if let Err(code) = write_stats(path, &verdict, &parsed, &report, elapsed_ms) {
            return code;
        }
    }

    match &verdict {
        Verdict::Satisfiable(model) => {
            if !dimacs::model_satisfies_raw(&parsed, model) {
                eprintln!("error: model fails the original clauses");
                return 1;
            }
            print!("s SATISFIABLE\n{}\n", model_line(model, parsed.num_vars));
            10
        }
        Verdict::Unsatisfiable => {
            print!("s UNSATISFIABLE\n");
            20
        }
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Satisfiable(_) => "SATISFIABLE",
        Verdict::Unsatisfiable => "UNSATISFIABLE",
    }
}

fn audit_verb(args: AuditArgs) -> i32 {
    let parsed = match parse_instance(&args.input) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let mut cfg = solve_config(&args.run, true);
    cfg.exhaustive_audit = true;
    let started = Instant::now();
    let (verdict, report) = match search::solve(&parsed.formula, &cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return solve_exit_code(&e);
        }
    };
    let elapsed_ms = started.elapsed().as_millis() as u64;

    emit_trace(&report);
    for record in &report.audit_log {
        println!("{}", audit_record_line(record));
    }
    println!(
        "audited {} branching nodes: {} violations, max depth {}, potential ratio {:.6}",
        report.branching_nodes, report.audit_violations, report.max_depth, report.potential_ratio
    );
    println!("s {}", verdict_word(&verdict));

    if let Some(path) = &args.run.stats {
        if let Err(code) = write_stats(path, &verdict, &parsed, &report, elapsed_ms) {
            return code;
        }
    }

    if report.audit_violations > 0 {
        3
    } else if verdict.is_sat() {
        10
    } else {
        20
    }
}

fn factor_verb(c1: u32, c2: u32) -> i32 {
    match branching_factor(&BranchingVector(vec![c1, c2])) {
        Ok(result) => {
            println!("{:.6}", result.factor);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn gen_verb(args: GenArgs) -> i32 {
    // The gen flags are the manifest row grammar; funnel them through the
    // same parser so validation cannot drift.
    let mut row = format!("{} mode={} n={}", args.seed, args.mode, args.n);
    if let Some(m) = args.m {
        row.push_str(&format!(" m={m}"));
    }
    if let Some(widths) = &args.widths {
        row.push_str(&format!(" widths={widths}"));
    }
    if args.regular {
        row.push_str(" regular");
    }
    if args.pairfree {
        row.push_str(" pairfree");
    }
    let entries = match bench::parse_manifest(&row) {
        Ok(entries) => entries,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match bench::instance_for(&entries[0]) {
        Ok(f) => {
            print!("{}", dimacs::write(&f, entries[0].cfg.n));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn bench_exit_code(e: &BenchError) -> i32 {
    match e {
        BenchError::Solve { source, .. } => solve_exit_code(source),
        _ => 1,
    }
}

fn bench_verb(args: BenchArgs) -> i32 {
    let text = match read_input(&args.manifest) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let cfg = solve_config(&args.run, false);
    let rows = match bench::run_manifest(&text, &cfg) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return bench_exit_code(&e);
        }
    };
    let mut jsonl = String::new();
    for row in &rows {
        jsonl.push_str(&serde_json::to_string(row).expect("row serialize"));
        jsonl.push('\n');
    }
    match &args.run.stats {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &jsonl) {
                eprintln!("error: writing stats to {}: {e}", path.display());
                return 1;
            }
            for row in &rows {
                println!(
                    "ok {} {} nodes={} hash={}",
                    row.spec, row.stats.verdict, row.stats.branching_nodes, row.stats.trace_hash
                );
            }
        }
        None => print!("{jsonl}"),
    }
    0
}
