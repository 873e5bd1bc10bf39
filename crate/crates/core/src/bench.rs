//! Corpus manifests and the structured stats document.
//!
//! A manifest is a plain-text list of instances, one per line: a seed
//! followed by key=value tokens describing the generator configuration.
//! Running a manifest solves every instance and yields one stats row each,
//! so two runs with the same manifest can be diffed field by field. Only
//! `elapsed_ms` is allowed to differ between runs; helpers here strip it
//! for comparisons.
//!
//! Manifest grammar, one instance per line ('#' starts a comment):
//!
//! ```text
//! <seed> [mode=uniform|degree3|reduced] n=<vars> [m=<clauses>]
//!        [widths=<w>|<lo>-<hi>] [regular] [pairfree]
//! ```
//!
//! `uniform` and `reduced` require `m` and accept `widths` (default 1-4).
//! `degree3` takes neither; `regular` pins every literal to degree (3,3)
//! and `pairfree` forbids coincident literal pairs, both only for
//! `degree3`.

use crate::dimacs::Verdict;
use crate::formula::Formula;
use crate::gen::{generate, GenConfig, GenError, GenMode, WidthDist};
use crate::search::{solve, SolveConfig, SolveError, SolveReport};
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

/// The fixed-field stats document emitted for every solve. Field order here
/// is emission order, so serialized documents are directly diffable.
#[derive(Clone, Debug, Serialize)]
pub struct StatsDoc {
    pub verdict: String,
    pub m: usize,
    pub n: u32,
    pub branching_nodes: u64,
    pub max_depth: u32,
    pub case_tallies: BTreeMap<String, u64>,
    pub reductions: BTreeMap<String, u64>,
    pub audit_violations: u64,
    pub potential_ratio: f64,
    pub elapsed_ms: u64,
    pub trace_hash: String,
}

impl StatsDoc {
    pub fn new(
        verdict: &Verdict,
        m: usize,
        n: u32,
        report: &SolveReport,
        elapsed_ms: u64,
    ) -> StatsDoc {
        let r = &report.reductions;
        let reductions = [
            ("R1", r.r1),
            ("R2", r.r2),
            ("R3", r.r3),
            ("R4", r.r4),
            ("R5", r.r5),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        StatsDoc {
            verdict: match verdict {
                Verdict::Satisfiable(_) => "SATISFIABLE".to_string(),
                Verdict::Unsatisfiable => "UNSATISFIABLE".to_string(),
            },
            m,
            n,
            branching_nodes: report.branching_nodes,
            max_depth: report.max_depth,
            case_tallies: report.case_tallies_by_name(),
            reductions,
            audit_violations: report.audit_violations,
            potential_ratio: report.potential_ratio,
            elapsed_ms,
            trace_hash: report.trace_hash.clone(),
        }
    }

    /// The document as JSON with `elapsed_ms` zeroed, for run-to-run
    /// comparisons.
    pub fn comparable(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("stats serialize");
        v["elapsed_ms"] = 0.into();
        v
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("line {line}: empty instance row")]
    EmptyRow { line: usize },
    #[error("line {line}: bad seed {token:?}")]
    BadSeed { line: usize, token: String },
    #[error("line {line}: unknown token {token:?}")]
    UnknownToken { line: usize, token: String },
    #[error("line {line}: bad value in {token:?}")]
    BadValue { line: usize, token: String },
    #[error("line {line}: missing required key {key}")]
    MissingKey { line: usize, key: &'static str },
    #[error("line {line}: {key} is not valid for mode {mode}")]
    KeyModeMismatch {
        line: usize,
        key: &'static str,
        mode: &'static str,
    },
    #[error("line {line}: width {width} outside 1..=5")]
    WidthRange { line: usize, width: u32 },
}

/// One manifest row: the generator config plus its canonical rendering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchEntry {
    pub cfg: GenConfig,
    /// Canonical one-line form of the row; equal entries render equally
    /// regardless of the input's token order.
    pub spec: String,
}

#[derive(Debug, Default)]
struct RawEntry {
    mode: Option<String>,
    n: Option<u32>,
    m: Option<u32>,
    widths: Option<(u32, u32)>,
    regular: bool,
    pairfree: bool,
}

fn parse_width_token(value: &str) -> Option<(u32, u32)> {
    if let Some((lo, hi)) = value.split_once('-') {
        let lo: u32 = lo.parse().ok()?;
        let hi: u32 = hi.parse().ok()?;
        (lo <= hi).then_some((lo, hi))
    } else {
        let w: u32 = value.parse().ok()?;
        Some((w, w))
    }
}

fn entry_from_tokens(line: usize, tokens: &[&str]) -> Result<BenchEntry, ManifestError> {
    let seed: u64 = tokens[0].parse().map_err(|_| ManifestError::BadSeed {
        line,
        token: tokens[0].to_string(),
    })?;
    let mut raw = RawEntry::default();
    for &tok in &tokens[1..] {
        match tok.split_once('=') {
            Some(("mode", v)) if ["uniform", "degree3", "reduced"].contains(&v) => {
                raw.mode = Some(v.to_string());
            }
            Some(("n", v)) => {
                raw.n = Some(v.parse().map_err(|_| ManifestError::BadValue {
                    line,
                    token: tok.to_string(),
                })?);
            }
            Some(("m", v)) => {
                raw.m = Some(v.parse().map_err(|_| ManifestError::BadValue {
                    line,
                    token: tok.to_string(),
                })?);
            }
            Some(("widths", v)) => {
                raw.widths = Some(parse_width_token(v).ok_or(ManifestError::BadValue {
                    line,
                    token: tok.to_string(),
                })?);
            }
            None if tok == "regular" => raw.regular = true,
            None if tok == "pairfree" => raw.pairfree = true,
            _ => {
                return Err(ManifestError::UnknownToken {
                    line,
                    token: tok.to_string(),
                })
            }
        }
    }

    let mode = raw.mode.as_deref().unwrap_or("uniform");
    let n = raw.n.ok_or(ManifestError::MissingKey { line, key: "n" })?;

    let check_absent = |present: bool, key: &'static str, mode: &'static str| {
        if present {
            Err(ManifestError::KeyModeMismatch { line, key, mode })
        } else {
            Ok(())
        }
    };

    let (cfg, spec) = match mode {
        "degree3" => {
            check_absent(raw.m.is_some(), "m", "degree3")?;
            check_absent(raw.widths.is_some(), "widths", "degree3")?;
            let mut spec = format!("{seed} mode=degree3 n={n}");
            if raw.regular {
                spec.push_str(" regular");
            }
            if raw.pairfree {
                spec.push_str(" pairfree");
            }
            (
                GenConfig {
                    seed,
                    n,
                    m: 0,
                    widths: WidthDist::only(3),
                    mode: GenMode::Degree3Adversarial {
                        all_regular: raw.regular,
                        pair_free: raw.pairfree,
                    },
                },
                spec,
            )
        }
        _ => {
            check_absent(raw.regular, "regular", "uniform/reduced")?;
            check_absent(raw.pairfree, "pairfree", "uniform/reduced")?;
            let m = raw.m.ok_or(ManifestError::MissingKey { line, key: "m" })?;
            let (lo, hi) = raw.widths.unwrap_or((1, 4));
            for w in [lo, hi] {
                if !(1..=5).contains(&w) {
                    return Err(ManifestError::WidthRange { line, width: w });
                }
            }
            let mut weights = [0u32; 5];
            for w in lo..=hi {
                weights[(w - 1) as usize] = 1;
            }
            let widths_text = if lo == hi {
                format!("{lo}")
            } else {
                format!("{lo}-{hi}")
            };
            let spec = format!("{seed} mode={mode} n={n} m={m} widths={widths_text}");
            (
                GenConfig {
                    seed,
                    n,
                    m,
                    widths: WidthDist::new(weights),
                    mode: if mode == "reduced" {
                        GenMode::ReducedFuzz
                    } else {
                        GenMode::Uniform
                    },
                },
                spec,
            )
        }
    };
    Ok(BenchEntry { cfg, spec })
}

pub fn parse_manifest(text: &str) -> Result<Vec<BenchEntry>, ManifestError> {
    let mut entries = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        entries.push(entry_from_tokens(line, &tokens)?);
    }
    Ok(entries)
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("instance {spec:?}: {source}")]
    Generate {
        spec: String,
        #[source]
        source: GenError,
    },
    #[error("instance {spec:?}: {source}")]
    Solve {
        spec: String,
        #[source]
        source: SolveError,
    },
}

/// One solved manifest row.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub spec: String,
    pub stats: StatsDoc,
}

impl BenchRow {
    /// The row as JSON with `elapsed_ms` zeroed.
    pub fn comparable(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("row serialize");
        v["stats"]["elapsed_ms"] = 0.into();
        v
    }
}

pub fn instance_for(entry: &BenchEntry) -> Result<Formula, BenchError> {
    generate(&entry.cfg).map_err(|source| BenchError::Generate {
        spec: entry.spec.clone(),
        source,
    })
}

pub fn run_entry(entry: &BenchEntry, solve_cfg: &SolveConfig) -> Result<BenchRow, BenchError> {
    let f = instance_for(entry)?;
    let started = Instant::now();
    let (verdict, report) = solve(&f, solve_cfg).map_err(|source| BenchError::Solve {
        spec: entry.spec.clone(),
        source,
    })?;
    let elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(BenchRow {
        seed: entry.cfg.seed,
        spec: entry.spec.clone(),
        stats: StatsDoc::new(&verdict, f.m(), entry.cfg.n, &report, elapsed_ms),
    })
}

pub fn run_manifest(text: &str, solve_cfg: &SolveConfig) -> Result<Vec<BenchRow>, BenchError> {
    let entries = parse_manifest(text)?;
    entries
        .iter()
        .map(|entry| run_entry(entry, solve_cfg))
        .collect()
}
