//! DIMACS CNF reading and writing.
//!
//! The reader is forgiving where real-world files are sloppy: duplicate
//! literals inside a clause are dropped, tautological clauses are skipped,
//! and a variable index above the header's bound widens the bound. Each of
//! those repairs is counted so callers can surface them as warnings.

use crate::formula::{Clause, Formula, Literal};
use std::fmt::Write as _;

/// Outcome of a solver run, in DIMACS vocabulary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable(crate::formula::Assignment),
    Unsatisfiable,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Satisfiable(_))
    }
}

/// A parsed instance: the clause set plus everything needed to verify a model
/// against the original file rather than the normalized clauses.
#[derive(Debug)]
pub struct ParsedCnf {
    pub formula: Formula,
    /// Clauses exactly as read, before deduplication and tautology removal.
    pub raw_clauses: Vec<Vec<Literal>>,
    /// Variable bound: header value, widened if a literal exceeded it.
    pub num_vars: u32,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing 'p cnf' header")]
    MissingHeader,
    #[error("malformed header line: {0:?}")]
    BadHeader(String),
    #[error("unreadable token {0:?}")]
    BadToken(String),
    #[error("literal 0 terminator missing at end of input")]
    UnterminatedClause,
}

/// Parses DIMACS CNF text.
pub fn parse(input: &str) -> Result<ParsedCnf, ParseError> {
    let mut lines = input.lines();
    let mut header: Option<(u32, usize)> = None;
    for line in lines.by_ref() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", n, m] => {
                    let n: u32 = n.parse().map_err(|_| ParseError::BadHeader(line.into()))?;
                    let m: usize = m.parse().map_err(|_| ParseError::BadHeader(line.into()))?;
                    header = Some((n, m));
                    break;
                }
                _ => return Err(ParseError::BadHeader(line.into())),
            }
        }
        return Err(ParseError::MissingHeader);
    }
    let (mut num_vars, declared_m) = header.ok_or(ParseError::MissingHeader)?;

    let mut warnings = Vec::new();
    let mut raw_clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut dropped_dups = 0usize;
    let mut dropped_tautologies = 0usize;
    let mut widened = false;

    let mut clauses = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.starts_with('c') {
            continue;
        }
        for tok in line.split_whitespace() {
            let value: i64 = tok.parse().map_err(|_| ParseError::BadToken(tok.into()))?;
            if value == 0 {
                raw_clauses.push(current.clone());
                let before = current.len();
                match Clause::new(current.drain(..)) {
                    Some(c) => {
                        if c.len() < before {
                            dropped_dups += before - c.len();
                        }
                        clauses.push(c);
                    }
                    None => dropped_tautologies += 1,
                }
                continue;
            }
            let lit = Literal::from_dimacs(value).ok_or_else(|| ParseError::BadToken(tok.into()))?;
            if lit.var().0 > num_vars {
                num_vars = lit.var().0;
                widened = true;
            }
            current.push(lit);
        }
    }
    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause);
    }

    if dropped_dups > 0 {
        warnings.push(format!("removed {dropped_dups} duplicate literal(s) inside clauses"));
    }
    if dropped_tautologies > 0 {
        warnings.push(format!("skipped {dropped_tautologies} tautological clause(s)"));
    }
    if widened {
        warnings.push(format!("literal exceeds declared variable count, widened to {num_vars}"));
    }
    if raw_clauses.len() != declared_m {
        warnings.push(format!(
            "header declares {declared_m} clause(s) but {} present",
            raw_clauses.len()
        ));
    }

    Ok(ParsedCnf {
        formula: Formula::from_clauses(clauses),
        raw_clauses,
        num_vars,
        warnings,
    })
}

/// Serializes a formula back to DIMACS text.
pub fn write(formula: &Formula, num_vars: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", num_vars, formula.m());
    for (_, clause) in formula.clauses() {
        for lit in clause.iter() {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        let _ = writeln!(out, "0");
    }
    out
}

/// Checks a total assignment against the raw clause list of a parsed file.
/// Raw clauses may contain duplicates or complementary pairs; a clause with a
/// complementary pair is true under every assignment.
pub fn model_satisfies_raw(parsed: &ParsedCnf, assignment: &crate::formula::Assignment) -> bool {
    parsed.raw_clauses.iter().all(|clause| {
        clause
            .iter()
            .any(|&l| assignment.literal_true_or_default(l))
    })
}
