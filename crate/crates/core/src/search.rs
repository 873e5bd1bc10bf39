//! Branch-and-reduce search with a self-auditing case table.
//!
//! Every branching node picks its literal from a closed list of cases keyed
//! by the formula's degree structure. Each case carries a guaranteed
//! branching vector and, for the weaker vectors, a goodness promise about
//! the children. The searcher measures what actually happened at every fully
//! expanded node and checks three things against the guarantees: the
//! potential inequality, the vector cover, and the goodness claims. A
//! violation is a bug in either the table or the reductions, never in the
//! input, which is why audits are on by default and only their strictness is
//! configurable.

use crate::analysis::{covers, BranchingVector, PotentialConstants};
use crate::dimacs::Verdict;
use crate::formula::{Assignment, Formula, Literal};
use crate::reduce::{
    self, classify, AssignRule, BranchSide, ClassLabel, RuleTallies, TrailEvent,
};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Case names for the branching table, used in tallies and traces. The
/// numbering mirrors the structure of the selection: class, then population
/// shape, then the local configuration around the chosen literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseLabel {
    Bad1,
    Bad2,
    Good1,
    Good21,
    Good221,
    Good222a,
    Good222b,
    Good222c,
    Good222d,
    Good311,
    Good312,
    Good313,
    Good314,
    Good315,
    Good321,
    Good322Assign,
    Good322,
    Good331,
    Good332,
    Good341,
    Good342,
    Good343,
    Good411,
    Good412,
    Good42,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CaseLabel::Bad1 => "Bad-1",
            CaseLabel::Bad2 => "Bad-2",
            CaseLabel::Good1 => "Good-1",
            CaseLabel::Good21 => "Good-2.1",
            CaseLabel::Good221 => "Good-2.2.1",
            CaseLabel::Good222a => "Good-2.2.2a",
            CaseLabel::Good222b => "Good-2.2.2b",
            CaseLabel::Good222c => "Good-2.2.2c",
            CaseLabel::Good222d => "Good-2.2.2d",
            CaseLabel::Good311 => "Good-3.1.1",
            CaseLabel::Good312 => "Good-3.1.2",
            CaseLabel::Good313 => "Good-3.1.3",
            CaseLabel::Good314 => "Good-3.1.4",
            CaseLabel::Good315 => "Good-3.1.5",
            CaseLabel::Good321 => "Good-3.2.1",
            CaseLabel::Good322Assign => "Good-3.2.2-assign",
            CaseLabel::Good322 => "Good-3.2.2",
            CaseLabel::Good331 => "Good-3.3.1",
            CaseLabel::Good332 => "Good-3.3.2",
            CaseLabel::Good341 => "Good-3.4.1",
            CaseLabel::Good342 => "Good-3.4.2",
            CaseLabel::Good343 => "Good-3.4.3",
            CaseLabel::Good411 => "Good-4.1.1",
            CaseLabel::Good412 => "Good-4.1.2",
            CaseLabel::Good42 => "Good-4.2",
        };
        f.write_str(name)
    }
}

/// The branching table found no case for the formula in front of it. Since
/// the table is proven exhaustive for reduced formulas, this always means an
/// internal inconsistency, and the message says which step noticed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("branching dispatch failed: {context}")]
pub struct DispatchError {
    pub context: String,
}

fn dispatch_err(context: impl Into<String>) -> DispatchError {
    DispatchError {
        context: context.into(),
    }
}

/// A branching commitment: split on `literal`, with the guaranteed vector
/// written as (decrease when the literal is set to 1, decrease when its
/// negation is). `claims[i]` promises side i ends good or beats the vector
/// component by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchDecision {
    pub literal: Literal,
    pub case: CaseLabel,
    pub vector: (u32, u32),
    pub claims: [bool; 2],
}

/// What the case table wants done at a node: branch both ways, or set one
/// forced literal and fall back into reduction without spending a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Branch(BranchDecision),
    Assign { literal: Literal, case: CaseLabel },
}

const NONE: [bool; 2] = [false, false];
const BOTH_GOOD: [bool; 2] = [true, true];

fn branch(
    literal: Literal,
    case: CaseLabel,
    vector: (u32, u32),
    claims: [bool; 2],
) -> Result<Selection, DispatchError> {
    Ok(Selection::Branch(BranchDecision {
        literal,
        case,
        vector,
        claims,
    }))
}

fn shares_clause(f: &Formula, a: Literal, b: Literal) -> bool {
    f.occurrences(a).into_iter().any(|id| f.clause(id).contains(b))
}

/// The other clause of a degree-2 literal, given one of the two.
fn other_clause_of(
    f: &Formula,
    l: Literal,
    not_this: crate::formula::ClauseId,
) -> crate::formula::ClauseId {
    f.occurrences(l)
        .into_iter()
        .find(|&id| id != not_this)
        .expect("degree-2 literal has a second clause")
}

fn is_low(f: &Formula, l: Literal) -> bool {
    let (a, b) = f.degree_pair(l);
    a == 2 && b >= 3
}

fn is_33(f: &Formula, l: Literal) -> bool {
    f.degree_pair(l) == (3, 3)
}

fn is_43(f: &Formula, l: Literal) -> bool {
    f.degree_pair(l) == (4, 3)
}

fn is_33_plus(f: &Formula, l: Literal) -> bool {
    let (a, b) = f.degree_pair(l);
    a == 3 && b >= 3
}

/// Picks the branching case for a reduced, nonterminal formula of the given
/// class. Deterministic: literals are scanned in code order, clauses in id
/// order, so equal formulas always produce equal decisions.
pub fn select_branch(f: &Formula, class: ClassLabel) -> Result<Selection, DispatchError> {
    match class {
        ClassLabel::Bad => select_bad(f),
        ClassLabel::Good => select_good(f),
    }
}

fn select_bad(f: &Formula) -> Result<Selection, DispatchError> {
    let lits = f.live_literals();
    if let Some(&x) = lits.iter().find(|&&l| f.degree_pair(l) == (3, 4)) {
        return branch(x, CaseLabel::Bad1, (3, 4), NONE);
    }
    let x = *lits
        .first()
        .ok_or_else(|| dispatch_err("bad-class dispatch on a formula without literals"))?;
    if f.degree_pair(x) != (3, 3) {
        return Err(dispatch_err(format!(
            "bad-class formula has literal {x} with degrees {:?}",
            f.degree_pair(x)
        )));
    }
    branch(x, CaseLabel::Bad2, (3, 3), BOTH_GOOD)
}

fn select_good(f: &Formula) -> Result<Selection, DispatchError> {
    let lits = f.live_literals();

    // Heavy literals branch well on their own.
    for &l in &lits {
        let (a, b) = f.degree_pair(l);
        if a == 3 && b >= 5 {
            return branch(l, CaseLabel::Good1, (3, 5), NONE);
        }
        if a >= 4 && b >= 4 {
            return branch(l, CaseLabel::Good1, (4, 4), NONE);
        }
    }

    // A (3,4)-literal present: its surroundings decide the bonus.
    if let Some(&x) = lits.iter().find(|&&l| f.degree_pair(l) == (3, 4)) {
        let low: Vec<Literal> = lits.iter().copied().filter(|&l| is_low(f, l)).collect();
        if !low.is_empty() {
            if low.iter().any(|&l| shares_clause(f, l, x)) {
                return branch(x, CaseLabel::Good21, (4, 4), NONE);
            }
            if low.iter().any(|&l| shares_clause(f, l, x.negated())) {
                return branch(x, CaseLabel::Good21, (3, 5), NONE);
            }
            return branch(x, CaseLabel::Good21, (3, 4), BOTH_GOOD);
        }

        // From here every literal is (3,3), (3,4) or (4,3).
        let guarded: Vec<Literal> = lits
            .iter()
            .copied()
            .filter(|&l| {
                is_43(f, l)
                    && f.occurrences(l)
                        .into_iter()
                        .any(|id| f.clause(id).iter().any(|m| is_33_plus(f, m)))
            })
            .collect();
        if !guarded.is_empty() {
            for &cand in &guarded {
                let has_unguarded_clause = f
                    .occurrences(cand.negated())
                    .into_iter()
                    .any(|id| !f.clause(id).iter().any(|m| is_43(f, m)));
                if has_unguarded_clause {
                    return branch(cand, CaseLabel::Good221, (4, 3), BOTH_GOOD);
                }
            }
            return Err(dispatch_err(
                "guarded (4,3)-set present but every negation clause holds a (4,3)-literal, \
                 which the autarky reduction should have consumed",
            ));
        }

        let pairs = f.coincident_pairs();
        if let Some((&(p, q), _)) = pairs.iter().next() {
            if f.degree_pair(p) == (3, 4) {
                return branch(p, CaseLabel::Good222a, (4, 4), NONE);
            }
            if f.degree_pair(q) == (3, 4) {
                return branch(q, CaseLabel::Good222a, (4, 4), NONE);
            }
            if is_33(f, p) && is_33(f, q) {
                return branch(x, CaseLabel::Good222b, (3, 4), BOTH_GOOD);
            }
            if is_43(f, p) && is_43(f, q) {
                return branch(p, CaseLabel::Good222c, (4, 3), BOTH_GOOD);
            }
            return Err(dispatch_err(format!(
                "coincident pair ({p},{q}) with degrees {:?}/{:?} escapes the pair cases",
                f.degree_pair(p),
                f.degree_pair(q)
            )));
        }
        if let Some((_, c)) = f.clauses().find(|(_, c)| c.len() == 2) {
            let u = c.iter().next().unwrap();
            return branch(u, CaseLabel::Good222d, (3, 5), NONE);
        }
        return Err(dispatch_err(
            "menu degrees, no coincident pair, no 2-clause: this formula should be bad-class",
        ));
    }

    // No (3,4)-literal. If (2,3+)-literals exist the population is
    // {(2,3+),(3+,2),(3,3)} and the 2-clause structure decides.
    if lits.iter().any(|&l| is_low(f, l)) {
        // First 2-clause holding a literal of positive degree at least 3.
        for (cid, c) in f.clauses().filter(|(_, c)| c.len() == 2) {
            let members: Vec<Literal> = c.iter().collect();
            let high: Vec<Literal> = members
                .iter()
                .copied()
                .filter(|&l| f.degree(l) >= 3)
                .collect();
            if high.is_empty() {
                continue;
            }
            let x = members
                .iter()
                .copied()
                .find(|&l| is_33(f, l))
                .unwrap_or(high[0]);
            let y = members.iter().copied().find(|&l| l != x).unwrap();

            if f.occurrences(x.negated())
                .into_iter()
                .all(|id| f.clause(id).len() == 2)
            {
                return branch(x, CaseLabel::Good311, (5, 3), NONE);
            }
            if is_33(f, x) {
                return branch(x, CaseLabel::Good312, (3, 4), BOTH_GOOD);
            }
            if f.degree(y) >= 3 {
                if f.occurrences(x.negated())
                    .into_iter()
                    .all(|id| f.clause(id).contains(y))
                {
                    return branch(y, CaseLabel::Good313, (5, 3), NONE);
                }
                return branch(x, CaseLabel::Good313, (3, 4), BOTH_GOOD);
            }
            // y is a (2,3+)-literal.
            let y_meets_negx = f
                .occurrences(y)
                .into_iter()
                .any(|id| f.clause(id).contains(x.negated()));
            if !y_meets_negx {
                return branch(x, CaseLabel::Good314, (4, 4), NONE);
            }
            let x_in_other_2clause = f
                .clauses()
                .any(|(id2, c2)| id2 != cid && c2.len() == 2 && c2.contains(x));
            if x_in_other_2clause {
                return branch(x, CaseLabel::Good315, (4, 4), NONE);
            }
            if f.degree(x) >= 4 {
                return branch(x, CaseLabel::Good315, (5, 3), NONE);
            }
            return branch(x, CaseLabel::Good315, (4, 3), BOTH_GOOD);
        }

        // 2-clauses, if any, hold only degree-2 literals.
        if let Some((cid, c)) = f.clauses().find(|(_, c)| c.len() == 2) {
            let members: Vec<Literal> = c.iter().collect();
            let (x, y) = (members[0], members[1]);
            let d_id = other_clause_of(f, y, cid);
            let d = f.clause(d_id).contains(x.negated()).then_some(d_id);
            let dt_id = other_clause_of(f, x, cid);
            let dt = f.clause(dt_id).contains(y.negated()).then_some(dt_id);
            return match (d, dt) {
                (None, _) => branch(x, CaseLabel::Good321, (3, 5), NONE),
                (Some(_), None) => branch(y, CaseLabel::Good321, (3, 5), NONE),
                (Some(di), Some(dti)) => {
                    if f.clause(di).len() == 2 {
                        Ok(Selection::Assign {
                            literal: y,
                            case: CaseLabel::Good322Assign,
                        })
                    } else if f.clause(dti).len() == 2 {
                        Ok(Selection::Assign {
                            literal: x,
                            case: CaseLabel::Good322Assign,
                        })
                    } else if f.clause(di).len() == 3 {
                        branch(y, CaseLabel::Good322, (3, 5), NONE)
                    } else if f.clause(dti).len() == 3 {
                        branch(x, CaseLabel::Good322, (3, 5), NONE)
                    } else {
                        branch(x, CaseLabel::Good322, (3, 4), BOTH_GOOD)
                    }
                }
            };
        }

        // No 2-clause: look for a clause mixing a (3,3)-literal with a
        // (2,3+)-literal.
        for (cid, c) in f.clauses() {
            let x = c.iter().find(|&l| is_33(f, l));
            let y = c.iter().find(|&l| is_low(f, l));
            if let (Some(x), Some(y)) = (x, y) {
                let c4 = other_clause_of(f, y, cid);
                if f.clause(c4).contains(x) {
                    return branch(x, CaseLabel::Good331, (5, 3), NONE);
                }
                return branch(x, CaseLabel::Good332, (4, 3), BOTH_GOOD);
            }
        }

        // Last shape: a clause with three (2,3+)-literals.
        for (cid, c) in f.clauses() {
            let lows: Vec<Literal> = c.iter().filter(|&l| is_low(f, l)).collect();
            if lows.len() < 3 {
                continue;
            }
            let xs = [lows[0], lows[1], lows[2]];
            let others = [
                other_clause_of(f, xs[0], cid),
                other_clause_of(f, xs[1], cid),
                other_clause_of(f, xs[2], cid),
            ];
            for &(i, j) in &[(0, 1), (0, 2), (1, 2)] {
                if others[i] == others[j] {
                    return branch(xs[i], CaseLabel::Good341, (5, 3), NONE);
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    if f.clause(others[j]).contains(xs[i].negated()) {
                        return branch(xs[i], CaseLabel::Good342, (4, 4), NONE);
                    }
                }
            }
            return branch(xs[0], CaseLabel::Good343, (4, 3), BOTH_GOOD);
        }
        return Err(dispatch_err(
            "(2,3+)-literals present but no 2-clause, no mixed clause, no triple clause",
        ));
    }

    // Population is all (3,3) now; anything else is an internal error.
    for &l in &lits {
        if !is_33(f, l) {
            return Err(dispatch_err(format!(
                "literal {l} with degrees {:?} escapes every branching case",
                f.degree_pair(l)
            )));
        }
    }
    let pairs = f.coincident_pairs();
    if !pairs.is_empty() {
        if let Some((&(p, _), _)) = pairs.iter().find(|(_, &cnt)| cnt >= 3) {
            return branch(p, CaseLabel::Good411, (6, 3), NONE);
        }
        let (&(p, q), _) = pairs.iter().next().unwrap();
        if f.occurrences(p).into_iter().any(|id| f.clause(id).len() == 2) {
            return branch(p, CaseLabel::Good412, (4, 4), NONE);
        }
        if f.occurrences(q).into_iter().any(|id| f.clause(id).len() == 2) {
            return branch(q, CaseLabel::Good412, (4, 4), NONE);
        }
        return branch(p, CaseLabel::Good412, (4, 3), BOTH_GOOD);
    }
    if let Some((_, c)) = f.clauses().find(|(_, c)| c.len() == 2) {
        let u = c.iter().next().unwrap();
        return branch(u, CaseLabel::Good42, (3, 5), NONE);
    }
    Err(dispatch_err(
        "all-(3,3) formula with no coincident pair and no 2-clause classified good",
    ))
}

/// Which side of a split gets explored first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchOrder {
    TrueFirst,
    FalseFirst,
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Explore both children of every branching node even after a model is
    /// found, so that every node is fully audited.
    pub exhaustive_audit: bool,
    /// Turn the first audit violation into an error instead of a counter.
    pub strict_audit: bool,
    /// Keep a per-node audit record in the report.
    pub collect_audit_log: bool,
    pub node_budget: u64,
    pub branch_order: BranchOrder,
    /// Collect human-readable search/reduction lines in the report.
    pub trace: bool,
}

impl Default for SolveConfig {
    fn default() -> SolveConfig {
        SolveConfig {
            exhaustive_audit: false,
            strict_audit: false,
            collect_audit_log: false,
            node_budget: 10_000_000,
            branch_order: BranchOrder::TrueFirst,
            trace: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("node budget exhausted after {0} branching nodes")]
    BudgetExceeded(u64),
    #[error("audit violation: {0}")]
    AuditViolation(String),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Audit record of one fully expanded branching node. Sides are positional:
/// side 1 is the branch where the chosen literal holds.
#[derive(Clone, Debug)]
pub struct NodeAuditRecord {
    pub index: u64,
    pub depth: u32,
    pub m: usize,
    pub class: ClassLabel,
    pub case: CaseLabel,
    pub literal: Literal,
    pub vector: (u32, u32),
    pub decreases: (usize, usize),
    pub child_classes: (ClassLabel, ClassLabel),
    pub phi_ok: bool,
    pub cover_ok: bool,
    pub claims_ok: bool,
}

impl NodeAuditRecord {
    pub fn ok(&self) -> bool {
        self.phi_ok && self.cover_ok && self.claims_ok
    }

    pub fn violation_count(&self) -> u64 {
        [self.phi_ok, self.cover_ok, self.claims_ok]
            .iter()
            .filter(|&&ok| !ok)
            .count() as u64
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub branching_nodes: u64,
    pub max_depth: u32,
    pub case_tallies: BTreeMap<CaseLabel, u64>,
    pub reductions: RuleTallies,
    pub audit_violations: u64,
    /// (leaves of the search tree) / (potential of the input formula).
    /// At most 1 whenever every node was fully expanded.
    pub potential_ratio: f64,
    /// 64-bit FNV-1a over the per-node search records and final tallies,
    /// rendered as 16 hex digits. Equal runs hash equally.
    pub trace_hash: String,
    pub audit_log: Vec<NodeAuditRecord>,
    pub trace_lines: Vec<String>,
}

impl SolveReport {
    pub fn case_tallies_by_name(&self) -> BTreeMap<String, u64> {
        self.case_tallies
            .iter()
            .map(|(case, &count)| (case.to_string(), count))
            .collect()
    }
}

/// The three per-node checks, separated from the searcher so tests can feed
/// fabricated nodes. Children are (reduced clause count, class), positional.
pub struct AuditOutcome {
    pub phi_ok: bool,
    pub cover_ok: bool,
    pub claims_ok: bool,
    pub decreases: (usize, usize),
}

pub fn audit_checks(
    parent_m: usize,
    parent_class: ClassLabel,
    decision: &BranchDecision,
    child1: (usize, ClassLabel),
    child2: (usize, ClassLabel),
    k: &PotentialConstants,
) -> AuditOutcome {
    let phi_parent = crate::analysis::potential(parent_m, parent_class, k);
    let phi_children = crate::analysis::potential(child1.0, child1.1, k)
        + crate::analysis::potential(child2.0, child2.1, k);
    let phi_ok = phi_children <= phi_parent;

    let d1 = parent_m.saturating_sub(child1.0);
    let d2 = parent_m.saturating_sub(child2.0);
    let grew = child1.0 > parent_m || child2.0 > parent_m;
    let guaranteed = BranchingVector::pair(decision.vector.0, decision.vector.1);
    let measured = BranchingVector::pair(d1 as u32, d2 as u32);
    let cover_ok = !grew && covers(&guaranteed, &measured).unwrap_or(false);

    let claim_holds = |claimed: bool, d: usize, v: u32, class: ClassLabel| {
        !claimed || class == ClassLabel::Good || d >= v as usize + 1
    };
    let claims_ok = claim_holds(decision.claims[0], d1, decision.vector.0, child1.1)
        && claim_holds(decision.claims[1], d2, decision.vector.1, child2.1);

    AuditOutcome {
        phi_ok,
        cover_ok,
        claims_ok,
        decreases: (d1, d2),
    }
}

/// Rebuilds a satisfying assignment by replaying the trail backwards.
///
/// Conditioning events (branch or reduction assignments) set their literal.
/// A resolution event re-decides its variable: if every saved clause of the
/// pivot family is already satisfied by some other literal, the negation is
/// safe; otherwise the pivot is set, which must satisfy-complete the
/// negation family since each cross resolvent either survived into the
/// later formula or was dropped as a tautology. Unassigned variables read as
/// false throughout, matching the final model's defaults.
pub fn reconstruct_model(trail: &[TrailEvent]) -> Assignment {
    let mut a = Assignment::new();
    for event in trail.iter().rev() {
        match event {
            TrailEvent::ReduceAssign { literal, .. } => a.set_true(*literal),
            TrailEvent::BranchAssign { literal, .. } => a.set_true(*literal),
            TrailEvent::SubsumptionDelete { .. } => {}
            TrailEvent::Resolution {
                pivot,
                with_pivot,
                with_negation,
            } => {
                let satisfied_elsewhere = |a: &Assignment, c: &crate::formula::Clause| {
                    c.iter()
                        .any(|l| l.var() != pivot.var() && a.literal_true_or_default(l))
                };
                if with_pivot.iter().all(|c| satisfied_elsewhere(&a, c)) {
                    a.set_true(pivot.negated());
                } else {
                    a.set_true(*pivot);
                    for c in with_negation {
                        assert!(
                            satisfied_elsewhere(&a, c),
                            "resolution replay left a clause of the negation family \
                             unsatisfied; the trail is inconsistent"
                        );
                    }
                }
            }
        }
    }
    a
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Fnv1a {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, text: &str) {
        for &b in text.as_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

struct NodeOutcome {
    sat: bool,
    /// Clause count right after this call's first reduction fixpoint; the
    /// parent audits against this, not against later forced simplification.
    reduced_m: usize,
    reduced_class: ClassLabel,
}

struct Searcher<'a> {
    cfg: &'a SolveConfig,
    consts: PotentialConstants,
    trail: Vec<TrailEvent>,
    nodes: u64,
    max_depth: u32,
    tallies: BTreeMap<CaseLabel, u64>,
    reductions: RuleTallies,
    violations: u64,
    audit_log: Vec<NodeAuditRecord>,
    model: Option<Assignment>,
    hash: Fnv1a,
    trace_lines: Vec<String>,
}

impl<'a> Searcher<'a> {
    fn new(cfg: &'a SolveConfig) -> Searcher<'a> {
        Searcher {
            cfg,
            consts: PotentialConstants::default(),
            trail: Vec::new(),
            nodes: 0,
            max_depth: 0,
            tallies: BTreeMap::new(),
            reductions: RuleTallies::default(),
            violations: 0,
            audit_log: Vec::new(),
            model: None,
            hash: Fnv1a::new(),
            trace_lines: Vec::new(),
        }
    }

    fn trace(&mut self, depth: u32, text: impl AsRef<str>) {
        if self.cfg.trace {
            self.trace_lines.push(format!("[{depth}] {}", text.as_ref()));
        }
    }

    fn reduce_here(&mut self, f: &mut Formula, depth: u32) {
        let before = f.m();
        let tallies = if self.cfg.trace {
            let mut sink = Vec::new();
            let t = reduce::reduce_fixpoint_traced(f, &mut self.trail, Some(&mut sink));
            for line in sink {
                self.trace_lines.push(format!("[{depth}]   {line}"));
            }
            t
        } else {
            reduce::reduce_fixpoint(f, &mut self.trail)
        };
        self.reductions.absorb(tallies);
        if before != f.m() {
            self.trace(depth, format!("reduced m {before} -> {}", f.m()));
        }
    }

    fn recurse(&mut self, f: &mut Formula, depth: u32) -> Result<NodeOutcome, SolveError> {
        self.max_depth = self.max_depth.max(depth);
        self.reduce_here(f, depth);
        let reduced_m = f.m();
        let reduced_class = classify(f);

        let decision = loop {
            if f.is_empty() {
                if self.model.is_none() {
                    self.model = Some(reconstruct_model(&self.trail));
                }
                self.trace(depth, "leaf: satisfied");
                return Ok(NodeOutcome {
                    sat: true,
                    reduced_m,
                    reduced_class,
                });
            }
            if f.has_empty_clause() {
                self.trace(depth, "leaf: contradiction");
                return Ok(NodeOutcome {
                    sat: false,
                    reduced_m,
                    reduced_class,
                });
            }
            let class_now = classify(f);
            match select_branch(f, class_now)? {
                Selection::Assign { literal, case } => {
                    *self.tallies.entry(case).or_insert(0) += 1;
                    self.trace(depth, format!("{case}: forced {literal}"));
                    self.trail.push(TrailEvent::ReduceAssign {
                        literal,
                        rule: AssignRule::Forced,
                    });
                    f.assign_literal(literal);
                    self.reduce_here(f, depth);
                }
                Selection::Branch(d) => break (d, class_now),
            }
        };
        let (decision, class_here) = decision;
        let m_here = f.m();

        if self.nodes >= self.cfg.node_budget {
            return Err(SolveError::BudgetExceeded(self.nodes));
        }
        self.nodes += 1;
        let index = self.nodes;
        *self.tallies.entry(decision.case).or_insert(0) += 1;
        self.trace(
            depth,
            format!(
                "{}: branch {} vector ({},{}) m {}",
                decision.case, decision.literal, decision.vector.0, decision.vector.1, m_here
            ),
        );

        let x = decision.literal;
        let order = match self.cfg.branch_order {
            BranchOrder::TrueFirst => [(x, BranchSide::First), (x.negated(), BranchSide::Second)],
            BranchOrder::FalseFirst => [(x.negated(), BranchSide::First), (x, BranchSide::Second)],
        };

        let mark = self.trail.len();
        let mut outcomes: Vec<NodeOutcome> = Vec::with_capacity(2);
        let mut cut = false;
        for (lit, side) in order {
            self.trail.push(TrailEvent::BranchAssign { literal: lit, side });
            let mut child = f.clone();
            child.assign_literal(lit);
            let outcome = self.recurse(&mut child, depth + 1)?;
            self.trail.truncate(mark);
            let sat = outcome.sat;
            outcomes.push(outcome);
            if sat && !self.cfg.exhaustive_audit {
                cut = outcomes.len() < 2;
                break;
            }
        }

        let mut record = format!(
            "N{index} d{depth} m{m_here} {class_here} {} x{} v({},{})",
            decision.case, x, decision.vector.0, decision.vector.1
        );
        let sat = outcomes.iter().any(|o| o.sat);
        if cut {
            let first = &outcomes[0];
            record.push_str(&format!(
                " s1({},{}) cut",
                m_here.saturating_sub(first.reduced_m),
                first.reduced_class
            ));
        } else {
            // Positional children: side 1 is the x-true branch regardless of
            // exploration order.
            let (c1, c2) = match self.cfg.branch_order {
                BranchOrder::TrueFirst => (&outcomes[0], &outcomes[1]),
                BranchOrder::FalseFirst => (&outcomes[1], &outcomes[0]),
            };
            let audit = audit_checks(
                m_here,
                class_here,
                &decision,
                (c1.reduced_m, c1.reduced_class),
                (c2.reduced_m, c2.reduced_class),
                &self.consts,
            );
            record.push_str(&format!(
                " s1({},{}) s2({},{})",
                audit.decreases.0, c1.reduced_class, audit.decreases.1, c2.reduced_class
            ));
            let node_record = NodeAuditRecord {
                index,
                depth,
                m: m_here,
                class: class_here,
                case: decision.case,
                literal: x,
                vector: decision.vector,
                decreases: audit.decreases,
                child_classes: (c1.reduced_class, c2.reduced_class),
                phi_ok: audit.phi_ok,
                cover_ok: audit.cover_ok,
                claims_ok: audit.claims_ok,
            };
            if !node_record.ok() {
                self.violations += node_record.violation_count();
                let detail = format!(
                    "node {index} case {} at m={} vector ({},{}) measured ({},{}) children \
                     {}/{}: phi_ok={} cover_ok={} claims_ok={}",
                    decision.case,
                    m_here,
                    decision.vector.0,
                    decision.vector.1,
                    audit.decreases.0,
                    audit.decreases.1,
                    c1.reduced_class,
                    c2.reduced_class,
                    node_record.phi_ok,
                    node_record.cover_ok,
                    node_record.claims_ok
                );
                self.trace(depth, format!("AUDIT VIOLATION {detail}"));
                if self.cfg.strict_audit {
                    return Err(SolveError::AuditViolation(detail));
                }
            }
            if self.cfg.collect_audit_log {
                self.audit_log.push(node_record);
            }
        }
        self.hash.write(&record);
        self.hash.write("\n");

        Ok(NodeOutcome {
            sat,
            reduced_m,
            reduced_class,
        })
    }
}

/// Decides the formula. The input is cloned; clause identities inside the
/// search are independent of the caller's.
pub fn solve(input: &Formula, cfg: &SolveConfig) -> Result<(Verdict, SolveReport), SolveError> {
    let mut searcher = Searcher::new(cfg);
    let mut working = input.clone();
    let outcome = searcher.recurse(&mut working, 0)?;

    let verdict = if outcome.sat {
        let model = searcher
            .model
            .take()
            .ok_or_else(|| SolveError::Internal("satisfiable verdict without a model".into()))?;
        if !input.satisfied_by(&model) {
            return Err(SolveError::Internal(
                "reconstructed model fails the input formula".into(),
            ));
        }
        Verdict::Satisfiable(model)
    } else {
        Verdict::Unsatisfiable
    };

    let mut hash = searcher.hash;
    hash.write(&format!(
        "verdict {}\n",
        if outcome.sat { "sat" } else { "unsat" }
    ));
    hash.write(&format!("nodes {}\n", searcher.nodes));
    for (case, count) in &searcher.tallies {
        hash.write(&format!("tally {case}={count}\n"));
    }
    let r = &searcher.reductions;
    hash.write(&format!(
        "rules {},{},{},{},{}\n",
        r.r1, r.r2, r.r3, r.r4, r.r5
    ));

    let root_potential =
        crate::analysis::potential(input.m(), classify(input), &searcher.consts);
    let report = SolveReport {
        branching_nodes: searcher.nodes,
        max_depth: searcher.max_depth,
        case_tallies: searcher.tallies,
        reductions: searcher.reductions,
        audit_violations: searcher.violations,
        potential_ratio: (searcher.nodes + 1) as f64 / root_potential,
        trace_hash: format!("{:016x}", hash.0),
        audit_log: searcher.audit_log,
        trace_lines: searcher.trace_lines,
    };
    Ok((verdict, report))
}
