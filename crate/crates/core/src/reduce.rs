//! The five rewrite rules, their fixpoint, and the good/bad classifier.
//!
//! Every rule application is recorded on a trail so that a satisfying
//! assignment can later be rebuilt by replaying the trail backwards. Rules are
//! tried in a fixed priority (unit/pure, subsumption, small resolution, then
//! the two autarky rules) and the loop restarts from the top after each hit,
//! which makes the fixpoint deterministic.

use crate::formula::{Clause, ClauseId, Formula, Literal};
use std::collections::BTreeSet;
use std::fmt;

/// Which rule forced an assignment on the trail. `Forced` marks the searcher's
/// no-branch simplification step, which conditions on a literal outside the
/// five rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignRule {
    R1,
    R4,
    R5,
    Forced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSide {
    First,
    Second,
}

/// One step of the solving history, in execution order.
#[derive(Clone, Debug)]
pub enum TrailEvent {
    /// A reduction (or forced simplification) set this literal to 1.
    ReduceAssign { literal: Literal, rule: AssignRule },
    /// A variable was resolved away. The clause copies are the complete
    /// pre-resolution families: `with_pivot` contains `pivot`, `with_negation`
    /// its negation. Model replay needs both.
    Resolution {
        pivot: Literal,
        with_pivot: Vec<Clause>,
        with_negation: Vec<Clause>,
    },
    /// Subsumption deleted this clause. Irrelevant for model replay.
    SubsumptionDelete { id: ClauseId },
    /// The search split here and set this literal to 1 in the current branch.
    BranchAssign { literal: Literal, side: BranchSide },
}

/// Application counts per rule, the shape reported in stats output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleTallies {
    pub r1: u64,
    pub r2: u64,
    pub r3: u64,
    pub r4: u64,
    pub r5: u64,
}

impl RuleTallies {
    pub fn absorb(&mut self, other: RuleTallies) {
        self.r1 += other.r1;
        self.r2 += other.r2;
        self.r3 += other.r3;
        self.r4 += other.r4;
        self.r5 += other.r5;
    }

    pub fn total(&self) -> u64 {
        self.r1 + self.r2 + self.r3 + self.r4 + self.r5
    }
}

/// Formula class driving both the branching strategy and the potential
/// weight. `Bad` is the narrow degree-regular shape where only mediocre
/// branchings exist; everything else is `Good`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Good,
    Bad,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Good => write!(f, "good"),
            ClassLabel::Bad => write!(f, "bad"),
        }
    }
}

/// Unit clauses first (clause-id order), then pure literals (literal order).
/// Applies one assignment per call.
pub fn rule1_unit_pure(f: &mut Formula, trail: &mut Vec<TrailEvent>) -> bool {
    let unit = f
        .clauses()
        .find(|(_, c)| c.len() == 1)
        .map(|(_, c)| c.iter().next().unwrap());
    let pick = unit.or_else(|| {
        f.live_literals()
            .into_iter()
            .find(|l| f.degree(l.negated()) == 0)
    });
    match pick {
        Some(lit) => {
            trail.push(TrailEvent::ReduceAssign {
                literal: lit,
                rule: AssignRule::R1,
            });
            f.assign_literal(lit);
            true
        }
        None => false,
    }
}

/// Deletes one clause that contains another as a subset. Scans subset
/// candidates in id order and probes supersets through the occurrence list of
/// the candidate's rarest literal; equal clauses count, the later id dies.
pub fn rule2_subsumption(f: &mut Formula, trail: &mut Vec<TrailEvent>) -> bool {
    let ids: Vec<ClauseId> = f.clause_ids().collect();
    for &cid in &ids {
        let c = f.clause(cid).clone();
        if c.is_empty() {
            // The empty clause subsumes everything else.
            if let Some(&victim) = ids.iter().find(|&&i| i != cid) {
                f.remove_clause(victim);
                trail.push(TrailEvent::SubsumptionDelete { id: victim });
                return true;
            }
            continue;
        }
        let probe = c.iter().min_by_key(|&l| f.degree(l)).unwrap();
        for vid in f.occurrences(probe) {
            if vid == cid {
                continue;
            }
            if c.is_subset_of(f.clause(vid)) {
                f.remove_clause(vid);
                trail.push(TrailEvent::SubsumptionDelete { id: vid });
                return true;
            }
        }
    }
    false
}

/// Resolves a variable away: pairwise unions of the two clause families minus
/// the pivot, skipping tautologies, then both families are deleted. The
/// pre-resolution families are saved on the trail.
pub fn resolve_variable(f: &mut Formula, pivot: Literal, trail: &mut Vec<TrailEvent>) {
    let e_ids = f.occurrences(pivot);
    let d_ids = f.occurrences(pivot.negated());
    let with_pivot: Vec<Clause> = e_ids.iter().map(|&i| f.clause(i).clone()).collect();
    let with_negation: Vec<Clause> = d_ids.iter().map(|&i| f.clause(i).clone()).collect();
    for id in e_ids.into_iter().chain(d_ids) {
        f.remove_clause(id);
    }
    for e in &with_pivot {
        for d in &with_negation {
            if let Some(r) = e.resolvent(d, pivot.var()) {
                f.add_clause(r);
            }
        }
    }
    trail.push(TrailEvent::Resolution {
        pivot,
        with_pivot,
        with_negation,
    });
}

/// Resolves one variable whose degrees make resolution free: a literal seen
/// once against any number of negations, or a (2,2) split. Variables are
/// scanned in ascending order; for each, the positive single-occurrence case
/// wins over the negative one.
pub fn rule3_resolve_small(f: &mut Formula, trail: &mut Vec<TrailEvent>) -> bool {
    for v in f.live_vars() {
        let pos = Literal::new(v, true);
        let (a, b) = f.degree_pair(pos);
        let pivot = if a == 1 && b >= 1 {
            Some(pos)
        } else if b == 1 && a >= 1 {
            Some(pos.negated())
        } else if a == 2 && b == 2 {
            Some(pos)
        } else {
            None
        };
        if let Some(p) = pivot {
            resolve_variable(f, p, trail);
            return true;
        }
    }
    false
}

/// True iff every clause containing a negation of a member also contains a
/// member. Assigning an autarkic set to 1 preserves satisfiability.
///
/// The set must not contain a literal together with its negation.
pub fn is_autarkic(f: &Formula, set: &BTreeSet<Literal>) -> bool {
    for &l in set {
        assert!(
            !set.contains(&l.negated()),
            "autarky test on a set containing {l} and its negation"
        );
    }
    set.iter().all(|&l| {
        f.occurrences(l.negated())
            .into_iter()
            .all(|id| f.clause(id).iter().any(|m| set.contains(&m)))
    })
}

fn pair_is(f: &Formula, l: Literal, a_want: usize, b_min: usize) -> bool {
    let (a, b) = f.degree_pair(l);
    a == a_want && b >= b_min
}

/// If every clause holding a (2,3+)-literal also holds a (3+,2)-literal,
/// assigns every (3+,2)-literal to 1 in one batch. With no (2,3+)-literal
/// present the rule does not fire: the guard would be vacuous and assigning
/// unguarded literals is not satisfiability-preserving.
pub fn rule4_autarky(f: &mut Formula, trail: &mut Vec<TrailEvent>) -> bool {
    let lits = f.live_literals();
    let low: Vec<Literal> = lits.iter().copied().filter(|&l| pair_is(f, l, 2, 3)).collect();
    if low.is_empty() {
        return false;
    }
    let high: Vec<Literal> = lits
        .iter()
        .copied()
        .filter(|&l| {
            let (a, b) = f.degree_pair(l);
            a >= 3 && b == 2
        })
        .collect();
    let mut guarded: BTreeSet<ClauseId> = BTreeSet::new();
    for &l in &low {
        guarded.extend(f.occurrences(l));
    }
    for id in guarded {
        if !f.clause(id).iter().any(|m| high.contains(&m)) {
            return false;
        }
    }
    for &l in &high {
        trail.push(TrailEvent::ReduceAssign {
            literal: l,
            rule: AssignRule::R4,
        });
        f.assign_literal(l);
    }
    true
}

/// Autarky over the (4,3)-literals that sit in a clause with a (3,3+)-literal:
/// if every clause holding a negation of such a literal holds some
/// (4,3)-literal, the whole set is assigned 1.
pub fn rule5_autarky(f: &mut Formula, trail: &mut Vec<TrailEvent>) -> bool {
    let lits = f.live_literals();
    let is43 = |f: &Formula, l: Literal| f.degree_pair(l) == (4, 3);
    let members: Vec<Literal> = lits
        .iter()
        .copied()
        .filter(|&l| {
            is43(f, l)
                && f.occurrences(l)
                    .into_iter()
                    .any(|id| f.clause(id).iter().any(|m| pair_is(f, m, 3, 3)))
        })
        .collect();
    if members.is_empty() {
        return false;
    }
    let mut blocked: BTreeSet<ClauseId> = BTreeSet::new();
    for &l in &members {
        blocked.extend(f.occurrences(l.negated()));
    }
    for id in blocked {
        if !f.clause(id).iter().any(|m| is43(f, m)) {
            return false;
        }
    }
    for &l in &members {
        trail.push(TrailEvent::ReduceAssign {
            literal: l,
            rule: AssignRule::R5,
        });
        f.assign_literal(l);
    }
    true
}

/// Applies the rules to a fixpoint, restarting from the top priority after
/// every hit. A formula containing an empty clause short-circuits: repeated
/// subsumption against the empty clause is its true fixpoint, so everything
/// else is deleted and exactly one empty clause remains. Returns per-rule
/// application counts; pass a sink to capture one line per application.
pub fn reduce_fixpoint_traced(
    f: &mut Formula,
    trail: &mut Vec<TrailEvent>,
    mut trace: Option<&mut Vec<String>>,
) -> RuleTallies {
    let mut t = RuleTallies::default();
    loop {
        if let Some(keep) = f.first_empty_clause() {
            let victims: Vec<ClauseId> = f.clause_ids().filter(|&i| i != keep).collect();
            for id in victims {
                let before = f.m();
                f.remove_clause(id);
                trail.push(TrailEvent::SubsumptionDelete { id });
                t.r2 += 1;
                if let Some(sink) = trace.as_deref_mut() {
                    sink.push(format!("R2 delete #{} m {}->{}", id.0, before, f.m()));
                }
            }
            return t;
        }
        let before = f.m();
        let mark = trail.len();
        let hit = if rule1_unit_pure(f, trail) {
            t.r1 += 1;
            Some("R1")
        } else if rule2_subsumption(f, trail) {
            t.r2 += 1;
            Some("R2")
        } else if rule3_resolve_small(f, trail) {
            t.r3 += 1;
            Some("R3")
        } else if rule4_autarky(f, trail) {
            t.r4 += 1;
            Some("R4")
        } else if rule5_autarky(f, trail) {
            t.r5 += 1;
            Some("R5")
        } else {
            None
        };
        match hit {
            Some(rule) => {
                if let Some(sink) = trace.as_deref_mut() {
                    let what = describe_events(&trail[mark..]);
                    sink.push(format!("{rule} {what} m {}->{}", before, f.m()));
                }
            }
            None => return t,
        }
    }
}

/// `reduce_fixpoint_traced` without the trace sink.
pub fn reduce_fixpoint(f: &mut Formula, trail: &mut Vec<TrailEvent>) -> RuleTallies {
    reduce_fixpoint_traced(f, trail, None)
}

fn describe_events(events: &[TrailEvent]) -> String {
    let parts: Vec<String> = events
        .iter()
        .map(|e| match e {
            TrailEvent::ReduceAssign { literal, .. } => format!("assign {literal}"),
            TrailEvent::Resolution { pivot, .. } => format!("resolve {pivot}"),
            TrailEvent::SubsumptionDelete { id } => format!("delete #{}", id.0),
            TrailEvent::BranchAssign { literal, .. } => format!("branch {literal}"),
        })
        .collect();
    parts.join(" ")
}

/// Bad iff all four hold: every variable is a (3,3)/(3,4)/(4,3)-literal, no
/// pair of literals shares two clauses, no 2-clause, and no clause mixes a
/// (4,3)-literal with a (3,3+)-literal. Degenerate formulas (empty, or
/// holding an empty clause) are good by convention; they only ever meet the
/// potential bookkeeping, never the brancher.
pub fn classify(f: &Formula) -> ClassLabel {
    if f.is_empty() || f.has_empty_clause() {
        return ClassLabel::Good;
    }
    for v in f.live_vars() {
        let (a, b) = f.degree_pair(Literal::new(v, true));
        if !matches!((a, b), (3, 3) | (3, 4) | (4, 3)) {
            return ClassLabel::Good;
        }
    }
    if f.clauses().any(|(_, c)| c.len() == 2) {
        return ClassLabel::Good;
    }
    if !f.coincident_pairs().is_empty() {
        return ClassLabel::Good;
    }
    for (_, c) in f.clauses() {
        let has_43 = c.iter().any(|l| f.degree_pair(l) == (4, 3));
        let has_33p = c.iter().any(|l| {
            let (a, b) = f.degree_pair(l);
            a == 3 && b >= 3
        });
        if has_43 && has_33p {
            return ClassLabel::Good;
        }
    }
    ClassLabel::Bad
}

/// Structural facts that hold for every nonempty reduced formula without an
/// empty clause. Exposed so tests and audits can assert them wholesale.
pub fn reduced_shape_violations(f: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    for (id, c) in f.clauses() {
        if c.len() == 1 {
            out.push(format!("1-clause #{}", id.0));
        }
    }
    for v in f.live_vars() {
        let l = Literal::new(v, true);
        let (a, b) = f.degree_pair(l);
        if (a, b) == (2, 2) {
            out.push(format!("(2,2)-literal {l}"));
        }
        if (a <= 1 && b >= 1) || (b <= 1 && a >= 1) {
            out.push(format!("({a},{b})-literal {l}"));
        }
        if a + b < 5 {
            out.push(format!("total degree {} on {l}", a + b));
        }
    }
    out
}
