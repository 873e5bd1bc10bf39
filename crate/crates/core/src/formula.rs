//! Clause-set representation with stable clause ids and a literal occurrence index.
//!
//! The solver measures progress by the number of clauses, so the formula type
//! is built around two queries that must stay cheap and deterministic: "which
//! clauses contain this literal" and "how many clauses are left". All iteration
//! orders are fixed (ids ascending, literals by code) so that every downstream
//! decision is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// 1-based variable index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal packed as `var << 1 | sign`, sign bit set for the negated form.
///
/// The packing gives a total order (variable ascending, positive before
/// negative) that doubles as the tie-break order everywhere a rule says
/// "pick any literal".
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: Var, positive: bool) -> Literal {
        Literal(var.0 << 1 | u32::from(!positive))
    }

    /// Decodes a DIMACS-style signed integer. Zero and overflowing magnitudes
    /// are rejected.
    pub fn from_dimacs(value: i64) -> Option<Literal> {
        let magnitude = value.unsigned_abs();
        if value == 0 || magnitude > u64::from(u32::MAX >> 1) {
            return None;
        }
        Some(Literal::new(Var(magnitude as u32), value > 0))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negated(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.0 >> 1);
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Stable integer key used by hashes and trace lines.
    pub fn code(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Literal({})", self.to_dimacs())
    }
}

/// A clause: a set of literals, stored sorted by literal code.
///
/// Invariants: no duplicate literal, no variable in both polarities. The empty
/// clause is representable and means "falsified".
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Builds a clause from arbitrary literals, deduplicating as a set.
    /// Returns `None` if some variable occurs in both polarities.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Option<Clause> {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        for w in v.windows(2) {
            if w[0].var() == w[1].var() {
                return None;
            }
        }
        Some(Clause { lits: v })
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Literal> + '_ {
        self.lits.iter().copied()
    }

    /// Subset test over the sorted representations.
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        if self.lits.len() > other.lits.len() {
            return false;
        }
        let mut it = other.lits.iter();
        'outer: for &l in &self.lits {
            for &o in it.by_ref() {
                if o == l {
                    continue 'outer;
                }
                if o > l {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// The clause with one literal removed; no-op if the literal is absent.
    pub fn without(&self, lit: Literal) -> Clause {
        Clause {
            lits: self.lits.iter().copied().filter(|&l| l != lit).collect(),
        }
    }

    /// Union of two clauses minus both polarities of `pivot`; `None` if the
    /// result would contain a variable in both polarities (a tautology).
    pub fn resolvent(&self, other: &Clause, pivot: Var) -> Option<Clause> {
        Clause::new(
            self.iter()
                .chain(other.iter())
                .filter(|l| l.var() != pivot),
        )
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// Stable clause identifier. Ids are never reused within one formula's life,
/// so deleting and adding clauses cannot make two decisions look alike.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ClauseId(pub u32);

/// Partial assignment: each variable is 0, 1, or unassigned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<Var, bool>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn value(&self, var: Var) -> Option<bool> {
        self.values.get(&var).copied()
    }

    pub fn is_assigned(&self, var: Var) -> bool {
        self.values.contains_key(&var)
    }

    /// Makes `lit` true. Overwriting an existing value is a caller bug.
    pub fn set_true(&mut self, lit: Literal) {
        let prev = self.values.insert(lit.var(), lit.is_positive());
        debug_assert!(
            prev.is_none() || prev == Some(lit.is_positive()),
            "variable {} assigned twice with different values",
            lit.var()
        );
    }

    /// Truth value of a literal, reading unassigned variables as 0.
    pub fn literal_true_or_default(&self, lit: Literal) -> bool {
        match self.value(lit.var()) {
            Some(v) => v == lit.is_positive(),
            None => !lit.is_positive(),
        }
    }

    /// Fills every variable in 1..=n that is still unassigned with 0.
    pub fn complete(&mut self, n: u32) {
        for v in 1..=n {
            self.values.entry(Var(v)).or_insert(false);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values.iter().map(|(&v, &b)| (v, b))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A CNF formula: an id-keyed multiset of clauses plus the occurrence index.
///
/// Duplicate clause contents are allowed (they get distinct ids); the
/// subsumption rule is what removes them.
#[derive(Clone, Default)]
pub struct Formula {
    clauses: BTreeMap<ClauseId, Clause>,
    occ: BTreeMap<Literal, BTreeSet<ClauseId>>,
    next_id: u32,
}

impl Formula {
    pub fn new() -> Formula {
        Formula::default()
    }

    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Formula {
        let mut f = Formula::new();
        for c in clauses {
            f.add_clause(c);
        }
        f
    }

    /// Number of clauses. This is the measure the whole solver optimizes.
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Number of variables with at least one occurrence in either polarity.
    pub fn live_var_count(&self) -> usize {
        self.live_vars().len()
    }

    pub fn live_vars(&self) -> BTreeSet<Var> {
        self.occ
            .iter()
            .filter(|(_, ids)| !ids.is_empty())
            .map(|(l, _)| l.var())
            .collect()
    }

    pub fn max_var(&self) -> u32 {
        self.live_vars().iter().map(|v| v.0).max().unwrap_or(0)
    }

    pub fn add_clause(&mut self, clause: Clause) -> ClauseId {
        let id = ClauseId(self.next_id);
        self.next_id += 1;
        for lit in clause.iter() {
            self.occ.entry(lit).or_default().insert(id);
        }
        self.clauses.insert(id, clause);
        id
    }

    pub fn remove_clause(&mut self, id: ClauseId) -> Clause {
        let clause = self.clauses.remove(&id).expect("removing a dead clause id");
        for lit in clause.iter() {
            if let Some(ids) = self.occ.get_mut(&lit) {
                ids.remove(&id);
                if ids.is_empty() {
                    self.occ.remove(&lit);
                }
            }
        }
        clause
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[&id]
    }

    pub fn get_clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.get(&id)
    }

    /// Clauses in id order.
    pub fn clauses(&self) -> impl Iterator<Item = (ClauseId, &Clause)> + '_ {
        self.clauses.iter().map(|(&id, c)| (id, c))
    }

    pub fn clause_ids(&self) -> impl Iterator<Item = ClauseId> + '_ {
        self.clauses.keys().copied()
    }

    /// Ids of clauses containing `lit`, ascending.
    pub fn occurrences(&self, lit: Literal) -> Vec<ClauseId> {
        self.occ
            .get(&lit)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    pub fn degree(&self, lit: Literal) -> usize {
        self.occ.get(&lit).map(|s| s.len()).unwrap_or(0)
    }

    /// `(degree of lit, degree of its negation)`.
    pub fn degree_pair(&self, lit: Literal) -> (usize, usize) {
        (self.degree(lit), self.degree(lit.negated()))
    }

    /// Every literal with at least one occurrence, ascending by code.
    pub fn live_literals(&self) -> Vec<Literal> {
        self.occ
            .iter()
            .filter(|(_, ids)| !ids.is_empty())
            .map(|(&l, _)| l)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn first_empty_clause(&self) -> Option<ClauseId> {
        self.clauses
            .iter()
            .find(|(_, c)| c.is_empty())
            .map(|(&id, _)| id)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.first_empty_clause().is_some()
    }

    /// Removes `lit` from one clause, keeping the id. The clause may become
    /// empty; it stays in the formula.
    pub fn strip_literal(&mut self, id: ClauseId, lit: Literal) {
        let clause = self.clauses.get_mut(&id).expect("stripping a dead clause id");
        debug_assert!(clause.contains(lit));
        *clause = clause.without(lit);
        if let Some(ids) = self.occ.get_mut(&lit) {
            ids.remove(&id);
            if ids.is_empty() {
                self.occ.remove(&lit);
            }
        }
    }

    /// Conditions the formula on `lit = 1`: deletes every clause containing
    /// `lit` and strips the negation from the rest. The clause count drops by
    /// exactly the degree of `lit`.
    pub fn assign_literal(&mut self, lit: Literal) {
        for id in self.occurrences(lit) {
            self.remove_clause(id);
        }
        for id in self.occurrences(lit.negated()) {
            self.strip_literal(id, lit.negated());
        }
    }

    /// Unordered literal pairs that occur together in at least two clauses,
    /// with their co-occurrence counts, in (code, code) order.
    pub fn coincident_pairs(&self) -> BTreeMap<(Literal, Literal), u32> {
        let mut counts: BTreeMap<(Literal, Literal), u32> = BTreeMap::new();
        for (_, clause) in self.clauses() {
            let lits: Vec<Literal> = clause.iter().collect();
            for i in 0..lits.len() {
                for j in i + 1..lits.len() {
                    *counts.entry((lits[i], lits[j])).or_insert(0) += 1;
                }
            }
        }
        counts.retain(|_, &mut c| c >= 2);
        counts
    }

    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        self.clauses
            .values()
            .all(|c| c.iter().any(|l| assignment.literal_true_or_default(l)))
    }

    /// Occurrence-index sweep used by tests and debug assertions.
    pub fn check_consistency(&self) -> bool {
        for (&id, clause) in &self.clauses {
            for lit in clause.iter() {
                if !self.occ.get(&lit).is_some_and(|s| s.contains(&id)) {
                    return false;
                }
            }
        }
        for (&lit, ids) in &self.occ {
            if ids.is_empty() {
                return false;
            }
            for id in ids {
                match self.clauses.get(id) {
                    Some(c) if c.contains(lit) => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula[m={}](", self.m())?;
        for (i, (id, c)) in self.clauses().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "#{}{:?}", id.0, c)?;
        }
        write!(f, ")")
    }
}

/// Convenience constructor used all over the tests: clauses as slices of
/// DIMACS-style signed integers. Panics on zero or tautological input.
pub fn formula_from_ints(clauses: &[&[i64]]) -> Formula {
    Formula::from_clauses(clauses.iter().map(|ints| {
        Clause::new(
            ints.iter()
                .map(|&i| Literal::from_dimacs(i).expect("nonzero literal")),
        )
        .expect("no tautological test clauses")
    }))
}
