//! Exact SAT solving by clause-count reduction.
//!
//! The solver alternates two phases: a reduction fixpoint that simplifies the
//! formula with five rewrite rules, and a branching step that splits on one
//! literal chosen by a case analysis of the reduced formula's degree
//! structure. The point of the case analysis is quantitative: every branch is
//! annotated with the minimum number of clauses it promises to remove on each
//! side, and the search can audit those promises at runtime against the
//! clause counts it actually observes.
//!
//! The crate exposes the solver ([`search::solve`]), the reduction engine
//! ([`reduce`]), the quantitative machinery (branching vectors and the
//! weighted potential in [`analysis`]), a brute-force reference solver
//! ([`oracle`]), seeded instance generators ([`gen`]), and DIMACS I/O
//! ([`dimacs`]).

pub mod analysis;
pub mod bench;
pub mod dimacs;
pub mod formula;
pub mod gen;
pub mod oracle;
pub mod reduce;
pub mod search;

pub use formula::{Assignment, Clause, ClauseId, Formula, Literal, Var};
