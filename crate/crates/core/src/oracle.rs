//! Brute-force reference solver.
//!
//! Enumerates every assignment over the variables that actually occur, so it
//! is trustworthy on exactly the instances where it is affordable. The search
//! solver is validated against this module, never the other way round.

use crate::dimacs::Verdict;
use crate::formula::{Assignment, Formula, Var};

/// Refusal to enumerate: the formula mentions more variables than the cap.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
#[error("{occurring} occurring variables exceed the exhaustive cap of {cap}")]
pub struct TooManyVars {
    pub occurring: usize,
    pub cap: usize,
}

/// Hard ceiling on occurring variables for exhaustive enumeration.
pub const EXHAUSTIVE_CAP: usize = 25;

/// Decides satisfiability by trying all `2^n` assignments over the occurring
/// variables. On success returns the lexicographically first model: variables
/// ascending, with 0 preferred over 1, and non-occurring variables left out.
pub fn solve_exhaustive(formula: &Formula) -> Result<Verdict, TooManyVars> {
    let vars: Vec<Var> = formula.live_vars().into_iter().collect();
    if vars.len() > EXHAUSTIVE_CAP {
        return Err(TooManyVars {
            occurring: vars.len(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    let b = vars.len();

    // Bit layout: vars[0] takes the highest bit, so counting upward tries
    // vars[0] = 0 for the entire first half. The first satisfying counter is
    // then the lexicographically first model.
    let bit_of = |v: Var| -> u32 {
        let i = vars.binary_search(&v).expect("live var") as u32;
        (b as u32) - 1 - i
    };

    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .map(|(_, clause)| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for lit in clause.iter() {
                let bit = 1u32 << bit_of(lit.var());
                if lit.is_positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect();

    let total: u64 = 1u64 << b;
    for k in 0..total {
        let k = k as u32;
        if masks
            .iter()
            .all(|&(pos, neg)| k & pos != 0 || !k & neg != 0)
        {
            let mut a = Assignment::new();
            for &v in &vars {
                let lit = crate::formula::Literal::new(v, k & (1u32 << bit_of(v)) != 0);
                a.set_true(lit);
            }
            return Ok(Verdict::Satisfiable(a));
        }
    }
    Ok(Verdict::Unsatisfiable)
}

/// Satisfiability only, same enumeration.
pub fn is_satisfiable(formula: &Formula) -> Result<bool, TooManyVars> {
    solve_exhaustive(formula).map(|v| v.is_sat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::formula_from_ints;

    fn model_ints(v: &Verdict) -> Vec<i64> {
        match v {
            Verdict::Satisfiable(a) => a
                .iter()
                .map(|(var, val)| if val { i64::from(var.0) } else { -i64::from(var.0) })
                .collect(),
            Verdict::Unsatisfiable => panic!("expected SAT"),
        }
    }

    #[test]
    fn empty_formula_is_sat_with_empty_model() {
        let v = solve_exhaustive(&Formula::new()).unwrap();
        assert_eq!(model_ints(&v), Vec::<i64>::new());
    }

    #[test]
    fn empty_clause_is_unsat() {
        let f = Formula::from_clauses([crate::formula::Clause::empty()]);
        assert_eq!(solve_exhaustive(&f).unwrap(), Verdict::Unsatisfiable);
    }

    #[test]
    fn first_model_is_lexicographically_smallest() {
        // Satisfiable by 1=0,3=1 among others; that is the smallest.
        let f = formula_from_ints(&[&[1, 3], &[-1, 3]]);
        let v = solve_exhaustive(&f).unwrap();
        assert_eq!(model_ints(&v), vec![-1, 3]);

        // Forcing var 1 true flips the leading choice.
        let g = formula_from_ints(&[&[1], &[2, -3]]);
        let v = solve_exhaustive(&g).unwrap();
        assert_eq!(model_ints(&v), vec![1, -2, -3]);
    }

    #[test]
    fn classic_small_unsat_instances() {
        // All four polarity patterns over two vars.
        let f = formula_from_ints(&[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        assert_eq!(solve_exhaustive(&f).unwrap(), Verdict::Unsatisfiable);

        // Contradicting units.
        let g = formula_from_ints(&[&[4], &[-4]]);
        assert_eq!(solve_exhaustive(&g).unwrap(), Verdict::Unsatisfiable);
    }

    #[test]
    fn sparse_variable_indices_work() {
        let f = formula_from_ints(&[&[10, -20], &[20, 30], &[-10, -30]]);
        let v = solve_exhaustive(&f).unwrap();
        assert_eq!(model_ints(&v), vec![-10, -20, 30]);
    }

    #[test]
    fn cap_is_enforced() {
        let clauses: Vec<Vec<i64>> = (1..=26).map(|v| vec![v as i64]).collect();
        let refs: Vec<&[i64]> = clauses.iter().map(|c| c.as_slice()).collect();
        let f = formula_from_ints(&refs);
        assert_eq!(
            solve_exhaustive(&f),
            Err(TooManyVars { occurring: 26, cap: 25 })
        );
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // Pigeon i in hole j is var 2(i-1)+j; i in 1..=3, j in 1..=2.
        let p = |i: i64, j: i64| 2 * (i - 1) + j;
        let mut clauses: Vec<Vec<i64>> = (1..=3).map(|i| vec![p(i, 1), p(i, 2)]).collect();
        for j in 1..=2 {
            for i1 in 1..=3 {
                for i2 in (i1 + 1)..=3 {
                    clauses.push(vec![-p(i1, j), -p(i2, j)]);
                }
            }
        }
        let refs: Vec<&[i64]> = clauses.iter().map(|c| c.as_slice()).collect();
        let f = formula_from_ints(&refs);
        assert_eq!(solve_exhaustive(&f).unwrap(), Verdict::Unsatisfiable);
    }

    #[test]
    fn model_actually_satisfies() {
        let f = formula_from_ints(&[&[1, 2, -3], &[-1, 3], &[-2, -3], &[2, 3]]);
        match solve_exhaustive(&f).unwrap() {
            Verdict::Satisfiable(a) => assert!(f.satisfied_by(&a)),
            Verdict::Unsatisfiable => panic!("instance is satisfiable"),
        }
    }
}
