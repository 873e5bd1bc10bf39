//! Regression lock on the stored bad-class instance.
//!
//! The fixture is the generator's output for seed 2 at n=30 in 3-regular
//! pair-free mode, kept as a file so the classifier keeps recognizing the
//! shape even if generation internals move.

use brsat::dimacs::parse;
use brsat::formula::Literal;
use brsat::reduce::{classify, reduce_fixpoint, ClassLabel};
use brsat::search::{solve, SolveConfig};

const FIXTURE: &str = include_str!("fixtures/bad_n30.cnf");

#[test]
fn fixture_still_matches_its_generator_config() {
    use brsat::gen::{generate, GenConfig, GenMode, WidthDist};
    let f = generate(&GenConfig {
        seed: 2,
        n: 30,
        m: 0,
        widths: WidthDist::only(3),
        mode: GenMode::Degree3Adversarial {
            all_regular: true,
            pair_free: true,
        },
    })
    .unwrap();
    assert_eq!(brsat::dimacs::write(&f, 30), FIXTURE);
}

#[test]
fn fixture_is_bad_class_and_irreducible() {
    let parsed = parse(FIXTURE).unwrap();
    let mut f = parsed.formula;
    assert_eq!(f.m(), 60);

    let mut trail = Vec::new();
    let tallies = reduce_fixpoint(&mut f, &mut trail);
    assert_eq!(tallies.total(), 0, "fixture must already be reduced");

    for v in f.live_vars() {
        let l = Literal::new(v, true);
        assert_eq!(f.degree_pair(l), (3, 3), "variable {}", v.0);
    }
    assert!(f.coincident_pairs().is_empty());
    assert!(f.clauses().all(|(_, c)| c.len() == 3));
    assert_eq!(classify(&f), ClassLabel::Bad);
}

#[test]
fn fixture_solves_with_a_clean_exhaustive_audit() {
    let parsed = parse(FIXTURE).unwrap();
    let cfg = SolveConfig {
        exhaustive_audit: true,
        strict_audit: true,
        ..SolveConfig::default()
    };
    let (verdict, report) = solve(&parsed.formula, &cfg).unwrap();
    assert!(verdict.is_sat());
    assert_eq!(report.audit_violations, 0);
    assert!(report.potential_ratio <= 1.0);
    assert!(report.case_tallies.keys().any(|c| c.to_string().starts_with("Bad")));
}
