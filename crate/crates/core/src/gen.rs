//! Seeded instance generators for tests, fuzzing, and benchmarks.
//!
//! Reproducibility is a hard requirement here: the same config must yield the
//! same formula on every platform and in every build, because test corpora
//! and benchmark manifests are addressed by seed alone. That is why the
//! generator carries its own tiny PRNG instead of pulling in a crate whose
//! stream might change between versions.

use crate::formula::{Clause, Formula, Literal, Var};
use crate::reduce;
use thiserror::Error;

/// splitmix64. Fixed, documented stream: `state` advances by the 64-bit
/// golden gamma, and the output mix is the standard 30/27/31 shift-multiply
/// chain. Outputs match the published reference sequence (see the golden
/// tests), so any other implementation can reproduce a corpus from its seed.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..n` by modulo. The bias is irrelevant at the
    /// ranges used here (n stays far below 2^32) and the simple rule keeps
    /// the stream trivially portable.
    pub fn uniform(&mut self, n: u64) -> u64 {
        assert!(n > 0, "uniform draw from an empty range");
        self.next_u64() % n
    }
}

/// Clause-width distribution over widths 1..=5, as integer weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthDist {
    weights: [u32; 5],
}

impl WidthDist {
    pub fn new(weights: [u32; 5]) -> WidthDist {
        WidthDist { weights }
    }

    /// Equal weight on widths 1..=4.
    pub fn uniform_1_to_4() -> WidthDist {
        WidthDist::new([1, 1, 1, 1, 0])
    }

    /// Equal weight on widths 1..=5.
    pub fn uniform_1_to_5() -> WidthDist {
        WidthDist::new([1, 1, 1, 1, 1])
    }

    /// All clauses get this width.
    pub fn only(width: usize) -> WidthDist {
        assert!((1..=5).contains(&width));
        let mut weights = [0; 5];
        weights[width - 1] = 1;
        WidthDist { weights }
    }

    fn total(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    fn max_weighted_width(&self) -> Option<usize> {
        (1..=5).rev().find(|&w| self.weights[w - 1] > 0)
    }

    fn draw(&self, rng: &mut SplitMix64) -> usize {
        let mut r = rng.uniform(self.total());
        for (i, &w) in self.weights.iter().enumerate() {
            let w = w as u64;
            if r < w {
                return i + 1;
            }
            r -= w;
        }
        unreachable!("weights changed during draw");
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Independent clauses: width from the distribution, distinct variables,
    /// fair coin per polarity.
    Uniform,
    /// 3-clauses wired from per-variable degree targets on the menu
    /// (3,3)/(3,4)/(4,3), the profile family the brancher's hardest cases
    /// live in. `all_regular` pins every variable to (3,3); `pair_free`
    /// additionally anneals until no two literals share two clauses.
    Degree3Adversarial { all_regular: bool, pair_free: bool },
    /// A uniform draw pushed through the reduction fixpoint. Output may be
    /// empty or a lone empty clause; callers filter for the shape they need.
    ReducedFuzz,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Variables are drawn from 1..=n. Adversarial modes use all n.
    pub n: u32,
    /// Clause count for Uniform/ReducedFuzz; ignored by Degree3Adversarial,
    /// whose clause count is forced by the degree profile.
    pub m: u32,
    pub widths: WidthDist,
    pub mode: GenMode,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least {need} variables for width-{need} clauses, have {have}")]
    TooFewVars { need: usize, have: u32 },
    #[error("width distribution has no weight")]
    EmptyWidths,
    #[error("no valid wiring found for the degree profile (seed {seed})")]
    WiringExhausted { seed: u64 },
}

/// Builds the instance for a config. Deterministic: equal configs yield
/// equal formulas, clause ids included.
pub fn generate(cfg: &GenConfig) -> Result<Formula, GenError> {
    let mut rng = SplitMix64::new(cfg.seed);
    match cfg.mode {
        GenMode::Uniform => uniform(cfg, &mut rng),
        GenMode::Degree3Adversarial {
            all_regular,
            pair_free,
        } => degree3(cfg, &mut rng, all_regular, pair_free),
        GenMode::ReducedFuzz => {
            let mut f = uniform(cfg, &mut rng)?;
            let mut trail = Vec::new();
            reduce::reduce_fixpoint(&mut f, &mut trail);
            Ok(f)
        }
    }
}

fn uniform(cfg: &GenConfig, rng: &mut SplitMix64) -> Result<Formula, GenError> {
    let max_w = cfg.widths.max_weighted_width().ok_or(GenError::EmptyWidths)?;
    if (cfg.n as usize) < max_w {
        return Err(GenError::TooFewVars {
            need: max_w,
            have: cfg.n,
        });
    }
    let mut f = Formula::new();
    for _ in 0..cfg.m {
        let w = cfg.widths.draw(rng);
        let mut vars: Vec<u32> = Vec::with_capacity(w);
        while vars.len() < w {
            let v = rng.uniform(cfg.n as u64) as u32 + 1;
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let lits = vars
            .into_iter()
            .map(|v| Literal::new(Var(v), rng.uniform(2) == 0));
        f.add_clause(Clause::new(lits).expect("distinct variables cannot clash"));
    }
    Ok(f)
}

/// Degree-profile wiring. Slots (one per literal occurrence) are shuffled
/// into triples; triples touching a variable twice are repaired by random
/// swaps; optionally, coincident literal pairs are annealed away the same
/// way. Every step draws from the seeded stream, so failures are
/// reproducible too.
fn degree3(
    cfg: &GenConfig,
    rng: &mut SplitMix64,
    all_regular: bool,
    pair_free: bool,
) -> Result<Formula, GenError> {
    const PROFILE_TRIES: u32 = 64;
    let n = cfg.n;
    if n < 3 {
        return Err(GenError::TooFewVars { need: 3, have: n });
    }
    for _ in 0..PROFILE_TRIES {
        let menu: [(u32, u32); 3] = [(3, 3), (3, 4), (4, 3)];
        let profile: Vec<(u32, u32)> = (1..=n)
            .map(|_| {
                if all_regular {
                    (3, 3)
                } else {
                    menu[rng.uniform(3) as usize]
                }
            })
            .collect();
        let slots_total: u32 = profile.iter().map(|&(a, b)| a + b).sum();
        if slots_total % 3 != 0 {
            continue;
        }
        let mut slots: Vec<Literal> = Vec::with_capacity(slots_total as usize);
        for (i, &(a, b)) in profile.iter().enumerate() {
            let v = Var(i as u32 + 1);
            slots.extend(std::iter::repeat(Literal::new(v, true)).take(a as usize));
            slots.extend(std::iter::repeat(Literal::new(v, false)).take(b as usize));
        }
        for i in (1..slots.len()).rev() {
            let j = rng.uniform(i as u64 + 1) as usize;
            slots.swap(i, j);
        }
        if wire_triples(&mut slots, rng, pair_free) {
            let mut f = Formula::new();
            for triple in slots.chunks(3) {
                f.add_clause(
                    Clause::new(triple.iter().copied()).expect("repair left distinct variables"),
                );
            }
            return Ok(f);
        }
    }
    Err(GenError::WiringExhausted { seed: cfg.seed })
}

/// Swap-repairs the slot vector in place until every consecutive triple uses
/// three distinct variables and, if asked, no literal pair occurs in two
/// triples. Returns false when the budget runs out.
fn wire_triples(slots: &mut [Literal], rng: &mut SplitMix64, pair_free: bool) -> bool {
    let budget = 200 * slots.len() as u64;
    let mut steps = 0u64;
    loop {
        if let Some(pos) = first_conflict(slots) {
            if steps >= budget {
                return false;
            }
            steps += 1;
            let other = rng.uniform(slots.len() as u64) as usize;
            slots.swap(pos, other);
            continue;
        }
        if pair_free {
            if let Some(pos) = first_pair_member(slots) {
                if steps >= budget {
                    return false;
                }
                steps += 1;
                let other = rng.uniform(slots.len() as u64) as usize;
                slots.swap(pos, other);
                continue;
            }
        }
        return true;
    }
}

/// Index of a slot sharing its variable with another slot of the same
/// triple, if any.
fn first_conflict(slots: &[Literal]) -> Option<usize> {
    for (t, triple) in slots.chunks(3).enumerate() {
        for i in 0..triple.len() {
            for j in 0..i {
                if triple[i].var() == triple[j].var() {
                    return Some(t * 3 + i);
                }
            }
        }
    }
    None
}

/// Index of a slot belonging to a literal pair that co-occurs in two
/// triples, if any.
fn first_pair_member(slots: &[Literal]) -> Option<usize> {
    use std::collections::BTreeMap;
    let mut seen: BTreeMap<(Literal, Literal), usize> = BTreeMap::new();
    for (t, triple) in slots.chunks(3).enumerate() {
        for i in 0..triple.len() {
            for j in 0..i {
                let key = if triple[j] <= triple[i] {
                    (triple[j], triple[i])
                } else {
                    (triple[i], triple[j])
                };
                if seen.contains_key(&key) {
                    return Some(t * 3 + i);
                }
                seen.insert(key, t * 3 + i);
            }
        }
    }
    None
}
