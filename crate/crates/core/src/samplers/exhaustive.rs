//! Brute-force ground-state oracle over all `2^N` assignments.
//!
//! The space is split into chunks by fixing the top bits; each chunk walks
//! its low bits in Gray-code order so every step is a single O(degree) flip.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::qubo::{BinaryAssignment, QuboProblem};

use super::{Adjacency, SampleRecord, SampleSet};

pub const EXHAUSTIVE_MAX_VARS: usize = 24;

/// Distinct energy levels reported above the minimum.
pub const EXTRA_LEVELS: usize = 9;

const CHUNK_BITS: usize = 8;

/// Every minimum-energy assignment, plus one representative (the
/// lexicographically smallest bit string) of each of the next
/// [`EXTRA_LEVELS`] distinct energy levels.
pub fn solve_exhaustive(problem: &QuboProblem) -> Result<SampleSet> {
    solve_exhaustive_with(problem, Execution::default())
}

pub fn solve_exhaustive_with(problem: &QuboProblem, exec: Execution) -> Result<SampleSet> {
    let n = problem.n_vars();
    if n > EXHAUSTIVE_MAX_VARS {
        return Err(Error::SizeCap {
            what: "exhaustive enumeration variable count",
            size: n as u128,
            cap: EXHAUSTIVE_MAX_VARS as u128,
        });
    }
    let adj = Adjacency::new(problem);
    let top = n.min(CHUNK_BITS);
    let low = n - top;

    let partials = exec.map_range(1 << top, |chunk| scan_chunk(problem, &adj, chunk as u64, low));
    let mut levels = Levels::default();
    for part in partials {
        levels.merge(part);
    }

    let mut records = Vec::new();
    for (rank, level) in levels.levels.into_iter().enumerate() {
        let mut states = level.states;
        if rank == 0 {
            states.sort_by(|&a, &b| lex_cmp(a, b));
        }
        for word in states {
            let bits = BinaryAssignment::from_word(word, n);
            records.push(SampleRecord {
                energy: problem.energy(&bits)?,
                bits,
                occurrences: 1,
            });
        }
    }
    let count = records.len();
    Ok(SampleSet::sorted("exhaustive", count, None, records))
}

fn scan_chunk(problem: &QuboProblem, adj: &Adjacency, chunk: u64, low: usize) -> Levels {
    let n = adj.len();
    let mut word = chunk << low;
    let mut x: Vec<bool> = (0..n).map(|a| word >> a & 1 == 1).collect();
    let mut fields = adj.fields(&x);
    let mut energy = problem
        .energy(&BinaryAssignment::new(x.clone()))
        .expect("length matches");
    let mut levels = Levels::default();
    levels.insert(energy, word);
    for step in 1u64..(1u64 << low) {
        let a = step.trailing_zeros() as usize;
        energy += adj.delta(a, &x, &fields);
        adj.flip(a, &mut x, &mut fields);
        word ^= 1 << a;
        levels.insert(energy, word);
    }
    levels
}

fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Lexicographic order of bit strings written variable 0 first.
fn lex_cmp(a: u64, b: u64) -> std::cmp::Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return std::cmp::Ordering::Equal;
    }
    let first = diff.trailing_zeros();
    if a >> first & 1 == 0 {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

struct Level {
    energy: f64,
    states: Vec<u64>,
}

/// The lowest `1 + EXTRA_LEVELS` energy levels seen so far. The bottom level
/// keeps every state, the others keep their lexicographically smallest one.
#[derive(Default)]
struct Levels {
    levels: Vec<Level>,
}

impl Levels {
    fn insert(&mut self, energy: f64, word: u64) {
        let pos = self.levels.partition_point(|l| l.energy < energy && !same_level(l.energy, energy));
        if let Some(level) = self.levels.get_mut(pos) {
            if same_level(level.energy, energy) {
                if pos == 0 {
                    level.states.push(word);
                } else if lex_cmp(word, level.states[0]).is_lt() {
                    level.states[0] = word;
                }
                return;
            }
        }
        if pos > EXTRA_LEVELS {
            return;
        }
        if pos == 0 {
            if let Some(old_min) = self.levels.first_mut() {
                let rep = old_min
                    .states
                    .iter()
                    .copied()
                    .min_by(|&a, &b| lex_cmp(a, b))
                    .expect("levels are non-empty");
                old_min.states = vec![rep];
            }
        }
        self.levels.insert(pos, Level { energy, states: vec![word] });
        self.levels.truncate(EXTRA_LEVELS + 1);
    }

    fn merge(&mut self, other: Levels) {
        for level in other.levels {
            for word in level.states {
                self.insert(level.energy, word);
            }
        }
    }
}
