//! Samplers for [`QuboProblem`]s.
//!
//! Every backend returns a [`SampleSet`]: deduplicated records sorted by
//! energy (ascending), then occurrences (descending), then bit string.

mod anneal;
mod enumerate;
mod exhaustive;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::qubo::{BinaryAssignment, QuboProblem};
use crate::routes::RoutePlan;

pub use anneal::{solve_annealing, solve_annealing_with, temperature_schedule, AnnealParams};
pub use enumerate::{solve_valid_enumeration, solve_valid_enumeration_with, ENUMERATION_CAP, ENUMERATION_KEEP};
pub use exhaustive::{solve_exhaustive, solve_exhaustive_with, EXHAUSTIVE_MAX_VARS, EXTRA_LEVELS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub bits: BinaryAssignment,
    pub energy: f64,
    pub occurrences: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub sampler: String,
    pub num_reads: usize,
    pub seed: Option<u64>,
    pub records: Vec<SampleRecord>,
}

impl SampleSet {
    /// Counts identical states, recomputes each state's energy and sorts.
    pub fn from_states(
        sampler: &str,
        seed: Option<u64>,
        problem: &QuboProblem,
        states: impl IntoIterator<Item = BinaryAssignment>,
    ) -> Result<SampleSet> {
        let mut counts: BTreeMap<BinaryAssignment, usize> = BTreeMap::new();
        let mut num_reads = 0;
        for s in states {
            *counts.entry(s).or_insert(0) += 1;
            num_reads += 1;
        }
        let records = counts
            .into_iter()
            .map(|(bits, occurrences)| {
                Ok(SampleRecord {
                    energy: problem.energy(&bits)?,
                    bits,
                    occurrences,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleSet::sorted(sampler, num_reads, seed, records))
    }

    pub fn sorted(sampler: &str, num_reads: usize, seed: Option<u64>, mut records: Vec<SampleRecord>) -> SampleSet {
        records.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(b.occurrences.cmp(&a.occurrences))
                .then_with(|| a.bits.cmp(&b.bits))
        });
        SampleSet {
            sampler: sampler.to_string(),
            num_reads,
            seed,
            records,
        }
    }

    pub fn lowest(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    pub fn total_occurrences(&self) -> usize {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("sample set serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerKind {
    Anneal,
    Exhaustive,
    Enumerate,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Anneal => "anneal",
            SamplerKind::Exhaustive => "exhaustive",
            SamplerKind::Enumerate => "enumerate",
        }
    }

    /// Runs this backend. `params` is only used by annealing.
    pub fn run(self, problem: &QuboProblem, plan: &RoutePlan, params: &AnnealParams, exec: Execution) -> Result<SampleSet> {
        match self {
            SamplerKind::Anneal => solve_annealing_with(problem, params, exec),
            SamplerKind::Exhaustive => solve_exhaustive_with(problem, exec),
            SamplerKind::Enumerate => solve_valid_enumeration_with(problem, plan, exec),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "anneal" => Ok(SamplerKind::Anneal),
            "exhaustive" => Ok(SamplerKind::Exhaustive),
            "enumerate" => Ok(SamplerKind::Enumerate),
            other => Err(format!("unknown sampler {other:?} (expected anneal|exhaustive|enumerate)")),
        }
    }
}

/// Symmetric adjacency of the nonzero off-diagonal entries, for O(degree)
/// single-flip energy deltas.
pub(crate) struct Adjacency {
    diag: Vec<f64>,
    start: Vec<usize>,
    neighbor: Vec<usize>,
    weight: Vec<f64>,
}

impl Adjacency {
    pub(crate) fn new(problem: &QuboProblem) -> Self {
        let n = problem.n_vars();
        let mut diag = vec![0.0; n];
        let mut lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(a, b), &q) in problem.coefficients() {
            if a == b {
                diag[a] = q;
            } else {
                lists[a].push((b, q));
                lists[b].push((a, q));
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut neighbor = Vec::new();
        let mut weight = Vec::new();
        start.push(0);
        for list in lists {
            for (b, q) in list {
                neighbor.push(b);
                weight.push(q);
            }
            start.push(neighbor.len());
        }
        Adjacency {
            diag,
            start,
            neighbor,
            weight,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.diag.len()
    }

    /// `field[a] = sum_b Q_ab x_b` over neighbors of `a`.
    pub(crate) fn fields(&self, x: &[bool]) -> Vec<f64> {
        (0..self.len())
            .map(|a| {
                self.neighbors(a)
                    .filter(|&(b, _)| x[b])
                    .map(|(_, q)| q)
                    .sum()
            })
            .collect()
    }

    pub(crate) fn neighbors(&self, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.start[a]..self.start[a + 1];
        self.neighbor[range.clone()]
            .iter()
            .copied()
            .zip(self.weight[range].iter().copied())
    }

    /// Energy change from flipping variable `a`.
    #[inline]
    pub(crate) fn delta(&self, a: usize, x: &[bool], fields: &[f64]) -> f64 {
        let gain = self.diag[a] + fields[a];
        if x[a] {
            -gain
        } else {
            gain
        }
    }

    /// Flips `a` and updates neighbor fields.
    #[inline]
    pub(crate) fn flip(&self, a: usize, x: &mut [bool], fields: &mut [f64]) {
        x[a] = !x[a];
        let sign = if x[a] { 1.0 } else { -1.0 };
        for idx in self.start[a]..self.start[a + 1] {
            fields[self.neighbor[idx]] += sign * self.weight[idx];
        }
    }
}
