//! Single-flip Metropolis simulated annealing with geometric cooling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::qubo::{BinaryAssignment, QuboProblem};

use super::{Adjacency, SampleSet};

/// Random states probed when picking the automatic initial temperature.
const PROBE_STATES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealParams {
    pub num_reads: usize,
    /// Full sweeps over all variables per read.
    pub sweeps: usize,
    /// `None` picks the largest single-flip |dE| seen from random states.
    pub initial_temperature: Option<f64>,
    /// `None` picks 1% of the smallest nonzero |Q| entry.
    pub final_temperature: Option<f64>,
    /// Read `r` is seeded with `seed + r`.
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            num_reads: 50,
            sweeps: 1000,
            initial_temperature: None,
            final_temperature: None,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn with_seed(seed: u64) -> Self {
        AnnealParams {
            seed,
            ..Default::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.num_reads == 0 {
            return Err(Error::AnnealParams("num_reads must be at least 1".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::AnnealParams("sweeps must be at least 1".into()));
        }
        for t in [self.initial_temperature, self.final_temperature].into_iter().flatten() {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::AnnealParams(format!("temperature {t} is not positive")));
            }
        }
        Ok(())
    }
}

/// Per-sweep temperatures, geometric from the initial to the final value.
pub fn temperature_schedule(problem: &QuboProblem, params: &AnnealParams) -> Result<Vec<f64>> {
    params.check()?;
    let smallest = problem
        .coefficients()
        .values()
        .map(|q| q.abs())
        .fold(f64::INFINITY, f64::min);
    let t_final = params
        .final_temperature
        .unwrap_or(if smallest.is_finite() { 0.01 * smallest } else { 0.01 });
    let t_initial = match params.initial_temperature {
        Some(t) => t,
        None => probe_initial_temperature(problem, params.seed).max(10.0 * t_final),
    };
    if t_initial <= t_final {
        return Err(Error::AnnealParams(format!(
            "initial temperature {t_initial} must exceed final temperature {t_final}"
        )));
    }
    if params.sweeps == 1 {
        return Ok(vec![t_initial]);
    }
    let ratio = (t_final / t_initial).ln() / (params.sweeps - 1) as f64;
    Ok((0..params.sweeps)
        .map(|s| t_initial * (ratio * s as f64).exp())
        .collect())
}

fn probe_initial_temperature(problem: &QuboProblem, seed: u64) -> f64 {
    let adj = Adjacency::new(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut largest: f64 = 0.0;
    for _ in 0..PROBE_STATES {
        let x: Vec<bool> = (0..adj.len()).map(|_| rng.gen()).collect();
        let fields = adj.fields(&x);
        for a in 0..adj.len() {
            largest = largest.max(adj.delta(a, &x, &fields).abs());
        }
    }
    if largest > 0.0 {
        largest
    } else {
        1.0
    }
}

/// Runs `num_reads` independent annealing chains and returns their final
/// states as a deduplicated sample set.
pub fn solve_annealing(problem: &QuboProblem, params: &AnnealParams) -> Result<SampleSet> {
    solve_annealing_with(problem, params, Execution::default())
}

pub fn solve_annealing_with(problem: &QuboProblem, params: &AnnealParams, exec: Execution) -> Result<SampleSet> {
    if problem.n_vars() == 0 {
        return Err(Error::AnnealParams("problem has no variables".into()));
    }
    let schedule = temperature_schedule(problem, params)?;
    let adj = Adjacency::new(problem);
    let states = exec.map_range(params.num_reads, |read| {
        anneal_once(&adj, &schedule, params.seed.wrapping_add(read as u64))
    });
    SampleSet::from_states("anneal", Some(params.seed), problem, states)
}

fn anneal_once(adj: &Adjacency, schedule: &[f64], seed: u64) -> BinaryAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = adj.len();
    let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut fields = adj.fields(&x);
    for &t in schedule {
        let beta = 1.0 / t;
        for a in 0..n {
            let d = adj.delta(a, &x, &fields);
            if d <= 0.0 || rng.gen::<f64>() < (-d * beta).exp() {
                adj.flip(a, &mut x, &mut fields);
            }
        }
    }
    BinaryAssignment::new(x)
}
