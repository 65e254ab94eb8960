//! Feasible-space oracle: enumerates the `k^n` one-hot assignments only.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::qubo::{BinaryAssignment, QuboProblem};
use crate::routes::RoutePlan;

use super::{SampleRecord, SampleSet};

pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Records returned at most.
pub const ENUMERATION_KEEP: usize = 10_000;

const BLOCK: usize = 4096;

/// Ranks every one-hot-per-vehicle assignment of `problem` (built from
/// `plan`) and returns the best [`ENUMERATION_KEEP`].
pub fn solve_valid_enumeration(problem: &QuboProblem, plan: &RoutePlan) -> Result<SampleSet> {
    solve_valid_enumeration_with(problem, plan, Execution::default())
}

pub fn solve_valid_enumeration_with(problem: &QuboProblem, plan: &RoutePlan, exec: Execution) -> Result<SampleSet> {
    let var_map = problem.var_map();
    let (n, k) = (plan.n_vehicles(), plan.k());
    if var_map.n_vehicles != n || var_map.k != k {
        return Err(Error::VarMapMismatch);
    }
    let total = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(k as u128));
    let total = match total {
        Some(t) if t <= ENUMERATION_CAP => t as usize,
        other => {
            return Err(Error::SizeCap {
                what: "feasible assignment count",
                size: other.unwrap_or(u128::MAX),
                cap: ENUMERATION_CAP,
            })
        }
    };

    let blocks = total.div_ceil(BLOCK);
    let ranked = exec.map_range(blocks, |block| {
        let start = block * BLOCK;
        let end = (start + BLOCK).min(total);
        let mut choices = vec![0usize; n];
        let mut indices = vec![0usize; n];
        let mut best: Vec<(f64, Vec<usize>)> = Vec::with_capacity(end - start);
        for code in start..end {
            decode_code(code, k, &mut choices);
            for (i, &j) in choices.iter().enumerate() {
                indices[i] = var_map.index(i, j);
            }
            best.push((one_hot_energy(problem, &indices), choices.clone()));
        }
        keep_best(&mut best);
        best
    });

    let mut all: Vec<(f64, Vec<usize>)> = ranked.into_iter().flatten().collect();
    keep_best(&mut all);
    let records = all
        .into_iter()
        .map(|(_, choices)| {
            let bits = BinaryAssignment::from_choices(var_map, &choices);
            Ok(SampleRecord {
                energy: problem.energy(&bits)?,
                bits,
                occurrences: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet::sorted("enumerate", total, None, records))
}

/// Base-`k` digits of `code`, vehicle 0 most significant.
fn decode_code(mut code: usize, k: usize, choices: &mut [usize]) {
    for slot in choices.iter_mut().rev() {
        *slot = code % k;
        code /= k;
    }
}

fn one_hot_energy(problem: &QuboProblem, indices: &[usize]) -> f64 {
    let mut e = problem.offset();
    for (p, &a) in indices.iter().enumerate() {
        e += problem.coefficient(a, a);
        for &b in &indices[p + 1..] {
            e += problem.coefficient(a, b);
        }
    }
    e
}

/// Sorts by energy, then bit string, and truncates to the keep limit.
/// A larger option puts its bit further right, so descending choice vectors
/// are ascending bit strings.
fn keep_best(list: &mut Vec<(f64, Vec<usize>)>) {
    list.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    list.truncate(ENUMERATION_KEEP);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::CostMode;
    use crate::qubo::compile;
    use crate::routes::CandidateRoute;

    fn plan(n: usize, k: usize) -> RoutePlan {
        let routes = (0..n)
            .flat_map(|i| {
                (0..k).map(move |j| CandidateRoute {
                    vehicle: i,
                    option: j,
                    segments: vec![j],
                    weight: 1.0 + j as f64,
                })
            })
            .collect();
        RoutePlan::from_routes(n, k, k, routes).unwrap()
    }

    #[test]
    fn counts_all_feasible_assignments() {
        let plan = plan(4, 3);
        let p = compile(&plan, CostMode::Weighted, None).unwrap();
        let set = solve_valid_enumeration(&p, &plan).unwrap();
        assert_eq!(set.records.len(), 81);
        assert_eq!(set.num_reads, 81);
        for r in &set.records {
            for i in 0..4 {
                assert_eq!((0..3).filter(|&j| r.bits.get(i * 3 + j)).count(), 1);
            }
        }
    }

    #[test]
    fn single_vehicle_single_option() {
        let plan = plan(1, 1);
        let p = compile(&plan, CostMode::Density, None).unwrap();
        let set = solve_valid_enumeration(&p, &plan).unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].bits.to_string(), "1");
        assert_eq!(set.records[0].energy, 1.0);
    }

    #[test]
    fn cap_is_enforced() {
        let plan = plan(15, 3);
        let p = compile(&plan, CostMode::Density, None).unwrap();
        assert!(matches!(solve_valid_enumeration(&p, &plan), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn tie_order_matches_bit_strings() {
        let plan = plan(2, 2);
        let p = compile(&plan, CostMode::Density, None).unwrap();
        let set = solve_valid_enumeration(&p, &plan).unwrap();
        let mut sorted = set.records.clone();
        sorted.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)));
        assert_eq!(sorted, set.records);
    }
}
