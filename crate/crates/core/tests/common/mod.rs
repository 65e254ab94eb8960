//! Independent oracles shared by the integration tests. Nothing here goes
//! through the sparse builders or samplers it is used to check.

#![allow(dead_code)]

use std::path::PathBuf;

use qroute::network::{load_scenario, CostMode, RoadNetwork, Scenario};
use qroute::qubo::{BinaryAssignment, QuboProblem};
use qroute::routes::RoutePlan;

pub const BUNDLED: [&str; 3] = ["fig1_n3", "fig1", "fig1_n5"];

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

pub fn bundled(name: &str) -> Scenario {
    load_scenario(scenario_path(name)).expect("bundled scenario loads")
}

/// Every node-simple path from `source` to `target`, as segment lists.
pub fn all_simple_paths(network: &RoadNetwork, source: usize, target: usize) -> Vec<Vec<usize>> {
    fn walk(
        network: &RoadNetwork,
        at: usize,
        target: usize,
        visited: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == target {
            out.push(path.clone());
            return;
        }
        for seg in network.segments() {
            let from = network.node_index(&seg.from_node).unwrap();
            let to = network.node_index(&seg.to_node).unwrap();
            if from == at && !visited[to] {
                visited[to] = true;
                path.push(seg.id);
                walk(network, to, target, visited, path, out);
                path.pop();
                visited[to] = false;
            }
        }
    }
    let mut visited = vec![false; network.nodes().len()];
    visited[source] = true;
    let mut out = Vec::new();
    walk(network, source, target, &mut visited, &mut Vec::new(), &mut out);
    out
}

/// `sum_m (sum of c_ij over selected routes crossing m)^2`, counted
/// segment by segment from the route lists.
pub fn direct_cost(plan: &RoutePlan, x: &BinaryAssignment, mode: CostMode) -> f64 {
    let mut per_segment = vec![0.0; plan.num_segments()];
    for route in plan.routes() {
        if x.get(route.vehicle * plan.k() + route.option) {
            let c = match mode {
                CostMode::Weighted => route.weight,
                CostMode::Density => 1.0,
            };
            for &m in &route.segments {
                per_segment[m] += c;
            }
        }
    }
    per_segment.iter().map(|v| v * v).sum()
}

/// `sum_i (sum_j x_ij - 1)^2` in integers.
pub fn direct_penalty(n: usize, k: usize, x: &BinaryAssignment) -> i64 {
    (0..n)
        .map(|i| {
            let active = (0..k).filter(|&j| x.get(i * k + j)).count() as i64;
            (active - 1) * (active - 1)
        })
        .sum()
}

/// Dense `x^T Q x + offset` with `Q` materialized as an N x N matrix.
pub fn dense_energy(problem: &QuboProblem, x: &BinaryAssignment) -> f64 {
    let n = problem.n_vars();
    let mut dense = vec![vec![0.0; n]; n];
    for (&(a, b), &q) in problem.coefficients() {
        dense[a][b] = q;
    }
    let xs: Vec<f64> = x.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let mut e = 0.0;
    for a in 0..n {
        for b in 0..n {
            e += xs[a] * dense[a][b] * xs[b];
        }
    }
    e + problem.offset()
}

pub fn is_one_hot(n: usize, k: usize, x: &BinaryAssignment) -> bool {
    direct_penalty(n, k, x) == 0
}

pub fn all_assignments(n_vars: usize) -> impl Iterator<Item = BinaryAssignment> {
    (0..1u64 << n_vars).map(move |w| BinaryAssignment::from_word(w, n_vars))
}

/// Minimum energy over one-hot assignments, by odometer over `k^n` choices.
pub fn feasible_minimum(problem: &QuboProblem, n: usize, k: usize) -> f64 {
    let mut choices = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let x = BinaryAssignment::from_choices(problem.var_map(), &choices);
        best = best.min(dense_energy(problem, &x));
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choices[i] += 1;
            if choices[i] < k {
                break;
            }
            choices[i] = 0;
            i += 1;
        }
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
