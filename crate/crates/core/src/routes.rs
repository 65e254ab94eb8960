//! Candidate routes per vehicle and the segment incidence sets used by the
//! congestion cost.
//!
//! Routes come either from the scenario's explicit lists or from Yen's
//! k-shortest loopless paths. Generated routes are ordered by total weight,
//! ties broken by the lexicographic order of their segment-id sequence, so
//! generation is fully deterministic.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::network::{RoadNetwork, Scenario};

/// Option `option` of vehicle `vehicle`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRoute {
    pub vehicle: usize,
    pub option: usize,
    pub segments: Vec<usize>,
    /// Sum of member segment weights.
    pub weight: f64,
}

/// All candidate routes of a scenario, indexed by `vehicle * k + option`,
/// together with the inverse membership map.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutePlan {
    n_vehicles: usize,
    k: usize,
    routes: Vec<CandidateRoute>,
    incidence: Vec<Vec<(usize, usize)>>,
}

impl RoutePlan {
    /// Builds a plan from routes listed in `(vehicle, option)` order.
    /// Route weights are taken as given.
    pub fn from_routes(
        n_vehicles: usize,
        k: usize,
        num_segments: usize,
        routes: Vec<CandidateRoute>,
    ) -> Result<Self> {
        if routes.len() != n_vehicles * k {
            return Err(Error::Validation(format!(
                "plan needs {} routes ({n_vehicles} vehicles x {k}), got {}",
                n_vehicles * k,
                routes.len()
            )));
        }
        for (idx, r) in routes.iter().enumerate() {
            if r.vehicle != idx / k || r.option != idx % k {
                return Err(Error::Validation(format!(
                    "route at position {idx} is labelled ({}, {})",
                    r.vehicle, r.option
                )));
            }
            if let Some(&bad) = r.segments.iter().find(|&&m| m >= num_segments) {
                return Err(Error::UnknownSegment(bad));
            }
        }
        let incidence = build_incidence(&routes, num_segments);
        Ok(RoutePlan {
            n_vehicles,
            k,
            routes,
            incidence,
        })
    }

    pub fn n_vehicles(&self) -> usize {
        self.n_vehicles
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_segments(&self) -> usize {
        self.incidence.len()
    }

    pub fn routes(&self) -> &[CandidateRoute] {
        &self.routes
    }

    pub fn route(&self, vehicle: usize, option: usize) -> &CandidateRoute {
        &self.routes[vehicle * self.k + option]
    }

    /// `incidence()[m]` lists the `(vehicle, option)` pairs whose route
    /// contains segment `m`, in plan order.
    pub fn incidence(&self) -> &[Vec<(usize, usize)>] {
        &self.incidence
    }

    /// Copy of this plan with every route weight replaced by `weight`.
    pub fn with_uniform_weight(&self, weight: f64) -> RoutePlan {
        let mut plan = self.clone();
        for r in &mut plan.routes {
            r.weight = weight;
        }
        plan
    }
}

/// Sum of the weights of the segments on `route`.
pub fn route_weight(route: &[usize], network: &RoadNetwork) -> Result<f64> {
    route.iter().try_fold(0.0, |acc, &m| {
        network
            .segment(m)
            .map(|s| acc + s.weight)
            .ok_or(Error::UnknownSegment(m))
    })
}

/// Inverse of route membership: for each segment id in `0..num_segments`,
/// the `(vehicle, option)` pairs whose route contains it.
pub fn build_incidence(routes: &[CandidateRoute], num_segments: usize) -> Vec<Vec<(usize, usize)>> {
    let mut incidence = vec![Vec::new(); num_segments];
    for r in routes {
        for &m in &r.segments {
            incidence[m].push((r.vehicle, r.option));
        }
    }
    incidence
}

/// Produces `k` candidate routes for every vehicle of `scenario`.
pub fn generate_routes(scenario: &Scenario) -> Result<RoutePlan> {
    generate_routes_with(scenario, Execution::default())
}

pub fn generate_routes_with(scenario: &Scenario, exec: Execution) -> Result<RoutePlan> {
    let network = &scenario.network;
    let k = scenario.k;
    let per_vehicle: Vec<Result<Vec<Vec<usize>>>> = exec.map_range(scenario.vehicles.len(), |i| {
        let v = &scenario.vehicles[i];
        if let Some(explicit) = &scenario.explicit_routes {
            return Ok(explicit[&v.id].clone());
        }
        let source = network.node_index(&v.origin).expect("validated origin");
        let target = network.node_index(&v.destination).expect("validated destination");
        let paths = k_shortest_paths(network, source, target, k);
        if paths.len() < k {
            return Err(Error::Infeasible {
                vehicle: v.id,
                found: paths.len(),
                requested: k,
            });
        }
        Ok(paths)
    });

    let mut routes = Vec::with_capacity(scenario.vehicles.len() * k);
    for (vehicle, paths) in per_vehicle.into_iter().enumerate() {
        for (option, segments) in paths?.into_iter().enumerate() {
            let weight = route_weight(&segments, network)?;
            routes.push(CandidateRoute {
                vehicle,
                option,
                segments,
                weight,
            });
        }
    }
    RoutePlan::from_routes(scenario.vehicles.len(), k, network.num_segments(), routes)
}

#[derive(Clone, Debug)]
struct Candidate {
    weight: f64,
    segments: Vec<usize>,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| self.segments.cmp(&other.segments))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

/// Yen's algorithm: up to `k` node-simple paths from `source` to `target`
/// (node indices), as segment-id lists ordered by (weight, sequence).
pub fn k_shortest_paths(network: &RoadNetwork, source: usize, target: usize, k: usize) -> Vec<Vec<usize>> {
    let num_nodes = network.nodes().len();
    let no_nodes = vec![false; num_nodes];
    let no_segments = HashSet::new();
    let Some(first) = shortest_path(network, source, target, &no_nodes, &no_segments) else {
        return Vec::new();
    };
    let mut accepted = vec![first];
    let mut seen: HashSet<Vec<usize>> = accepted.iter().cloned().collect();
    let mut pending: BinaryHeap<std::cmp::Reverse<Candidate>> = BinaryHeap::new();

    while accepted.len() < k {
        let last = accepted.last().expect("non-empty").clone();
        let mut node_seq = Vec::with_capacity(last.len() + 1);
        node_seq.push(source);
        node_seq.extend(last.iter().map(|&s| network.head(s)));

        for spur_at in 0..last.len() {
            let spur_node = node_seq[spur_at];
            let root = &last[..spur_at];
            let mut banned_segments = HashSet::new();
            for path in &accepted {
                if path.len() > spur_at && &path[..spur_at] == root {
                    banned_segments.insert(path[spur_at]);
                }
            }
            let mut banned_nodes = no_nodes.clone();
            for &n in &node_seq[..spur_at] {
                banned_nodes[n] = true;
            }
            if let Some(spur) = shortest_path(network, spur_node, target, &banned_nodes, &banned_segments) {
                let mut segments = root.to_vec();
                segments.extend(spur);
                if seen.insert(segments.clone()) {
                    let weight = route_weight(&segments, network).expect("segments from network");
                    pending.push(std::cmp::Reverse(Candidate { weight, segments }));
                }
            }
        }
        match pending.pop() {
            Some(std::cmp::Reverse(next)) => accepted.push(next.segments),
            None => break,
        }
    }
    accepted
}

/// Minimum-weight path avoiding banned nodes/segments; among equal-weight
/// paths, the one with the lexicographically smallest segment sequence.
fn shortest_path(
    network: &RoadNetwork,
    source: usize,
    target: usize,
    banned_nodes: &[bool],
    banned_segments: &HashSet<usize>,
) -> Option<Vec<usize>> {
    if banned_nodes[source] || banned_nodes[target] {
        return None;
    }
    let num_nodes = network.nodes().len();
    let mut incoming = vec![Vec::new(); num_nodes];
    for seg in network.segments() {
        if !banned_segments.contains(&seg.id) {
            incoming[network.head(seg.id)].push(seg.id);
        }
    }

    // Distances to `target` over the allowed subgraph.
    let mut dist = vec![f64::INFINITY; num_nodes];
    let mut heap = BinaryHeap::new();
    dist[target] = 0.0;
    heap.push(std::cmp::Reverse(Candidate {
        weight: 0.0,
        segments: vec![target],
    }));
    while let Some(std::cmp::Reverse(Candidate { weight, segments })) = heap.pop() {
        let node = segments[0];
        if weight > dist[node] {
            continue;
        }
        for &s in &incoming[node] {
            let tail = network.tail(s);
            if banned_nodes[tail] {
                continue;
            }
            let d = weight + network.segments()[s].weight;
            if d < dist[tail] {
                dist[tail] = d;
                heap.push(std::cmp::Reverse(Candidate {
                    weight: d,
                    segments: vec![tail],
                }));
            }
        }
    }
    if !dist[source].is_finite() {
        return None;
    }

    // Weights are >= 1, so distance strictly drops along the walk.
    let mut path = Vec::new();
    let mut at = source;
    while at != target {
        let here = dist[at];
        let tol = 1e-9 * here.max(1.0);
        let step = network.outgoing(at).iter().copied().find(|&s| {
            let head = network.head(s);
            !banned_segments.contains(&s)
                && !banned_nodes[head]
                && (network.segments()[s].weight + dist[head] - here).abs() <= tol
        })?;
        path.push(step);
        at = network.head(step);
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::seg;
    use crate::network::{CostMode, Penalty, Vehicle};

    fn chain_scenario(k: usize) -> Scenario {
        let net = RoadNetwork::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![seg(0, "a", "b", 1.0), seg(1, "b", "c", 2.0), seg(2, "c", "d", 1.5)],
        )
        .unwrap();
        let vehicles = vec![Vehicle { id: 0, origin: "a".into(), destination: "d".into() }];
        Scenario::new(net, vehicles, k, None, CostMode::Weighted, Penalty::Auto).unwrap()
    }

    #[test]
    fn weight_sums() {
        let net = RoadNetwork::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![seg(0, "a", "b", 1.0), seg(1, "b", "c", 2.0), seg(2, "c", "d", 3.0)],
        )
        .unwrap();
        assert_eq!(route_weight(&[0, 1, 2], &net).unwrap(), 6.0);
        assert_eq!(route_weight(&[], &net).unwrap(), 0.0);
        assert!(matches!(route_weight(&[0, 5], &net), Err(Error::UnknownSegment(5))));
    }

    #[test]
    fn unique_chain_path() {
        let plan = generate_routes(&chain_scenario(1)).unwrap();
        assert_eq!(plan.routes().len(), 1);
        assert_eq!(plan.route(0, 0).segments, vec![0, 1, 2]);
        assert_eq!(plan.route(0, 0).weight, 4.5);
    }

    #[test]
    fn chain_cannot_supply_two_paths() {
        let err = generate_routes(&chain_scenario(2)).unwrap_err();
        assert!(matches!(err, Error::Infeasible { vehicle: 0, found: 1, requested: 2 }));
    }

    #[test]
    fn shared_segment_incidence() {
        let routes = vec![
            CandidateRoute { vehicle: 0, option: 0, segments: vec![5, 1], weight: 2.0 },
            CandidateRoute { vehicle: 1, option: 0, segments: vec![2, 5], weight: 2.0 },
        ];
        let inc = build_incidence(&routes, 7);
        assert_eq!(inc[5], vec![(0, 0), (1, 0)]);
        assert!(inc[0].is_empty() && inc[6].is_empty());
    }

    #[test]
    fn disjoint_routes_have_small_incidence() {
        let routes = vec![
            CandidateRoute { vehicle: 0, option: 0, segments: vec![0, 1], weight: 2.0 },
            CandidateRoute { vehicle: 1, option: 0, segments: vec![2, 3], weight: 2.0 },
        ];
        assert!(build_incidence(&routes, 4).iter().all(|s| s.len() <= 1));
    }

    #[test]
    fn ties_break_on_segment_sequence() {
        // Two equal-weight routes a->d; the one through segment 0 sorts first.
        let net = RoadNetwork::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                seg(0, "a", "b", 1.0),
                seg(1, "a", "c", 1.0),
                seg(2, "c", "d", 1.0),
                seg(3, "b", "d", 1.0),
                seg(4, "a", "d", 5.0),
            ],
        )
        .unwrap();
        let paths = k_shortest_paths(&net, 0, 3, 5);
        assert_eq!(paths, vec![vec![0, 3], vec![1, 2], vec![4]]);
    }

    #[test]
    fn plan_rejects_mislabelled_routes() {
        let routes = vec![CandidateRoute { vehicle: 0, option: 1, segments: vec![0], weight: 1.0 }];
        assert!(RoutePlan::from_routes(1, 1, 1, routes).is_err());
    }
}
