//! Post-processing: decoding samples into route choices, picking the
//! reported solution, per-segment density/load metrics and comparison
//! against a random-choice baseline.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::network::{CostMode, Penalty, RoadNetwork, Scenario};
use crate::qubo::{compile, route_coefficient, BinaryAssignment, QuboProblem, VarMap};
use crate::routes::{generate_routes, RoutePlan};
use crate::samplers::{AnnealParams, SampleRecord, SampleSet, SamplerKind};

/// Default density at which a segment is flagged as congested.
pub const CONGESTION_THRESHOLD: usize = 3;

/// Draws averaged by the random-choice baseline.
pub const BASELINE_DRAWS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteMetrics {
    /// Congestion cost under the assignment's cost mode.
    pub total_cost: f64,
    /// Vehicles crossing each segment.
    pub segment_density: Vec<usize>,
    /// Sum of chosen route weights crossing each segment.
    pub segment_load: Vec<f64>,
}

impl RouteMetrics {
    /// Metrics of one route choice per vehicle (`choices[i]` is the option of
    /// vehicle `i`).
    pub fn of_choices(plan: &RoutePlan, choices: &[usize], mode: CostMode) -> RouteMetrics {
        let m = plan.num_segments();
        let mut density = vec![0usize; m];
        let mut load = vec![0.0; m];
        let mut congestion = vec![0.0; m];
        for (vehicle, &option) in choices.iter().enumerate() {
            let route = plan.route(vehicle, option);
            let c = route_coefficient(plan, vehicle, option, mode);
            for &s in &route.segments {
                density[s] += 1;
                load[s] += route.weight;
                congestion[s] += c;
            }
        }
        RouteMetrics {
            total_cost: congestion.iter().map(|c| c * c).sum(),
            segment_density: density,
            segment_load: load,
        }
    }

    pub fn max_density(&self) -> usize {
        self.segment_density.iter().copied().max().unwrap_or(0)
    }

    /// Mean density over segments carrying at least one vehicle.
    pub fn mean_occupied_density(&self) -> f64 {
        let occupied: Vec<usize> = self.segment_density.iter().copied().filter(|&d| d > 0).collect();
        if occupied.is_empty() {
            0.0
        } else {
            occupied.iter().sum::<usize>() as f64 / occupied.len() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assignment {
    /// Vehicle to chosen option, for vehicles with exactly one active bit.
    pub choices: BTreeMap<usize, usize>,
    pub bits: BinaryAssignment,
    pub energy: f64,
    pub valid: bool,
    /// Present only for valid assignments.
    #[serde(flatten)]
    pub metrics: Option<RouteMetrics>,
}

impl Assignment {
    /// Options indexed by vehicle; `None` unless valid.
    pub fn choice_vector(&self) -> Option<Vec<usize>> {
        self.valid.then(|| self.choices.values().copied().collect())
    }

    pub fn total_cost(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.total_cost)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serializes")
    }
}

/// Bits with exactly the given options active.
pub fn encode(var_map: VarMap, choices: &BTreeMap<usize, usize>) -> BinaryAssignment {
    let mut bits = vec![false; var_map.n_vars()];
    for (&vehicle, &option) in choices {
        bits[var_map.index(vehicle, option)] = true;
    }
    BinaryAssignment::new(bits)
}

pub fn decode(record: &SampleRecord, plan: &RoutePlan, problem: &QuboProblem) -> Assignment {
    let var_map = problem.var_map();
    let mut choices = BTreeMap::new();
    let mut valid = record.bits.len() == var_map.n_vars();
    if valid {
        for vehicle in 0..var_map.n_vehicles {
            let mut active = (0..var_map.k).filter(|&j| record.bits.get(var_map.index(vehicle, j)));
            match (active.next(), active.next()) {
                (Some(option), None) => {
                    choices.insert(vehicle, option);
                }
                _ => valid = false,
            }
        }
    }
    let metrics = valid.then(|| {
        let vector: Vec<usize> = choices.values().copied().collect();
        RouteMetrics::of_choices(plan, &vector, problem.cost_mode().unwrap_or_default())
    });
    Assignment {
        choices,
        bits: record.bits.clone(),
        energy: record.energy,
        valid,
        metrics,
    }
}

/// The lowest-energy valid record; energy ties go to the record seen most
/// often, then to the smaller bit string.
pub fn select_solution(samples: &SampleSet, plan: &RoutePlan, problem: &QuboProblem) -> Result<Assignment> {
    samples
        .records
        .iter()
        .map(|r| (r, decode(r, plan, problem)))
        .filter(|(_, a)| a.valid)
        .min_by(|(ra, _), (rb, _)| {
            ra.energy
                .total_cmp(&rb.energy)
                .then(rb.occurrences.cmp(&ra.occurrences))
                .then_with(|| ra.bits.cmp(&rb.bits))
        })
        .map(|(_, a)| a)
        .ok_or(Error::NoValidSolution)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub segment: usize,
    pub weight: f64,
    pub density: usize,
    pub load: f64,
    pub flag: bool,
}

/// One row per segment of `network`; `flag` marks density `>= threshold`.
pub fn density_report(assignment: &Assignment, network: &RoadNetwork, threshold: usize) -> Result<Vec<DensityRow>> {
    let metrics = assignment.metrics.as_ref().ok_or(Error::InvalidAssignment)?;
    Ok(network
        .segments()
        .iter()
        .map(|s| {
            let density = metrics.segment_density.get(s.id).copied().unwrap_or(0);
            DensityRow {
                segment: s.id,
                weight: s.weight,
                density,
                load: metrics.segment_load.get(s.id).copied().unwrap_or(0.0),
                flag: density >= threshold,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub energy: f64,
    pub cost: f64,
    pub valid: bool,
}

/// `(energy, cost)` of every valid record, sorted by energy.
pub fn energy_cost_curve(samples: &SampleSet, plan: &RoutePlan, problem: &QuboProblem) -> Vec<CurvePoint> {
    let mut points: Vec<CurvePoint> = samples
        .records
        .iter()
        .filter_map(|r| {
            let a = decode(r, plan, problem);
            a.total_cost().map(|cost| CurvePoint {
                energy: a.energy,
                cost,
                valid: true,
            })
        })
        .collect();
    points.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.cost.total_cmp(&b.cost)));
    points
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: String,
    /// Weighted-mode cost of the chosen solution (baseline: mean over draws).
    pub cost: f64,
    pub improvement_pct: f64,
    pub max_density: f64,
    pub mean_density: f64,
    /// QUBO energy of the chosen sample; absent for the baseline.
    pub energy: Option<f64>,
    pub choices: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, model: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.model == model)
    }
}

pub fn improvement_pct(baseline: f64, cost: f64) -> f64 {
    if baseline == 0.0 {
        0.0
    } else {
        100.0 * (baseline - cost) / baseline
    }
}

/// Uniform independent route choice per vehicle, averaged over
/// [`BASELINE_DRAWS`] draws from one seeded stream. Costs are weighted.
pub fn random_baseline(plan: &RoutePlan, seed: u64) -> ComparisonRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cost, mut max_d, mut mean_d) = (0.0, 0.0, 0.0);
    let mut choices = vec![0; plan.n_vehicles()];
    for _ in 0..BASELINE_DRAWS {
        for c in choices.iter_mut() {
            *c = rng.gen_range(0..plan.k());
        }
        let m = RouteMetrics::of_choices(plan, &choices, CostMode::Weighted);
        cost += m.total_cost;
        max_d += m.max_density() as f64;
        mean_d += m.mean_occupied_density();
    }
    let draws = BASELINE_DRAWS as f64;
    ComparisonRow {
        model: "random".into(),
        cost: cost / draws,
        improvement_pct: 0.0,
        max_density: max_d / draws,
        mean_density: mean_d / draws,
        energy: None,
        choices: None,
    }
}

/// Random baseline plus a density-mode and a weighted-mode solve per
/// sampler. Each solver row keeps its lowest-energy valid solution across
/// `seeds` and is scored under the weighted cost function.
pub fn compare_models(
    scenario: &Scenario,
    samplers: &[SamplerKind],
    params: &AnnealParams,
    seeds: &[u64],
) -> Result<ComparisonReport> {
    let plan = generate_routes(scenario)?;
    let baseline = random_baseline(&plan, seeds.first().copied().unwrap_or(0));
    let baseline_cost = baseline.cost;
    let mut rows = vec![baseline];
    let penalty = match scenario.penalty {
        Penalty::Auto => None,
        Penalty::Fixed(k) => Some(k),
    };
    let default_seeds = [params.seed];
    let seeds = if seeds.is_empty() { &default_seeds[..] } else { seeds };

    for mode in [CostMode::Density, CostMode::Weighted] {
        let problem = compile(&plan, mode, penalty)?;
        for &sampler in samplers {
            let runs = if sampler == SamplerKind::Anneal { seeds } else { &seeds[..1] };
            let mut best: Option<Assignment> = None;
            for &seed in runs {
                let run_params = AnnealParams { seed, ..params.clone() };
                let set = sampler.run(&problem, &plan, &run_params, Execution::default())?;
                let chosen = select_solution(&set, &plan, &problem)?;
                if best.as_ref().is_none_or(|b| chosen.energy < b.energy) {
                    best = Some(chosen);
                }
            }
            let best = best.expect("at least one run");
            let choices = best.choice_vector().expect("selected solutions are valid");
            let weighted = RouteMetrics::of_choices(&plan, &choices, CostMode::Weighted);
            let model = if samplers.len() == 1 {
                mode.as_str().to_string()
            } else {
                format!("{mode}-{sampler}")
            };
            rows.push(ComparisonRow {
                model,
                cost: weighted.total_cost,
                improvement_pct: improvement_pct(baseline_cost, weighted.total_cost),
                max_density: weighted.max_density() as f64,
                mean_density: weighted.mean_occupied_density(),
                energy: Some(best.energy),
                choices: Some(choices),
            });
        }
    }
    Ok(ComparisonReport { rows })
}
