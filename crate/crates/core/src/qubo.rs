//! QUBO compilation and energy evaluation.
//!
//! The objective for a route plan is
//!
//! ```text
//! E(x) = sum_m ( sum_{(i,j) in B_m} c_ij x_ij )^2  +  K * sum_i ( sum_j x_ij - 1 )^2
//! ```
//!
//! where `B_m` is the incidence set of segment `m` and `c_ij` is the route
//! weight (weighted mode) or 1 (density mode). Both squares are expanded at
//! build time with `x^2 = x`, so the diagonal carries the linear terms and
//! entries `a < b` the pairwise ones. The constant `K * n` left over from the
//! penalty expansion is kept in an explicit offset.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::CostMode;
use crate::routes::RoutePlan;

/// Bijection between variable index and `(vehicle, option)`:
/// `index = vehicle * k + option`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VarMap {
    pub n_vehicles: usize,
    pub k: usize,
}

impl VarMap {
    pub fn new(n_vehicles: usize, k: usize) -> Self {
        VarMap { n_vehicles, k }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vehicles * self.k
    }

    pub fn index(&self, vehicle: usize, option: usize) -> usize {
        debug_assert!(vehicle < self.n_vehicles && option < self.k);
        vehicle * self.k + option
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.k, index % self.k)
    }
}

/// Length-N binary vector, printed left to right in variable order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryAssignment(Vec<bool>);

impl BinaryAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        BinaryAssignment(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BinaryAssignment(vec![false; n])
    }

    /// Assignment with bit `index` set for every `(vehicle, option)` in
    /// `choices` (indexed by vehicle).
    pub fn from_choices(var_map: VarMap, choices: &[usize]) -> Self {
        let mut bits = vec![false; var_map.n_vars()];
        for (vehicle, &option) in choices.iter().enumerate() {
            bits[var_map.index(vehicle, option)] = true;
        }
        BinaryAssignment(bits)
    }

    /// Low `n` bits of `word`, bit `a` giving variable `a`.
    pub fn from_word(word: u64, n: usize) -> Self {
        BinaryAssignment((0..n).map(|a| word >> a & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, a: usize) -> bool {
        self.0[a]
    }
}

impl fmt::Display for BinaryAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BinaryAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BinaryAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for BinaryAssignment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BinaryAssignment)
    }
}

pub type Coefficients = BTreeMap<(usize, usize), f64>;

fn add_entry(coefficients: &mut Coefficients, a: usize, b: usize, value: f64) {
    let key = if a <= b { (a, b) } else { (b, a) };
    *coefficients.entry(key).or_insert(0.0) += value;
}

fn sparse_energy(coefficients: &Coefficients, offset: f64, n_vars: usize, x: &BinaryAssignment) -> Result<f64> {
    if x.len() != n_vars {
        return Err(Error::LengthMismatch {
            expected: n_vars,
            got: x.len(),
        });
    }
    let mut e = 0.0;
    for (&(a, b), &q) in coefficients {
        if x.get(a) && x.get(b) {
            e += q;
        }
    }
    Ok(e + offset)
}

/// One half of the objective (cost or constraint) before assembly.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboTerms {
    pub var_map: VarMap,
    pub coefficients: Coefficients,
    pub offset: f64,
}

impl QuboTerms {
    pub fn n_vars(&self) -> usize {
        self.var_map.n_vars()
    }

    pub fn energy(&self, x: &BinaryAssignment) -> Result<f64> {
        sparse_energy(&self.coefficients, self.offset, self.n_vars(), x)
    }
}

/// Expands the per-segment congestion squares of `plan`.
pub fn build_cost_terms(plan: &RoutePlan, mode: CostMode) -> QuboTerms {
    let var_map = VarMap::new(plan.n_vehicles(), plan.k());
    let mut coefficients = Coefficients::new();
    for members in plan.incidence() {
        let weighted: Vec<(usize, f64)> = members
            .iter()
            .map(|&(i, j)| (var_map.index(i, j), route_coefficient(plan, i, j, mode)))
            .collect();
        for (p, &(a, ca)) in weighted.iter().enumerate() {
            add_entry(&mut coefficients, a, a, ca * ca);
            for &(b, cb) in &weighted[p + 1..] {
                add_entry(&mut coefficients, a, b, 2.0 * ca * cb);
            }
        }
    }
    QuboTerms {
        var_map,
        coefficients,
        offset: 0.0,
    }
}

pub(crate) fn route_coefficient(plan: &RoutePlan, vehicle: usize, option: usize, mode: CostMode) -> f64 {
    match mode {
        CostMode::Weighted => plan.route(vehicle, option).weight,
        CostMode::Density => 1.0,
    }
}

/// One-hot penalty `sum_i (sum_j x_ij - 1)^2` for `n` vehicles with `k`
/// options each: `-1` on the diagonal, `+2` within each vehicle block and
/// an offset of `n`.
pub fn build_constraint_terms(n: usize, k: usize) -> QuboTerms {
    let var_map = VarMap::new(n, k);
    let mut coefficients = Coefficients::new();
    for i in 0..n {
        for j in 0..k {
            let a = var_map.index(i, j);
            coefficients.insert((a, a), -1.0);
            for jj in j + 1..k {
                coefficients.insert((a, var_map.index(i, jj)), 2.0);
            }
        }
    }
    QuboTerms {
        var_map,
        coefficients,
        offset: n as f64,
    }
}

/// Penalty strength that makes every ground state one-hot per vehicle:
/// `1 + M`, where `M` is the largest cost increase from inserting one route
/// into a state in which every other vehicle has at most one route.
///
/// Any infeasible state can be repaired into a strictly cheaper feasible one:
/// dropping a surplus route never raises the (non-negative) cost and lowers
/// the penalty, and adding a missing route raises the cost by at most `M`
/// while lowering the penalty by `K > M`.
pub fn auto_penalty(plan: &RoutePlan, mode: CostMode) -> f64 {
    let terms = build_cost_terms(plan, mode);
    let (n, k) = (plan.n_vehicles(), plan.k());
    let q = |a: usize, b: usize| {
        let key = if a <= b { (a, b) } else { (b, a) };
        terms.coefficients.get(&key).copied().unwrap_or(0.0)
    };
    let worst = (0..n * k)
        .map(|a| {
            let coupling: f64 = (0..n)
                .filter(|&i| i != a / k)
                .map(|i| (0..k).map(|j| q(a, i * k + j)).fold(0.0, f64::max))
                .sum();
            q(a, a) + coupling
        })
        .fold(0.0, f64::max);
    1.0 + worst
}

/// Cost of selecting every candidate route at once,
/// `sum_m (sum_{(i,j) in B_m} c_ij)^2`; an upper bound on any cost energy.
pub fn cost_upper_bound(plan: &RoutePlan, mode: CostMode) -> f64 {
    plan.incidence()
        .iter()
        .map(|members| {
            let load: f64 = members
                .iter()
                .map(|&(i, j)| route_coefficient(plan, i, j, mode))
                .sum();
            load * load
        })
        .sum()
}

/// Assembled objective `cost + K * constraint`. Immutable.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    var_map: VarMap,
    coefficients: Coefficients,
    offset: f64,
    penalty: f64,
    cost_mode: Option<CostMode>,
}

pub fn assemble(cost: &QuboTerms, constraint: &QuboTerms, penalty: f64) -> Result<QuboProblem> {
    if !penalty.is_finite() || penalty <= 0.0 {
        return Err(Error::NonPositivePenalty(penalty));
    }
    if cost.var_map != constraint.var_map {
        return Err(Error::VarMapMismatch);
    }
    let mut coefficients = cost.coefficients.clone();
    for (&(a, b), &q) in &constraint.coefficients {
        add_entry(&mut coefficients, a, b, penalty * q);
    }
    coefficients.retain(|_, q| *q != 0.0);
    Ok(QuboProblem {
        var_map: cost.var_map,
        coefficients,
        offset: cost.offset + penalty * constraint.offset,
        penalty,
        cost_mode: None,
    })
}

/// Compiles `plan` with the given cost mode and penalty (auto when `None`).
pub fn compile(plan: &RoutePlan, mode: CostMode, penalty: Option<f64>) -> Result<QuboProblem> {
    let cost = build_cost_terms(plan, mode);
    let constraint = build_constraint_terms(plan.n_vehicles(), plan.k());
    let k = penalty.unwrap_or_else(|| auto_penalty(plan, mode));
    let mut problem = assemble(&cost, &constraint, k)?;
    problem.cost_mode = Some(mode);
    Ok(problem)
}

impl QuboProblem {
    /// Problem from raw entries; every key must satisfy `a <= b < N`.
    pub fn new(var_map: VarMap, coefficients: Coefficients, offset: f64) -> Result<Self> {
        let n = var_map.n_vars();
        if let Some(&(a, b)) = coefficients.keys().find(|&&(a, b)| a > b || b >= n) {
            return Err(Error::Validation(format!("entry ({a}, {b}) outside the upper triangle of {n}x{n}")));
        }
        let mut coefficients = coefficients;
        coefficients.retain(|_, q| *q != 0.0);
        Ok(QuboProblem {
            var_map,
            coefficients,
            offset,
            penalty: 0.0,
            cost_mode: None,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.var_map.n_vars()
    }

    pub fn var_map(&self) -> VarMap {
        self.var_map
    }

    /// Nonzero entries keyed by `(a, b)` with `a <= b`.
    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn coefficient(&self, a: usize, b: usize) -> f64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.coefficients.get(&key).copied().unwrap_or(0.0)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Penalty strength used at assembly (0 for hand-built problems).
    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// Cost mode the problem was compiled with, if compiled from a plan.
    pub fn cost_mode(&self) -> Option<CostMode> {
        self.cost_mode
    }

    /// `sum_a Q_aa x_a + sum_{a<b} Q_ab x_a x_b + offset`.
    pub fn energy(&self, x: &BinaryAssignment) -> Result<f64> {
        sparse_energy(&self.coefficients, self.offset, self.n_vars(), x)
    }

    /// Equivalent Ising model under `x = (1 + s) / 2`.
    pub fn to_ising(&self) -> IsingModel {
        let n = self.n_vars();
        let mut h = vec![0.0; n];
        let mut j = BTreeMap::new();
        let mut offset = self.offset;
        for (&(a, b), &q) in &self.coefficients {
            if a == b {
                h[a] += q / 2.0;
                offset += q / 2.0;
            } else {
                *j.entry((a, b)).or_insert(0.0) += q / 4.0;
                h[a] += q / 4.0;
                h[b] += q / 4.0;
                offset += q / 4.0;
            }
        }
        IsingModel { h, j, offset }
    }
}

/// `E(s) = sum_a h_a s_a + sum_{a<b} J_ab s_a s_b + offset`, `s` in {-1, +1}.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.h.len(), "spin vector length");
        let field: f64 = self.h.iter().zip(spins).map(|(h, &s)| h * f64::from(s)).sum();
        let coupling: f64 = self
            .j
            .iter()
            .map(|(&(a, b), &jab)| jab * f64::from(spins[a]) * f64::from(spins[b]))
            .sum();
        field + coupling + self.offset
    }
}

/// Spin vector corresponding to `x` (`0 -> -1`, `1 -> +1`).
pub fn spins_of(x: &BinaryAssignment) -> Vec<i8> {
    x.bits().iter().map(|&b| if b { 1 } else { -1 }).collect()
}
