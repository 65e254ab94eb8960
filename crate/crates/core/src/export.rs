//! Text and CSV outputs.
//!
//! All writers produce LF line endings and no trailing whitespace. Reals use
//! nine significant digits ([`format_g9`]) in the QUBO file and in the CSVs.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::analysis::{ComparisonReport, CurvePoint, DensityRow};
use crate::fmt::format_g9;
use crate::qubo::QuboProblem;

/// `p qubo N E offset` header, then `a b value` per nonzero entry sorted by
/// `(a, b)`.
pub fn qubo_text(problem: &QuboProblem) -> String {
    let entries = problem.coefficients();
    let mut out = String::new();
    writeln!(
        out,
        "p qubo {} {} {}",
        problem.n_vars(),
        entries.len(),
        format_g9(problem.offset())
    )
    .unwrap();
    for (&(a, b), &q) in entries {
        writeln!(out, "{a} {b} {}", format_g9(q)).unwrap();
    }
    out
}

/// Sidecar JSON: variable index to `{vehicle, option}`, in index order.
pub fn var_map_json(problem: &QuboProblem) -> String {
    let var_map = problem.var_map();
    let mut map = Map::new();
    for index in 0..var_map.n_vars() {
        let (vehicle, option) = var_map.pair(index);
        map.insert(index.to_string(), json!({ "vehicle": vehicle, "option": option }));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("json");
    text.push('\n');
    text
}

pub fn energy_cost_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("energy,cost,valid\n");
    for p in points {
        writeln!(out, "{},{},{}", format_g9(p.energy), format_g9(p.cost), p.valid).unwrap();
    }
    out
}

pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("segment,weight,density,load,flag\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.segment,
            format_g9(r.weight),
            r.density,
            format_g9(r.load),
            r.flag
        )
        .unwrap();
    }
    out
}

pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("model,cost,improvement_pct,max_density,mean_density\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.model,
            format_g9(r.cost),
            format_g9(r.improvement_pct),
            format_g9(r.max_density),
            format_g9(r.mean_density)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{Coefficients, VarMap};

    #[test]
    fn qubo_file_layout() {
        let mut c = Coefficients::new();
        c.insert((0, 0), -1.0);
        c.insert((0, 1), 2.0);
        c.insert((1, 1), 1.0 / 3.0);
        let p = QuboProblem::new(VarMap::new(1, 2), c, 12.5).unwrap();
        assert_eq!(qubo_text(&p), "p qubo 2 3 12.5\n0 0 -1\n0 1 2\n1 1 0.333333333\n");
    }

    #[test]
    fn sidecar_in_index_order() {
        let p = QuboProblem::new(VarMap::new(4, 3), Coefficients::new(), 0.0).unwrap();
        let v: Value = serde_json::from_str(&var_map_json(&p)).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 12);
        assert_eq!(keys[10], "10");
        assert_eq!(v["7"], json!({"vehicle": 2, "option": 1}));
    }

    #[test]
    fn csv_headers() {
        assert_eq!(energy_cost_csv(&[]), "energy,cost,valid\n");
        assert_eq!(density_csv(&[]), "segment,weight,density,load,flag\n");
        let r = ComparisonReport { rows: vec![] };
        assert_eq!(comparison_csv(&r), "model,cost,improvement_pct,max_density,mean_density\n");
    }
}
