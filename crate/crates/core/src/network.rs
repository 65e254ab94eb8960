//! Road networks, vehicles and routing scenarios, plus the scenario JSON file
//! format.
//!
//! Segments are directed (a two-way road is two segments) and carry a real
//! weight `>= 1` standing in for distance, priority or capacity. Segment and
//! vehicle ids are dense and zero-based so they index arrays directly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub id: usize,
    #[serde(rename = "from")]
    pub from_node: String,
    #[serde(rename = "to")]
    pub to_node: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vehicle {
    pub id: usize,
    pub origin: String,
    pub destination: String,
}

/// How a route's contribution to a segment's congestion is weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    /// Each route counts with its accumulated weight `w_ij`.
    #[default]
    Weighted,
    /// Each route counts as one vehicle (pure density).
    Density,
}

impl CostMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CostMode::Weighted => "weighted",
            CostMode::Density => "density",
        }
    }
}

impl fmt::Display for CostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CostMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" => Ok(CostMode::Weighted),
            "density" => Ok(CostMode::Density),
            other => Err(format!("unknown cost mode {other:?} (expected weighted|density)")),
        }
    }
}

/// Penalty strength for the one-hot constraint: automatic bound or a fixed
/// positive value. Serialized as `"auto"` or a JSON number.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Penalty {
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::Auto => f.write_str("auto"),
            Penalty::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl std::str::FromStr for Penalty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Penalty::Auto);
        }
        match s.parse::<f64>() {
            Ok(k) if k > 0.0 && k.is_finite() => Ok(Penalty::Fixed(k)),
            _ => Err(format!("penalty must be \"auto\" or a positive number, got {s:?}")),
        }
    }
}

impl Serialize for Penalty {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Penalty::Auto => serializer.serialize_str("auto"),
            Penalty::Fixed(k) => serializer.serialize_f64(*k),
        }
    }
}

impl<'de> Deserialize<'de> for Penalty {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(k) => Ok(Penalty::Fixed(k)),
            Raw::Text(s) if s == "auto" => Ok(Penalty::Auto),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "penalty must be \"auto\" or a number, got {s:?}"
            ))),
        }
    }
}

/// Directed road graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct RoadNetwork {
    nodes: Vec<String>,
    segments: Vec<Segment>,
    node_index: HashMap<String, usize>,
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for RoadNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.segments == other.segments
    }
}

impl RoadNetwork {
    pub fn new(nodes: Vec<String>, segments: Vec<Segment>) -> Result<Self> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node_index.insert(node.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate node {node:?}")));
            }
        }
        let mut outgoing = vec![Vec::new(); nodes.len()];
        for (pos, seg) in segments.iter().enumerate() {
            if seg.id != pos {
                return Err(Error::Validation(format!(
                    "segment ids must be dense and in order: position {pos} holds id {}",
                    seg.id
                )));
            }
            // Also rejects NaN.
            if !seg.weight.is_finite() || seg.weight < 1.0 {
                return Err(Error::Validation(format!(
                    "segment {} weight {} < 1",
                    seg.id, seg.weight
                )));
            }
            let Some(&from) = node_index.get(&seg.from_node) else {
                return Err(Error::Validation(format!(
                    "segment {} starts at unknown node {:?}",
                    seg.id, seg.from_node
                )));
            };
            if !node_index.contains_key(&seg.to_node) {
                return Err(Error::Validation(format!(
                    "segment {} ends at unknown node {:?}",
                    seg.id, seg.to_node
                )));
            }
            outgoing[from].push(seg.id);
        }
        Ok(RoadNetwork {
            nodes,
            segments,
            node_index,
            outgoing,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: usize) -> Option<&Segment> {
        self.segments.get(id)
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn node_index(&self, node: &str) -> Option<usize> {
        self.node_index.get(node).copied()
    }

    /// Segment ids leaving node index `node`, in ascending id order.
    pub fn outgoing(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    pub(crate) fn head(&self, segment: usize) -> usize {
        self.node_index[&self.segments[segment].to_node]
    }

    pub(crate) fn tail(&self, segment: usize) -> usize {
        self.node_index[&self.segments[segment].from_node]
    }
}

/// Returns true iff `route` is a non-empty connected directed walk from
/// `origin` to `destination` that uses no segment twice.
pub fn validate_route(network: &RoadNetwork, route: &[usize], origin: &str, destination: &str) -> bool {
    let (Some(mut at), Some(dest)) = (network.node_index(origin), network.node_index(destination)) else {
        return false;
    };
    if route.is_empty() {
        return false;
    }
    let mut seen = HashSet::with_capacity(route.len());
    for &id in route {
        if id >= network.num_segments() || !seen.insert(id) {
            return false;
        }
        if network.tail(id) != at {
            return false;
        }
        at = network.head(id);
    }
    at == dest
}

/// A complete routing problem. Immutable once validated.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub network: RoadNetwork,
    pub vehicles: Vec<Vehicle>,
    /// Candidate routes per vehicle.
    pub k: usize,
    /// Vehicle id to its `k` explicit routes (segment id lists).
    pub explicit_routes: Option<BTreeMap<usize, Vec<Vec<usize>>>>,
    pub cost_mode: CostMode,
    pub penalty: Penalty,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    nodes: Vec<String>,
    segments: Vec<Segment>,
    vehicles: Vec<Vehicle>,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    routes: Option<BTreeMap<String, Vec<Vec<usize>>>>,
    #[serde(default)]
    cost_mode: CostMode,
    #[serde(default)]
    penalty: Penalty,
}

impl Scenario {
    pub fn new(
        network: RoadNetwork,
        vehicles: Vec<Vehicle>,
        k: usize,
        explicit_routes: Option<BTreeMap<usize, Vec<Vec<usize>>>>,
        cost_mode: CostMode,
        penalty: Penalty,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("k must be at least 1".into()));
        }
        if vehicles.is_empty() {
            return Err(Error::Validation("scenario has no vehicles".into()));
        }
        if let Penalty::Fixed(value) = penalty {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Validation(format!("penalty {value} is not positive")));
            }
        }
        for (pos, v) in vehicles.iter().enumerate() {
            if v.id != pos {
                return Err(Error::Validation(format!(
                    "vehicle ids must be dense and in order: position {pos} holds id {}",
                    v.id
                )));
            }
            for node in [&v.origin, &v.destination] {
                if network.node_index(node).is_none() {
                    return Err(Error::Validation(format!(
                        "vehicle {} references unknown node {node:?}",
                        v.id
                    )));
                }
            }
            if v.origin == v.destination {
                return Err(Error::Validation(format!(
                    "vehicle {} has origin equal to destination",
                    v.id
                )));
            }
        }
        if let Some(routes) = &explicit_routes {
            check_explicit_routes(&network, &vehicles, k, routes)?;
        }
        Ok(Scenario {
            network,
            vehicles,
            k,
            explicit_routes,
            cost_mode,
            penalty,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let network = RoadNetwork::new(file.nodes, file.segments)?;
        let routes = match file.routes {
            None => None,
            Some(raw) => {
                let mut parsed = BTreeMap::new();
                for (key, list) in raw {
                    let id: usize = key.parse().map_err(|_| {
                        Error::Validation(format!("routes key {key:?} is not a vehicle id"))
                    })?;
                    if parsed.insert(id, list).is_some() {
                        return Err(Error::Validation(format!(
                            "routes listed twice for vehicle {id}"
                        )));
                    }
                }
                Some(parsed)
            }
        };
        Scenario::new(network, file.vehicles, file.k, routes, file.cost_mode, file.penalty)
    }

    pub fn to_json_string(&self) -> String {
        let file = ScenarioFile {
            nodes: self.network.nodes.clone(),
            segments: self.network.segments.clone(),
            vehicles: self.vehicles.clone(),
            k: self.k,
            routes: self.explicit_routes.as_ref().map(|routes| {
                routes
                    .iter()
                    .map(|(id, list)| (id.to_string(), list.clone()))
                    .collect()
            }),
            cost_mode: self.cost_mode,
            penalty: self.penalty,
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    pub fn num_vehicles(&self) -> usize {
        self.vehicles.len()
    }
}

fn check_explicit_routes(
    network: &RoadNetwork,
    vehicles: &[Vehicle],
    k: usize,
    routes: &BTreeMap<usize, Vec<Vec<usize>>>,
) -> Result<()> {
    if let Some(extra) = routes.keys().find(|&&id| id >= vehicles.len()) {
        return Err(Error::Validation(format!("routes given for unknown vehicle {extra}")));
    }
    for v in vehicles {
        let Some(list) = routes.get(&v.id) else {
            return Err(Error::Validation(format!("vehicle {} has no explicit routes", v.id)));
        };
        if list.len() != k {
            return Err(Error::Validation(format!(
                "vehicle {} has {} explicit routes, expected k = {k}",
                v.id,
                list.len()
            )));
        }
        let mut seen: Vec<Vec<usize>> = Vec::with_capacity(k);
        for (j, route) in list.iter().enumerate() {
            if let Some(&bad) = route.iter().find(|&&id| id >= network.num_segments()) {
                return Err(Error::Validation(format!(
                    "route {j} of vehicle {} references unknown segment {bad}",
                    v.id
                )));
            }
            if !validate_route(network, route, &v.origin, &v.destination) {
                return Err(Error::Validation(format!(
                    "route {j} of vehicle {} is not a connected path from {} to {}",
                    v.id, v.origin, v.destination
                )));
            }
            let mut set = route.clone();
            set.sort_unstable();
            if seen.contains(&set) {
                return Err(Error::Validation(format!(
                    "vehicle {} lists the same route twice (option {j})",
                    v.id
                )));
            }
            seen.push(set);
        }
    }
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_json_str(&text)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn seg(id: usize, from: &str, to: &str, weight: f64) -> Segment {
        Segment {
            id,
            from_node: from.into(),
            to_node: to.into(),
            weight,
        }
    }

    fn chain() -> RoadNetwork {
        RoadNetwork::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![seg(0, "a", "b", 1.0), seg(1, "b", "c", 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn rejects_light_segment() {
        let err = RoadNetwork::new(vec!["a".into(), "b".into()], vec![seg(0, "a", "b", 0.5)]).unwrap_err();
        assert_eq!(err.to_string(), "invalid scenario: segment 0 weight 0.5 < 1");
    }

    #[test]
    fn rejects_nan_weight_and_bad_endpoint() {
        assert!(RoadNetwork::new(vec!["a".into(), "b".into()], vec![seg(0, "a", "b", f64::NAN)]).is_err());
        assert!(RoadNetwork::new(vec!["a".into()], vec![seg(0, "a", "z", 1.0)]).is_err());
    }

    #[test]
    fn rejects_sparse_segment_ids() {
        let err = RoadNetwork::new(vec!["a".into(), "b".into()], vec![seg(3, "a", "b", 1.0)]).unwrap_err();
        assert!(err.to_string().contains("dense"));
    }

    #[test]
    fn route_validation() {
        let net = chain();
        assert!(validate_route(&net, &[0, 1], "a", "c"));
        assert!(validate_route(&net, &[0], "a", "b"));
        assert!(!validate_route(&net, &[1], "a", "c"));
        assert!(!validate_route(&net, &[1, 0], "a", "c"));
        assert!(!validate_route(&net, &[], "a", "a"));
        assert!(!validate_route(&net, &[0, 7], "a", "c"));
        assert!(!validate_route(&net, &[0, 1], "a", "nowhere"));
    }

    #[test]
    fn repeated_segment_is_rejected() {
        let net = RoadNetwork::new(
            vec!["a".into(), "b".into()],
            vec![seg(0, "a", "b", 1.0), seg(1, "b", "a", 1.0)],
        )
        .unwrap();
        assert!(!validate_route(&net, &[0, 1, 0], "a", "b"));
        assert!(validate_route(&net, &[0], "a", "b"));
    }

    #[test]
    fn minimal_scenario_with_one_explicit_route() {
        let text = r#"{
            "nodes": ["a", "b"],
            "segments": [{"id": 0, "from": "a", "to": "b", "weight": 1}],
            "vehicles": [{"id": 0, "origin": "a", "destination": "b"}],
            "k": 1,
            "routes": {"0": [[0]]},
            "cost_mode": "density",
            "penalty": 2.5
        }"#;
        let s = Scenario::from_json_str(text).unwrap();
        assert_eq!(s.k, 1);
        assert_eq!(s.cost_mode, CostMode::Density);
        assert_eq!(s.penalty, Penalty::Fixed(2.5));
        assert_eq!(s.explicit_routes.as_ref().unwrap()[&0], vec![vec![0]]);
    }

    #[test]
    fn unknown_segment_in_route_is_a_validation_error() {
        let text = r#"{
            "nodes": ["a", "b"],
            "segments": [{"id": 0, "from": "a", "to": "b", "weight": 1}],
            "vehicles": [{"id": 0, "origin": "a", "destination": "b"}],
            "k": 1,
            "routes": {"0": [[99]]}
        }"#;
        let err = Scenario::from_json_str(text).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("unknown segment 99"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{
            "nodes": ["a", "b"],
            "segments": [{"id": 0, "from": "a", "to": "b", "weight": 1}],
            "vehicles": [{"id": 0, "origin": "a", "destination": "b"}],
            "k": 1,
            "comment": "nope"
        }"#;
        assert!(matches!(Scenario::from_json_str(text), Err(Error::Parse(_))));
    }

    #[test]
    fn explicit_route_count_and_duplicates() {
        let base = |routes: &str| {
            format!(
                r#"{{
                "nodes": ["a", "b", "c"],
                "segments": [{{"id": 0, "from": "a", "to": "b", "weight": 1}},
                             {{"id": 1, "from": "b", "to": "c", "weight": 1}},
                             {{"id": 2, "from": "a", "to": "c", "weight": 3}}],
                "vehicles": [{{"id": 0, "origin": "a", "destination": "c"}}],
                "k": 2,
                "routes": {routes}
            }}"#
            )
        };
        assert!(Scenario::from_json_str(&base(r#"{"0": [[0, 1], [2]]}"#)).is_ok());
        assert!(Scenario::from_json_str(&base(r#"{"0": [[0, 1]]}"#)).is_err());
        assert!(Scenario::from_json_str(&base(r#"{"0": [[0, 1], [0, 1]]}"#)).is_err());
        assert!(Scenario::from_json_str(&base(r#"{"0": [[0], [2]]}"#)).is_err());
        assert!(Scenario::from_json_str(&base(r#"{"0": [[0, 1], [2]], "1": [[2], [0, 1]]}"#)).is_err());
    }

    #[test]
    fn vehicle_checks() {
        let net = chain();
        let same = vec![Vehicle { id: 0, origin: "a".into(), destination: "a".into() }];
        assert!(Scenario::new(net.clone(), same, 1, None, CostMode::Weighted, Penalty::Auto).is_err());
        let ok = vec![Vehicle { id: 0, origin: "a".into(), destination: "c".into() }];
        assert!(Scenario::new(net.clone(), ok.clone(), 0, None, CostMode::Weighted, Penalty::Auto).is_err());
        assert!(Scenario::new(net, ok, 1, None, CostMode::Weighted, Penalty::Fixed(-1.0)).is_err());
    }

    #[test]
    fn penalty_parsing() {
        assert_eq!("auto".parse::<Penalty>().unwrap(), Penalty::Auto);
        assert_eq!("12.5".parse::<Penalty>().unwrap(), Penalty::Fixed(12.5));
        assert!("0".parse::<Penalty>().is_err());
        assert!("lots".parse::<Penalty>().is_err());
    }
}
