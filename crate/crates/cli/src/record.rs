use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Everything that determines a run's output, apart from the instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_const: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memo: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// One run: what was asked, what came out, how long it took.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub params: Params,
    /// Result fields, flattened into the top level.
    #[serde(flatten)]
    pub result: Map<String, Value>,
    pub wall_time_secs: f64,
}

/// Serializes `x` to a JSON object with every timing field removed, so the
/// record's result part is a pure function of the inputs.
pub fn result_fields<T: Serialize>(x: &T) -> Map<String, Value> {
    match serde_json::to_value(x).expect("results serialize") {
        Value::Object(mut m) => {
            strip_timing(&mut m);
            m
        }
        v => Map::from_iter([("value".to_string(), v)]),
    }
}

fn strip_timing(m: &mut Map<String, Value>) {
    m.remove("wall_time_secs");
    for v in m.values_mut() {
        if let Value::Object(inner) = v {
            strip_timing(inner);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_json() {
        let rec = RunRecord {
            command: "estimate".into(),
            problem: "tree".into(),
            input: Some("t.tree".into()),
            params: Params {
                xi: Some(0.1),
                seed: Some(7),
                ..Params::default()
            },
            result: result_fields(&serde_json::json!({"estimate": 7.25, "steps": 10, "wall_time_secs": 0.5})),
            wall_time_secs: 0.75,
        };
        assert!(!rec.result.contains_key("wall_time_secs"));
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
    }
}
