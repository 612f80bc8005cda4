//! `key = value` parameter overrides applied to any serializable parameter set.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Parses a flat key-value file: one `key = value` per line, `#` starts a
/// comment, blank lines are skipped.
pub fn parse_kv_file(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got {raw:?}", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splits a `key=value` flag argument.
pub fn parse_kv_arg(arg: &str) -> Result<(String, String), CliError> {
    arg.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| CliError::Config(format!("expected key=value, got {arg:?}")))
}

fn literal(v: &str) -> Value {
    let v = v.trim();
    let wrapped;
    let text = if v.contains(',') && !v.starts_with('[') {
        wrapped = format!("[{v}]");
        &wrapped
    } else {
        v
    };
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(v.to_string()))
}

/// Sets each dotted key (`weights.w_r`, `detection.ransac.iterations`) on
/// `base` and deserializes the result. Unknown keys are rejected.
pub fn apply<T: Serialize + DeserializeOwned>(base: &T, pairs: &[(String, String)]) -> Result<T, CliError> {
    let mut root = serde_json::to_value(base)?;
    for (key, value) in pairs {
        let mut slot = &mut root;
        for part in key.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| CliError::Config(format!("unknown key {key:?}")))?;
        }
        *slot = literal(value);
    }
    serde_json::from_value(root).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use oto_core::planner::{PlannerConfig, PlannerKind};

    #[test]
    fn nested_and_top_level_keys() {
        let pairs = parse_kv_file("# weights\nweights.w_r = 0.5\nplanner = greedy\ncube_extent = 10, 12, 4\n\nrays=360 # coarse\n").unwrap();
        let cfg = apply(&PlannerConfig::default(), &pairs).unwrap();
        assert_eq!(cfg.weights.w_r, 0.5);
        assert_eq!(cfg.planner, PlannerKind::Greedy);
        assert_eq!(cfg.rays, 360);
        assert_eq!((cfg.cube_extent.x, cfg.cube_extent.y, cfg.cube_extent.z), (10.0, 12.0, 4.0));
    }

    #[test]
    fn unknown_key_and_bad_value_fail() {
        assert!(apply(&PlannerConfig::default(), &[("weights.nope".into(), "1".into())]).is_err());
        assert!(apply(&PlannerConfig::default(), &[("rays".into(), "many".into())]).is_err());
        assert!(parse_kv_file("just words").is_err());
    }
}
