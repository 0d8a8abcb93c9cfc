//! Parsers for the command-line inputs: configuration documents, `--sweep`
//! and `--x-b`. All of them reject malformed input with a usage error and
//! never panic.

use serde_json::{Map, Value};
use uplink_access::{NetworkConfig, Point};

use crate::error::{CliError, CliResult};

/// The reference scenario as a configuration document.
pub const REFERENCE_CONFIG: &str = r#"{
  "R_c": 500,
  "R": 50,
  "lambda_per_km2": 4,
  "mu_per_km2": 4,
  "nu_per_km2": 80,
  "P_dbm": -60,
  "Q_dbm": -54,
  "gamma": 3,
  "T": 0.1
}"#;

/// Configuration keys that can be swept, and the alternative spelling each
/// one replaces.
const CONFIG_KEYS: &[(&str, Option<&str>)] = &[
    ("R_c", None),
    ("R", None),
    ("lambda", Some("lambda_per_km2")),
    ("lambda_per_km2", Some("lambda")),
    ("mu", Some("mu_per_km2")),
    ("mu_per_km2", Some("mu")),
    ("nu", Some("nu_per_km2")),
    ("nu_per_km2", Some("nu")),
    ("P", Some("P_dbm")),
    ("P_dbm", Some("P")),
    ("Q", Some("Q_dbm")),
    ("Q_dbm", Some("Q")),
    ("rho", Some("rho_db")),
    ("rho_db", Some("rho")),
    ("gamma", None),
    ("T", Some("T_db")),
    ("T_db", Some("T")),
];

/// A parsed configuration document. The raw key/value form is kept so that
/// sweeps can override one key and re-derive everything that depends on it
/// (a constant `nu` follows `R`, an omitted `rho` follows `Q/P`).
#[derive(Debug, Clone)]
pub struct ConfigDocument {
    raw: Map<String, Value>,
    config: NetworkConfig,
}

impl ConfigDocument {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    /// The configuration with `key` set to `value`.
    pub fn with(&self, key: &str, value: f64) -> CliResult<NetworkConfig> {
        let (_, alt) = CONFIG_KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| CliError::Usage(format!("`{key}` is not a configuration key")))?;
        let mut raw = self.raw.clone();
        if let Some(alt) = alt {
            raw.remove(*alt);
        }
        let number = serde_json::Number::from_f64(value)
            .ok_or_else(|| CliError::Usage(format!("`{key}` must be finite, got {value}")))?;
        raw.insert(key.to_string(), Value::Number(number));
        Ok(NetworkConfig::from_json_map(&raw)?)
    }
}

/// Parses a JSON configuration document.
pub fn parse_config(text: &str) -> CliResult<ConfigDocument> {
    let value: Value = serde_json::from_str(text).map_err(uplink_access::Error::from)?;
    let Value::Object(raw) = value else {
        return Err(CliError::Usage("configuration must be a JSON object".into()));
    };
    let config = NetworkConfig::from_json_map(&raw)?;
    Ok(ConfigDocument { raw, config })
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// A configuration key.
    Config(&'static str),
    /// The x or y coordinate of the femto base station.
    FemtoX,
    FemtoY,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub target: SweepTarget,
    pub values: Vec<f64>,
}

/// Parses `NAME=v1,v2,...`. `NAME` is a configuration key or `x_b_x` /
/// `x_b_y`; values must be finite and there must be at least one.
pub fn parse_sweep(arg: &str) -> CliResult<Sweep> {
    let (name, list) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("sweep `{arg}` is not of the form NAME=v1,v2,...")))?;
    let name = name.trim();
    let target = match name {
        "x_b_x" => SweepTarget::FemtoX,
        "x_b_y" => SweepTarget::FemtoY,
        _ => SweepTarget::Config(
            CONFIG_KEYS
                .iter()
                .map(|(k, _)| *k)
                .find(|k| *k == name)
                .ok_or_else(|| CliError::Usage(format!("unknown sweep parameter `{name}`")))?,
        ),
    };
    if list.trim().is_empty() {
        return Err(CliError::Usage(format!("sweep `{name}` has no values")));
    }
    let values = list
        .split(',')
        .map(|v| parse_finite(v, "sweep value"))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Sweep { name: name.to_string(), target, values })
}

/// Parses a point `x,y`.
pub fn parse_point(arg: &str) -> CliResult<Point> {
    let (x, y) = arg
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("point `{arg}` is not of the form x,y")))?;
    Ok(Point::new(parse_finite(x, "coordinate")?, parse_finite(y, "coordinate")?))
}

fn parse_finite(text: &str, what: &str) -> CliResult<f64> {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Usage(format!("{what} `{t}` is not a finite number"))),
    }
}
