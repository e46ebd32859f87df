//! Versioned JSON documents for [`ConsoleParams`].
//!
//! ```json
//! {"version": 1,
//!  "tracks": [{"gain_db": 0.0, "eq.low_shelf.freq_hz": 100.0, ...}],
//!  "master": {"eq.low_shelf.freq_hz": 100.0, ...}}
//! ```
//!
//! Field names are the `name`s of [`STRIP_RANGES`] and [`MASTER_RANGES`].

use std::path::Path;

use serde_json::{json, Map, Value};

use super::params::{
    ChannelStripParams, ConsoleParams, MasterBusParams, ParamRange, MASTER_RANGES, STRIP_RANGES,
};
use crate::error::{Error, Result};

pub const PARAMS_SCHEMA_VERSION: u64 = 1;

fn to_object(values: &[f64], ranges: &[ParamRange]) -> Value {
    let map: Map<String, Value> = ranges
        .iter()
        .zip(values)
        .map(|(r, &v)| (r.name.to_string(), json!(v)))
        .collect();
    Value::Object(map)
}

fn from_object(value: &Value, ranges: &[ParamRange], what: &str) -> Result<Vec<f64>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::ParamDocument(format!("{what} must be an object")))?;
    if let Some(extra) = obj.keys().find(|k| !ranges.iter().any(|r| r.name == k.as_str())) {
        return Err(Error::ParamDocument(format!("{what}: unknown field `{extra}`")));
    }
    ranges
        .iter()
        .map(|r| {
            obj.get(r.name)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::ParamDocument(format!("{what}: missing numeric field `{}`", r.name)))
        })
        .collect()
}

pub fn params_to_json(params: &ConsoleParams) -> Value {
    json!({
        "version": PARAMS_SCHEMA_VERSION,
        "tracks": params
            .strips
            .iter()
            .map(|s| to_object(&s.to_values(), &STRIP_RANGES))
            .collect::<Vec<_>>(),
        "master": to_object(&params.master.to_values(), &MASTER_RANGES),
    })
}

/// Parse and range-check a parameter document.
pub fn params_from_json(doc: &Value) -> Result<ConsoleParams> {
    match doc.get("version").and_then(Value::as_u64) {
        Some(PARAMS_SCHEMA_VERSION) => {}
        other => {
            return Err(Error::ParamDocument(format!(
                "unsupported version {other:?} (expected {PARAMS_SCHEMA_VERSION})"
            )))
        }
    }
    let tracks = doc
        .get("tracks")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ParamDocument("`tracks` must be an array".into()))?;
    let strips = tracks
        .iter()
        .enumerate()
        .map(|(i, t)| ChannelStripParams::from_values(&from_object(t, &STRIP_RANGES, &format!("tracks[{i}]"))?))
        .collect::<Result<Vec<_>>>()?;
    let master_value = doc
        .get("master")
        .ok_or_else(|| Error::ParamDocument("missing `master`".into()))?;
    let master = MasterBusParams::from_values(&from_object(master_value, &MASTER_RANGES, "master")?)?;
    Ok(ConsoleParams { strips, master })
}

pub fn write_params(params: &ConsoleParams, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&params_to_json(params))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_params(path: impl AsRef<Path>) -> Result<ConsoleParams> {
    let text = std::fs::read_to_string(path)?;
    params_from_json(&serde_json::from_str(&text)?)
}
