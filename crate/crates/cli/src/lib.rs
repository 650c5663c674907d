//! Config parsing, execution and reporting behind the `incoherent` binary.

pub mod config;
pub mod report;
pub mod run;
pub mod summary;

use serde_json::Value;
use sha2::{Digest, Sha256};

use config::parse_value;
use report::{Provenance, Report};

/// SHA-256 of the effective configuration with `out` removed, serialized
/// compactly with sorted keys.
pub fn config_hash(config: &Value) -> String {
    let mut canonical = config.clone();
    if let Value::Object(map) = &mut canonical {
        map.remove("out");
    }
    let text = serde_json::to_string(&canonical).expect("json value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn provenance(config: &Value) -> Provenance {
    let field = |k: &str| config.get(k);
    Provenance {
        tool: "incoherent".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: config_hash(config),
        mode: field("mode").and_then(Value::as_str).map(str::to_string),
        system: field("system").map(|s| match s {
            Value::String(name) => name.clone(),
            Value::Object(m) => m.get("preset").and_then(Value::as_str).unwrap_or("inline").to_string(),
            _ => "inline".into(),
        }),
        seed: field("seed").and_then(Value::as_u64),
    }
}

/// Validates and runs an effective configuration. Every failure, including
/// validation, ends up in the report's error record.
pub fn run_value(config: Value) -> Report {
    let mut prov = provenance(&config);
    match parse_value(config) {
        Ok(parsed) => {
            if prov.system.is_none() {
                prov.system = Some(parsed.system.name().to_string());
            }
            run::execute(&parsed, prov)
        }
        Err(e) => Report::failed(prov, "config", e.to_string()),
    }
}
