use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::Failure;

pub const SCHEMA: &str = "linkforge/1";

/// Serializes `body` as a JSON object and stamps the schema version on it.
pub fn with_schema<T: Serialize>(body: &T) -> Value {
    let mut obj = match serde_json::to_value(body).expect("report types serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("data".into(), other);
            m
        }
    };
    obj.insert("schema".into(), Value::String(SCHEMA.into()));
    Value::Object(obj)
}

pub fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    write_text(&text, out)
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Input(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}
