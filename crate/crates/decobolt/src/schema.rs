//! Shipped JSON schemas for the CLI outputs and a small validator for the
//! subset of JSON Schema they use (type, properties, required, items,
//! enum, additionalProperties).

use serde_json::Value;

pub const RATES_SCHEMA: &str = include_str!("../schemas/rates.schema.json");
pub const FEASIBILITY_SCHEMA: &str = include_str!("../schemas/feasibility.schema.json");
pub const SCENARIO_SCHEMA: &str = include_str!("../schemas/scenario.schema.json");

/// Validates `instance` against `schema`; the error carries a JSON-pointer
/// style path to the offending node.
pub fn validate(instance: &Value, schema: &Value) -> Result<(), String> {
    validate_at(instance, schema, "$")
}

fn validate_at(instance: &Value, schema: &Value, path: &str) -> Result<(), String> {
    let obj = match schema.as_object() {
        Some(o) => o,
        None => return Err(format!("{path}: schema node is not an object")),
    };

    if let Some(types) = obj.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(items) => items.iter().filter_map(|v| v.as_str()).collect(),
            _ => return Err(format!("{path}: malformed type constraint")),
        };
        if !allowed.iter().any(|t| type_matches(instance, t)) {
            return Err(format!(
                "{path}: expected one of {allowed:?}, found {}",
                type_name(instance)
            ));
        }
    }

    if let Some(options) = obj.get("enum").and_then(|e| e.as_array()) {
        if !options.contains(instance) {
            return Err(format!("{path}: value {instance} not in enum"));
        }
    }

    if let Some(map) = instance.as_object() {
        if let Some(required) = obj.get("required").and_then(|r| r.as_array()) {
            for key in required.iter().filter_map(|k| k.as_str()) {
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required key {key:?}"));
                }
            }
        }
        let properties = obj.get("properties").and_then(|p| p.as_object());
        if obj.get("additionalProperties").and_then(|a| a.as_bool()) == Some(false) {
            for key in map.keys() {
                if properties.map_or(true, |p| !p.contains_key(key)) {
                    return Err(format!("{path}: unexpected key {key:?}"));
                }
            }
        }
        if let Some(props) = properties {
            for (key, sub) in props {
                if let Some(value) = map.get(key) {
                    validate_at(value, sub, &format!("{path}.{key}"))?;
                }
            }
        }
    }

    if let (Some(items), Some(sub)) = (instance.as_array(), obj.get("items")) {
        for (i, item) in items.iter().enumerate() {
            validate_at(item, sub, &format!("{path}[{i}]"))?;
        }
    }

    Ok(())
}

fn type_matches(value: &Value, type_name: &str) -> bool {
    match type_name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.is_i64() || value.is_u64(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        _ => false,
    }
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
