//! Deterministic JSON rendering and content hashing.
//!
//! Floats are written with 17 significant digits in exponent form, object
//! keys in sorted order, and arrays of scalars on a single line.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const HASH_KEY: &str = "content_hash";

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if let Some(i) = n.as_i64() {
        out.push_str(&i.to_string());
    } else if let Some(u) = n.as_u64() {
        out.push_str(&u.to_string());
    } else {
        let f = n.as_f64().expect("serde_json numbers are i64, u64 or f64");
        out.push_str(&format!("{f:.16e}"));
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, level);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (k, key) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &map[*key], level + 1);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

/// SHA-256 of the rendered document with any existing hash field removed.
pub fn content_hash(doc: &Map<String, Value>) -> String {
    let mut body = doc.clone();
    body.remove(HASH_KEY);
    let digest = Sha256::digest(render(&Value::Object(body)).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Adds the content hash and renders.
pub fn finish(mut doc: Map<String, Value>) -> String {
    let hash = content_hash(&doc);
    doc.insert(HASH_KEY.into(), Value::String(hash));
    render(&Value::Object(doc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = render(&json!([0.1, -2.0, 3, 1e-300]));
        assert_eq!(s, "[1.0000000000000001e-1, -2.0000000000000000e0, 3, 1.0000000000000000e-300]\n");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, -2.0, 3.0, 1e-300]);
    }

    #[test]
    fn keys_sorted_and_nested_layout() {
        let s = render(&json!({"b": [[1, 2], [3]], "a": {"y": null, "x": "q\""}}));
        assert_eq!(
            s,
            "{\n  \"a\": {\n    \"x\": \"q\\\"\",\n    \"y\": null\n  },\n  \"b\": [\n    [1, 2],\n    [3]\n  ]\n}\n"
        );
    }

    #[test]
    fn hash_ignores_existing_hash() {
        let mut doc = Map::new();
        doc.insert("x".into(), json!(1.5));
        let h = content_hash(&doc);
        assert_eq!(h.len(), 64);
        doc.insert(HASH_KEY.into(), json!("stale"));
        assert_eq!(content_hash(&doc), h);
        doc.insert("x".into(), json!(1.5000000000000002));
        assert_ne!(content_hash(&doc), h);
    }
}
