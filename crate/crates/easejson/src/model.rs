//! Document model helpers: structural equality and canonical serialization.
//!
//! Documents are `serde_json::Value` trees with insertion-ordered objects
//! (the `preserve_order` feature), so a serialize/parse round trip keeps key
//! order stable for golden files.

use serde_json::Value;

/// Structural equality over documents.
///
/// Differs from `Value::eq` in one way: integer-valued floats compare equal
/// to integers (`1 == 1.0`), so diffs never report spurious numeric changes.
/// Object key order is never significant.
pub fn structural_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => number_eq(x, y),
        (Value::Array(xs), Value::Array(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| structural_eq(x, y))
        }
        (Value::Object(xs), Value::Object(ys)) => {
            xs.len() == ys.len()
                && xs
                    .iter()
                    .all(|(k, x)| ys.get(k).is_some_and(|y| structural_eq(x, y)))
        }
        _ => a == b,
    }
}

fn number_eq(x: &serde_json::Number, y: &serde_json::Number) -> bool {
    if let (Some(a), Some(b)) = (x.as_i64(), y.as_i64()) {
        return a == b;
    }
    if let (Some(a), Some(b)) = (x.as_u64(), y.as_u64()) {
        return a == b;
    }
    match (x.as_f64(), y.as_f64()) {
        (Some(a), Some(b)) => a == b,
        _ => x == y,
    }
}

/// Canonical serialization: two-space indentation, preserved key order,
/// trailing newline. Used by the CLI and every golden file.
pub fn to_canonical_string(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

/// Compact single-line serialization, for prompts and token counting.
pub fn to_compact_string(value: &Value) -> String {
    serde_json::to_string(value).expect("JSON values always serialize")
}
