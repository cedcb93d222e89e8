//! Parse and apply an RFC 6902 patch.
//!
//! Run: cargo run --example apply_patch

use easejson::model::to_canonical_string;
use easejson::patch::{apply_patch, parse_patch};
use serde_json::json;

fn main() {
    let doc = json!({"users": [{"name": "John Smith", "age": 25}]});
    let patch = parse_patch(
        r#"[
            {"op": "replace", "path": "/users/0/name", "value": "John Johnson"},
            {"op": "replace", "path": "/users/0/age", "value": 26},
            {"op": "add", "path": "/users/-", "value": {"name": "Sam", "age": 30}}
        ]"#,
    )
    .unwrap();

    let result = apply_patch(&doc, &patch).unwrap();
    println!("{}", to_canonical_string(&result));

    // Application is atomic: one failing op leaves the document untouched.
    let bad = parse_patch(r#"[{"op": "remove", "path": "/users/9"}]"#).unwrap();
    let err = apply_patch(&result, &bad).unwrap_err();
    println!("bad patch rejected: {err}");
}
