//! Lower a key-addressed patch into a standard index-addressed patch.
//!
//! Run: cargo run --example translate_patch

use easejson::ease::{encode, parse_display_order, KeyPolicy, RESERVED_KEY};
use easejson::model::to_canonical_string;
use easejson::patch::{apply_patch, Patch, PatchOp};
use easejson::pointer::JsonPointer;
use easejson::translate::ease_patch_to_standard;
use serde_json::json;

fn main() {
    let policy = KeyPolicy::new(7);
    let roster = json!({"users": [{"name": "Alice"}, {"name": "Bob"}, {"name": "Tom"}]});
    let encoded = encode(&roster, &policy).unwrap();

    let order = parse_display_order(encoded["users"][RESERVED_KEY].as_str().unwrap()).unwrap();
    let bob = order[1].as_str();

    // Address Bob by key; no index arithmetic involved.
    let keyed = Patch::new(vec![PatchOp::replace(
        JsonPointer::parse(&format!("/users/{bob}/name")).unwrap(),
        json!("Robert"),
    )]);
    let standard = ease_patch_to_standard(&roster, &policy, &keyed).unwrap();
    println!("standard patch:\n{}", to_canonical_string(&standard.to_value()));

    let result = apply_patch(&roster, &standard).unwrap();
    assert_eq!(result["users"][1]["name"], json!("Robert"));
}
