//! Encode a document's arrays into stable-key form and decode them back.
//!
//! Run: cargo run --example encode_roundtrip

use easejson::ease::{decode, encode, KeyPolicy};
use easejson::model::to_canonical_string;
use serde_json::json;

fn main() {
    let doc = json!({"scene": {
        "weather": "Sunny",
        "shots": [
            {"type": "Wide-shot", "action": "Buddy sitting on a sidewalk."},
            {"type": "Close-up", "action": "Buddy wags his tail."}
        ]
    }});

    // Same seed, same keys - encoding is reproducible.
    let encoded = encode(&doc, &KeyPolicy::new(7)).unwrap();
    println!("encoded:\n{}", to_canonical_string(&encoded));

    let decoded = decode(&encoded).unwrap();
    assert_eq!(decoded, doc);
    println!("decoded back to the original document");
}
