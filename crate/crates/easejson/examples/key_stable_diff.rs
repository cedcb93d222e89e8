//! Key-stable diffing: reordering a list costs a single operation.
//!
//! Run: cargo run --example key_stable_diff

use easejson::diff::diff_ease;
use easejson::ease::{decode, encode, encode_aligned, KeyPolicy};
use easejson::model::to_canonical_string;
use easejson::patch::apply_patch;
use serde_json::json;

fn main() {
    let policy = KeyPolicy::new(4);
    let playlist = json!(["intro", "verse", "chorus", "outro"]);
    let encoded = encode(&playlist, &policy).unwrap();
    println!("encoded:\n{}", to_canonical_string(&encoded));

    // Re-encode the reordered list sharing keys for the surviving elements.
    let shuffled = json!(["chorus", "intro", "outro", "verse"]);
    let encoded_shuffled = encode_aligned(&encoded, &shuffled, &policy).unwrap();

    let patch = diff_ease(&encoded, &encoded_shuffled).unwrap();
    println!("reorder patch ({} op):\n{}", patch.len(), to_canonical_string(&patch.to_value()));
    assert_eq!(patch.len(), 1);

    let patched = apply_patch(&encoded, &patch).unwrap();
    assert_eq!(decode(&patched).unwrap(), shuffled);
}
