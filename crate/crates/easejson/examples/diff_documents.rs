//! Compute a structural diff between two documents.
//!
//! Run: cargo run --example diff_documents

use easejson::diff::{diff, ArrayStrategy, DiffOptions};
use easejson::model::to_canonical_string;
use easejson::patch::apply_patch;
use serde_json::json;

fn main() {
    let before = json!({"tasks": ["wash", "dry", "fold", "iron"], "done": 0});
    let after = json!({"tasks": ["wash", "fold"], "done": 2});

    // LCS matching keeps surviving elements and emits minimal removes.
    let patch = diff(&before, &after, &DiffOptions::default());
    println!("lcs patch:\n{}", to_canonical_string(&patch.to_value()));
    assert_eq!(apply_patch(&before, &patch).unwrap(), after);

    // Positional matching lines elements up by index instead.
    let opts = DiffOptions { array_strategy: ArrayStrategy::Positional };
    let patch = diff(&before, &after, &opts);
    println!("positional patch:\n{}", to_canonical_string(&patch.to_value()));
    assert_eq!(apply_patch(&before, &patch).unwrap(), after);
}
