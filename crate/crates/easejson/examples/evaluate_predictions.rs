//! Score predicted patches against a labeled corpus.
//!
//! Run: cargo run --example evaluate_predictions

use std::collections::HashMap;

use easejson::metrics::{
    evaluate_corpus, render_table, Category, EditExample, EvalMode, Prediction,
    SimpleTokenCounter,
};
use easejson::patch::{apply_patch, parse_patch};
use serde_json::json;

fn main() {
    let input = json!({"scene": {"weather": "Sunny", "shots": [{"type": "Wide"}, {"type": "Pan"}]}});
    let gold = parse_patch(r#"[{"op":"replace","path":"/scene/weather","value":"Rainy"}]"#).unwrap();

    let examples = vec![
        EditExample {
            id: "e1".into(),
            category: Category::Simple,
            input: input.clone(),
            instruction: "make it rain".into(),
            gold_rewritten: apply_patch(&input, &gold).unwrap(),
            gold_patch: gold.clone(),
        },
        EditExample {
            id: "e2".into(),
            category: Category::ListManipulation,
            input: input.clone(),
            instruction: "drop the pan shot".into(),
            gold_patch: parse_patch(r#"[{"op":"remove","path":"/scene/shots/1"}]"#).unwrap(),
            gold_rewritten: json!({"scene": {"weather": "Sunny", "shots": [{"type": "Wide"}]}}),
        },
    ];

    let mut predictions = HashMap::new();
    // e1: exact hit. e2: the model touched the wrong index.
    predictions.insert("e1".to_string(), Prediction::Patch { id: "e1".into(), patch: gold });
    predictions.insert(
        "e2".to_string(),
        Prediction::Patch {
            id: "e2".into(),
            patch: parse_patch(r#"[{"op":"remove","path":"/scene/shots/0"}]"#).unwrap(),
        },
    );

    let report =
        evaluate_corpus(&examples, &predictions, EvalMode::Standard, &SimpleTokenCounter).unwrap();
    print!("{}", render_table(&report));
}
