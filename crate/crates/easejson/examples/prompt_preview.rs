//! Show the prompts sent to a model in each editing mode.
//!
//! Run: cargo run --example prompt_preview

use easejson::ease::KeyPolicy;
use easejson::harness::{build_prompt, EditRequest, FewShot, Mode};
use serde_json::json;

fn main() {
    let doc = json!({"scene": {"weather": "Sunny", "shots": [{"type": "Wide-shot"}]}});
    let shot = FewShot {
        input: json!({"scene": {"weather": "Rainy"}}),
        instruction: "clear the sky".into(),
        expected: json!([{"op": "replace", "path": "/scene/weather", "value": "Sunny"}]),
    };

    for mode in [Mode::Standard, Mode::Ease(KeyPolicy::new(3)), Mode::Full] {
        let request = EditRequest {
            doc: doc.clone(),
            instruction: "make it rain".into(),
            mode: mode.clone(),
            few_shots: if mode == Mode::Standard { vec![shot.clone()] } else { vec![] },
        };
        println!("=== {} mode ===", mode.name());
        println!("{}", build_prompt(&request).unwrap());
    }
}
