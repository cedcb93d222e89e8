//! Record model traffic once, then replay it byte-for-byte without a network.
//!
//! Run: cargo run --example offline_replay

use easejson::harness::{
    generate_edit, Completion, EditRequest, GenParams, LlmClient, Mode, RecordingClient,
    ReplayClient, TransportError, Usage,
};
use serde_json::json;

/// Stand-in for a live model: always answers with the same patch envelope.
struct Canned;

impl LlmClient for Canned {
    fn complete(&self, _prompt: &str, _params: &GenParams) -> Result<Completion, TransportError> {
        Ok(Completion {
            text: r#"{"rationale": "let's think step by step, we need to change the weather",
                      "json_diff_patch": [{"op":"replace","path":"/scene/weather","value":"Rainy"}],
                      "is_unsupported": false}"#
                .to_string(),
            usage: Usage { input_tokens: 120, output_tokens: 40 },
        })
    }
}

fn main() {
    let fixture = std::env::temp_dir().join("easejson-replay-demo.ldjson");
    let request = EditRequest {
        doc: json!({"scene": {"weather": "Sunny"}}),
        instruction: "make it rain".into(),
        mode: Mode::Standard,
        few_shots: vec![],
    };

    // Pass 1: real(ish) client wrapped in a recorder.
    let recorder = RecordingClient::create(Canned, &fixture).unwrap();
    let recorded = generate_edit(&recorder, &request).unwrap();

    // Pass 2: fixture only; prompts are hashed, responses looked up.
    let replay = ReplayClient::open(&fixture).unwrap();
    println!("fixture holds {} exchange(s)", replay.len());
    let replayed = generate_edit(&replay, &request).unwrap();

    assert_eq!(recorded.raw, replayed.raw);
    println!("replayed output is byte-identical to the recorded run");
    std::fs::remove_file(&fixture).ok();
}
