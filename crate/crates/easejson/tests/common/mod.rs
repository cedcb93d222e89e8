//! Shared test support: a seeded random document generator and a
//! deterministic stand-in model for offline pipeline tests.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use easejson::diff::{diff, diff_ease, DiffOptions};
use easejson::ease::{decode, encode_aligned, KeyPolicy};
use easejson::harness::{Completion, GenParams, LlmClient, TransportError, Usage};
use easejson::metrics::{SimpleTokenCounter, TokenCounter};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random document: depth <= 5, arrays <= 20 elements, never contains the
/// reserved order key.
pub fn random_doc(rng: &mut ChaCha8Rng, depth: u32) -> Value {
    if depth == 0 {
        return random_scalar(rng);
    }
    match rng.gen_range(0..8) {
        0..=3 => random_scalar(rng),
        4 | 5 => {
            let len = rng.gen_range(0..=8usize.min(20));
            Value::Array((0..len).map(|_| random_doc(rng, depth - 1)).collect())
        }
        _ => {
            let len = rng.gen_range(0..=6);
            let mut map = Map::new();
            for _ in 0..len {
                let key = format!("k{}", rng.gen_range(0..12));
                map.insert(key, random_doc(rng, depth - 1));
            }
            Value::Object(map)
        }
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Value {
    match rng.gen_range(0..5) {
        0 => Value::Null,
        1 => json!(rng.gen_bool(0.5)),
        2 => json!(rng.gen_range(-100i64..100)),
        3 => json!(rng.gen_range(-10.0f64..10.0)),
        _ => {
            let len = rng.gen_range(0..6);
            let text: String = (0..len)
                .map(|_| (b'a' + rng.gen_range(0..26u8)) as char)
                .collect();
            Value::String(text)
        }
    }
}

/// Random structural edit of a document, biased toward small local changes
/// so diffs stay interesting.
pub fn mutate_doc(rng: &mut ChaCha8Rng, doc: &Value) -> Value {
    if rng.gen_ratio(1, 10) {
        return random_doc(rng, 3);
    }
    match doc {
        Value::Array(items) => {
            let mut out = items.clone();
            match rng.gen_range(0..4) {
                0 if !out.is_empty() => {
                    let i = rng.gen_range(0..out.len());
                    out.remove(i);
                }
                1 => {
                    let i = rng.gen_range(0..=out.len());
                    out.insert(i, random_doc(rng, 2));
                }
                2 if !out.is_empty() => {
                    let i = rng.gen_range(0..out.len());
                    out[i] = mutate_doc(rng, &out[i]);
                }
                _ => {
                    out.reverse();
                }
            }
            Value::Array(out)
        }
        Value::Object(map) => {
            let mut out = map.clone();
            let keys: Vec<String> = out.keys().cloned().collect();
            match rng.gen_range(0..3) {
                0 if !keys.is_empty() => {
                    let key = &keys[rng.gen_range(0..keys.len())];
                    let next = mutate_doc(rng, &out[key]);
                    out.insert(key.clone(), next);
                }
                1 if !keys.is_empty() => {
                    let key = keys[rng.gen_range(0..keys.len())].clone();
                    out.shift_remove(&key);
                }
                _ => {
                    out.insert(format!("k{}", rng.gen_range(0..12)), random_doc(rng, 2));
                }
            }
            Value::Object(out)
        }
        _ => random_scalar(rng),
    }
}

/// The deterministic "model" behind offline tests: recognizes each prompt
/// template by a marker phrase and fabricates a plausible response that is a
/// pure function of the prompt text.
pub struct StubModel;

fn hash64(text: &str) -> u64 {
    let digest = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

fn section<'a>(prompt: &'a str, header: &str) -> Option<&'a str> {
    let start = prompt.rfind(header)? + header.len();
    let rest = &prompt[start..];
    let end = rest.find("\nuser_command:").or_else(|| rest.find("\ncategory:"))?;
    Some(rest[..end].trim())
}

/// Deterministic edit applied by the stub: the first string leaf (depth
/// first) gets a suffix; documents without one gain a marker field.
pub fn stub_edit(doc: &Value) -> Value {
    fn edit_first_string(value: &mut Value) -> bool {
        match value {
            Value::String(s) => {
                s.push_str(" (edited)");
                true
            }
            Value::Array(items) => items.iter_mut().any(edit_first_string),
            Value::Object(map) => map.values_mut().any(edit_first_string),
            _ => false,
        }
    }
    let mut out = doc.clone();
    if !edit_first_string(&mut out) {
        if let Value::Object(map) = &mut out {
            map.insert("edited".to_string(), json!(true));
        } else {
            out = json!("edited");
        }
    }
    out
}

impl LlmClient for StubModel {
    fn complete(&self, prompt: &str, _params: &GenParams) -> Result<Completion, TransportError> {
        let text = self.respond(prompt);
        let counter = SimpleTokenCounter;
        Ok(Completion {
            usage: Usage {
                input_tokens: counter.count(prompt),
                output_tokens: counter.count(&text),
            },
            text,
        })
    }
}

impl StubModel {
    fn respond(&self, prompt: &str) -> String {
        if prompt.contains("quality_answer") {
            return "tie".to_string();
        }
        if prompt.contains("Return only the JSON instance") {
            // Instance generation: fabricate a scene varied by the variant id.
            let seed = hash64(prompt);
            let variant = prompt
                .lines()
                .find_map(|l| l.strip_prefix("Variant: "))
                .unwrap_or("v");
            let weathers = ["Sunny", "Rainy", "Overcast", "Windy"];
            let shot_count = 1 + (seed % 3) as usize;
            let shots: Vec<Value> = (0..shot_count)
                .map(|i| {
                    json!({
                        "type": if (seed >> i) % 2 == 0 { "Wide-shot" } else { "Close-up" },
                        "action": format!("Shot {i} of {variant}")
                    })
                })
                .collect();
            return serde_json::to_string(&json!({
                "scene": {
                    "voice_over": format!("Voice over for {variant}"),
                    "weather": weathers[(seed % 4) as usize],
                    "shots": shots
                }
            }))
            .unwrap();
        }
        if prompt.contains("- instruction: the edit request text") {
            let category = prompt
                .lines()
                .find_map(|l| l.strip_prefix("category: "))
                .unwrap_or("simple");
            return serde_json::to_string(&json!({
                "instruction": format!("Apply a {category} edit to the first text field")
            }))
            .unwrap();
        }
        if prompt.contains("updated_json") {
            // Full regeneration: parse the doc out of the prompt and edit it.
            let doc: Value = serde_json::from_str(
                section(prompt, "\ninput_json:\n").expect("prompt carries a document"),
            )
            .expect("document in prompt is JSON");
            return serde_json::to_string(&json!({
                "rationale": "let's think step by step, we need to apply the requested edit",
                "updated_json": stub_edit(&doc),
                "is_unsupported": false
            }))
            .unwrap();
        }
        if prompt.contains("list_display_order determines the item order") {
            // Key-addressed patch mode: the prompt document is encoded.
            let encoded: Value = serde_json::from_str(
                section(prompt, "\ninput_json:\n").expect("prompt carries a document"),
            )
            .expect("document in prompt is JSON");
            let plain = decode(&encoded).expect("prompt document decodes");
            let edited = stub_edit(&plain);
            let re_encoded =
                encode_aligned(&encoded, &edited, &KeyPolicy::new(hash64(prompt))).unwrap();
            let patch = diff_ease(&encoded, &re_encoded).unwrap();
            return serde_json::to_string(&json!({
                "rationale": "let's think step by step, we need to patch by key",
                "json_diff_patch": patch.to_value(),
                "is_unsupported": false
            }))
            .unwrap();
        }
        if prompt.contains("json_diff_patch") {
            let doc: Value = serde_json::from_str(
                section(prompt, "\ninput_json:\n").expect("prompt carries a document"),
            )
            .expect("document in prompt is JSON");
            let patch = diff(&doc, &stub_edit(&doc), &DiffOptions::default());
            return serde_json::to_string(&json!({
                "rationale": "let's think step by step, we need to patch by index",
                "json_diff_patch": patch.to_value(),
                "is_unsupported": false
            }))
            .unwrap();
        }
        "unrecognized prompt".to_string()
    }
}
