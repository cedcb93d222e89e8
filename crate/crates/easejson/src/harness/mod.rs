//! Prompting harness: the three edit prompt templates and the judge protocol,
//! few-shot selection, model output parsing, and the synthetic dataset
//! pipeline. Everything runs offline through the replay client.

mod client;

pub use client::{
    prompt_hash, Completion, GenParams, LiveClient, LlmClient, RecordingClient, ReplayClient,
    TransportError, Usage,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use crate::diff::{diff, diff_ease, DiffOptions};
use crate::ease::{encode, encode_aligned, EaseError, KeyPolicy};
use crate::metrics::{Category, EditExample};
use crate::model::{structural_eq, to_compact_string};
use crate::patch::{apply_patch, Patch};

pub const STANDARD_TEMPLATE: &str = include_str!("templates/standard.txt");
pub const EASE_TEMPLATE: &str = include_str!("templates/ease.txt");
pub const FULL_TEMPLATE: &str = include_str!("templates/full.txt");
pub const JUDGE_TEMPLATE: &str = include_str!("templates/judge.txt");
pub const INSTANCE_GEN_TEMPLATE: &str = include_str!("templates/instance_gen.txt");
pub const REQUEST_GEN_TEMPLATE: &str = include_str!("templates/request_gen.txt");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("encoding failed: {0}")]
    Encode(#[from] EaseError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("few-shot pool has {pool} examples, {requested} requested")]
    PoolTooSmall { pool: usize, requested: usize },
    #[error("generated instance violates the schema description: {detail}")]
    SchemaViolation { detail: String },
    #[error("judge verdict not one of w/v/tie: {raw:?}")]
    UnparseableVerdict { raw: String },
}

/// Prompting mode: index-addressed patches, key-addressed patches over the
/// encoded document, or full document regeneration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Standard,
    Ease(KeyPolicy),
    Full,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Ease(_) => "ease",
            Mode::Full => "full",
        }
    }

    fn template(&self) -> &'static str {
        match self {
            Mode::Standard => STANDARD_TEMPLATE,
            Mode::Ease(_) => EASE_TEMPLATE,
            Mode::Full => FULL_TEMPLATE,
        }
    }
}

/// One in-context example: an input document, an instruction, and the
/// expected output in the mode's own format.
#[derive(Debug, Clone, PartialEq)]
pub struct FewShot {
    pub input: Value,
    pub instruction: String,
    pub expected: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditRequest {
    pub doc: Value,
    pub instruction: String,
    pub mode: Mode,
    pub few_shots: Vec<FewShot>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EditPayload {
    Patch(Patch),
    Doc(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditResult {
    pub rationale: Option<String>,
    pub payload: Option<EditPayload>,
    pub is_unsupported: bool,
    pub raw: String,
    pub usage: Usage,
}

/// Builds the mode's prompt: template, then the few-shot blocks, then the
/// document (encoded first in ease mode) and instruction. Pure function of
/// the request.
pub fn build_prompt(req: &EditRequest) -> Result<String, HarnessError> {
    let render_doc = |doc: &Value| -> Result<String, HarnessError> {
        match &req.mode {
            Mode::Ease(policy) => Ok(to_compact_string(&encode(doc, policy)?)),
            _ => Ok(to_compact_string(doc)),
        }
    };

    let mut prompt = String::from(req.mode.template());
    if !req.few_shots.is_empty() {
        prompt.push_str("\nExamples:\n");
        for (i, shot) in req.few_shots.iter().enumerate() {
            prompt.push_str(&format!(
                "\nExample {n}:\ninput_json:\n{input}\nuser_command: {cmd}\nexpected_output:\n{expected}\n",
                n = i + 1,
                input = render_doc(&shot.input)?,
                cmd = shot.instruction,
                expected = to_compact_string(&shot.expected),
            ));
        }
    }
    prompt.push_str(&format!(
        "\ninput_json:\n{doc}\nuser_command: {cmd}\n",
        doc = render_doc(&req.doc)?,
        cmd = req.instruction,
    ));
    Ok(prompt)
}

/// Sends the prompt and parses the completion. Output that fails to parse is
/// preserved in `raw` with an absent payload, never an error: downstream
/// metrics count it as an execution failure.
pub fn generate_edit(
    client: &dyn LlmClient,
    req: &EditRequest,
) -> Result<EditResult, HarnessError> {
    let prompt = build_prompt(req)?;
    let completion = client.complete(&prompt, &GenParams::default())?;
    Ok(parse_edit_output(&completion.text, &req.mode, completion.usage))
}

/// Parses model output for a mode. Accepts a JSON object with the template's
/// output fields, a bare patch array (patch modes), a bare document (full
/// mode), or any of those inside a fenced code block; object parse is tried
/// first.
pub fn parse_edit_output(text: &str, mode: &Mode, usage: Usage) -> EditResult {
    let mut result = EditResult {
        rationale: None,
        payload: None,
        is_unsupported: false,
        raw: text.to_string(),
        usage,
    };
    let Some(value) = extract_json(text) else {
        return result;
    };

    if let Value::Object(map) = &value {
        let has_envelope_keys = map.contains_key("json_diff_patch")
            || map.contains_key("updated_json")
            || map.contains_key("is_unsupported")
            || map.contains_key("rationale");
        if has_envelope_keys {
            result.rationale = map
                .get("rationale")
                .and_then(Value::as_str)
                .map(str::to_string);
            result.is_unsupported = flag_value(map.get("is_unsupported"));
            result.payload = match mode {
                Mode::Full => map.get("updated_json").cloned().map(EditPayload::Doc),
                _ => map
                    .get("json_diff_patch")
                    .and_then(|v| Patch::from_value(v).ok())
                    .map(EditPayload::Patch),
            };
            return result;
        }
    }

    result.payload = match mode {
        Mode::Full => Some(EditPayload::Doc(value)),
        _ => Patch::from_value(&value).ok().map(EditPayload::Patch),
    };
    result
}

fn flag_value(value: Option<&Value>) -> bool {
    match value {
        Some(Value::Bool(b)) => *b,
        Some(Value::String(s)) => s.eq_ignore_ascii_case("true"),
        _ => false,
    }
}

fn extract_json(text: &str) -> Option<Value> {
    let trimmed = text.trim();
    if let Ok(value) = serde_json::from_str(trimmed) {
        return Some(value);
    }
    // Fenced block fallback: take the first ``` block's contents.
    let start = trimmed.find("```")?;
    let after = &trimmed[start + 3..];
    let after = after.strip_prefix("json").unwrap_or(after);
    let end = after.find("```")?;
    serde_json::from_str(after[..end].trim()).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JudgeVerdict {
    W,
    V,
    Tie,
}

/// Fills the judge template for one (w, v) pair and parses the verdict token
/// strictly.
pub fn judge_pair(
    client: &dyn LlmClient,
    original: &Value,
    w: &Value,
    v: &Value,
    command: &str,
) -> Result<JudgeVerdict, HarnessError> {
    let prompt = format!(
        "{JUDGE_TEMPLATE}\noriginal_json:\n{orig}\nw_json:\n{w}\nv_json:\n{v}\nuser_command: {command}\n",
        orig = to_compact_string(original),
        w = to_compact_string(w),
        v = to_compact_string(v),
    );
    let completion = client.complete(&prompt, &GenParams::default())?;
    parse_verdict(&completion.text)
}

fn parse_verdict(text: &str) -> Result<JudgeVerdict, HarnessError> {
    let token = match extract_json(text) {
        Some(Value::Object(map)) => map
            .get("quality_answer")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| text.trim().to_string()),
        Some(Value::String(s)) => s,
        _ => text.trim().to_string(),
    };
    match token.trim() {
        "w" => Ok(JudgeVerdict::W),
        "v" => Ok(JudgeVerdict::V),
        "tie" => Ok(JudgeVerdict::Tie),
        _ => Err(HarnessError::UnparseableVerdict {
            raw: text.to_string(),
        }),
    }
}

/// Position-bias control: judges the pair twice with the candidates swapped.
/// The two verdicts must agree (after un-swapping) or the result is a tie.
/// This is harness policy, reported as such.
pub fn judge_pair_debiased(
    client: &dyn LlmClient,
    original: &Value,
    w: &Value,
    v: &Value,
    command: &str,
) -> Result<JudgeVerdict, HarnessError> {
    let forward = judge_pair(client, original, w, v, command)?;
    let swapped = judge_pair(client, original, v, w, command)?;
    let unswapped = match swapped {
        JudgeVerdict::W => JudgeVerdict::V,
        JudgeVerdict::V => JudgeVerdict::W,
        JudgeVerdict::Tie => JudgeVerdict::Tie,
    };
    Ok(if forward == unswapped {
        forward
    } else {
        JudgeVerdict::Tie
    })
}

/// Seeded category-stratified selection: candidates are shuffled per
/// category, then taken round-robin across the four categories. Stands in
/// for learned example selection; the interface is the strategy boundary.
pub fn select_few_shots<'a>(
    pool: &'a [EditExample],
    _instruction: &str,
    k: usize,
    seed: u64,
) -> Result<Vec<&'a EditExample>, HarnessError> {
    if k > pool.len() {
        return Err(HarnessError::PoolTooSmall {
            pool: pool.len(),
            requested: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buckets: Vec<Vec<&EditExample>> = Category::ALL
        .iter()
        .map(|category| pool.iter().filter(|e| e.category == *category).collect())
        .collect();
    for bucket in &mut buckets {
        bucket.shuffle(&mut rng);
    }
    let mut selected = Vec::with_capacity(k);
    while selected.len() < k {
        let mut progressed = false;
        for bucket in &mut buckets {
            if selected.len() == k {
                break;
            }
            if let Some(example) = bucket.pop() {
                selected.push(example);
                progressed = true;
            }
        }
        assert!(progressed, "pool size checked above");
    }
    Ok(selected)
}

/// Converts a labeled example into a few-shot triple for the given mode.
/// Standard mode expects the gold patch; full mode the rewritten document;
/// ease mode a key-addressed patch derived by re-encoding the rewrite with
/// carried-over keys.
pub fn few_shot_for_mode(example: &EditExample, mode: &Mode) -> Result<FewShot, HarnessError> {
    let expected = match mode {
        Mode::Standard => example.gold_patch.to_value(),
        Mode::Full => example.gold_rewritten.clone(),
        Mode::Ease(policy) => ease_gold_patch(example, policy)?.to_value(),
    };
    Ok(FewShot {
        input: example.input.clone(),
        instruction: example.instruction.clone(),
        expected,
    })
}

/// The key-addressed form of an example's gold patch: encode the input,
/// re-encode the rewrite sharing keys for surviving elements, and take the
/// key-stable diff.
pub fn ease_gold_patch(example: &EditExample, policy: &KeyPolicy) -> Result<Patch, HarnessError> {
    let encoded_input = encode(&example.input, policy)?;
    let encoded_rewrite = encode_aligned(&encoded_input, &example.gold_rewritten, policy)?;
    diff_ease(&encoded_input, &encoded_rewrite)
        .map_err(|e| HarnessError::SchemaViolation {
            detail: e.to_string(),
        })
}

/// Per-category example counts for dataset synthesis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CategoryCounts {
    pub simple: usize,
    pub creative: usize,
    pub complex: usize,
    pub list_manipulation: usize,
}

impl CategoryCounts {
    pub fn get(&self, category: Category) -> usize {
        match category {
            Category::Simple => self.simple,
            Category::Creative => self.creative,
            Category::Complex => self.complex,
            Category::ListManipulation => self.list_manipulation,
        }
    }

    pub fn total(&self) -> usize {
        self.simple + self.creative + self.complex + self.list_manipulation
    }
}

/// Four-step synthesis: generate an instance from the schema description,
/// generate a categorized edit request for it, generate the fully rewritten
/// document, and label with the diff between input and rewrite. Examples
/// whose rewrite cannot be parsed or drifts from the input's root shape are
/// discarded and logged.
pub fn synthesize_dataset(
    client: &dyn LlmClient,
    schema_description: &str,
    counts: &CategoryCounts,
    seed: u64,
) -> Result<Vec<EditExample>, HarnessError> {
    let params = GenParams::default();
    let mut examples = Vec::with_capacity(counts.total());
    for category in Category::ALL {
        for i in 0..counts.get(category) {
            let id = format!("{}-{i:03}", category.name());

            // Step 1: instance generation.
            let instance_prompt = format!(
                "{INSTANCE_GEN_TEMPLATE}\nSchema:\n{schema_description}\n\nSeed: {seed}\nVariant: {id}\n"
            );
            let instance_text = client.complete(&instance_prompt, &params)?.text;
            let input = extract_json(&instance_text).ok_or_else(|| {
                HarnessError::SchemaViolation {
                    detail: format!("{id}: instance output is not JSON"),
                }
            })?;
            if !matches!(input, Value::Object(_) | Value::Array(_)) {
                return Err(HarnessError::SchemaViolation {
                    detail: format!("{id}: instance is a scalar, expected a structured document"),
                });
            }

            // Step 2: edit request generation.
            let request_prompt = format!(
                "{REQUEST_GEN_TEMPLATE}\ninput_json:\n{doc}\ncategory: {category}\n",
                doc = to_compact_string(&input),
                category = category.name(),
            );
            let request_text = client.complete(&request_prompt, &params)?.text;
            let instruction = match extract_json(&request_text) {
                Some(Value::Object(map)) => map
                    .get("instruction")
                    .and_then(Value::as_str)
                    .map(str::to_string),
                Some(Value::String(s)) => Some(s),
                _ => None,
            }
            .unwrap_or_else(|| request_text.trim().to_string());

            // Step 3: full rewrite.
            let rewrite_req = EditRequest {
                doc: input.clone(),
                instruction: instruction.clone(),
                mode: Mode::Full,
                few_shots: Vec::new(),
            };
            let rewrite = generate_edit(client, &rewrite_req)?;
            let Some(EditPayload::Doc(rewritten)) = rewrite.payload else {
                log::warn!("discarding {id}: rewrite output is not a document");
                continue;
            };
            if rewrite.is_unsupported {
                log::warn!("discarding {id}: rewrite flagged unsupported");
                continue;
            }
            if root_shape(&input) != root_shape(&rewritten) {
                log::warn!("discarding {id}: rewrite drifted from the input's root shape");
                continue;
            }

            // Step 4: diff labeling, with the label invariant enforced.
            let gold_patch = diff(&input, &rewritten, &DiffOptions::default());
            let relabeled = apply_patch(&input, &gold_patch);
            match relabeled {
                Ok(result) if structural_eq(&result, &rewritten) => {}
                _ => {
                    log::warn!("discarding {id}: label patch does not reproduce the rewrite");
                    continue;
                }
            }

            examples.push(EditExample {
                id,
                category,
                input,
                instruction,
                gold_patch,
                gold_rewritten: rewritten,
            });
        }
    }
    Ok(examples)
}

fn root_shape(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "bool",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
