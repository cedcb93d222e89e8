//! Stable-key sequence encoding for JSON arrays.
//!
//! Every array becomes an object whose entries carry short stable keys, plus
//! a reserved `list_display_order` key whose comma-separated value records the
//! original element order. Elements are then addressed by key instead of by
//! position, so patch operations never need index arithmetic.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::diff::lcs_pairs;
use crate::model::structural_eq;
use crate::pointer::JsonPointer;

/// The reserved order key. Objects carrying it are treated as encoded lists.
pub const RESERVED_KEY: &str = "list_display_order";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EaseError {
    #[error("input object at {pointer} already contains reserved key \"{RESERVED_KEY}\"")]
    ReservedKeyCollision { pointer: String },
    #[error("malformed order at {pointer}: {detail}")]
    MalformedOrder { pointer: String, detail: String },
    #[error("invalid key format at {pointer}: {detail}")]
    InvalidKeyFormat { pointer: String, detail: String },
    #[error("duplicate key {key:?}")]
    DuplicateKey { key: String },
}

/// A stable element key: two or more lowercase ASCII letters. Base generation
/// always yields two letters; longer keys only appear once a list holds more
/// than 26*26 live elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EaseKey(String);

impl EaseKey {
    pub fn new(text: impl Into<String>) -> Result<Self, EaseError> {
        let text = text.into();
        if !is_valid_key(&text) {
            return Err(EaseError::InvalidKeyFormat {
                pointer: String::new(),
                detail: format!("{text:?} is not two-or-more lowercase letters"),
            });
        }
        Ok(EaseKey(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EaseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_valid_key(text: &str) -> bool {
    text.len() >= 2 && text != RESERVED_KEY && text.bytes().all(|b| b.is_ascii_lowercase())
}

/// Deterministic key generation policy: same seed and encoding traversal
/// produce identical keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPolicy {
    pub seed: u64,
}

impl KeyPolicy {
    pub fn new(seed: u64) -> Self {
        KeyPolicy { seed }
    }

    pub fn generator(&self) -> KeyGenerator {
        KeyGenerator {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        }
    }
}

impl Default for KeyPolicy {
    fn default() -> Self {
        KeyPolicy { seed: 0 }
    }
}

/// Seeded pseudo-random key source, threaded through one encode traversal.
#[derive(Debug, Clone)]
pub struct KeyGenerator {
    rng: ChaCha8Rng,
}

impl KeyGenerator {
    /// Draws a fresh key not present in `taken`. Two letters while fewer than
    /// 676 two-letter keys are taken, then three, and so on; the key space
    /// grows unboundedly so this never fails.
    pub fn next_key(&mut self, taken: &HashSet<EaseKey>) -> EaseKey {
        let mut len = 2usize;
        loop {
            let capacity = 26u64.saturating_pow(len as u32);
            let taken_of_len = taken.iter().filter(|k| k.as_str().len() == len).count() as u64;
            if taken_of_len >= capacity {
                len += 1;
                continue;
            }
            loop {
                let mut text = String::with_capacity(len);
                for _ in 0..len {
                    text.push((b'a' + self.rng.gen_range(0..26)) as char);
                }
                let key = EaseKey(text);
                if !taken.contains(&key) {
                    return key;
                }
            }
        }
    }
}

/// One-shot form of [`KeyGenerator::next_key`].
pub fn generate_key(taken: &HashSet<EaseKey>, policy: &KeyPolicy) -> EaseKey {
    policy.generator().next_key(taken)
}

/// Splits an order string into keys. Commas separate keys, surrounding
/// whitespace per token is trimmed, the empty string is the empty list.
pub fn parse_display_order(text: &str) -> Result<Vec<EaseKey>, EaseError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut keys = Vec::new();
    let mut seen = HashSet::new();
    for raw in text.split(',') {
        let token = raw.trim();
        let key = EaseKey::new(token)?;
        if !seen.insert(key.clone()) {
            return Err(EaseError::DuplicateKey {
                key: key.as_str().to_string(),
            });
        }
        keys.push(key);
    }
    Ok(keys)
}

/// Canonical emission: comma-joined, no spaces.
pub fn format_display_order(keys: &[EaseKey]) -> Result<String, EaseError> {
    let mut seen = HashSet::new();
    for key in keys {
        if !seen.insert(key) {
            return Err(EaseError::DuplicateKey {
                key: key.as_str().to_string(),
            });
        }
    }
    Ok(keys
        .iter()
        .map(EaseKey::as_str)
        .collect::<Vec<_>>()
        .join(","))
}

/// Encodes every array in `doc` (recursively) into keyed-object form.
pub fn encode(doc: &Value, policy: &KeyPolicy) -> Result<Value, EaseError> {
    let mut gen = policy.generator();
    encode_with(doc, &mut gen, &JsonPointer::root())
}

fn encode_with(doc: &Value, gen: &mut KeyGenerator, at: &JsonPointer) -> Result<Value, EaseError> {
    match doc {
        Value::Array(items) => {
            let mut taken = HashSet::new();
            let mut entries = Map::new();
            let mut order = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let key = gen.next_key(&taken);
                taken.insert(key.clone());
                let encoded = encode_with(item, gen, &at.child(i.to_string()))?;
                entries.insert(key.as_str().to_string(), encoded);
                order.push(key);
            }
            entries.insert(
                RESERVED_KEY.to_string(),
                Value::String(format_display_order(&order)?),
            );
            Ok(Value::Object(entries))
        }
        Value::Object(map) => {
            if map.contains_key(RESERVED_KEY) {
                return Err(EaseError::ReservedKeyCollision {
                    pointer: at.render(),
                });
            }
            let mut out = Map::with_capacity(map.len());
            for (k, v) in map {
                out.insert(k.clone(), encode_with(v, gen, &at.child(k.clone()))?);
            }
            Ok(Value::Object(out))
        }
        other => Ok(other.clone()),
    }
}

/// Decodes keyed-object lists back into arrays, ordered by the order string.
pub fn decode(doc: &Value) -> Result<Value, EaseError> {
    decode_at(doc, &JsonPointer::root())
}

fn decode_at(doc: &Value, at: &JsonPointer) -> Result<Value, EaseError> {
    match doc {
        Value::Object(map) if map.contains_key(RESERVED_KEY) => {
            let order = check_list_shape(map, at)?;
            let mut items = Vec::with_capacity(order.len());
            for key in &order {
                let value = &map[key.as_str()];
                items.push(decode_at(value, &at.child(key.as_str()))?);
            }
            Ok(Value::Array(items))
        }
        Value::Object(map) => {
            let mut out = Map::with_capacity(map.len());
            for (k, v) in map {
                out.insert(k.clone(), decode_at(v, &at.child(k.clone()))?);
            }
            Ok(Value::Object(out))
        }
        Value::Array(items) => {
            let mut out = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                out.push(decode_at(item, &at.child(i.to_string()))?);
            }
            Ok(Value::Array(out))
        }
        other => Ok(other.clone()),
    }
}

/// Validates the list invariants of an object carrying the reserved key and
/// returns the parsed order. Order must name every entry key exactly once.
fn check_list_shape(map: &Map<String, Value>, at: &JsonPointer) -> Result<Vec<EaseKey>, EaseError> {
    let order_value = &map[RESERVED_KEY];
    let order_text = order_value.as_str().ok_or_else(|| EaseError::MalformedOrder {
        pointer: at.render(),
        detail: format!("\"{RESERVED_KEY}\" must be a string"),
    })?;
    let order = parse_display_order(order_text).map_err(|e| locate(e, at))?;

    let mut entry_keys = HashSet::new();
    for k in map.keys() {
        if k == RESERVED_KEY {
            continue;
        }
        let key = EaseKey::new(k.as_str()).map_err(|e| locate(e, at))?;
        entry_keys.insert(key);
    }
    for key in &order {
        if !entry_keys.contains(key) {
            return Err(EaseError::MalformedOrder {
                pointer: at.render(),
                detail: format!("order references missing key {:?}", key.as_str()),
            });
        }
    }
    if order.len() != entry_keys.len() {
        let missing: Vec<_> = entry_keys
            .iter()
            .filter(|k| !order.contains(k))
            .map(|k| k.as_str().to_string())
            .collect();
        return Err(EaseError::MalformedOrder {
            pointer: at.render(),
            detail: format!("order omits present keys {missing:?}"),
        });
    }
    Ok(order)
}

fn locate(err: EaseError, at: &JsonPointer) -> EaseError {
    match err {
        EaseError::MalformedOrder { detail, .. } => EaseError::MalformedOrder {
            pointer: at.render(),
            detail,
        },
        EaseError::InvalidKeyFormat { detail, .. } => EaseError::InvalidKeyFormat {
            pointer: at.render(),
            detail,
        },
        EaseError::DuplicateKey { key } => EaseError::MalformedOrder {
            pointer: at.render(),
            detail: format!("order duplicates key {key:?}"),
        },
        other => other,
    }
}

/// One violation found by [`validate_ease`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub pointer: String,
    pub detail: String,
}

/// Reports every list-shape violation in `doc` with its pointer location.
/// Empty report iff [`decode`] would succeed.
pub fn validate_ease(doc: &Value) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_at(doc, &JsonPointer::root(), &mut out);
    out
}

fn validate_at(doc: &Value, at: &JsonPointer, out: &mut Vec<Violation>) {
    match doc {
        Value::Object(map) => {
            if map.contains_key(RESERVED_KEY) {
                if let Err(err) = check_list_shape(map, at) {
                    out.push(Violation {
                        pointer: root_or(at),
                        detail: err.to_string(),
                    });
                }
            }
            for (k, v) in map {
                if k != RESERVED_KEY {
                    validate_at(v, &at.child(k.clone()), out);
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                validate_at(item, &at.child(i.to_string()), out);
            }
        }
        _ => {}
    }
}

fn root_or(at: &JsonPointer) -> String {
    if at.is_root() {
        "/".to_string()
    } else {
        at.render()
    }
}

/// Re-encodes `doc` while reusing the keys of `prev_encoded` for elements that
/// persist, so the two encodings share keys for the same logical elements.
///
/// Arrays are matched against the corresponding previous list by longest
/// common subsequence of deeply-equal elements; matched elements keep their
/// old keys, new elements get fresh keys, and matching recurses structurally
/// so nested lists share keys too.
pub fn encode_aligned(
    prev_encoded: &Value,
    doc: &Value,
    policy: &KeyPolicy,
) -> Result<Value, EaseError> {
    let mut gen = policy.generator();
    align(prev_encoded, doc, &mut gen, &JsonPointer::root())
}

fn align(
    prev: &Value,
    doc: &Value,
    gen: &mut KeyGenerator,
    at: &JsonPointer,
) -> Result<Value, EaseError> {
    match (prev, doc) {
        (Value::Object(prev_map), Value::Array(items))
            if prev_map.contains_key(RESERVED_KEY) =>
        {
            let order = match check_list_shape(prev_map, at) {
                Ok(order) => order,
                // Previous side is malformed; fall back to a fresh encoding.
                Err(_) => return encode_with(doc, gen, at),
            };
            let prev_items: Vec<(&EaseKey, Value)> = order
                .iter()
                .map(|k| Ok((k, decode_at(&prev_map[k.as_str()], at)?)))
                .collect::<Result<_, EaseError>>()?;
            let prev_plain: Vec<&Value> = prev_items.iter().map(|(_, v)| v).collect();
            let matched = lcs_pairs(&prev_plain, items, |a, b| structural_eq(a, b));

            let mut taken: HashSet<EaseKey> = order.iter().cloned().collect();
            let mut keys: Vec<Option<EaseKey>> = vec![None; items.len()];
            let mut prev_of: Vec<Option<usize>> = vec![None; items.len()];
            for &(pi, ni) in &matched {
                keys[ni] = Some(prev_items[pi].0.clone());
                prev_of[ni] = Some(pi);
            }
            // LCS only matches an in-order subsequence; pair leftover equal
            // elements too so a pure reorder reuses every key.
            let mut prev_used = vec![false; prev_items.len()];
            for &(pi, _) in &matched {
                prev_used[pi] = true;
            }
            for (ni, item) in items.iter().enumerate() {
                if keys[ni].is_some() {
                    continue;
                }
                if let Some(pi) = (0..prev_items.len())
                    .find(|&pi| !prev_used[pi] && structural_eq(&prev_items[pi].1, item))
                {
                    prev_used[pi] = true;
                    keys[ni] = Some(prev_items[pi].0.clone());
                    prev_of[ni] = Some(pi);
                }
            }
            let mut entries = Map::new();
            let mut new_order = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let key = match &keys[i] {
                    Some(k) => k.clone(),
                    None => {
                        let k = gen.next_key(&taken);
                        taken.insert(k.clone());
                        k
                    }
                };
                let encoded = match prev_of[i] {
                    Some(pi) => align(
                        &prev_map[prev_items[pi].0.as_str()],
                        item,
                        gen,
                        &at.child(key.as_str()),
                    )?,
                    None => encode_with(item, gen, &at.child(key.as_str()))?,
                };
                entries.insert(key.as_str().to_string(), encoded);
                new_order.push(key);
            }
            entries.insert(
                RESERVED_KEY.to_string(),
                Value::String(format_display_order(&new_order)?),
            );
            Ok(Value::Object(entries))
        }
        (Value::Object(prev_map), Value::Object(map)) if !prev_map.contains_key(RESERVED_KEY) => {
            if map.contains_key(RESERVED_KEY) {
                return Err(EaseError::ReservedKeyCollision {
                    pointer: at.render(),
                });
            }
            let mut out = Map::with_capacity(map.len());
            for (k, v) in map {
                let child = at.child(k.clone());
                let encoded = match prev_map.get(k) {
                    Some(pv) => align(pv, v, gen, &child)?,
                    None => encode_with(v, gen, &child)?,
                };
                out.insert(k.clone(), encoded);
            }
            Ok(Value::Object(out))
        }
        _ => encode_with(doc, gen, at),
    }
}
