//! Lowers key-addressed patches back to standard index-addressed patches, so
//! the stable-key encoding stays a pure prompting-layer concern.

use serde_json::Value;
use thiserror::Error;

use crate::diff::{diff, DiffOptions};
use crate::ease::{decode, encode, parse_display_order, validate_ease, EaseError, KeyPolicy, RESERVED_KEY};
use crate::patch::{apply_patch, Patch, PatchApplyError};
use crate::pointer::{parse_array_index, JsonPointer};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("encoding the original document failed: {0}")]
    Encode(#[source] EaseError),
    #[error("keyed patch failed against the encoded document: {0}")]
    PatchApply(#[source] PatchApplyError),
    #[error("patched document is no longer decodable: {0}")]
    Decode(#[source] EaseError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathMapError {
    #[error("document is not valid encoded form: {detail} at {pointer}")]
    NotEase { pointer: String, detail: String },
    #[error("path not found: {pointer}")]
    PathNotFound { pointer: String },
}

/// Lowers a key-addressed patch into a standard patch on the array-form
/// original. Implemented as encode, apply, decode, then diff against the
/// original; the result is apply-equivalent, not op-for-op minimal.
pub fn ease_patch_to_standard(
    original: &Value,
    policy: &KeyPolicy,
    ease_patch: &Patch,
) -> Result<Patch, TranslateError> {
    let encoded = encode(original, policy).map_err(TranslateError::Encode)?;
    let patched = apply_patch(&encoded, ease_patch).map_err(TranslateError::PatchApply)?;
    let result = decode(&patched).map_err(TranslateError::Decode)?;
    Ok(diff(original, &result, &DiffOptions::default()))
}

/// Rewrites each array-index token in the given standard-form pointers to the
/// key occupying that position in the encoded document's order strings.
/// Non-list tokens pass through unchanged.
pub fn standard_patch_paths_to_ease(
    encoded: &Value,
    standard_paths: &[JsonPointer],
) -> Result<Vec<JsonPointer>, PathMapError> {
    if let Some(v) = validate_ease(encoded).first() {
        return Err(PathMapError::NotEase {
            pointer: v.pointer.clone(),
            detail: v.detail.clone(),
        });
    }
    standard_paths
        .iter()
        .map(|p| map_path(encoded, p))
        .collect()
}

fn map_path(encoded: &Value, path: &JsonPointer) -> Result<JsonPointer, PathMapError> {
    let mut mapped = JsonPointer::root();
    let mut current = encoded;
    for token in path.tokens() {
        let map = match current {
            Value::Object(map) => map,
            _ => {
                return Err(PathMapError::PathNotFound {
                    pointer: mapped.child(token.clone()).render(),
                })
            }
        };
        if map.contains_key(RESERVED_KEY) {
            let order_text = map[RESERVED_KEY].as_str().unwrap_or_default();
            let order = parse_display_order(order_text).map_err(|e| PathMapError::NotEase {
                pointer: mapped.render(),
                detail: e.to_string(),
            })?;
            let idx = parse_array_index(token).map_err(|_| PathMapError::PathNotFound {
                pointer: mapped.child(token.clone()).render(),
            })?;
            let key = order.get(idx).ok_or_else(|| PathMapError::PathNotFound {
                pointer: mapped.child(token.clone()).render(),
            })?;
            mapped.push(key.as_str());
            current = &map[key.as_str()];
        } else {
            current = map.get(token).ok_or_else(|| PathMapError::PathNotFound {
                pointer: mapped.child(token.clone()).render(),
            })?;
            mapped.push(token.clone());
        }
    }
    Ok(mapped)
}
