//! RFC 6902 patch parsing, validation, and application.
//!
//! The engine is agnostic to document encoding: keyed-object lists are just
//! objects, so the same apply path serves plain and encoded documents.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::structural_eq;
use crate::pointer::{parse_array_index, JsonPointer, PointerError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatchParseError {
    #[error("patch text is not valid JSON: {0}")]
    InvalidJson(String),
    #[error("a patch must be a JSON array of operation objects")]
    NotAnArray,
    #[error("operation {index}: unknown op {op:?}")]
    UnknownOp { index: usize, op: String },
    #[error("operation {index}: missing field {field:?}")]
    MissingField { index: usize, field: &'static str },
    #[error("operation {index}: {0}", .source)]
    BadPointer {
        index: usize,
        #[source]
        source: PointerError,
    },
    #[error("operation {index}: operation must be a JSON object")]
    NotAnObject { index: usize },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("path not found: {pointer}")]
    PathNotFound { pointer: String },
    #[error("test failed at {pointer}")]
    TestFailed { pointer: String },
    #[error("index {index} out of bounds at {pointer} (length {len})")]
    IndexOutOfBounds {
        pointer: String,
        index: usize,
        len: usize,
    },
    #[error("invalid array index token at {pointer}: {detail}")]
    InvalidIndexToken { pointer: String, detail: String },
    #[error("type mismatch at {pointer}: {detail}")]
    TypeMismatch { pointer: String, detail: String },
    #[error("cannot move {from} into its own child {to}")]
    MoveIntoSelf { from: String, to: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("operation {index} failed: {source}")]
pub struct PatchApplyError {
    pub index: usize,
    #[source]
    pub source: OpError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Add,
    Remove,
    Replace,
    Move,
    Copy,
    Test,
}

impl OpKind {
    pub fn name(&self) -> &'static str {
        match self {
            OpKind::Add => "add",
            OpKind::Remove => "remove",
            OpKind::Replace => "replace",
            OpKind::Move => "move",
            OpKind::Copy => "copy",
            OpKind::Test => "test",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "add" => OpKind::Add,
            "remove" => OpKind::Remove,
            "replace" => OpKind::Replace,
            "move" => OpKind::Move,
            "copy" => OpKind::Copy,
            "test" => OpKind::Test,
            _ => return None,
        })
    }
}

/// One RFC 6902 operation. `value` is present exactly for add/replace/test,
/// `from` exactly for move/copy; the constructors keep that invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchOp {
    kind: OpKind,
    path: JsonPointer,
    value: Option<Value>,
    from: Option<JsonPointer>,
}

impl PatchOp {
    pub fn add(path: JsonPointer, value: Value) -> Self {
        PatchOp {
            kind: OpKind::Add,
            path,
            value: Some(value),
            from: None,
        }
    }

    pub fn remove(path: JsonPointer) -> Self {
        PatchOp {
            kind: OpKind::Remove,
            path,
            value: None,
            from: None,
        }
    }

    pub fn replace(path: JsonPointer, value: Value) -> Self {
        PatchOp {
            kind: OpKind::Replace,
            path,
            value: Some(value),
            from: None,
        }
    }

    pub fn mov(from: JsonPointer, path: JsonPointer) -> Self {
        PatchOp {
            kind: OpKind::Move,
            path,
            value: None,
            from: Some(from),
        }
    }

    pub fn copy(from: JsonPointer, path: JsonPointer) -> Self {
        PatchOp {
            kind: OpKind::Copy,
            path,
            value: None,
            from: Some(from),
        }
    }

    pub fn test(path: JsonPointer, value: Value) -> Self {
        PatchOp {
            kind: OpKind::Test,
            path,
            value: Some(value),
            from: None,
        }
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn path(&self) -> &JsonPointer {
        &self.path
    }

    pub fn value(&self) -> Option<&Value> {
        self.value.as_ref()
    }

    pub fn from(&self) -> Option<&JsonPointer> {
        self.from.as_ref()
    }

    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("op".into(), Value::String(self.kind.name().into()));
        map.insert("path".into(), Value::String(self.path.render()));
        if let Some(value) = &self.value {
            map.insert("value".into(), value.clone());
        }
        if let Some(from) = &self.from {
            map.insert("from".into(), Value::String(from.render()));
        }
        Value::Object(map)
    }

    fn from_value(index: usize, value: &Value) -> Result<Self, PatchParseError> {
        let map = value
            .as_object()
            .ok_or(PatchParseError::NotAnObject { index })?;
        let op_name = map
            .get("op")
            .and_then(Value::as_str)
            .ok_or(PatchParseError::MissingField { index, field: "op" })?;
        let kind = OpKind::from_name(op_name).ok_or_else(|| PatchParseError::UnknownOp {
            index,
            op: op_name.to_string(),
        })?;
        let path_text = map
            .get("path")
            .and_then(Value::as_str)
            .ok_or(PatchParseError::MissingField {
                index,
                field: "path",
            })?;
        let path = JsonPointer::parse(path_text)
            .map_err(|source| PatchParseError::BadPointer { index, source })?;

        let value_field = || {
            map.get("value")
                .cloned()
                .ok_or(PatchParseError::MissingField {
                    index,
                    field: "value",
                })
        };
        let from_field = || -> Result<JsonPointer, PatchParseError> {
            let text = map
                .get("from")
                .and_then(Value::as_str)
                .ok_or(PatchParseError::MissingField {
                    index,
                    field: "from",
                })?;
            JsonPointer::parse(text).map_err(|source| PatchParseError::BadPointer { index, source })
        };

        Ok(match kind {
            OpKind::Add => PatchOp::add(path, value_field()?),
            OpKind::Replace => PatchOp::replace(path, value_field()?),
            OpKind::Test => PatchOp::test(path, value_field()?),
            OpKind::Remove => PatchOp::remove(path),
            OpKind::Move => PatchOp::mov(from_field()?, path),
            OpKind::Copy => PatchOp::copy(from_field()?, path),
        })
    }
}

/// An ordered list of operations; serializes as the usual JSON array form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Patch {
    ops: Vec<PatchOp>,
}

impl Patch {
    pub fn new(ops: Vec<PatchOp>) -> Self {
        Patch { ops }
    }

    pub fn ops(&self) -> &[PatchOp] {
        &self.ops
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn push(&mut self, op: PatchOp) {
        self.ops.push(op);
    }

    pub fn to_value(&self) -> Value {
        Value::Array(self.ops.iter().map(PatchOp::to_value).collect())
    }

    pub fn from_value(value: &Value) -> Result<Self, PatchParseError> {
        let items = value.as_array().ok_or(PatchParseError::NotAnArray)?;
        let ops = items
            .iter()
            .enumerate()
            .map(|(i, v)| PatchOp::from_value(i, v))
            .collect::<Result<_, _>>()?;
        Ok(Patch { ops })
    }
}

impl serde::Serialize for Patch {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Patch {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        Patch::from_value(&value).map_err(serde::de::Error::custom)
    }
}

impl FromIterator<PatchOp> for Patch {
    fn from_iter<T: IntoIterator<Item = PatchOp>>(iter: T) -> Self {
        Patch {
            ops: iter.into_iter().collect(),
        }
    }
}

pub fn parse_patch(text: &str) -> Result<Patch, PatchParseError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| PatchParseError::InvalidJson(e.to_string()))?;
    Patch::from_value(&value)
}

/// Applies one operation, returning the new document. The input is never
/// mutated.
pub fn apply_op(doc: &Value, op: &PatchOp) -> Result<Value, OpError> {
    let mut out = doc.clone();
    apply_op_in_place(&mut out, op)?;
    Ok(out)
}

fn apply_op_in_place(doc: &mut Value, op: &PatchOp) -> Result<(), OpError> {
    match op.kind {
        OpKind::Add => insert(doc, &op.path, op.value.clone().expect("add carries value")),
        OpKind::Remove => delete(doc, &op.path).map(|_| ()),
        OpKind::Replace => {
            let target = locate_mut(doc, &op.path)?;
            *target = op.value.clone().expect("replace carries value");
            Ok(())
        }
        OpKind::Move => {
            let from = op.from.as_ref().expect("move carries from");
            if is_proper_prefix(from, &op.path) {
                return Err(OpError::MoveIntoSelf {
                    from: from.render(),
                    to: op.path.render(),
                });
            }
            let moved = delete(doc, from)?;
            insert(doc, &op.path, moved)
        }
        OpKind::Copy => {
            let from = op.from.as_ref().expect("copy carries from");
            let copied = locate_mut(doc, from)?.clone();
            insert(doc, &op.path, copied)
        }
        OpKind::Test => {
            let target = locate_mut(doc, &op.path)?;
            if structural_eq(target, op.value.as_ref().expect("test carries value")) {
                Ok(())
            } else {
                Err(OpError::TestFailed {
                    pointer: op.path.render(),
                })
            }
        }
    }
}

/// Applies a whole patch strictly in sequence. Atomic: on any failure the
/// error carries the failing op's index and the input document is unchanged.
pub fn apply_patch(doc: &Value, patch: &Patch) -> Result<Value, PatchApplyError> {
    let mut out = doc.clone();
    for (index, op) in patch.ops.iter().enumerate() {
        apply_op_in_place(&mut out, op).map_err(|source| PatchApplyError { index, source })?;
    }
    Ok(out)
}

/// One entry in a dry-run validation report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpFailure {
    pub index: usize,
    pub error: OpError,
}

/// Dry-runs the patch against `doc`. Failing ops are reported and skipped so
/// later ops are still checked; the report is empty iff `apply_patch`
/// succeeds.
pub fn validate_patch(patch: &Patch, doc: &Value) -> Vec<OpFailure> {
    let mut failures = Vec::new();
    let mut current = doc.clone();
    for (index, op) in patch.ops.iter().enumerate() {
        match apply_op_in_place(&mut current, op) {
            Ok(()) => {}
            Err(error) => failures.push(OpFailure { index, error }),
        }
    }
    failures
}

fn is_proper_prefix(prefix: &JsonPointer, path: &JsonPointer) -> bool {
    prefix.len() < path.len() && path.tokens()[..prefix.len()] == *prefix.tokens()
}

fn locate_mut<'a>(doc: &'a mut Value, ptr: &JsonPointer) -> Result<&'a mut Value, OpError> {
    let mut current = doc;
    let mut walked = JsonPointer::root();
    for token in ptr.tokens() {
        walked.push(token.clone());
        current = match current {
            Value::Object(map) => map.get_mut(token).ok_or_else(|| OpError::PathNotFound {
                pointer: walked.render(),
            })?,
            Value::Array(items) => {
                let idx =
                    parse_array_index(token).map_err(|detail| OpError::InvalidIndexToken {
                        pointer: walked.render(),
                        detail,
                    })?;
                items.get_mut(idx).ok_or_else(|| OpError::PathNotFound {
                    pointer: walked.render(),
                })?
            }
            other => {
                return Err(OpError::TypeMismatch {
                    pointer: walked.render(),
                    detail: format!("cannot index into {}", json_type(other)),
                })
            }
        };
    }
    Ok(current)
}

fn insert(doc: &mut Value, path: &JsonPointer, value: Value) -> Result<(), OpError> {
    let (parent, leaf) = match path.parent_and_leaf() {
        Ok(split) => split,
        Err(_) => {
            // Adding at the root replaces the whole document (RFC 6902 §4.1).
            *doc = value;
            return Ok(());
        }
    };
    let container = locate_mut(doc, &parent)?;
    match container {
        Value::Object(map) => {
            map.insert(leaf.to_string(), value);
            Ok(())
        }
        Value::Array(items) => {
            if leaf == "-" {
                items.push(value);
                return Ok(());
            }
            let idx = parse_array_index(leaf).map_err(|detail| OpError::InvalidIndexToken {
                pointer: path.render(),
                detail,
            })?;
            if idx > items.len() {
                return Err(OpError::IndexOutOfBounds {
                    pointer: path.render(),
                    index: idx,
                    len: items.len(),
                });
            }
            items.insert(idx, value);
            Ok(())
        }
        other => Err(OpError::TypeMismatch {
            pointer: parent.render(),
            detail: format!("cannot add into {}", json_type(other)),
        }),
    }
}

fn delete(doc: &mut Value, path: &JsonPointer) -> Result<Value, OpError> {
    let (parent, leaf) = path.parent_and_leaf().map_err(|_| OpError::TypeMismatch {
        pointer: String::new(),
        detail: "cannot remove the whole document".to_string(),
    })?;
    let container = locate_mut(doc, &parent)?;
    match container {
        Value::Object(map) => map.shift_remove(leaf).ok_or_else(|| OpError::PathNotFound {
            pointer: path.render(),
        }),
        Value::Array(items) => {
            let idx = parse_array_index(leaf).map_err(|detail| OpError::InvalidIndexToken {
                pointer: path.render(),
                detail,
            })?;
            if idx >= items.len() {
                return Err(OpError::PathNotFound {
                    pointer: path.render(),
                });
            }
            Ok(items.remove(idx))
        }
        other => Err(OpError::TypeMismatch {
            pointer: parent.render(),
            detail: format!("cannot remove from {}", json_type(other)),
        }),
    }
}

fn json_type(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "bool",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
