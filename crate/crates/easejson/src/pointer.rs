//! RFC 6901 JSON Pointers: parsing, rendering, and resolution against a
//! document tree.

use std::fmt;

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PointerError {
    #[error("invalid escape at byte {position}: '~' must be followed by '0' or '1'")]
    InvalidEscape { position: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("path not found: {pointer}")]
    PathNotFound { pointer: String },
    #[error("type mismatch at {pointer}: {detail}")]
    TypeMismatch { pointer: String, detail: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("empty pointer has no parent")]
pub struct EmptyPointer;

/// A parsed JSON Pointer: an ordered list of reference tokens.
///
/// The empty pointer (zero tokens) addresses the whole document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct JsonPointer {
    tokens: Vec<String>,
}

impl JsonPointer {
    pub fn root() -> Self {
        JsonPointer { tokens: Vec::new() }
    }

    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        JsonPointer {
            tokens: tokens.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses pointer text. Accepts the RFC form (leading `/` or empty) and
    /// normalizes a missing leading slash by prepending one, so `users/0/name`
    /// and `/users/0/name` parse identically.
    pub fn parse(text: &str) -> Result<Self, PointerError> {
        if text.is_empty() {
            return Ok(JsonPointer::root());
        }
        let normalized = if text.starts_with('/') {
            text
        } else {
            return JsonPointer::parse(&format!("/{text}"));
        };
        let mut tokens = Vec::new();
        for raw in normalized[1..].split('/') {
            tokens.push(unescape(raw)?);
        }
        Ok(JsonPointer { tokens })
    }

    /// Renders the pointer in canonical RFC 6901 form (leading slash, escapes
    /// applied). The root pointer renders as the empty string.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for token in &self.tokens {
            out.push('/');
            for ch in token.chars() {
                match ch {
                    '~' => out.push_str("~0"),
                    '/' => out.push_str("~1"),
                    c => out.push(c),
                }
            }
        }
        out
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_root(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn push(&mut self, token: impl Into<String>) {
        self.tokens.push(token.into());
    }

    pub fn child(&self, token: impl Into<String>) -> Self {
        let mut next = self.clone();
        next.push(token);
        next
    }

    /// Splits a non-empty pointer into its container pointer and final token.
    pub fn parent_and_leaf(&self) -> Result<(JsonPointer, &str), EmptyPointer> {
        match self.tokens.split_last() {
            Some((leaf, parent)) => Ok((
                JsonPointer {
                    tokens: parent.to_vec(),
                },
                leaf.as_str(),
            )),
            None => Err(EmptyPointer),
        }
    }

    /// Resolves the pointer against a document, returning the addressed value.
    pub fn resolve<'a>(&self, doc: &'a Value) -> Result<&'a Value, ResolveError> {
        let mut current = doc;
        let mut walked = JsonPointer::root();
        for token in &self.tokens {
            walked.push(token.clone());
            current = match current {
                Value::Object(map) => map.get(token).ok_or_else(|| ResolveError::PathNotFound {
                    pointer: walked.render(),
                })?,
                Value::Array(items) => {
                    let idx = parse_array_index(token).map_err(|detail| {
                        ResolveError::TypeMismatch {
                            pointer: walked.render(),
                            detail,
                        }
                    })?;
                    items.get(idx).ok_or_else(|| ResolveError::PathNotFound {
                        pointer: walked.render(),
                    })?
                }
                other => {
                    return Err(ResolveError::TypeMismatch {
                        pointer: walked.render(),
                        detail: format!("cannot index into {}", type_name(other)),
                    })
                }
            };
        }
        Ok(current)
    }
}

impl fmt::Display for JsonPointer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn unescape(raw: &str) -> Result<String, PointerError> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.char_indices();
    while let Some((pos, ch)) = chars.next() {
        if ch == '~' {
            match chars.next() {
                Some((_, '0')) => out.push('~'),
                Some((_, '1')) => out.push('/'),
                _ => return Err(PointerError::InvalidEscape { position: pos }),
            }
        } else {
            out.push(ch);
        }
    }
    Ok(out)
}

/// Parses an array index token per RFC 6901: decimal digits, no leading zeros
/// (except "0" itself).
pub fn parse_array_index(token: &str) -> Result<usize, String> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("non-numeric array index token {token:?}"));
    }
    if token.len() > 1 && token.starts_with('0') {
        return Err(format!("leading zero in array index token {token:?}"));
    }
    token
        .parse()
        .map_err(|_| format!("array index token {token:?} out of range"))
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "bool",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
