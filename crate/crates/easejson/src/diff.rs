//! Structural diff: computes an RFC 6902 patch between two documents.
//!
//! Plain documents are diffed index-wise (LCS or positional array matching);
//! keyed-object encoded documents get a key-stable diff where reorders
//! collapse to a single order-string replace.

use serde_json::Value;
use thiserror::Error;

use crate::ease::{validate_ease, RESERVED_KEY};
use crate::model::structural_eq;
use crate::patch::{Patch, PatchOp};
use crate::pointer::JsonPointer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrayStrategy {
    /// Match array elements by longest common subsequence of deeply-equal
    /// elements; smallest scripts for insert/remove-style edits.
    #[default]
    Lcs,
    /// Element-wise alignment by position, with tail adds/removes.
    Positional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiffOptions {
    pub array_strategy: ArrayStrategy,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EaseDiffError {
    #[error("{side} document is not valid encoded form: {detail}")]
    NotEase { side: &'static str, detail: String },
}

/// Longest common subsequence of two sequences under a caller-supplied
/// equality, returned as strictly increasing index pairs.
pub fn lcs_pairs<A, B, F>(xs: &[A], ys: &[B], eq: F) -> Vec<(usize, usize)>
where
    F: Fn(&A, &B) -> bool,
{
    let n = xs.len();
    let m = ys.len();
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if eq(&xs[i], &ys[j]) {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(dp[0][0]);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if eq(&xs[i], &ys[j]) && dp[i][j] == dp[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

/// Computes a patch `p` with `apply_patch(a, p) = b`.
pub fn diff(a: &Value, b: &Value, opts: &DiffOptions) -> Patch {
    let mut ops = Vec::new();
    diff_at(a, b, &JsonPointer::root(), opts, &mut ops);
    Patch::new(ops)
}

fn diff_at(a: &Value, b: &Value, at: &JsonPointer, opts: &DiffOptions, ops: &mut Vec<PatchOp>) {
    if structural_eq(a, b) {
        return;
    }
    match (a, b) {
        (Value::Object(xs), Value::Object(ys)) => {
            for (k, x) in xs {
                match ys.get(k) {
                    Some(y) => diff_at(x, y, &at.child(k.clone()), opts, ops),
                    None => ops.push(PatchOp::remove(at.child(k.clone()))),
                }
            }
            for (k, y) in ys {
                if !xs.contains_key(k) {
                    ops.push(PatchOp::add(at.child(k.clone()), y.clone()));
                }
            }
        }
        (Value::Array(xs), Value::Array(ys)) => match opts.array_strategy {
            ArrayStrategy::Lcs => diff_array_lcs(xs, ys, at, opts, ops),
            ArrayStrategy::Positional => diff_array_positional(xs, ys, at, opts, ops),
        },
        _ => ops.push(PatchOp::replace(at.clone(), b.clone())),
    }
}

/// LCS array diff. Between matched elements, removed/added runs of equal
/// length are paired positionally and recursed (scalar changes fold into
/// replace); leftovers become removes (descending original index) then adds
/// (ascending final index). Removes go first so they never invalidate the
/// indices of later ops at this level.
fn diff_array_lcs(
    xs: &[Value],
    ys: &[Value],
    at: &JsonPointer,
    opts: &DiffOptions,
    ops: &mut Vec<PatchOp>,
) {
    let matched = lcs_pairs(xs, ys, |x, y| structural_eq(x, y));

    // Kept x-indices: matched plus paired-for-recursion positions.
    let mut removes: Vec<usize> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new(); // (x index, y index) recursed in place
    let mut adds: Vec<usize> = Vec::new(); // y indices inserted fresh

    let mut prev = (0usize, 0usize);
    let mut segment = |x_range: std::ops::Range<usize>, y_range: std::ops::Range<usize>| {
        let paired = x_range.len().min(y_range.len());
        for t in 0..paired {
            pairs.push((x_range.start + t, y_range.start + t));
        }
        for xi in x_range.start + paired..x_range.end {
            removes.push(xi);
        }
        for yi in y_range.start + paired..y_range.end {
            adds.push(yi);
        }
    };
    for &(xi, yi) in &matched {
        segment(prev.0..xi, prev.1..yi);
        prev = (xi + 1, yi + 1);
    }
    segment(prev.0..xs.len(), prev.1..ys.len());

    // Pure removals, descending original index.
    for &xi in removes.iter().rev() {
        ops.push(PatchOp::remove(at.child(xi.to_string())));
    }

    // After the removals, each kept element sits at its rank among kept
    // x-indices; recursions for paired elements address that rank.
    let mut kept: Vec<usize> = matched.iter().map(|&(xi, _)| xi).collect();
    kept.extend(pairs.iter().map(|&(xi, _)| xi));
    kept.sort_unstable();
    for &(xi, yi) in &pairs {
        let rank = kept.binary_search(&xi).expect("paired index is kept");
        diff_at(&xs[xi], &ys[yi], &at.child(rank.to_string()), opts, ops);
    }

    // Fresh insertions, ascending final index.
    for &yi in &adds {
        ops.push(PatchOp::add(at.child(yi.to_string()), ys[yi].clone()));
    }
}

fn diff_array_positional(
    xs: &[Value],
    ys: &[Value],
    at: &JsonPointer,
    opts: &DiffOptions,
    ops: &mut Vec<PatchOp>,
) {
    let common = xs.len().min(ys.len());
    for i in 0..common {
        diff_at(&xs[i], &ys[i], &at.child(i.to_string()), opts, ops);
    }
    for xi in (common..xs.len()).rev() {
        ops.push(PatchOp::remove(at.child(xi.to_string())));
    }
    for yi in common..ys.len() {
        ops.push(PatchOp::add(at.child(yi.to_string()), ys[yi].clone()));
    }
}

/// Key-stable diff over two encoded documents that share keys for common
/// elements. A pure reorder of one list costs exactly one op (the order
/// string replace).
pub fn diff_ease(a: &Value, b: &Value) -> Result<Patch, EaseDiffError> {
    for (side, doc) in [("first", a), ("second", b)] {
        let violations = validate_ease(doc);
        if let Some(v) = violations.first() {
            return Err(EaseDiffError::NotEase {
                side,
                detail: format!("{} at {}", v.detail, v.pointer),
            });
        }
    }
    let mut ops = Vec::new();
    diff_ease_at(a, b, &JsonPointer::root(), &mut ops);
    Ok(Patch::new(ops))
}

fn diff_ease_at(a: &Value, b: &Value, at: &JsonPointer, ops: &mut Vec<PatchOp>) {
    if structural_eq(a, b) {
        return;
    }
    match (a, b) {
        (Value::Object(xs), Value::Object(ys))
            if xs.contains_key(RESERVED_KEY) && ys.contains_key(RESERVED_KEY) =>
        {
            for (k, x) in xs {
                if k == RESERVED_KEY {
                    continue;
                }
                match ys.get(k) {
                    Some(y) => diff_ease_at(x, y, &at.child(k.clone()), ops),
                    None => ops.push(PatchOp::remove(at.child(k.clone()))),
                }
            }
            for (k, y) in ys {
                if k != RESERVED_KEY && !xs.contains_key(k) {
                    ops.push(PatchOp::add(at.child(k.clone()), y.clone()));
                }
            }
            if xs[RESERVED_KEY] != ys[RESERVED_KEY] {
                ops.push(PatchOp::replace(
                    at.child(RESERVED_KEY),
                    ys[RESERVED_KEY].clone(),
                ));
            }
        }
        (Value::Object(xs), Value::Object(ys))
            if !xs.contains_key(RESERVED_KEY) && !ys.contains_key(RESERVED_KEY) =>
        {
            for (k, x) in xs {
                match ys.get(k) {
                    Some(y) => diff_ease_at(x, y, &at.child(k.clone()), ops),
                    None => ops.push(PatchOp::remove(at.child(k.clone()))),
                }
            }
            for (k, y) in ys {
                if !xs.contains_key(k) {
                    ops.push(PatchOp::add(at.child(k.clone()), y.clone()));
                }
            }
        }
        (Value::Array(_), Value::Array(_)) => {
            diff_at(a, b, at, &DiffOptions::default(), ops);
        }
        _ => ops.push(PatchOp::replace(at.clone(), b.clone())),
    }
}
