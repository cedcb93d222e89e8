//! Evaluation measures for predicted patches: op/path F1, execution success,
//! and token accounting, plus corpus-level aggregation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::ease::{encode, KeyPolicy};
use crate::model::to_compact_string;
use crate::patch::{apply_patch, Patch};
use crate::translate::standard_patch_paths_to_ease;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("missing prediction for example {id:?}")]
    MissingPrediction { id: String },
    #[error("corpus line {line}: {detail}")]
    BadCorpusLine { line: usize, detail: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The comparable part of an operation: op name plus normalized path. Values
/// and `from` pointers are deliberately excluded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpPathSig {
    pub op: String,
    pub path: String,
}

impl OpPathSig {
    pub fn of_patch(patch: &Patch) -> Vec<OpPathSig> {
        patch
            .ops()
            .iter()
            .map(|op| OpPathSig {
                op: op.kind().name().to_string(),
                path: op.path().render(),
            })
            .collect()
    }
}

/// Multiset precision/recall/F1 over (op, path) signatures. Empty vs empty is
/// perfect; one-sided empty scores zero.
pub fn op_path_f1(predicted: &Patch, gold: &Patch) -> (f64, f64, f64) {
    f1_of_sigs(&OpPathSig::of_patch(predicted), &OpPathSig::of_patch(gold))
}

fn f1_of_sigs(predicted: &[OpPathSig], gold: &[OpPathSig]) -> (f64, f64, f64) {
    if predicted.is_empty() && gold.is_empty() {
        return (1.0, 1.0, 1.0);
    }
    if predicted.is_empty() || gold.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mut gold_counts: HashMap<&OpPathSig, usize> = HashMap::new();
    for sig in gold {
        *gold_counts.entry(sig).or_default() += 1;
    }
    let mut matched = 0usize;
    for sig in predicted {
        if let Some(count) = gold_counts.get_mut(sig) {
            if *count > 0 {
                *count -= 1;
                matched += 1;
            }
        }
    }
    let precision = matched as f64 / predicted.len() as f64;
    let recall = matched as f64 / gold.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// True iff the patch applies cleanly to the document. Unparseable model
/// output never reaches this point and is counted as a failure upstream.
pub fn execution_success(doc: &Value, predicted: &Patch) -> bool {
    apply_patch(doc, predicted).is_ok()
}

/// Pluggable token counter; the default is model-agnostic so no vendor
/// tokenizer is needed.
pub trait TokenCounter {
    fn count(&self, text: &str) -> usize;
}

/// Counts maximal alphanumeric runs as one token each and every other
/// non-whitespace character as its own token. Appending text never lowers
/// the count.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimpleTokenCounter;

impl TokenCounter for SimpleTokenCounter {
    fn count(&self, text: &str) -> usize {
        let mut count = 0;
        let mut in_word = false;
        for ch in text.chars() {
            if ch.is_alphanumeric() {
                if !in_word {
                    count += 1;
                    in_word = true;
                }
            } else {
                in_word = false;
                if !ch.is_whitespace() {
                    count += 1;
                }
            }
        }
        count
    }
}

pub fn count_tokens(text: &str, counter: &dyn TokenCounter) -> usize {
    counter.count(text)
}

/// Per-token cost configuration for the cost calculator; prices are always
/// supplied by the caller, never hardcoded.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostModel {
    pub input_price_per_token: f64,
    pub output_price_per_token: f64,
}

impl CostModel {
    pub fn cost(&self, input_tokens: usize, output_tokens: usize) -> f64 {
        input_tokens as f64 * self.input_price_per_token
            + output_tokens as f64 * self.output_price_per_token
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Simple,
    Creative,
    Complex,
    ListManipulation,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Simple,
        Category::Creative,
        Category::Complex,
        Category::ListManipulation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Category::Simple => "simple",
            Category::Creative => "creative",
            Category::Complex => "complex",
            Category::ListManipulation => "list_manipulation",
        }
    }
}

/// One labeled edit: an input document, an instruction, the gold patch, and
/// the document the gold patch produces.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EditExample {
    pub id: String,
    pub category: Category,
    pub input: Value,
    pub instruction: String,
    pub gold_patch: Patch,
    pub gold_rewritten: Value,
}

/// A model prediction for one example: a parsed patch, or the raw text when
/// parsing failed.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Prediction {
    Patch { id: String, patch: Patch },
    Failure { id: String, error: String },
}

impl Prediction {
    pub fn id(&self) -> &str {
        match self {
            Prediction::Patch { id, .. } | Prediction::Failure { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Predictions address the plain document by index.
    Standard,
    /// Predictions address the encoded document by key; gold paths are mapped
    /// onto keys before comparison, and execution runs against the encoding
    /// produced by `seed`.
    Ease { seed: u64 },
}

impl EvalMode {
    fn name(&self) -> &'static str {
        match self {
            EvalMode::Standard => "standard",
            EvalMode::Ease { .. } => "ease",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerExampleReport {
    pub id: String,
    pub category: Category,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub executed: bool,
    pub predicted_tokens: usize,
    pub baseline_tokens: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AggregateReport {
    /// Unweighted (macro) mean of per-example F1.
    pub overall_f1: f64,
    pub per_category_f1: BTreeMap<String, f64>,
    pub execution_success_rate: f64,
    /// 1 - (sum of predicted tokens / sum of baseline tokens).
    pub token_reduction_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportMetadata {
    pub mode: String,
    pub aggregation: String,
    /// Gold paths that could not be mapped onto keys (ease mode only, e.g.
    /// an add at a brand-new list position); they keep their standard form
    /// and cannot match a key-addressed prediction.
    pub unmapped_gold_paths: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvalReport {
    pub per_example: Vec<PerExampleReport>,
    pub aggregate: AggregateReport,
    pub metadata: ReportMetadata,
}

/// Evaluates every example against its prediction. Results are a pure
/// function of the inputs, independent of iteration or partitioning order.
pub fn evaluate_corpus(
    examples: &[EditExample],
    predictions: &HashMap<String, Prediction>,
    mode: EvalMode,
    counter: &dyn TokenCounter,
) -> Result<EvalReport, MetricsError> {
    let mut per_example = Vec::with_capacity(examples.len());
    let mut unmapped_gold_paths = 0usize;

    for example in examples {
        let prediction =
            predictions
                .get(&example.id)
                .ok_or_else(|| MetricsError::MissingPrediction {
                    id: example.id.clone(),
                })?;

        let (gold_sigs, exec_doc) = match mode {
            EvalMode::Standard => (
                OpPathSig::of_patch(&example.gold_patch),
                example.input.clone(),
            ),
            EvalMode::Ease { seed } => {
                let encoded = encode(&example.input, &KeyPolicy::new(seed)).map_err(|e| {
                    MetricsError::BadCorpusLine {
                        line: 0,
                        detail: format!("example {:?}: {e}", example.id),
                    }
                })?;
                let sigs = example
                    .gold_patch
                    .ops()
                    .iter()
                    .map(|op| {
                        match standard_patch_paths_to_ease(
                            &encoded,
                            std::slice::from_ref(op.path()),
                        ) {
                            Ok(mapped) => OpPathSig {
                                op: op.kind().name().to_string(),
                                path: mapped[0].render(),
                            },
                            Err(_) => {
                                unmapped_gold_paths += 1;
                                OpPathSig {
                                    op: op.kind().name().to_string(),
                                    path: op.path().render(),
                                }
                            }
                        }
                    })
                    .collect();
                (sigs, encoded)
            }
        };

        let (precision, recall, f1, executed, predicted_tokens) = match prediction {
            Prediction::Patch { patch, .. } => {
                let sigs = OpPathSig::of_patch(patch);
                let (p, r, f) = f1_of_sigs(&sigs, &gold_sigs);
                let executed = execution_success(&exec_doc, patch);
                let tokens = counter.count(&to_compact_string(&patch.to_value()));
                (p, r, f, executed, tokens)
            }
            Prediction::Failure { error, .. } => (0.0, 0.0, 0.0, false, counter.count(error)),
        };
        let baseline_tokens = counter.count(&to_compact_string(&example.gold_rewritten));

        per_example.push(PerExampleReport {
            id: example.id.clone(),
            category: example.category,
            precision,
            recall,
            f1,
            executed,
            predicted_tokens,
            baseline_tokens,
        });
    }

    let aggregate = aggregate(&per_example);
    Ok(EvalReport {
        per_example,
        aggregate,
        metadata: ReportMetadata {
            mode: mode.name().to_string(),
            aggregation: "macro".to_string(),
            unmapped_gold_paths,
        },
    })
}

fn aggregate(rows: &[PerExampleReport]) -> AggregateReport {
    let n = rows.len();
    let mean = |values: &mut dyn Iterator<Item = f64>, count: usize| -> f64 {
        if count == 0 {
            0.0
        } else {
            values.sum::<f64>() / count as f64
        }
    };
    let overall_f1 = mean(&mut rows.iter().map(|r| r.f1), n);
    let mut per_category_f1 = BTreeMap::new();
    for category in Category::ALL {
        let members: Vec<f64> = rows
            .iter()
            .filter(|r| r.category == category)
            .map(|r| r.f1)
            .collect();
        if !members.is_empty() {
            per_category_f1.insert(
                category.name().to_string(),
                members.iter().sum::<f64>() / members.len() as f64,
            );
        }
    }
    let executed = rows.iter().filter(|r| r.executed).count();
    let execution_success_rate = if n == 0 { 0.0 } else { executed as f64 / n as f64 };
    let predicted: usize = rows.iter().map(|r| r.predicted_tokens).sum();
    let baseline: usize = rows.iter().map(|r| r.baseline_tokens).sum();
    let token_reduction_ratio = if baseline == 0 {
        0.0
    } else {
        1.0 - predicted as f64 / baseline as f64
    };
    AggregateReport {
        overall_f1,
        per_category_f1,
        execution_success_rate,
        token_reduction_ratio,
    }
}

/// Reads a line-delimited corpus file: one example per line.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<EditExample>, MetricsError> {
    let mut examples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let example =
            serde_json::from_str(&line).map_err(|e| MetricsError::BadCorpusLine {
                line: i + 1,
                detail: e.to_string(),
            })?;
        examples.push(example);
    }
    Ok(examples)
}

pub fn write_corpus(mut writer: impl Write, examples: &[EditExample]) -> Result<(), MetricsError> {
    for example in examples {
        serde_json::to_writer(&mut writer, example)
            .map_err(|e| MetricsError::Io(std::io::Error::other(e)))?;
        writeln!(writer)?;
    }
    Ok(())
}

/// Reads line-delimited predictions.
pub fn read_predictions(reader: impl BufRead) -> Result<Vec<Prediction>, MetricsError> {
    let mut predictions = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let prediction =
            serde_json::from_str(&line).map_err(|e| MetricsError::BadCorpusLine {
                line: i + 1,
                detail: e.to_string(),
            })?;
        predictions.push(prediction);
    }
    Ok(predictions)
}

/// Renders the report as an aligned text table (for stderr display).
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:<18} {:>6} {:>6} {:>6} {:>5} {:>8} {:>8}",
        "id", "category", "prec", "rec", "f1", "exec", "pred_tk", "base_tk"
    );
    for row in &report.per_example {
        let _ = writeln!(
            out,
            "{:<24} {:<18} {:>6.3} {:>6.3} {:>6.3} {:>5} {:>8} {:>8}",
            row.id,
            row.category.name(),
            row.precision,
            row.recall,
            row.f1,
            if row.executed { "ok" } else { "fail" },
            row.predicted_tokens,
            row.baseline_tokens
        );
    }
    let agg = &report.aggregate;
    let _ = writeln!(out, "---");
    let _ = writeln!(out, "overall macro F1:        {:.4}", agg.overall_f1);
    for (category, f1) in &agg.per_category_f1 {
        let _ = writeln!(out, "  {category:<22} {f1:.4}");
    }
    let _ = writeln!(out, "execution success rate:  {:.4}", agg.execution_success_rate);
    let _ = writeln!(out, "token reduction ratio:   {:.4}", agg.token_reduction_ratio);
    out
}
