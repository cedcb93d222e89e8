//! Command-line front end. Machine-readable payload goes to stdout,
//! diagnostics to stderr; usage errors exit 2, operation errors exit 1.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use easejson::diff::{diff, diff_ease, ArrayStrategy, DiffOptions};
use easejson::ease::{decode, encode, validate_ease, KeyPolicy};
use easejson::harness::{
    build_prompt, few_shot_for_mode, generate_edit, select_few_shots, synthesize_dataset,
    CategoryCounts, EditPayload, EditRequest, LiveClient, LlmClient, Mode, ReplayClient,
};
use easejson::metrics::{
    evaluate_corpus, read_corpus, read_predictions, render_table, write_corpus, EvalMode,
    Prediction, SimpleTokenCounter,
};
use easejson::model::to_canonical_string;
use easejson::patch::{apply_patch, parse_patch};
use easejson::translate::ease_patch_to_standard;

#[derive(Parser)]
#[command(name = "easejson", version, about = "JSON editing with patches and stable-key lists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stable-key list encoding
    Ease {
        #[command(subcommand)]
        command: EaseCommand,
    },
    /// RFC 6902 patch operations
    Patch {
        #[command(subcommand)]
        command: PatchCommand,
    },
    /// Compute a patch between two documents
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Diff encoded documents key-wise instead of index-wise
        #[arg(long)]
        ease: bool,
        #[arg(long, value_parser = ["lcs", "positional"], default_value = "lcs")]
        array_strategy: String,
    },
    /// Lower a key-addressed patch to a standard patch on the original
    Translate {
        original: PathBuf,
        ease_patch: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate predictions against a labeled corpus
    Eval {
        corpus: PathBuf,
        predictions: PathBuf,
        #[arg(long, value_parser = ["standard", "ease"], default_value = "standard")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Synthetic dataset tools
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
    /// Ask a model for an edit
    Edit {
        doc: PathBuf,
        instruction: String,
        #[arg(long, value_parser = ["standard", "ease", "full"], default_value = "standard")]
        mode: String,
        /// Number of few-shot examples to include
        #[arg(long, default_value_t = 0)]
        shots: usize,
        /// Corpus file to draw few-shot examples from
        #[arg(long)]
        pool: Option<PathBuf>,
        #[command(flatten)]
        client: ClientArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the prompt to stderr instead of calling the model
        #[arg(long)]
        dry_run: bool,
    },
}

#[derive(Subcommand)]
enum EaseCommand {
    /// Encode arrays into keyed-object form
    Encode {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decode keyed-object lists back into arrays
    Decode { input: PathBuf },
    /// Report list-shape violations
    Validate { input: PathBuf },
}

#[derive(Subcommand)]
enum PatchCommand {
    /// Apply a patch file to a document
    Apply { doc: PathBuf, patch: PathBuf },
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Run the four-step synthesis pipeline
    Synth {
        schema: PathBuf,
        /// Per-category counts: simple,creative,complex,list_manipulation
        #[arg(long, value_parser = parse_counts)]
        counts: CategoryCounts,
        #[command(flatten)]
        client: ClientArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ClientArg {
    /// Model client: "replay:<fixture-file>" or "live"
    #[arg(long, default_value = "live")]
    client: String,
}

impl ClientArg {
    fn build(&self) -> Result<Box<dyn LlmClient>, String> {
        if let Some(path) = self.client.strip_prefix("replay:") {
            Ok(Box::new(
                ReplayClient::open(path).map_err(|e| e.to_string())?,
            ))
        } else if self.client == "live" {
            Ok(Box::new(LiveClient::from_env().map_err(|e| e.to_string())?))
        } else {
            Err(format!(
                "unknown client {:?}; use replay:<file> or live",
                self.client
            ))
        }
    }
}

fn parse_counts(text: &str) -> Result<CategoryCounts, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated counts: s,c,x,l".to_string());
    }
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok(CategoryCounts {
        simple: parse(parts[0])?,
        creative: parse(parts[1])?,
        complex: parse(parts[2])?,
        list_manipulation: parse(parts[3])?,
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {}", message.lines().next().unwrap_or("unknown"));
            for line in message.lines().skip(1) {
                eprintln!("{line}");
            }
            ExitCode::FAILURE
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, String> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{} is not valid JSON: {e}", path.display()))
}

fn read_text(path: &PathBuf) -> Result<String, String> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(text)
}

fn emit(value: &Value) {
    print!("{}", to_canonical_string(value));
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Ease { command } => match command {
            EaseCommand::Encode { input, seed } => {
                let doc = read_json(&input)?;
                let encoded = encode(&doc, &KeyPolicy::new(seed)).map_err(|e| e.to_string())?;
                emit(&encoded);
                Ok(())
            }
            EaseCommand::Decode { input } => {
                let doc = read_json(&input)?;
                let decoded = decode(&doc).map_err(|e| e.to_string())?;
                emit(&decoded);
                Ok(())
            }
            EaseCommand::Validate { input } => {
                let doc = read_json(&input)?;
                let violations = validate_ease(&doc);
                let report: Vec<Value> = violations
                    .iter()
                    .map(|v| {
                        serde_json::json!({"pointer": v.pointer, "detail": v.detail})
                    })
                    .collect();
                emit(&Value::Array(report));
                if violations.is_empty() {
                    Ok(())
                } else {
                    Err(format!("{} violation(s) found", violations.len()))
                }
            }
        },
        Command::Patch { command } => match command {
            PatchCommand::Apply { doc, patch } => {
                let document = read_json(&doc)?;
                let patch = parse_patch(&read_text(&patch)?).map_err(|e| e.to_string())?;
                let result = apply_patch(&document, &patch).map_err(|e| e.to_string())?;
                emit(&result);
                Ok(())
            }
        },
        Command::Diff {
            a,
            b,
            ease,
            array_strategy,
        } => {
            let doc_a = read_json(&a)?;
            let doc_b = read_json(&b)?;
            let patch = if ease {
                diff_ease(&doc_a, &doc_b).map_err(|e| e.to_string())?
            } else {
                let opts = DiffOptions {
                    array_strategy: if array_strategy == "positional" {
                        ArrayStrategy::Positional
                    } else {
                        ArrayStrategy::Lcs
                    },
                };
                diff(&doc_a, &doc_b, &opts)
            };
            emit(&patch.to_value());
            Ok(())
        }
        Command::Translate {
            original,
            ease_patch,
            seed,
        } => {
            let doc = read_json(&original)?;
            let patch = parse_patch(&read_text(&ease_patch)?).map_err(|e| e.to_string())?;
            let standard = ease_patch_to_standard(&doc, &KeyPolicy::new(seed), &patch)
                .map_err(|e| e.to_string())?;
            emit(&standard.to_value());
            Ok(())
        }
        Command::Eval {
            corpus,
            predictions,
            mode,
            seed,
        } => {
            let examples = read_corpus(BufReader::new(
                File::open(&corpus).map_err(|e| format!("cannot read {}: {e}", corpus.display()))?,
            ))
            .map_err(|e| e.to_string())?;
            let prediction_list = read_predictions(BufReader::new(
                File::open(&predictions)
                    .map_err(|e| format!("cannot read {}: {e}", predictions.display()))?,
            ))
            .map_err(|e| e.to_string())?;
            let prediction_map: HashMap<String, Prediction> = prediction_list
                .into_iter()
                .map(|p| (p.id().to_string(), p))
                .collect();
            let eval_mode = if mode == "ease" {
                EvalMode::Ease { seed }
            } else {
                EvalMode::Standard
            };
            let report = evaluate_corpus(&examples, &prediction_map, eval_mode, &SimpleTokenCounter)
                .map_err(|e| e.to_string())?;
            emit(&serde_json::to_value(&report).expect("report serializes"));
            eprint!("{}", render_table(&report));
            Ok(())
        }
        Command::Dataset { command } => match command {
            DatasetCommand::Synth {
                schema,
                counts,
                client,
                seed,
            } => {
                let schema_text = read_text(&schema)?;
                let client = client.build()?;
                let examples = synthesize_dataset(client.as_ref(), &schema_text, &counts, seed)
                    .map_err(|e| e.to_string())?;
                let stdout = std::io::stdout();
                write_corpus(stdout.lock(), &examples).map_err(|e| e.to_string())?;
                eprintln!("synthesized {} example(s)", examples.len());
                Ok(())
            }
        },
        Command::Edit {
            doc,
            instruction,
            mode,
            shots,
            pool,
            client,
            seed,
            dry_run,
        } => {
            let document = read_json(&doc)?;
            let mode = match mode.as_str() {
                "ease" => Mode::Ease(KeyPolicy::new(seed)),
                "full" => Mode::Full,
                _ => Mode::Standard,
            };
            let mut few_shots = Vec::new();
            if shots > 0 {
                let pool_path = pool.ok_or("--shots requires --pool <corpus>")?;
                let examples = read_corpus(BufReader::new(File::open(&pool_path).map_err(
                    |e| format!("cannot read {}: {e}", pool_path.display()),
                )?))
                .map_err(|e| e.to_string())?;
                let selected = select_few_shots(&examples, &instruction, shots, seed)
                    .map_err(|e| e.to_string())?;
                for example in selected {
                    few_shots.push(few_shot_for_mode(example, &mode).map_err(|e| e.to_string())?);
                }
            }
            let request = EditRequest {
                doc: document,
                instruction,
                mode,
                few_shots,
            };
            if dry_run {
                eprint!("{}", build_prompt(&request).map_err(|e| e.to_string())?);
                return Ok(());
            }
            let client = client.build()?;
            let result = generate_edit(client.as_ref(), &request).map_err(|e| e.to_string())?;
            eprintln!(
                "tokens: input={} output={}",
                result.usage.input_tokens, result.usage.output_tokens
            );
            if result.is_unsupported {
                eprintln!("model flagged the command as unsupported");
            }
            match result.payload {
                Some(EditPayload::Patch(patch)) => {
                    emit(&patch.to_value());
                    Ok(())
                }
                Some(EditPayload::Doc(doc)) => {
                    emit(&doc);
                    Ok(())
                }
                None => Err(format!(
                    "model output could not be parsed\nraw output:\n{}",
                    result.raw
                )),
            }
        }
    }
}

// Keep stdout flushed even when piped.
#[allow(dead_code)]
fn flush_stdout() {
    let _ = std::io::stdout().flush();
}
