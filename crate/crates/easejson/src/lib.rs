//! Efficient text-guided JSON editing: RFC 6902 patches, a stable-key
//! encoding for arrays, structural diffing, and an evaluation harness for
//! model-generated patches.
//!
//! The core idea: instead of regenerating a whole document for every edit, a
//! model emits only the patch operations. Arrays are the hard part - removing
//! an element shifts every later index - so [`ease::encode`] turns each array
//! into an object with stable short keys plus a `list_display_order` string,
//! making element addresses independent of position and patch execution
//! independent of operation order.
//!
//! Start with the `examples/` directory: each example is a small runnable
//! program for one capability (encoding, patching, diffing, translation,
//! evaluation, the offline pipeline).

pub mod diff;
pub mod ease;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod patch;
pub mod pointer;
pub mod translate;

pub use serde_json::Value;
