//! Corpus construction and evaluation toolkit for the "functionality
//! extraction from README files" task.
//!
//! The pipeline, end to end:
//!
//! 1. [`ingest`] — sample public GitHub repositories, keep the ones under a
//!    permissible license, and pull their README text plus metadata.
//! 2. [`corpus`] — clean the markdown, scrub PII, hold gold feature
//!    annotations, split into train/val/test, build training and inference
//!    prompts around the `##FEATURES##` designator, and parse model output
//!    back into feature lists.
//! 3. [`embed`] — turn feature strings into vectors, either with the
//!    deterministic builtin hashed embedder or an external HTTP service.
//! 4. [`align`] — build the thresholded bipartite similarity graph between
//!    predicted and gold features and score it under three matching schemes
//!    (one-to-one `#`, many-to-one `*`, weighted many-to-one `+`).
//! 5. [`textmetrics`] — ROUGE-1/2/L and greedy semantic scoring of the
//!    matched pairs.
//! 6. [`agree`] — annotation-validation bookkeeping (1–4 ratings, Cohen's
//!    kappa).
//! 7. [`eval`] / [`report`] — run the whole evaluation over a corpus plus a
//!    predictions file and render the result as markdown, CSV, or JSON.
//!
//! Everything here is deterministic given its inputs: seeded shuffles, a
//! platform-stable hash for the builtin embedder, and ordered reductions mean
//! two runs with the same config produce byte-identical reports.

pub mod agree;
pub mod align;
pub mod corpus;
pub mod embed;
pub mod eval;
pub mod ingest;
pub mod report;
pub mod textmetrics;

pub use corpus::{CorpusRecord, FeatureList, License, SplitSpec};
pub use embed::{cosine, Embedder, EmbedderSpec, Vector};
pub use eval::{run_evaluation, EvalConfig, MetricReport};
