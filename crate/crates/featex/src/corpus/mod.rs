//! Data model, preprocessing, splitting, prompt formatting, and model-output
//! parsing for README corpora.
//!
//! A corpus is a set of [`CorpusRecord`]s: one repository's cleaned README
//! text plus its gold feature annotations in two forms, *extractive* (spans
//! copied from the README) and *abstractive* (the annotator's own words).
//! Both are [`FeatureList`]s and, when both are present, have equal length.

mod io;
mod markdown;
mod pii;
mod prompt;
mod split;

pub use io::{
    load_corpus, load_generations, load_predictions, save_corpus, save_predictions,
    GenerationRecord, Prediction,
};
pub use markdown::{strip_markdown, strip_markdown_with, StripOptions};
pub use pii::{scrub_pii, PiiScrubber, EMAIL_PATTERN};
pub use prompt::{
    make_inference_prompt, make_training_example, parse_feature_list, render_numbered,
    GoldTarget, BEST_INSTRUCTION_PROMPT, FEATURE_DESIGNATOR, INSTRUCTION_PROMPTS, STOP_MARKERS,
};
pub use split::{split_corpus, CorpusSplit};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by corpus construction, parsing, and I/O.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("record {repo_id}: {message}")]
    InvalidRecord { repo_id: String, message: String },
    #[error("invalid feature list: {0}")]
    InvalidFeatureList(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate repo_id `{repo_id}`")]
    DuplicateRepo { line: usize, repo_id: String },
    #[error("no gold features for {repo_id}")]
    NoGoldFeatures { repo_id: String },
    #[error("empty readme text for {repo_id}")]
    EmptyReadme { repo_id: String },
    #[error("split sizes exceed corpus: {requested} requested, {available} available")]
    OversizeSplit { requested: usize, available: usize },
    #[error("invalid scrub pattern `{pattern}`: {message}")]
    InvalidPattern { pattern: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// License family of a repository, as admitted to the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum License {
    #[serde(rename = "MIT")]
    Mit,
    #[serde(rename = "Apache")]
    Apache,
    #[serde(rename = "BSD")]
    Bsd,
    #[serde(rename = "EPL")]
    Epl,
    #[serde(rename = "Other")]
    Other,
}

impl License {
    pub const ALL: [License; 5] = [
        License::Mit,
        License::Apache,
        License::Bsd,
        License::Epl,
        License::Other,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            License::Mit => "MIT",
            License::Apache => "Apache",
            License::Bsd => "BSD",
            License::Epl => "EPL",
            License::Other => "Other",
        }
    }
}

impl std::fmt::Display for License {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered, deduplicated list of non-empty functionality strings.
///
/// Items are whitespace-normalized (trimmed, internal runs collapsed to one
/// space). Construction via [`FeatureList::new`] silently normalizes and
/// drops empties/duplicates — the right behaviour for model predictions —
/// while [`FeatureList::strict`] rejects them, which is what gold
/// annotations get on load.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FeatureList {
    items: Vec<String>,
}

impl FeatureList {
    /// Trim and collapse internal whitespace runs to single spaces.
    pub fn normalize_item(item: &str) -> String {
        item.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    /// Normalizes every item, drops empties, and keeps the first occurrence
    /// of each duplicate.
    pub fn new<I, S>(items: I) -> FeatureList
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for item in items {
            let norm = Self::normalize_item(item.as_ref());
            if norm.is_empty() {
                continue;
            }
            if seen.insert(norm.clone()) {
                out.push(norm);
            }
        }
        FeatureList { items: out }
    }

    /// Like [`FeatureList::new`] but errors on empty or duplicate items
    /// instead of dropping them.
    pub fn strict<I, S>(items: I) -> Result<FeatureList, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for item in items {
            let norm = Self::normalize_item(item.as_ref());
            if norm.is_empty() {
                return Err(CorpusError::InvalidFeatureList(
                    "empty item after normalization".into(),
                ));
            }
            if !seen.insert(norm.clone()) {
                return Err(CorpusError::InvalidFeatureList(format!(
                    "duplicate item `{norm}`"
                )));
            }
            out.push(norm);
        }
        Ok(FeatureList { items: out })
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.items.iter()
    }
}

impl<'a> IntoIterator for &'a FeatureList {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// One repository's cleaned README text, license, and gold feature lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCorpusRecord")]
pub struct CorpusRecord {
    pub repo_id: String,
    pub url: String,
    pub license: License,
    pub readme_text: String,
    pub extractive: FeatureList,
    pub abstractive: FeatureList,
}

/// Wire shape of one corpus JSONL line; converted into [`CorpusRecord`] with
/// the invariants checked.
#[derive(Debug, Deserialize)]
struct RawCorpusRecord {
    repo_id: String,
    url: String,
    license: License,
    readme_text: String,
    extractive: Vec<String>,
    abstractive: Vec<String>,
}

impl TryFrom<RawCorpusRecord> for CorpusRecord {
    type Error = CorpusError;

    fn try_from(raw: RawCorpusRecord) -> Result<Self, Self::Error> {
        let extractive =
            FeatureList::strict(&raw.extractive).map_err(|e| CorpusError::InvalidRecord {
                repo_id: raw.repo_id.clone(),
                message: format!("extractive: {e}"),
            })?;
        let abstractive =
            FeatureList::strict(&raw.abstractive).map_err(|e| CorpusError::InvalidRecord {
                repo_id: raw.repo_id.clone(),
                message: format!("abstractive: {e}"),
            })?;
        let record = CorpusRecord {
            repo_id: raw.repo_id,
            url: raw.url,
            license: raw.license,
            readme_text: raw.readme_text,
            extractive,
            abstractive,
        };
        record.check_annotation_rule()?;
        Ok(record)
    }
}

impl CorpusRecord {
    /// Annotation rule: when both gold lists are present (non-empty) they
    /// must have the same number of items.
    pub fn check_annotation_rule(&self) -> Result<(), CorpusError> {
        if !self.extractive.is_empty()
            && !self.abstractive.is_empty()
            && self.extractive.len() != self.abstractive.len()
        {
            return Err(CorpusError::InvalidRecord {
                repo_id: self.repo_id.clone(),
                message: format!(
                    "extractive ({}) and abstractive ({}) lengths differ",
                    self.extractive.len(),
                    self.abstractive.len()
                ),
            });
        }
        Ok(())
    }

    /// Corpus admission rule: a record needs at least two extractive
    /// functionalities to enter the annotated corpus.
    pub fn meets_admission_rule(&self) -> bool {
        self.extractive.len() >= 2
    }

    /// The gold list selected by `target`.
    pub fn gold(&self, target: GoldTarget) -> &FeatureList {
        match target {
            GoldTarget::Extractive => &self.extractive,
            GoldTarget::Abstractive => &self.abstractive,
        }
    }
}

/// Sizes and seed for a deterministic train/val/test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_n: usize,
    pub val_n: usize,
    pub test_n: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn total(&self) -> usize {
        self.train_n + self.val_n + self.test_n
    }
}
