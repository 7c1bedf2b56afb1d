//! Prompt assembly and model-output parsing.
//!
//! Training examples put the README, the `##FEATURES##` task designator, and
//! the numbered gold list in one sequence; inference prompts stop right after
//! the designator and let the model complete the list.

use super::{CorpusError, CorpusRecord, FeatureList};
use regex::Regex;
use std::sync::LazyLock;

/// Task designator separating README text from the feature list.
pub const FEATURE_DESIGNATOR: &str = "##FEATURES##";

/// Lines equal to any of these truncate parsed model output: the designator
/// itself (models sometimes echo it) and common end-of-text sentinels.
pub const STOP_MARKERS: [&str; 3] = [FEATURE_DESIGNATOR, "<|endoftext|>", "</s>"];

/// Instruction prompts for black-box chat models, in the order they were
/// tried; the last one gave the best feature lists and is exposed as
/// [`BEST_INSTRUCTION_PROMPT`].
pub const INSTRUCTION_PROMPTS: [&str; 5] = [
    "List all the features for the above text.",
    "List all the functionalities for the above text.",
    "List all the features from above text. Each features should be in individual line without headings.",
    "List all the features from above text. Each features should be in individual line without headings. Each features should be in individual line without headings.",
    "List all the features from above text. Each features should be in individual line without headings. Each features should be in individual line without headings. Do not include features related to license",
];

pub const BEST_INSTRUCTION_PROMPT: &str = INSTRUCTION_PROMPTS[4];

/// Which gold list a training example targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldTarget {
    Extractive,
    Abstractive,
}

impl GoldTarget {
    pub fn name(&self) -> &'static str {
        match self {
            GoldTarget::Extractive => "extractive",
            GoldTarget::Abstractive => "abstractive",
        }
    }
}

impl std::str::FromStr for GoldTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "extractive" => Ok(GoldTarget::Extractive),
            "abstractive" => Ok(GoldTarget::Abstractive),
            other => Err(format!("unknown gold target `{other}` (expected extractive|abstractive)")),
        }
    }
}

/// Render a feature list as `1. item\n2. item...` with no trailing newline.
pub fn render_numbered(list: &FeatureList) -> String {
    list.iter()
        .enumerate()
        .map(|(i, item)| format!("{}. {}", i + 1, item))
        .collect::<Vec<_>>()
        .join("\n")
}

/// README text, designator, and the numbered gold list, exactly as fed to a
/// model during fine-tuning.
pub fn make_training_example(
    record: &CorpusRecord,
    target: GoldTarget,
) -> Result<String, CorpusError> {
    if record.readme_text.is_empty() {
        return Err(CorpusError::EmptyReadme { repo_id: record.repo_id.clone() });
    }
    let gold = record.gold(target);
    if gold.is_empty() {
        return Err(CorpusError::NoGoldFeatures { repo_id: record.repo_id.clone() });
    }
    Ok(format!(
        "{}\n{FEATURE_DESIGNATOR}\n{}",
        record.readme_text,
        render_numbered(gold)
    ))
}

/// README text plus the designator, with nothing after it.
pub fn make_inference_prompt(record: &CorpusRecord) -> Result<String, CorpusError> {
    if record.readme_text.is_empty() {
        return Err(CorpusError::EmptyReadme { repo_id: record.repo_id.clone() });
    }
    Ok(format!("{}\n{FEATURE_DESIGNATOR}\n", record.readme_text))
}

// One leading enumeration marker: `1.` / `1)` with trailing whitespace, or a
// bullet (`-`, `*`, `•`) with trailing whitespace. Exactly one marker is
// stripped per line so items that themselves start with a marker survive the
// render→parse round trip.
static LEADING_MARKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:\d+[.)]|[-*•])(?:\s+|$)").unwrap());

/// Parse raw model output into a feature list: split on newlines, truncate at
/// a stop marker, strip one leading enumeration marker per line, drop empty
/// lines, and drop duplicates keeping the first occurrence.
pub fn parse_feature_list(generation: &str) -> FeatureList {
    let mut items = Vec::new();
    for line in generation.lines() {
        if STOP_MARKERS.contains(&line.trim()) {
            break;
        }
        let stripped = LEADING_MARKER.replace(line, "");
        items.push(stripped.into_owned());
    }
    FeatureList::new(items)
}
