//! JSONL corpus and predictions I/O.
//!
//! One JSON object per line, UTF-8, LF line endings. Corpus lines carry
//! `{"repo_id", "url", "license", "readme_text", "extractive", "abstractive"}`;
//! prediction lines carry `{"repo_id", "features"}`.

use super::{parse_feature_list, CorpusError, CorpusRecord, FeatureList};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// A model's predicted feature list for one repository.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub repo_id: String,
    pub features: FeatureList,
}

#[derive(Debug, Deserialize)]
struct RawPrediction {
    repo_id: String,
    features: Vec<String>,
}

/// A raw model generation awaiting [`parse_feature_list`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub repo_id: String,
    pub generation: String,
}

fn read_jsonl<T, F>(path: &Path, mut parse_line: F) -> Result<Vec<T>, CorpusError>
where
    F: FnMut(usize, &str) -> Result<Option<T>, CorpusError>,
{
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(item) = parse_line(idx + 1, &line)? {
            out.push(item);
        }
    }
    Ok(out)
}

/// Load a corpus JSONL file. Malformed lines and duplicate repo_ids are
/// errors carrying the 1-based line number.
pub fn load_corpus<P: AsRef<Path>>(path: P) -> Result<Vec<CorpusRecord>, CorpusError> {
    let mut seen: HashSet<String> = HashSet::new();
    read_jsonl(path.as_ref(), |line_no, line| {
        let record: CorpusRecord = serde_json::from_str(line)
            .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
        if !seen.insert(record.repo_id.clone()) {
            return Err(CorpusError::DuplicateRepo { line: line_no, repo_id: record.repo_id });
        }
        Ok(Some(record))
    })
}

/// Save a corpus as JSONL; `save_corpus` then [`load_corpus`] yields equal
/// records.
pub fn save_corpus<P: AsRef<Path>>(records: &[CorpusRecord], path: P) -> Result<(), CorpusError> {
    let file = File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut writer, record)
            .map_err(|e| CorpusError::Parse { line: 0, message: e.to_string() })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Load predictions JSONL. Predicted features are whitespace-normalized and
/// deduplicated on load so no prediction earns credit twice.
pub fn load_predictions<P: AsRef<Path>>(path: P) -> Result<Vec<Prediction>, CorpusError> {
    let mut seen: HashSet<String> = HashSet::new();
    read_jsonl(path.as_ref(), |line_no, line| {
        let raw: RawPrediction = serde_json::from_str(line)
            .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
        if !seen.insert(raw.repo_id.clone()) {
            return Err(CorpusError::DuplicateRepo { line: line_no, repo_id: raw.repo_id });
        }
        Ok(Some(Prediction {
            repo_id: raw.repo_id,
            features: FeatureList::new(&raw.features),
        }))
    })
}

pub fn save_predictions<P: AsRef<Path>>(
    predictions: &[Prediction],
    path: P,
) -> Result<(), CorpusError> {
    let file = File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    for prediction in predictions {
        serde_json::to_writer(&mut writer, prediction)
            .map_err(|e| CorpusError::Parse { line: 0, message: e.to_string() })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Load raw generations (`{"repo_id", "generation"}`) and parse each into a
/// prediction.
pub fn load_generations<P: AsRef<Path>>(path: P) -> Result<Vec<Prediction>, CorpusError> {
    let mut seen: HashSet<String> = HashSet::new();
    read_jsonl(path.as_ref(), |line_no, line| {
        let raw: GenerationRecord = serde_json::from_str(line)
            .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
        if !seen.insert(raw.repo_id.clone()) {
            return Err(CorpusError::DuplicateRepo { line: line_no, repo_id: raw.repo_id });
        }
        Ok(Some(Prediction {
            repo_id: raw.repo_id,
            features: parse_feature_list(&raw.generation),
        }))
    })
}
