//! End-to-end evaluation: corpus + predictions in, [`MetricReport`] out.
//!
//! For every record with a non-empty prediction list, the similarity graph
//! is built per threshold and scored under the configured matching schemes;
//! matched pairs additionally get ROUGE and semantic scores. Corpus-level
//! P/R/F1 are macro-averages over the records that yield at least one
//! matched pair at that threshold; records with empty predictions or
//! edgeless graphs are excluded from the averages and counted as skipped.
//! Pair metrics are averaged over the pooled matched pairs.
//!
//! Per-record work may fan out over several workers; the reduction happens
//! in repo_id order, so the worker count never changes a single output byte.

use crate::align::{run_scheme, scheme_scores, AlignError, MatchScheme, SimilarityGraph};
use crate::corpus::{CorpusError, CorpusRecord, GoldTarget, Prediction};
use crate::embed::{cosine, EmbedError, Embedder, EmbedderSpec};
use crate::textmetrics::{aggregate_pair_metrics, score_pair, PairScore};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// Evaluation configuration; echoed into the report. `workers` only controls
/// the fan-out and never appears in report bytes, so runs with different
/// worker counts serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub thresholds: Vec<f64>,
    pub schemes: Vec<MatchScheme>,
    pub embedder: EmbedderSpec,
    pub target: GoldTarget,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            thresholds: vec![0.3],
            schemes: MatchScheme::ALL.to_vec(),
            embedder: EmbedderSpec::builtin(),
            target: GoldTarget::Extractive,
            workers: 4,
        }
    }
}

/// Macro-averaged P/R/F1 for one scheme at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: MatchScheme,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Pooled pair metrics for one scheme at one threshold; `scores` is `None`
/// when no pairs matched anywhere ("no matched pairs" marker).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemePairMetrics {
    pub scheme: MatchScheme,
    pub n_pairs: usize,
    pub scores: Option<PairScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub n_records_scored: usize,
    pub n_skipped_empty: usize,
    pub match_scores: Vec<SchemeSummary>,
    pub pair_metrics: Vec<SchemePairMetrics>,
}

/// Full evaluation output: config echo, counts, and per-threshold scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub config: EvalConfig,
    pub n_corpus_records: usize,
    pub n_prediction_records: usize,
    pub per_threshold: Vec<ThresholdReport>,
}

/// Everything computed for one record at one threshold.
struct RecordThresholdOutcome {
    scheme_scores: Vec<(MatchScheme, f64, f64, f64)>,
    pair_scores: Vec<(MatchScheme, Vec<PairScore>)>,
}

/// Per-record result: `None` at a threshold means skipped (no prediction,
/// empty prediction, or no matched pair).
struct RecordOutcome {
    per_threshold: Vec<Option<RecordThresholdOutcome>>,
}

fn validate(
    records: &[CorpusRecord],
    predictions: &[Prediction],
    config: &EvalConfig,
) -> Result<(), EvalError> {
    if records.is_empty() {
        return Err(EvalError::Validation("empty corpus".into()));
    }
    if config.thresholds.is_empty() {
        return Err(EvalError::Validation("no thresholds configured".into()));
    }
    for &t in &config.thresholds {
        if !(t > 0.0 && t <= 1.0) {
            return Err(EvalError::Validation(format!("threshold {t} outside (0, 1]")));
        }
    }
    if config.schemes.is_empty() {
        return Err(EvalError::Validation("no schemes configured".into()));
    }
    let known: std::collections::HashSet<&str> =
        records.iter().map(|r| r.repo_id.as_str()).collect();
    let offenders: Vec<&str> = predictions
        .iter()
        .map(|p| p.repo_id.as_str())
        .filter(|id| !known.contains(id))
        .collect();
    if !offenders.is_empty() {
        return Err(EvalError::Validation(format!(
            "predictions reference unknown repo_ids: {}",
            offenders.join(", ")
        )));
    }
    Ok(())
}

fn evaluate_record(
    record: &CorpusRecord,
    prediction: Option<&Prediction>,
    embedder: &dyn Embedder,
    config: &EvalConfig,
) -> Result<RecordOutcome, EvalError> {
    let n_thresholds = config.thresholds.len();
    let gen = match prediction {
        Some(p) if !p.features.is_empty() => &p.features,
        _ => return Ok(RecordOutcome { per_threshold: (0..n_thresholds).map(|_| None).collect() }),
    };
    let gold = record.gold(config.target);

    // Embed once per record; thresholds only re-filter the similarity matrix.
    let gen_vectors = embedder.embed_sentences(gen.items())?;
    let gold_vectors = embedder.embed_sentences(gold.items())?;
    let mut scored_edges = Vec::with_capacity(gen.len() * gold.len());
    for (i, gv) in gen_vectors.iter().enumerate() {
        for (j, hv) in gold_vectors.iter().enumerate() {
            scored_edges.push((i, j, cosine(gv, hv)?));
        }
    }

    let mut pair_memo: HashMap<(usize, usize), PairScore> = HashMap::new();
    let mut per_threshold = Vec::with_capacity(n_thresholds);
    for &threshold in &config.thresholds {
        let graph = SimilarityGraph::from_scores(gen.len(), gold.len(), &scored_edges, threshold)?;
        if !graph.has_edges() {
            per_threshold.push(None);
            continue;
        }
        let mut outcome = RecordThresholdOutcome {
            scheme_scores: Vec::with_capacity(config.schemes.len()),
            pair_scores: Vec::with_capacity(config.schemes.len()),
        };
        for &scheme in &config.schemes {
            let matching = run_scheme(&graph, scheme);
            let scores = scheme_scores(&matching, gen.len(), gold.len());
            outcome.scheme_scores.push((scheme, scores.precision, scores.recall, scores.f1));
            let mut pair_scores = Vec::with_capacity(matching.pairs.len());
            for pair in &matching.pairs {
                let key = (pair.gen, pair.gold);
                let score = match pair_memo.get(&key) {
                    Some(s) => *s,
                    None => {
                        let s = score_pair(
                            &gen.items()[pair.gen],
                            &gold.items()[pair.gold],
                            embedder,
                        )?;
                        pair_memo.insert(key, s);
                        s
                    }
                };
                pair_scores.push(score);
            }
            outcome.pair_scores.push((scheme, pair_scores));
        }
        per_threshold.push(Some(outcome));
    }
    Ok(RecordOutcome { per_threshold })
}

/// Run `f` over `0..n` with at most `workers` threads; output order is by
/// index, independent of scheduling.
fn compute_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= n {
                    break;
                }
                *slots[idx].lock().unwrap() = Some(f(idx));
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled slot"))
        .collect()
}

/// Evaluate predictions against a corpus.
pub fn run_evaluation(
    records: &[CorpusRecord],
    predictions: &[Prediction],
    config: &EvalConfig,
) -> Result<MetricReport, EvalError> {
    validate(records, predictions, config)?;
    let embedder = config.embedder.build()?;

    let mut ordered: Vec<&CorpusRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.repo_id.cmp(&b.repo_id));
    let by_repo: BTreeMap<&str, &Prediction> =
        predictions.iter().map(|p| (p.repo_id.as_str(), p)).collect();

    let outcomes: Vec<Result<RecordOutcome, EvalError>> =
        compute_indexed(ordered.len(), config.workers, |idx| {
            let record = ordered[idx];
            evaluate_record(record, by_repo.get(record.repo_id.as_str()).copied(), embedder.as_ref(), config)
        });

    let mut per_record = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        per_record.push(outcome?);
    }

    let mut per_threshold = Vec::with_capacity(config.thresholds.len());
    for (t_idx, &threshold) in config.thresholds.iter().enumerate() {
        let mut scored = 0usize;
        let mut sums: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 0.0); config.schemes.len()];
        let mut pooled: Vec<Vec<PairScore>> = vec![Vec::new(); config.schemes.len()];
        for outcome in &per_record {
            let Some(at_threshold) = &outcome.per_threshold[t_idx] else {
                continue;
            };
            scored += 1;
            for (s_idx, &(_, p, r, f1)) in at_threshold.scheme_scores.iter().enumerate() {
                sums[s_idx].0 += p;
                sums[s_idx].1 += r;
                sums[s_idx].2 += f1;
            }
            for (s_idx, (_, scores)) in at_threshold.pair_scores.iter().enumerate() {
                pooled[s_idx].extend_from_slice(scores);
            }
        }
        let match_scores = config
            .schemes
            .iter()
            .zip(&sums)
            .map(|(&scheme, &(p, r, f1))| {
                let n = scored.max(1) as f64;
                SchemeSummary {
                    scheme,
                    precision: if scored == 0 { 0.0 } else { p / n },
                    recall: if scored == 0 { 0.0 } else { r / n },
                    f1: if scored == 0 { 0.0 } else { f1 / n },
                }
            })
            .collect();
        let pair_metrics = config
            .schemes
            .iter()
            .zip(&pooled)
            .map(|(&scheme, pool)| SchemePairMetrics {
                scheme,
                n_pairs: pool.len(),
                scores: aggregate_pair_metrics(pool),
            })
            .collect();
        per_threshold.push(ThresholdReport {
            threshold,
            n_records_scored: scored,
            n_skipped_empty: records.len() - scored,
            match_scores,
            pair_metrics,
        });
    }

    Ok(MetricReport {
        config: config.clone(),
        n_corpus_records: records.len(),
        n_prediction_records: predictions.len(),
        per_threshold,
    })
}

/// Load corpus and predictions from JSONL files and evaluate.
pub fn run_evaluation_files(
    corpus_path: impl AsRef<std::path::Path>,
    predictions_path: impl AsRef<std::path::Path>,
    config: &EvalConfig,
) -> Result<MetricReport, EvalError> {
    let records = crate::corpus::load_corpus(corpus_path)?;
    let predictions = crate::corpus::load_predictions(predictions_path)?;
    run_evaluation(&records, &predictions, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{FeatureList, License};

    fn record(repo_id: &str, features: &[&str]) -> CorpusRecord {
        CorpusRecord {
            repo_id: repo_id.into(),
            url: format!("https://github.com/{repo_id}"),
            license: License::Mit,
            readme_text: format!("readme for {repo_id}"),
            extractive: FeatureList::new(features.iter().copied()),
            abstractive: FeatureList::default(),
        }
    }

    fn self_predictions(records: &[CorpusRecord]) -> Vec<Prediction> {
        records
            .iter()
            .map(|r| Prediction { repo_id: r.repo_id.clone(), features: r.extractive.clone() })
            .collect()
    }

    fn corpus() -> Vec<CorpusRecord> {
        vec![
            record("a/one", &["allow users to login", "lookup stock quotes"]),
            record("b/two", &["export reports as csv", "import pdf documents", "sync with cloud storage"]),
            record("c/three", &["render markdown preview", "highlight code syntax"]),
        ]
    }

    #[test]
    fn self_match_scores_one_everywhere() {
        let records = corpus();
        let predictions = self_predictions(&records);
        let config = EvalConfig {
            thresholds: vec![0.3, 0.5, 1.0],
            workers: 1,
            ..EvalConfig::default()
        };
        let report = run_evaluation(&records, &predictions, &config).unwrap();
        for threshold in &report.per_threshold {
            assert_eq!(threshold.n_records_scored, 3);
            assert_eq!(threshold.n_skipped_empty, 0);
            for summary in &threshold.match_scores {
                assert_eq!(
                    (summary.precision, summary.recall, summary.f1),
                    (1.0, 1.0, 1.0),
                    "scheme {:?} at {}",
                    summary.scheme,
                    threshold.threshold
                );
            }
            for pair in &threshold.pair_metrics {
                let scores = pair.scores.as_ref().expect("pairs matched");
                assert_eq!(scores.rouge1.f1, 1.0);
                assert_eq!(scores.semantic.f1, 1.0);
            }
        }
    }

    #[test]
    fn unknown_prediction_repo_is_listed() {
        let records = corpus();
        let mut predictions = self_predictions(&records);
        predictions.push(Prediction { repo_id: "zz/ghost".into(), features: FeatureList::new(["x"]) });
        let err = run_evaluation(&records, &predictions, &EvalConfig::default()).unwrap_err();
        assert!(err.to_string().contains("zz/ghost"), "got: {err}");
    }

    #[test]
    fn empty_corpus_is_error() {
        let err = run_evaluation(&[], &[], &EvalConfig::default()).unwrap_err();
        assert!(err.to_string().contains("empty corpus"));
    }

    #[test]
    fn out_of_range_threshold_is_error() {
        let records = corpus();
        let config = EvalConfig { thresholds: vec![0.0], ..EvalConfig::default() };
        assert!(run_evaluation(&records, &[], &config).is_err());
        let config = EvalConfig { thresholds: vec![1.1], ..EvalConfig::default() };
        assert!(run_evaluation(&records, &[], &config).is_err());
    }

    #[test]
    fn missing_and_empty_predictions_are_skipped_but_counted() {
        let records = corpus();
        // Only one record predicted; one other predicted with junk that
        // matches nothing.
        let predictions = vec![
            Prediction { repo_id: "a/one".into(), features: records[0].extractive.clone() },
            Prediction { repo_id: "b/two".into(), features: FeatureList::new(["zzz qqq xxyy"]) },
        ];
        let config = EvalConfig { workers: 1, ..EvalConfig::default() };
        let report = run_evaluation(&records, &predictions, &config).unwrap();
        let t = &report.per_threshold[0];
        assert_eq!(t.n_records_scored + t.n_skipped_empty, 3);
        assert_eq!(t.n_records_scored, 1);
        // The scored record self-matches, so averages stay 1.0.
        assert_eq!(t.match_scores[0].f1, 1.0);
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let records = corpus();
        let predictions = vec![
            Prediction {
                repo_id: "a/one".into(),
                features: FeatureList::new(["users can login", "stock quote lookup"]),
            },
            Prediction {
                repo_id: "b/two".into(),
                features: FeatureList::new(["csv export of reports and cloud sync"]),
            },
            Prediction {
                repo_id: "c/three".into(),
                features: FeatureList::new(["markdown rendering", "syntax highlighting"]),
            },
        ];
        let serial = EvalConfig { workers: 1, thresholds: vec![0.3, 0.4, 0.5], ..EvalConfig::default() };
        let parallel = EvalConfig { workers: 4, ..serial.clone() };
        let a = run_evaluation(&records, &predictions, &serial).unwrap();
        let b = run_evaluation(&records, &predictions, &parallel).unwrap();
        let ja = serde_json::to_string_pretty(&a).unwrap();
        let jb = serde_json::to_string_pretty(&b).unwrap();
        assert_eq!(ja, jb);
    }
}
