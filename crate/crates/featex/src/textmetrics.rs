//! Lexical (ROUGE-1/2/L) and semantic (greedy token-embedding) scoring of
//! matched prediction/gold pairs.
//!
//! ROUGE uses clipped n-gram counts and the β=1 F-measure; no stemming, no
//! synonym lists, no multi-reference variants. The semantic score is a
//! greedy token alignment over embedding cosines with no idf weighting and
//! no baseline rescaling.

use crate::embed::{cosine, EmbedError, Embedder};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Lowercase and split on maximal runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Precision/recall/F1 triple for one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub const ZERO: Prf = Prf { precision: 0.0, recall: 0.0, f1: 0.0 };

    fn new(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf { precision, recall, f1 }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for window in tokens.windows(n) {
        *counts.entry(window).or_insert(0) += 1;
    }
    counts
}

/// ROUGE-N with clipped n-gram overlap: each n-gram's match count is capped
/// at its occurrence count on both sides.
pub fn rouge_n(candidate: &str, reference: &str, n: usize) -> Prf {
    let cand_tokens = tokenize(candidate);
    let ref_tokens = tokenize(reference);
    let cand_ngrams = ngram_counts(&cand_tokens, n);
    let ref_ngrams = ngram_counts(&ref_tokens, n);
    let cand_total: usize = cand_ngrams.values().sum();
    let ref_total: usize = ref_ngrams.values().sum();
    if cand_total == 0 || ref_total == 0 {
        return Prf::ZERO;
    }
    let overlap: usize = cand_ngrams
        .iter()
        .filter_map(|(gram, &count)| ref_ngrams.get(gram).map(|&r| count.min(r)))
        .sum();
    Prf::new(overlap as f64 / cand_total as f64, overlap as f64 / ref_total as f64)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(curr[j]) };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// ROUGE-L: longest common subsequence of the token lists, β=1.
pub fn rouge_l(candidate: &str, reference: &str) -> Prf {
    let cand_tokens = tokenize(candidate);
    let ref_tokens = tokenize(reference);
    if cand_tokens.is_empty() || ref_tokens.is_empty() {
        return Prf::ZERO;
    }
    let lcs = lcs_len(&cand_tokens, &ref_tokens) as f64;
    Prf::new(lcs / cand_tokens.len() as f64, lcs / ref_tokens.len() as f64)
}

/// Greedy semantic score over token embeddings: recall is the mean over
/// reference tokens of the best cosine to any candidate token (floored at 0,
/// keeping components in [0, 1]); precision is symmetric. Either side
/// tokenizing to nothing gives the all-zero score.
pub fn semantic_score(
    candidate: &str,
    reference: &str,
    token_embedder: &dyn Embedder,
) -> Result<Prf, EmbedError> {
    let cand = token_embedder.embed_tokens(candidate)?;
    let refer = token_embedder.embed_tokens(reference)?;
    if cand.is_empty() || refer.is_empty() {
        return Ok(Prf::ZERO);
    }
    let mut sims = vec![vec![0.0; refer.len()]; cand.len()];
    for (i, (_, cv)) in cand.iter().enumerate() {
        for (j, (_, rv)) in refer.iter().enumerate() {
            sims[i][j] = cosine(cv, rv)?;
        }
    }
    let precision = sims
        .iter()
        .map(|row| row.iter().cloned().fold(f64::MIN, f64::max).max(0.0))
        .sum::<f64>()
        / cand.len() as f64;
    let recall = (0..refer.len())
        .map(|j| sims.iter().map(|row| row[j]).fold(f64::MIN, f64::max).max(0.0))
        .sum::<f64>()
        / refer.len() as f64;
    Ok(Prf::new(precision, recall))
}

/// All metric components for one matched candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub rouge1: Prf,
    pub rouge2: Prf,
    pub rouge_l: Prf,
    pub semantic: Prf,
}

/// Score one matched pair on all four metrics.
pub fn score_pair(
    candidate: &str,
    reference: &str,
    token_embedder: &dyn Embedder,
) -> Result<PairScore, EmbedError> {
    Ok(PairScore {
        rouge1: rouge_n(candidate, reference, 1),
        rouge2: rouge_n(candidate, reference, 2),
        rouge_l: rouge_l(candidate, reference),
        semantic: semantic_score(candidate, reference, token_embedder)?,
    })
}

/// Unweighted arithmetic mean of each component over the pairs; `None` marks
/// an empty pair set ("no matched pairs") rather than reporting zeros.
pub fn aggregate_pair_metrics(pairs: &[PairScore]) -> Option<PairScore> {
    if pairs.is_empty() {
        return None;
    }
    let n = pairs.len() as f64;
    let mean = |get: fn(&PairScore) -> Prf| -> Prf {
        Prf {
            precision: pairs.iter().map(|p| get(p).precision).sum::<f64>() / n,
            recall: pairs.iter().map(|p| get(p).recall).sum::<f64>() / n,
            f1: pairs.iter().map(|p| get(p).f1).sum::<f64>() / n,
        }
    };
    Some(PairScore {
        rouge1: mean(|p| p.rouge1),
        rouge2: mean(|p| p.rouge2),
        rouge_l: mean(|p| p.rouge_l),
        semantic: mean(|p| p.semantic),
    })
}
