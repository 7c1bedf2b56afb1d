//! Bipartite alignment of predicted features against gold features.
//!
//! Predicted features sit on one side of the graph, gold features on the
//! other; an edge exists where the cosine similarity of their sentence
//! embeddings clears the threshold (default 0.3). Three matching schemes
//! score the graph:
//!
//! - one-to-one (`#`): maximum-cardinality matching, each node used at most
//!   once;
//! - many-to-one (`*`): every gold maps to its best predicted neighbour, so
//!   one prediction may absorb several golds;
//! - weighted many-to-one (`+`): the same pairing, with each edge into a
//!   prediction matched to `k` golds carrying weight `1/k`.
//!
//! Precision credits the sum of matched-edge weights against the prediction
//! count; recall credits the number of matched golds. Under `+` the weights
//! into each matched prediction sum to 1, so precision cannot exceed 1, and
//! recall coincides with the `*` scheme's recall by construction.

use crate::corpus::FeatureList;
use crate::embed::{cosine, EmbedError, Embedder};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("edge index out of range: ({gen}, {gold}) in a {n_gen}x{n_gold} graph")]
    EdgeOutOfRange { gen: usize, gold: usize, n_gen: usize, n_gold: usize },
    #[error("duplicate edge ({gen}, {gold})")]
    DuplicateEdge { gen: usize, gold: usize },
    #[error("expected a {expected:?} match, got {got:?}")]
    WrongScheme { expected: MatchScheme, got: MatchScheme },
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// One edge of the similarity graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub gen: usize,
    pub gold: usize,
    pub similarity: f64,
}

/// Thresholded bipartite similarity graph between predicted (`gen`) and gold
/// features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGraph {
    pub n_gen: usize,
    pub n_gold: usize,
    pub threshold: f64,
    edges: Vec<Edge>,
}

impl SimilarityGraph {
    /// Build a graph from raw pair scores, keeping the pairs at or above the
    /// threshold. Rejects out-of-range indices and duplicate pairs.
    pub fn from_scores(
        n_gen: usize,
        n_gold: usize,
        scores: &[(usize, usize, f64)],
        threshold: f64,
    ) -> Result<SimilarityGraph, AlignError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(AlignError::InvalidThreshold(threshold));
        }
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::new();
        for &(gen, gold, similarity) in scores {
            if gen >= n_gen || gold >= n_gold {
                return Err(AlignError::EdgeOutOfRange { gen, gold, n_gen, n_gold });
            }
            if !seen.insert((gen, gold)) {
                return Err(AlignError::DuplicateEdge { gen, gold });
            }
            if similarity >= threshold {
                edges.push(Edge { gen, gold, similarity });
            }
        }
        edges.sort_by(|a, b| (a.gen, a.gold).cmp(&(b.gen, b.gold)));
        Ok(SimilarityGraph { n_gen, n_gold, threshold, edges })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edges(&self) -> bool {
        !self.edges.is_empty()
    }

    /// Adjacency per gen node, sorted by (similarity desc, gold asc) — the
    /// deterministic visiting order for the matching schemes.
    fn gen_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n_gen];
        for edge in &self.edges {
            adj[edge.gen].push((edge.gold, edge.similarity));
        }
        for neighbors in &mut adj {
            neighbors.sort_by(|a, b| {
                b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0))
            });
        }
        adj
    }
}

/// Build the similarity graph for one record: edge (i, j) present iff
/// `cosine(embed(gen[i]), embed(gold[j])) >= threshold`.
pub fn build_similarity_graph(
    gen: &FeatureList,
    gold: &FeatureList,
    embedder: &dyn Embedder,
    threshold: f64,
) -> Result<SimilarityGraph, AlignError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(AlignError::InvalidThreshold(threshold));
    }
    let gen_vectors = embedder.embed_sentences(gen.items())?;
    let gold_vectors = embedder.embed_sentences(gold.items())?;
    let mut edges = Vec::new();
    for (i, gv) in gen_vectors.iter().enumerate() {
        for (j, hv) in gold_vectors.iter().enumerate() {
            let similarity = cosine(gv, hv)?;
            if similarity >= threshold {
                edges.push(Edge { gen: i, gold: j, similarity });
            }
        }
    }
    Ok(SimilarityGraph { n_gen: gen.len(), n_gold: gold.len(), threshold, edges })
}

/// The three matching schemes, with their table symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchScheme {
    OneToOne,
    ManyToOne,
    WeightedManyToOne,
}

impl MatchScheme {
    pub const ALL: [MatchScheme; 3] =
        [MatchScheme::OneToOne, MatchScheme::ManyToOne, MatchScheme::WeightedManyToOne];

    /// Table symbol: `#` one-to-one, `*` many-to-one, `+` weighted.
    pub fn symbol(&self) -> &'static str {
        match self {
            MatchScheme::OneToOne => "#",
            MatchScheme::ManyToOne => "*",
            MatchScheme::WeightedManyToOne => "+",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatchScheme::OneToOne => "one2one",
            MatchScheme::ManyToOne => "many2one",
            MatchScheme::WeightedManyToOne => "weighted",
        }
    }
}

impl std::str::FromStr for MatchScheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one2one" | "one-to-one" => Ok(MatchScheme::OneToOne),
            "many2one" | "many-to-one" => Ok(MatchScheme::ManyToOne),
            "weighted" | "weighted-many-to-one" => Ok(MatchScheme::WeightedManyToOne),
            other => Err(format!(
                "unknown scheme `{other}` (expected one2one|many2one|weighted)"
            )),
        }
    }
}

/// One matched edge with its credit weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub gen: usize,
    pub gold: usize,
    pub weight: f64,
}

/// Edge set chosen by a matching scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub scheme: MatchScheme,
    pub threshold: f64,
    pub pairs: Vec<MatchedPair>,
}

/// Maximum-cardinality one-to-one matching via augmenting paths.
///
/// Deterministic: gen nodes are processed in index order and each explores
/// its neighbours by (similarity desc, gold asc), so identical graphs yield
/// identical matchings.
pub fn match_one_to_one(graph: &SimilarityGraph) -> MatchResult {
    let adj = graph.gen_adjacency();
    let mut gold_owner: Vec<Option<usize>> = vec![None; graph.n_gold];

    fn try_assign(
        gen: usize,
        adj: &[Vec<(usize, f64)>],
        visited: &mut [bool],
        gold_owner: &mut [Option<usize>],
    ) -> bool {
        for &(gold, _) in &adj[gen] {
            if visited[gold] {
                continue;
            }
            visited[gold] = true;
            let free = match gold_owner[gold] {
                None => true,
                Some(owner) => try_assign(owner, adj, visited, gold_owner),
            };
            if free {
                gold_owner[gold] = Some(gen);
                return true;
            }
        }
        false
    }

    for gen in 0..graph.n_gen {
        let mut visited = vec![false; graph.n_gold];
        try_assign(gen, &adj, &mut visited, &mut gold_owner);
    }

    let mut pairs: Vec<MatchedPair> = gold_owner
        .iter()
        .enumerate()
        .filter_map(|(gold, owner)| {
            owner.map(|gen| MatchedPair { gen, gold, weight: 1.0 })
        })
        .collect();
    pairs.sort_by_key(|p| (p.gen, p.gold));
    MatchResult { scheme: MatchScheme::OneToOne, threshold: graph.threshold, pairs }
}

/// Many-to-one matching: every gold with at least one neighbour maps to its
/// highest-similarity gen neighbour (ties go to the lowest gen index).
pub fn match_many_to_one(graph: &SimilarityGraph) -> MatchResult {
    let mut best: Vec<Option<(f64, usize)>> = vec![None; graph.n_gold];
    for edge in graph.edges() {
        let candidate = (edge.similarity, edge.gen);
        best[edge.gold] = Some(match best[edge.gold] {
            None => candidate,
            Some((sim, gen)) => {
                if edge.similarity > sim || (edge.similarity == sim && edge.gen < gen) {
                    candidate
                } else {
                    (sim, gen)
                }
            }
        });
    }
    let mut pairs: Vec<MatchedPair> = best
        .iter()
        .enumerate()
        .filter_map(|(gold, choice)| {
            choice.map(|(_, gen)| MatchedPair { gen, gold, weight: 1.0 })
        })
        .collect();
    pairs.sort_by_key(|p| (p.gen, p.gold));
    MatchResult { scheme: MatchScheme::ManyToOne, threshold: graph.threshold, pairs }
}

/// Reweight a many-to-one match: each pair's weight becomes `1/k`, where `k`
/// is how many golds its gen absorbed, so each matched gen's incident weights
/// sum to 1.
pub fn weight_many_to_one(matching: &MatchResult) -> Result<MatchResult, AlignError> {
    if matching.scheme != MatchScheme::ManyToOne {
        return Err(AlignError::WrongScheme {
            expected: MatchScheme::ManyToOne,
            got: matching.scheme,
        });
    }
    let mut multiplicity: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for pair in &matching.pairs {
        *multiplicity.entry(pair.gen).or_insert(0) += 1;
    }
    let pairs = matching
        .pairs
        .iter()
        .map(|pair| MatchedPair {
            gen: pair.gen,
            gold: pair.gold,
            weight: 1.0 / multiplicity[&pair.gen] as f64,
        })
        .collect();
    Ok(MatchResult {
        scheme: MatchScheme::WeightedManyToOne,
        threshold: matching.threshold,
        pairs,
    })
}

/// Run one scheme end to end on a graph.
pub fn run_scheme(graph: &SimilarityGraph, scheme: MatchScheme) -> MatchResult {
    match scheme {
        MatchScheme::OneToOne => match_one_to_one(graph),
        MatchScheme::ManyToOne => match_many_to_one(graph),
        MatchScheme::WeightedManyToOne => {
            weight_many_to_one(&match_many_to_one(graph)).expect("many-to-one input")
        }
    }
}

/// Precision/recall/F1 for one scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeScores {
    pub scheme: MatchScheme,
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Score a match: precision credits the weight sum against `n_gen` (clamped
/// at 1 — in degenerate graphs the `*` scheme's edge count can exceed
/// `n_gen`); recall credits the matched-gold count against `n_gold`, which
/// for the weighted scheme reproduces the many-to-one recall.
pub fn scheme_scores(matching: &MatchResult, n_gen: usize, n_gold: usize) -> SchemeScores {
    let weight_credit: f64 = matching.pairs.iter().map(|p| p.weight).sum();
    let pair_count = matching.pairs.len();
    let precision = if n_gen == 0 { 0.0 } else { (weight_credit / n_gen as f64).min(1.0) };
    let recall = if n_gold == 0 { 0.0 } else { pair_count as f64 / n_gold as f64 };
    SchemeScores {
        scheme: matching.scheme,
        threshold: matching.threshold,
        precision,
        recall,
        f1: f1_score(precision, recall),
    }
}
