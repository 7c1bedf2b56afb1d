//! Deterministic hashed embedder.
//!
//! Text is lowercased and tokenized on non-alphanumeric runs; each token and
//! each of its character 3-grams (with `#` boundary padding) is hashed with
//! FNV-1a into one of `dim` signed buckets. Token weights are term frequency
//! damped by a fixed built-in frequency table, so stopwords contribute little
//! and content words dominate. The final vector is L2-normalized; empty text
//! gives the zero vector.
//!
//! FNV-1a is implemented inline rather than via `std`'s `DefaultHasher`
//! because the latter's output is not stable across releases, and embeddings
//! must be byte-identical across runs and platforms.

use super::{EmbedError, Embedder, Vector, DEFAULT_BUILTIN_DIM};

/// Relative weight of character 3-gram buckets against whole-token buckets.
const GRAM_WEIGHT: f64 = 0.5;

/// Fixed frequency table: common words and README boilerplate with rough
/// relative frequencies. Tokens outside the table get no damping.
const FREQUENCY_TABLE: &[(&str, f64)] = &[
    ("the", 1200.0),
    ("and", 700.0),
    ("a", 650.0),
    ("of", 600.0),
    ("to", 550.0),
    ("in", 450.0),
    ("is", 380.0),
    ("for", 340.0),
    ("on", 300.0),
    ("with", 280.0),
    ("that", 260.0),
    ("it", 240.0),
    ("as", 220.0),
    ("are", 200.0),
    ("this", 190.0),
    ("be", 180.0),
    ("by", 170.0),
    ("from", 160.0),
    ("or", 150.0),
    ("an", 140.0),
    ("at", 130.0),
    ("you", 120.0),
    ("can", 110.0),
    ("will", 100.0),
    ("your", 95.0),
    ("all", 90.0),
    ("has", 85.0),
    ("not", 80.0),
    ("we", 75.0),
    ("have", 70.0),
    ("use", 68.0),
    ("its", 65.0),
    ("which", 60.0),
    ("also", 58.0),
    ("more", 55.0),
    ("when", 52.0),
    ("if", 50.0),
    ("into", 48.0),
    ("their", 46.0),
    ("them", 44.0),
    ("other", 42.0),
    ("than", 40.0),
    ("then", 38.0),
    ("so", 36.0),
    ("but", 34.0),
    ("no", 32.0),
    ("any", 30.0),
    ("each", 28.0),
    ("how", 26.0),
    ("via", 24.0),
    ("using", 22.0),
    ("support", 20.0),
    ("supports", 20.0),
    ("file", 18.0),
    ("files", 18.0),
    ("code", 16.0),
    ("data", 15.0),
    ("user", 14.0),
    ("users", 14.0),
    ("application", 12.0),
    ("library", 10.0),
    ("tool", 10.0),
    ("project", 9.0),
    ("install", 8.0),
    ("run", 8.0),
    ("feature", 7.0),
    ("features", 7.0),
];

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn damping(token: &str) -> f64 {
    let freq = FREQUENCY_TABLE
        .iter()
        .find(|(word, _)| *word == token)
        .map(|(_, f)| *f)
        .unwrap_or(0.0);
    1.0 / (1.0 + (1.0 + freq).ln())
}

#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dim: usize,
}

impl HashEmbedder {
    pub fn new() -> HashEmbedder {
        HashEmbedder { dim: DEFAULT_BUILTIN_DIM }
    }

    pub fn with_dim(dim: usize) -> HashEmbedder {
        assert!(dim > 0, "embedder dimension must be positive");
        HashEmbedder { dim }
    }

    /// Add a signed hashed bucket contribution for one namespaced key.
    fn add_hashed(&self, acc: &mut [f64], namespace: &str, key: &str, weight: f64) {
        let mut bytes = Vec::with_capacity(namespace.len() + key.len());
        bytes.extend_from_slice(namespace.as_bytes());
        bytes.extend_from_slice(key.as_bytes());
        let hash = fnv1a(&bytes);
        let bucket = (hash % self.dim as u64) as usize;
        let sign = if hash >> 63 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign * weight;
    }

    fn add_token(&self, acc: &mut [f64], token: &str, weight: f64) {
        self.add_hashed(acc, "t:", token, weight);
        let padded: Vec<char> = std::iter::once('#')
            .chain(token.chars())
            .chain(std::iter::once('#'))
            .collect();
        for gram in padded.windows(3) {
            let gram: String = gram.iter().collect();
            self.add_hashed(acc, "g:", &gram, weight * GRAM_WEIGHT);
        }
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self::new()
    }
}

impl Embedder for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_sentence(&self, text: &str) -> Result<Vector, EmbedError> {
        let mut acc = vec![0.0; self.dim];
        for token in tokenize(text) {
            let weight = damping(&token);
            self.add_token(&mut acc, &token, weight);
        }
        let mut vector = Vector::new(acc);
        vector.l2_normalize();
        Ok(vector)
    }

    fn embed_tokens(&self, text: &str) -> Result<Vec<(String, Vector)>, EmbedError> {
        tokenize(text)
            .into_iter()
            .map(|token| {
                let mut acc = vec![0.0; self.dim];
                self.add_token(&mut acc, &token, 1.0);
                let mut vector = Vector::new(acc);
                vector.l2_normalize();
                Ok((token, vector))
            })
            .collect()
    }
}
