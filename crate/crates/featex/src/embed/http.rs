//! HTTP adapter for an external embedding service.
//!
//! Contract: `POST {endpoint}/embed` with JSON
//! `{"texts": [str], "granularity": "sentence"|"token"}`. The service answers
//! `{"vectors": [[number]]}` for sentences, or
//! `{"tokens": [[str]], "vectors": [[[number]]]}` for tokens. Any non-200
//! status is an [`EmbedError::Service`].
//!
//! Requests are batched (`batch_size` texts per call) and issued one batch at
//! a time, which bounds in-flight calls.

use super::{EmbedError, Embedder, Vector};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use std::time::Duration;

const DEFAULT_BATCH_SIZE: usize = 64;

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
    granularity: &'a str,
}

#[derive(Deserialize)]
struct SentenceResponse {
    vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct TokenResponse {
    tokens: Vec<Vec<String>>,
    vectors: Vec<Vec<Vec<f64>>>,
}

pub struct HttpEmbedder {
    client: reqwest::blocking::Client,
    endpoint: String,
    batch_size: usize,
    // Learned from the first response, then enforced on every later vector.
    dim: OnceLock<usize>,
}

impl HttpEmbedder {
    pub fn new(endpoint: &str) -> Result<HttpEmbedder, EmbedError> {
        if endpoint.is_empty() {
            return Err(EmbedError::Spec("empty embedding endpoint".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        Ok(HttpEmbedder {
            client,
            endpoint: endpoint.trim_end_matches('/').to_string(),
            batch_size: DEFAULT_BATCH_SIZE,
            dim: OnceLock::new(),
        })
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> HttpEmbedder {
        self.batch_size = batch_size.max(1);
        self
    }

    fn post(&self, texts: &[String], granularity: &str) -> Result<serde_json::Value, EmbedError> {
        let url = format!("{}/embed", self.endpoint);
        let response = self
            .client
            .post(&url)
            .json(&EmbedRequest { texts, granularity })
            .send()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response.text().map_err(|e| EmbedError::Transport(e.to_string()))?;
        if status != 200 {
            let message = body.chars().take(200).collect();
            return Err(EmbedError::Service { status, message });
        }
        serde_json::from_str(&body).map_err(|e| EmbedError::Malformed(e.to_string()))
    }

    fn check_dim(&self, vector: Vec<f64>) -> Result<Vector, EmbedError> {
        let dim = *self.dim.get_or_init(|| vector.len());
        if vector.len() != dim {
            return Err(EmbedError::Malformed(format!(
                "inconsistent vector dimension: {} vs {dim}",
                vector.len()
            )));
        }
        if vector.iter().any(|c| !c.is_finite()) {
            return Err(EmbedError::Malformed("non-finite component in vector".into()));
        }
        Ok(Vector::new(vector))
    }
}

impl Embedder for HttpEmbedder {
    fn dim(&self) -> usize {
        *self.dim.get().unwrap_or(&0)
    }

    fn embed_sentence(&self, text: &str) -> Result<Vector, EmbedError> {
        let texts = [text.to_string()];
        Ok(self.embed_sentences(&texts)?.remove(0))
    }

    fn embed_sentences(&self, texts: &[String]) -> Result<Vec<Vector>, EmbedError> {
        let mut out = Vec::with_capacity(texts.len());
        for batch in texts.chunks(self.batch_size) {
            let value = self.post(batch, "sentence")?;
            let parsed: SentenceResponse =
                serde_json::from_value(value).map_err(|e| EmbedError::Malformed(e.to_string()))?;
            if parsed.vectors.len() != batch.len() {
                return Err(EmbedError::Malformed(format!(
                    "expected {} vectors, got {}",
                    batch.len(),
                    parsed.vectors.len()
                )));
            }
            for vector in parsed.vectors {
                out.push(self.check_dim(vector)?);
            }
        }
        Ok(out)
    }

    fn embed_tokens(&self, text: &str) -> Result<Vec<(String, Vector)>, EmbedError> {
        let texts = [text.to_string()];
        let value = self.post(&texts, "token")?;
        let parsed: TokenResponse =
            serde_json::from_value(value).map_err(|e| EmbedError::Malformed(e.to_string()))?;
        if parsed.tokens.len() != 1 || parsed.vectors.len() != 1 {
            return Err(EmbedError::Malformed("expected one token row per text".into()));
        }
        let tokens = parsed.tokens.into_iter().next().unwrap();
        let vectors = parsed.vectors.into_iter().next().unwrap();
        if tokens.len() != vectors.len() {
            return Err(EmbedError::Malformed(format!(
                "token/vector count mismatch: {} vs {}",
                tokens.len(),
                vectors.len()
            )));
        }
        tokens
            .into_iter()
            .zip(vectors)
            .map(|(token, vector)| Ok((token, self.check_dim(vector)?)))
            .collect()
    }
}
