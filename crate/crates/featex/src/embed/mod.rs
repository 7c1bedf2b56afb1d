//! Pluggable text embedding: sentence vectors for alignment and token
//! vectors for semantic scoring.
//!
//! Two backends share the [`Embedder`] trait: the builtin hashed embedder
//! (deterministic, dependency-free, used by all reproducible tests) and an
//! HTTP adapter for plugging in an external transformer service.

mod builtin;
mod http;

pub use builtin::HashEmbedder;
pub use http::HttpEmbedder;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Builtin embedder dimension unless configured otherwise.
pub const DEFAULT_BUILTIN_DIM: usize = 512;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("vector dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("embedding service error (status {status}): {message}")]
    Service { status: u16, message: String },
    #[error("embedding transport failure: {0}")]
    Transport(String),
    #[error("malformed embedding response: {0}")]
    Malformed(String),
    #[error("invalid embedder spec: {0}")]
    Spec(String),
}

/// A fixed-dimension real vector with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    components: Vec<f64>,
}

impl Vector {
    pub fn new(components: Vec<f64>) -> Vector {
        Vector { components }
    }

    pub fn zeros(dim: usize) -> Vector {
        Vector { components: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    pub fn l2_norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Scale to unit length; a zero vector stays zero.
    pub fn l2_normalize(&mut self) {
        let norm = self.l2_norm();
        if norm > 0.0 {
            for c in &mut self.components {
                *c /= norm;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| *c == 0.0)
    }
}

/// Cosine similarity in [-1, 1]; 0 if either vector has zero norm, so empty
/// strings never match anything.
///
/// Values within 1e-12 of ±1 are snapped to exactly ±1: identical texts embed
/// to identical vectors and must hit similarity 1.0 even at threshold 1.0,
/// which a raw dot/norm ratio does not guarantee in floating point.
pub fn cosine(u: &Vector, v: &Vector) -> Result<f64, EmbedError> {
    if u.dim() != v.dim() {
        return Err(EmbedError::DimMismatch { left: u.dim(), right: v.dim() });
    }
    let dot: f64 = u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a * b).sum();
    let norm_u = u.l2_norm();
    let norm_v = v.l2_norm();
    if norm_u == 0.0 || norm_v == 0.0 {
        return Ok(0.0);
    }
    let mut sim = dot / (norm_u * norm_v);
    if (1.0 - sim).abs() <= 1e-12 {
        sim = 1.0;
    } else if (-1.0 - sim).abs() <= 1e-12 {
        sim = -1.0;
    }
    Ok(sim.clamp(-1.0, 1.0))
}

/// Text-embedding backend. Instances are immutable after construction and
/// safe to call concurrently; embedding is a pure function of (spec, text).
pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;

    /// One vector per input text. Empty text embeds to the zero vector.
    fn embed_sentence(&self, text: &str) -> Result<Vector, EmbedError>;

    /// One `(token, vector)` pair per token of the input.
    fn embed_tokens(&self, text: &str) -> Result<Vec<(String, Vector)>, EmbedError>;

    /// Batch sentence embedding; backends with wire overhead override this.
    fn embed_sentences(&self, texts: &[String]) -> Result<Vec<Vector>, EmbedError> {
        texts.iter().map(|t| self.embed_sentence(t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedderKind {
    BuiltinHash,
    HttpService,
}

/// Declarative embedder configuration, echoed into evaluation reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedderSpec {
    pub kind: EmbedderKind,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub endpoint: Option<String>,
}

impl EmbedderSpec {
    pub fn builtin() -> EmbedderSpec {
        EmbedderSpec { kind: EmbedderKind::BuiltinHash, dim: DEFAULT_BUILTIN_DIM, endpoint: None }
    }

    pub fn builtin_with_dim(dim: usize) -> EmbedderSpec {
        EmbedderSpec { kind: EmbedderKind::BuiltinHash, dim, endpoint: None }
    }

    pub fn http(endpoint: impl Into<String>) -> EmbedderSpec {
        EmbedderSpec { kind: EmbedderKind::HttpService, dim: 0, endpoint: Some(endpoint.into()) }
    }

    pub fn build(&self) -> Result<Box<dyn Embedder>, EmbedError> {
        match self.kind {
            EmbedderKind::BuiltinHash => {
                if self.dim == 0 {
                    return Err(EmbedError::Spec("builtin embedder needs dim > 0".into()));
                }
                Ok(Box::new(HashEmbedder::with_dim(self.dim)))
            }
            EmbedderKind::HttpService => {
                let endpoint = self
                    .endpoint
                    .as_deref()
                    .ok_or_else(|| EmbedError::Spec("http-service embedder needs an endpoint".into()))?;
                Ok(Box::new(HttpEmbedder::new(endpoint)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_basics() {
        let e1 = Vector::new(vec![1.0, 0.0]);
        let e2 = Vector::new(vec![0.0, 1.0]);
        assert_eq!(cosine(&e1, &e1).unwrap(), 1.0);
        assert_eq!(cosine(&e1, &e2).unwrap(), 0.0);
    }

    #[test]
    fn cosine_diagonal() {
        let u = Vector::new(vec![1.0, 1.0]);
        let v = Vector::new(vec![1.0, 0.0]);
        let sim = cosine(&u, &v).unwrap();
        assert!((sim - 0.70710678).abs() < 1e-8, "got {sim}");
    }

    #[test]
    fn cosine_zero_norm_is_zero() {
        let z = Vector::zeros(3);
        let u = Vector::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(cosine(&z, &u).unwrap(), 0.0);
        assert_eq!(cosine(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn cosine_dim_mismatch_is_error() {
        let u = Vector::zeros(2);
        let v = Vector::zeros(3);
        assert!(matches!(cosine(&u, &v), Err(EmbedError::DimMismatch { left: 2, right: 3 })));
    }

    #[test]
    fn spec_validation() {
        assert!(EmbedderSpec::builtin().build().is_ok());
        let bad = EmbedderSpec { kind: EmbedderKind::HttpService, dim: 0, endpoint: None };
        assert!(bad.build().is_err());
    }
}
