//! Transport layer for the GitHub REST client: live HTTP or recorded
//! fixtures.
//!
//! Fixture format: a directory of JSON files, one per request. The request
//! path (e.g. `repos/octocat/hello` or `repositories?since=60`) maps to a
//! file name by replacing every character outside `[A-Za-z0-9._-]` with `_`,
//! plus a `.json` suffix. Each file holds the recorded response:
//!
//! ```json
//! {"status": 200, "headers": {"x-ratelimit-remaining": "42"}, "body": {...}}
//! ```

use super::IngestError;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

/// A recorded or live HTTP response, headers lowercased.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub headers: BTreeMap<String, String>,
    pub body: String,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(&name.to_ascii_lowercase()).map(String::as_str)
    }
}

/// Issues GET requests against the GitHub REST surface. `path` is relative
/// to the API root, without a leading slash.
pub trait Transport: Send + Sync {
    fn get(&self, path: &str) -> Result<HttpResponse, IngestError>;
}

const DEFAULT_BASE_URL: &str = "https://api.github.com";

/// Live transport over reqwest. Sends the token (if any) as a bearer
/// `Authorization` header; GitHub works unauthenticated but rate-limits hard.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    base_url: String,
    token: Option<String>,
}

impl HttpTransport {
    pub fn new(token: Option<String>) -> Result<HttpTransport, IngestError> {
        Self::with_base_url(DEFAULT_BASE_URL, token)
    }

    pub fn with_base_url(base_url: &str, token: Option<String>) -> Result<HttpTransport, IngestError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .user_agent(concat!("featex/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| IngestError::Transport { status: None, message: e.to_string() })?;
        Ok(HttpTransport {
            client,
            base_url: base_url.trim_end_matches('/').to_string(),
            token,
        })
    }
}

impl Transport for HttpTransport {
    fn get(&self, path: &str) -> Result<HttpResponse, IngestError> {
        let url = format!("{}/{}", self.base_url, path);
        let mut request = self
            .client
            .get(&url)
            .header("Accept", "application/vnd.github+json");
        if let Some(token) = &self.token {
            request = request.bearer_auth(token);
        }
        let response = request
            .send()
            .map_err(|e| IngestError::Transport { status: None, message: e.to_string() })?;
        let status = response.status().as_u16();
        let headers = response
            .headers()
            .iter()
            .filter_map(|(k, v)| {
                v.to_str().ok().map(|v| (k.as_str().to_ascii_lowercase(), v.to_string()))
            })
            .collect();
        let body = response
            .text()
            .map_err(|e| IngestError::Transport { status: Some(status), message: e.to_string() })?;
        Ok(HttpResponse { status, headers, body })
    }
}

#[derive(Deserialize)]
struct RecordedResponse {
    status: u16,
    #[serde(default)]
    headers: BTreeMap<String, String>,
    body: serde_json::Value,
}

/// Replays recorded responses from a fixture directory.
pub struct FixtureTransport {
    dir: PathBuf,
}

impl FixtureTransport {
    pub fn new(dir: impl Into<PathBuf>) -> FixtureTransport {
        FixtureTransport { dir: dir.into() }
    }

    /// File name for a request path (see module docs).
    pub fn fixture_key(path: &str) -> String {
        let sanitized: String = path
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
            .collect();
        format!("{sanitized}.json")
    }

    fn fixture_path(&self, path: &str) -> PathBuf {
        self.dir.join(Self::fixture_key(path))
    }
}

impl Transport for FixtureTransport {
    fn get(&self, path: &str) -> Result<HttpResponse, IngestError> {
        let file = self.fixture_path(path);
        let raw = std::fs::read_to_string(&file).map_err(|e| IngestError::Transport {
            status: None,
            message: format!("no fixture {} for `{path}`: {e}", file.display()),
        })?;
        let recorded: RecordedResponse = serde_json::from_str(&raw).map_err(|e| {
            IngestError::Format(format!("fixture {}: {e}", file.display()))
        })?;
        let headers = recorded
            .headers
            .into_iter()
            .map(|(k, v)| (k.to_ascii_lowercase(), v))
            .collect();
        let body = match recorded.body {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        };
        Ok(HttpResponse { status: recorded.status, headers, body })
    }
}
