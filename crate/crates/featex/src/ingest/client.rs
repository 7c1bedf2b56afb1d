//! GitHub REST client: repository metadata, README extraction, seeded
//! sampling, and bounded-parallel bulk fetching behind a shared rate-limit
//! gate.

use super::transport::{HttpResponse, Transport};
use super::{IngestError, RepoMeta};
use base64::Engine;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Copy)]
pub struct ClientConfig {
    /// Retries after a retryable failure (rate limit, 5xx); the total attempt
    /// count is `1 + max_retries`.
    pub max_retries: u32,
    /// Upper bound on concurrent requests in [`GithubClient::fetch_many`].
    pub max_concurrency: usize,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig { max_retries: 2, max_concurrency: 4 }
    }
}

/// Shared gate that delays requests until a known rate-limit reset passes.
struct RateLimitGate {
    reset_epoch_secs: Mutex<Option<u64>>,
}

impl RateLimitGate {
    fn new() -> RateLimitGate {
        RateLimitGate { reset_epoch_secs: Mutex::new(None) }
    }

    fn notify(&self, reset_epoch_secs: u64) {
        let mut guard = self.reset_epoch_secs.lock().unwrap();
        *guard = Some(guard.map_or(reset_epoch_secs, |r| r.max(reset_epoch_secs)));
    }

    fn wait(&self) {
        let reset = { self.reset_epoch_secs.lock().unwrap().take() };
        if let Some(reset) = reset {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            if reset > now {
                std::thread::sleep(std::time::Duration::from_secs(reset - now));
            }
        }
    }
}

#[derive(Deserialize)]
struct RepoBody {
    full_name: Option<String>,
    license: Option<LicenseBody>,
    default_branch: Option<String>,
}

#[derive(Deserialize)]
struct LicenseBody {
    spdx_id: Option<String>,
}

#[derive(Deserialize)]
struct ReadmeBody {
    content: Option<String>,
    encoding: Option<String>,
    path: Option<String>,
}

#[derive(Deserialize)]
struct ListedRepo {
    full_name: String,
}

pub struct GithubClient {
    transport: Arc<dyn Transport>,
    config: ClientConfig,
    gate: RateLimitGate,
}

impl GithubClient {
    pub fn with_transport(transport: Arc<dyn Transport>, config: ClientConfig) -> GithubClient {
        GithubClient { transport, config, gate: RateLimitGate::new() }
    }

    /// Live client against api.github.com; `token` comes from GITHUB_TOKEN.
    pub fn live(token: Option<String>) -> Result<GithubClient, IngestError> {
        let transport = super::transport::HttpTransport::new(token)?;
        Ok(GithubClient::with_transport(Arc::new(transport), ClientConfig::default()))
    }

    fn classify(response: HttpResponse, path: &str) -> Result<HttpResponse, IngestError> {
        match response.status {
            200..=299 => Ok(response),
            404 => Err(IngestError::NotFound(path.to_string())),
            403 | 429 if response.header("x-ratelimit-remaining") == Some("0") => {
                let reset_epoch_secs = response
                    .header("x-ratelimit-reset")
                    .and_then(|v| v.parse().ok())
                    .unwrap_or(0);
                Err(IngestError::RateLimited { reset_epoch_secs })
            }
            status => Err(IngestError::Transport {
                status: Some(status),
                message: response.body.chars().take(200).collect(),
            }),
        }
    }

    /// GET with rate-limit handling; retries rate limits and 5xx up to the
    /// configured limit, honoring the reset gate before each attempt.
    fn request(&self, path: &str) -> Result<HttpResponse, IngestError> {
        let mut last_err = None;
        for _attempt in 0..=self.config.max_retries {
            self.gate.wait();
            match Self::classify(self.transport.get(path)?, path) {
                Ok(response) => return Ok(response),
                Err(IngestError::RateLimited { reset_epoch_secs }) => {
                    self.gate.notify(reset_epoch_secs);
                    last_err = Some(IngestError::RateLimited { reset_epoch_secs });
                }
                Err(IngestError::Transport { status: Some(s), message }) if s >= 500 => {
                    last_err = Some(IngestError::Transport { status: Some(s), message });
                }
                Err(other) => return Err(other),
            }
        }
        Err(last_err.unwrap_or(IngestError::Transport {
            status: None,
            message: "retries exhausted".into(),
        }))
    }

    /// Repository metadata from `repos/{owner}/{name}`.
    pub fn fetch_repo_metadata(&self, owner: &str, name: &str) -> Result<RepoMeta, IngestError> {
        let path = format!("repos/{owner}/{name}");
        let response = self.request(&path)?;
        let body: RepoBody = serde_json::from_str(&response.body)
            .map_err(|e| IngestError::Format(format!("{path}: {e}")))?;
        Ok(RepoMeta {
            repo_id: body.full_name.unwrap_or_else(|| format!("{owner}/{name}")),
            license_spdx: body
                .license
                .and_then(|l| l.spdx_id)
                .unwrap_or_default(),
            default_branch: body.default_branch.unwrap_or_else(|| "main".into()),
            readme_path: "README.md".into(),
        })
    }

    /// README markdown from `repos/{owner}/{name}/readme`, decoded from the
    /// API's base64 payload; invalid UTF-8 is replaced with U+FFFD.
    pub fn fetch_readme(&self, owner: &str, name: &str) -> Result<String, IngestError> {
        let path = format!("repos/{owner}/{name}/readme");
        let response = self.request(&path)?;
        let body: ReadmeBody = serde_json::from_str(&response.body)
            .map_err(|e| IngestError::Format(format!("{path}: {e}")))?;
        let content = body
            .content
            .ok_or_else(|| IngestError::Format(format!("{path}: missing content field")))?;
        let _ = body.path;
        match body.encoding.as_deref() {
            Some("base64") | None => {
                let stripped: String = content.chars().filter(|c| !c.is_whitespace()).collect();
                let bytes = base64::engine::general_purpose::STANDARD
                    .decode(stripped)
                    .map_err(|e| IngestError::Format(format!("{path}: invalid base64: {e}")))?;
                Ok(String::from_utf8_lossy(&bytes).into_owned())
            }
            Some("none") => Ok(content),
            Some(other) => Err(IngestError::Format(format!("{path}: unknown encoding `{other}`"))),
        }
    }

    /// Fetch metadata + README for many repos with at most
    /// `max_concurrency` requests in flight, returning results sorted by
    /// repo_id so the merge order never depends on thread scheduling.
    pub fn fetch_many(
        &self,
        repos: &[(String, String)],
    ) -> Vec<(String, Result<(RepoMeta, String), IngestError>)> {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<(String, Result<(RepoMeta, String), IngestError>)>>> =
            repos.iter().map(|_| Mutex::new(None)).collect();
        let workers = self.config.max_concurrency.max(1).min(repos.len().max(1));
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::SeqCst);
                    if idx >= repos.len() {
                        break;
                    }
                    let (owner, name) = &repos[idx];
                    let repo_id = format!("{owner}/{name}");
                    let result = self
                        .fetch_repo_metadata(owner, name)
                        .and_then(|meta| self.fetch_readme(owner, name).map(|text| (meta, text)));
                    *slots[idx].lock().unwrap() = Some((repo_id, result));
                });
            }
        });
        let mut out: Vec<_> = slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap().expect("worker filled slot"))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Sample `count` distinct public repositories via the paginated
    /// `repositories?since=N` listing, with seeded offsets so a run is
    /// reproducible against fixtures.
    pub fn sample_repositories(
        &self,
        count: usize,
        seed: u64,
    ) -> Result<Vec<(String, String)>, IngestError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut attempts = 0usize;
        while out.len() < count && attempts < 50 {
            attempts += 1;
            let since: u64 = rng.random_range(0..500_000_000);
            let path = format!("repositories?since={since}");
            let response = self.request(&path)?;
            let listed: Vec<ListedRepo> = serde_json::from_str(&response.body)
                .map_err(|e| IngestError::Format(format!("{path}: {e}")))?;
            for repo in listed {
                if out.len() >= count {
                    break;
                }
                if let Some((owner, name)) = repo.full_name.split_once('/') {
                    if seen.insert(repo.full_name.clone()) {
                        out.push((owner.to_string(), name.to_string()));
                    }
                }
            }
        }
        if out.len() < count {
            return Err(IngestError::Format(format!(
                "sampled only {} of {count} requested repositories",
                out.len()
            )));
        }
        Ok(out)
    }
}
