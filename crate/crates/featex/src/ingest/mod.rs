//! GitHub REST ingestion: sample public repositories, keep permissibly
//! licensed ones, and extract README text plus metadata.
//!
//! All network traffic goes through the [`Transport`] trait so tests replay
//! recorded fixtures; live HTTP is opt-in. Raw README files are never stored
//! — only the extracted text and license metadata move on into the corpus.

mod client;
mod transport;

pub use client::{ClientConfig, GithubClient};
pub use transport::{FixtureTransport, HttpResponse, HttpTransport, Transport};

use crate::corpus::{CorpusRecord, License};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("rate limited until epoch {reset_epoch_secs}")]
    RateLimited { reset_epoch_secs: u64 },
    #[error("transport error{}: {message}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Transport { status: Option<u16>, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
}

/// Repository metadata extracted from the repository endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepoMeta {
    /// `owner/name`.
    pub repo_id: String,
    pub license_spdx: String,
    pub default_branch: String,
    pub readme_path: String,
}

impl RepoMeta {
    pub fn license(&self) -> License {
        map_spdx(&self.license_spdx)
    }
}

/// Map an SPDX identifier onto a license family: any `BSD-*` is BSD,
/// `Apache-*` is Apache, `EPL-*` is EPL, `MIT*` is MIT; everything else
/// (including missing/NOASSERTION) is Other.
pub fn map_spdx(spdx: &str) -> License {
    let lower = spdx.trim().to_ascii_lowercase();
    if lower.starts_with("mit") {
        License::Mit
    } else if lower.starts_with("apache") {
        License::Apache
    } else if lower.starts_with("bsd") {
        License::Bsd
    } else if lower.starts_with("epl") {
        License::Epl
    } else {
        License::Other
    }
}

/// True iff the repository's license family is in the permitted set
/// {MIT, Apache, BSD, EPL}.
pub fn license_permitted(meta: &RepoMeta) -> bool {
    meta.license() != License::Other
}

/// One row of the license table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LicenseRow {
    pub license: License,
    pub count: usize,
    pub percent: f64,
}

/// Counts and percentages by license, sorted by count descending (license
/// order breaks ties). Percentages are rounded to two decimals.
pub fn license_distribution(records: &[CorpusRecord]) -> Vec<LicenseRow> {
    if records.is_empty() {
        return Vec::new();
    }
    let total = records.len() as f64;
    let mut rows: Vec<LicenseRow> = License::ALL
        .iter()
        .filter_map(|&license| {
            let count = records.iter().filter(|r| r.license == license).count();
            (count > 0).then(|| LicenseRow {
                license,
                count,
                percent: (100.0 * count as f64 / total * 100.0).round() / 100.0,
            })
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.license.cmp(&b.license)));
    rows
}

/// Mean, max, and histogram of extractive feature counts per record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureCountStats {
    pub mean: f64,
    pub max: usize,
    pub histogram: std::collections::BTreeMap<usize, usize>,
}

pub fn feature_count_stats(records: &[CorpusRecord]) -> Result<FeatureCountStats, IngestError> {
    if records.is_empty() {
        return Err(IngestError::EmptyInput("no records for feature stats".into()));
    }
    let mut histogram = std::collections::BTreeMap::new();
    let mut sum = 0usize;
    let mut max = 0usize;
    for record in records {
        let n = record.extractive.len();
        *histogram.entry(n).or_insert(0) += 1;
        sum += n;
        max = max.max(n);
    }
    Ok(FeatureCountStats { mean: sum as f64 / records.len() as f64, max, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FeatureList;

    fn record_with(license: License, n_features: usize) -> CorpusRecord {
        static COUNTER: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);
        let id = COUNTER.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        CorpusRecord {
            repo_id: format!("o/r{id}"),
            url: String::new(),
            license,
            readme_text: "t".into(),
            extractive: FeatureList::new((0..n_features).map(|i| format!("feat {i}"))),
            abstractive: FeatureList::default(),
        }
    }

    fn meta(spdx: &str) -> RepoMeta {
        RepoMeta {
            repo_id: "o/r".into(),
            license_spdx: spdx.into(),
            default_branch: "main".into(),
            readme_path: "README.md".into(),
        }
    }

    #[test]
    fn spdx_family_mapping() {
        assert_eq!(map_spdx("MIT"), License::Mit);
        assert_eq!(map_spdx("Apache-2.0"), License::Apache);
        assert_eq!(map_spdx("BSD-3-Clause"), License::Bsd);
        assert_eq!(map_spdx("BSD-2-Clause"), License::Bsd);
        assert_eq!(map_spdx("EPL-2.0"), License::Epl);
        assert_eq!(map_spdx("GPL-3.0"), License::Other);
        assert_eq!(map_spdx("NOASSERTION"), License::Other);
        assert_eq!(map_spdx(""), License::Other);
    }

    #[test]
    fn permitted_set() {
        assert!(license_permitted(&meta("MIT")));
        assert!(license_permitted(&meta("BSD-3-Clause")));
        assert!(license_permitted(&meta("EPL-1.0")));
        assert!(!license_permitted(&meta("GPL-3.0")));
    }

    #[test]
    fn distribution_on_reference_counts() {
        // Synthetic corpus shaped like the published license table:
        // 1436 MIT, 334 Apache, 325 BSD, 6 EPL.
        let mut records = Vec::new();
        for (license, count) in [
            (License::Mit, 1436),
            (License::Apache, 334),
            (License::Bsd, 325),
            (License::Epl, 6),
        ] {
            records.extend((0..count).map(|_| record_with(license, 2)));
        }
        let rows = license_distribution(&records);
        assert_eq!(rows[0].license, License::Mit);
        assert_eq!(rows[0].count, 1436);
        assert!((rows[0].percent - 68.34).abs() <= 0.01 + 1e-9, "got {}", rows[0].percent);
        assert!((rows[1].percent - 15.90).abs() <= 0.01 + 1e-9);
        assert!((rows[2].percent - 15.47).abs() <= 0.01 + 1e-9);
        assert!((rows[3].percent - 0.29).abs() <= 0.01 + 1e-9);
        let percent_sum: f64 = rows.iter().map(|r| r.percent).sum();
        assert!((percent_sum - 100.0).abs() <= 0.02, "sum {percent_sum}");
    }

    #[test]
    fn distribution_single_record() {
        let rows = license_distribution(&[record_with(License::Mit, 2)]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 1);
        assert_eq!(rows[0].percent, 100.00);
    }

    #[test]
    fn distribution_empty_is_empty() {
        assert!(license_distribution(&[]).is_empty());
    }

    #[test]
    fn feature_stats_mean_and_max() {
        let records = vec![record_with(License::Mit, 2), record_with(License::Mit, 8)];
        let stats = feature_count_stats(&records).unwrap();
        assert_eq!(stats.mean, 5.0);
        assert_eq!(stats.max, 8);

        let with_big = vec![record_with(License::Mit, 3), record_with(License::Mit, 34)];
        assert_eq!(feature_count_stats(&with_big).unwrap().max, 34);
    }

    #[test]
    fn feature_stats_histogram() {
        let records = vec![
            record_with(License::Mit, 3),
            record_with(License::Mit, 3),
            record_with(License::Mit, 3),
        ];
        let stats = feature_count_stats(&records).unwrap();
        assert_eq!(stats.histogram.get(&3), Some(&3));
        assert_eq!(stats.histogram.len(), 1);
    }

    #[test]
    fn feature_stats_empty_is_error() {
        assert!(feature_count_stats(&[]).is_err());
    }
}
