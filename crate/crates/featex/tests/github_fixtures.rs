//! Recorded-fixture tests for the GitHub client: no network involved.

use featex::corpus::License;
use featex::ingest::{ClientConfig, FixtureTransport, GithubClient, IngestError};
use std::path::PathBuf;
use std::sync::Arc;

fn fixture_client() -> GithubClient {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/github");
    GithubClient::with_transport(
        Arc::new(FixtureTransport::new(dir)),
        ClientConfig { max_retries: 1, max_concurrency: 2 },
    )
}

#[test]
fn mit_repo_metadata_maps_to_mit() {
    let client = fixture_client();
    let meta = client.fetch_repo_metadata("acme", "trader").unwrap();
    assert_eq!(meta.repo_id, "acme/trader");
    assert_eq!(meta.license_spdx, "MIT");
    assert_eq!(meta.license(), License::Mit);
    assert_eq!(meta.default_branch, "main");
    assert!(featex::ingest::license_permitted(&meta));
}

#[test]
fn gpl_repo_is_not_permitted() {
    let client = fixture_client();
    let meta = client.fetch_repo_metadata("gpl", "viewer").unwrap();
    assert_eq!(meta.license(), License::Other);
    assert!(!featex::ingest::license_permitted(&meta));
}

#[test]
fn readme_decodes_multiline_base64() {
    let client = fixture_client();
    let text = client.fetch_readme("acme", "trader").unwrap();
    assert!(text.starts_with("# Trader demo\n"), "got: {text:?}");
    assert!(text.contains("- **login** for users\n"));
}

#[test]
fn empty_readme_content_is_empty_string() {
    let client = fixture_client();
    assert_eq!(client.fetch_readme("plain", "empty").unwrap(), "");
}

#[test]
fn invalid_base64_is_format_error() {
    let client = fixture_client();
    assert!(matches!(
        client.fetch_readme("oops", "bad64"),
        Err(IngestError::Format(_))
    ));
}

#[test]
fn invalid_utf8_bytes_become_replacement_chars() {
    let client = fixture_client();
    let text = client.fetch_readme("mojibake", "mixed").unwrap();
    assert_eq!(text, "\u{FFFD}\u{FFFD}hi");
}

#[test]
fn missing_repo_is_not_found() {
    let client = fixture_client();
    assert!(matches!(
        client.fetch_repo_metadata("ghost", "missing"),
        Err(IngestError::NotFound(_))
    ));
}

#[test]
fn exhausted_rate_limit_surfaces_reset() {
    let client = fixture_client();
    match client.fetch_repo_metadata("limited", "busy") {
        Err(IngestError::RateLimited { reset_epoch_secs }) => assert_eq!(reset_epoch_secs, 0),
        other => panic!("expected RateLimited, got {other:?}"),
    }
}
