//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test -p featex-cli --test acceptance -- --nocapture`.

use featex::agree::{cohen_kappa, RatingSheet};
use featex::align::{
    match_many_to_one, match_one_to_one, run_scheme, scheme_scores, weight_many_to_one,
    MatchScheme, SimilarityGraph,
};
use featex::corpus::{
    load_corpus, parse_feature_list, render_numbered, save_corpus, split_corpus, CorpusRecord,
    FeatureList, License, Prediction, SplitSpec,
};
use featex::embed::{cosine, Vector};
use featex::eval::{run_evaluation, EvalConfig};
use featex::ingest::{
    feature_count_stats, license_distribution, ClientConfig, FixtureTransport, GithubClient,
    IngestError,
};
use featex::textmetrics::{rouge_l, rouge_n};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

// ---------------------------------------------------------------------------
// Random graphs and the independent matching oracle.
// ---------------------------------------------------------------------------

struct RandomGraph {
    n_gen: usize,
    n_gold: usize,
    scores: Vec<(usize, usize, f64)>,
}

fn random_graphs(count: usize, seed: u64) -> Vec<RandomGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n_gen = rng.random_range(1..=8);
            let n_gold = rng.random_range(1..=8);
            let mut scores = Vec::new();
            for gen in 0..n_gen {
                for gold in 0..n_gold {
                    if rng.random_bool(0.4) {
                        scores.push((gen, gold, rng.random_range(0.0..=1.0)));
                    }
                }
            }
            RandomGraph { n_gen, n_gold, scores }
        })
        .collect()
}

/// Exhaustive maximum matching by memoized search over every assignment of
/// gen nodes to unused golds. Independent of the library's algorithm.
fn oracle_max_matching(n_gen: usize, n_gold: usize, edges: &[(usize, usize)]) -> usize {
    let mut adjacency = vec![0u32; n_gen];
    for &(gen, gold) in edges {
        adjacency[gen] |= 1 << gold;
    }
    fn search(i: usize, used: u32, adjacency: &[u32], memo: &mut [Vec<Option<usize>>]) -> usize {
        if i == adjacency.len() {
            return 0;
        }
        if let Some(hit) = memo[i][used as usize] {
            return hit;
        }
        let mut best = search(i + 1, used, adjacency, memo);
        let mut open = adjacency[i] & !used;
        while open != 0 {
            let gold = open.trailing_zeros();
            open &= open - 1;
            best = best.max(1 + search(i + 1, used | (1 << gold), adjacency, memo));
        }
        memo[i][used as usize] = Some(best);
        best
    }
    let mut memo = vec![vec![None; 1 << n_gold]; n_gen];
    search(0, 0, &mut adjacency.clone(), &mut memo)
}

#[test]
fn criterion_1_matching_oracle() {
    let start = Instant::now();
    let graphs = random_graphs(1000, 0xFEA7);
    for (idx, g) in graphs.iter().enumerate() {
        let graph = SimilarityGraph::from_scores(g.n_gen, g.n_gold, &g.scores, 0.3)
            .expect("valid graph");
        let edges: Vec<(usize, usize)> =
            graph.edges().iter().map(|e| (e.gen, e.gold)).collect();
        let expected = oracle_max_matching(g.n_gen, g.n_gold, &edges);
        let got = match_one_to_one(&graph).pairs.len();
        assert_eq!(got, expected, "graph {idx}: cardinality {got} != oracle {expected}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "oracle suite took {elapsed:?}");
    println!("PASS: criterion 1 — one-to-one cardinality equals brute force on 1000 graphs ({elapsed:?})");
}

#[test]
fn criterion_2_scheme_invariants() {
    let graphs = random_graphs(1000, 0xFEA7);
    for (idx, g) in graphs.iter().enumerate() {
        let mut credits_by_scheme = vec![Vec::new(); 3];
        for &threshold in &[0.3, 0.4, 0.5] {
            let graph = SimilarityGraph::from_scores(g.n_gen, g.n_gold, &g.scores, threshold)
                .expect("valid graph");
            let one = match_one_to_one(&graph);
            let many = match_many_to_one(&graph);
            let weighted = weight_many_to_one(&many).expect("many-to-one input");

            assert!(one.pairs.len() <= many.pairs.len(), "graph {idx}: |#| > |*|");

            let mut per_gen = vec![0.0f64; g.n_gen];
            for pair in &weighted.pairs {
                per_gen[pair.gen] += pair.weight;
            }
            for (gen, sum) in per_gen.iter().enumerate() {
                assert!(
                    *sum == 0.0 || (sum - 1.0).abs() <= 1e-12,
                    "graph {idx}: gen {gen} weight sum {sum}"
                );
            }

            let one_scores = scheme_scores(&one, g.n_gen, g.n_gold);
            let many_scores = scheme_scores(&many, g.n_gen, g.n_gold);
            let weighted_scores = scheme_scores(&weighted, g.n_gen, g.n_gold);
            assert_eq!(
                weighted_scores.recall, many_scores.recall,
                "graph {idx}: R+ != R* at {threshold}"
            );
            assert!(
                weighted_scores.precision <= many_scores.precision + 1e-12,
                "graph {idx}: P+ {} > P* {}",
                weighted_scores.precision,
                many_scores.precision
            );
            assert!(many_scores.precision <= 1.0, "graph {idx}: P* > 1");
            assert!(one_scores.precision <= 1.0 && one_scores.recall <= 1.0);

            for (slot, matching) in [(0, &one), (1, &many), (2, &weighted)] {
                credits_by_scheme[slot].push(matching.pairs.iter().map(|p| p.weight).sum::<f64>());
            }
        }
        for credits in &credits_by_scheme {
            assert!(
                credits[0] >= credits[1] - 1e-12 && credits[1] >= credits[2] - 1e-12,
                "graph {idx}: credit not monotone over thresholds: {credits:?}"
            );
        }
    }
    println!("PASS: criterion 2 — scheme invariants hold on 1000 graphs at thresholds 0.3/0.4/0.5");
}

#[test]
fn criterion_3_weight_rule() {
    // One generated feature absorbing exactly 3 golds.
    let graph = SimilarityGraph::from_scores(
        2,
        3,
        &[(0, 0, 0.9), (0, 1, 0.8), (0, 2, 0.7)],
        0.3,
    )
    .unwrap();
    let weighted = weight_many_to_one(&match_many_to_one(&graph)).unwrap();
    assert_eq!(weighted.pairs.len(), 3);
    for pair in &weighted.pairs {
        assert_eq!(pair.gen, 0);
        assert!(
            (pair.weight - 1.0 / 3.0).abs() <= 1e-12,
            "weight {} != 1/3",
            pair.weight
        );
    }
    println!("PASS: criterion 3 — absorbed edges carry weight 1/3 within 1e-12");
}

#[test]
fn criterion_4_metric_hand_values() {
    let r1 = rouge_n("the cat sat", "the cat slept", 1);
    assert!((r1.f1 - 2.0 / 3.0).abs() <= 1e-9, "rouge1 F1 {}", r1.f1);

    let rl = rouge_l("a b c d", "a c b d");
    assert!((rl.precision - 0.75).abs() <= 1e-9 && (rl.recall - 0.75).abs() <= 1e-9);

    let sheet = |id: &str, ratings: &[u8]| {
        let mut s = RatingSheet::new(id);
        for (i, &r) in ratings.iter().enumerate() {
            s.insert(format!("r{i}"), r).unwrap();
        }
        s
    };
    let identical = cohen_kappa(&sheet("a", &[1, 2, 3, 4]), &sheet("b", &[1, 2, 3, 4])).unwrap();
    assert!((identical - 1.0).abs() <= 1e-12, "kappa identical {identical}");
    let chance = cohen_kappa(&sheet("a", &[1, 2, 1, 2]), &sheet("b", &[1, 1, 2, 2])).unwrap();
    assert!(chance.abs() <= 1e-12, "kappa chance {chance}");
    let opposed = cohen_kappa(&sheet("a", &[1, 1, 2, 2]), &sheet("b", &[2, 2, 1, 1])).unwrap();
    assert!((opposed + 1.0).abs() <= 1e-12, "kappa opposed {opposed}");

    let diag = cosine(&Vector::new(vec![1.0, 1.0]), &Vector::new(vec![1.0, 0.0])).unwrap();
    assert!((diag - 0.70710678).abs() <= 1e-8, "cosine {diag}");

    println!("PASS: criterion 4 — ROUGE, kappa, and cosine hand values match");
}

fn synthetic_record(repo_id: String, license: License, n_features: usize) -> CorpusRecord {
    CorpusRecord {
        url: format!("https://github.com/{repo_id}"),
        repo_id,
        license,
        readme_text: "text".into(),
        extractive: FeatureList::new((0..n_features).map(|i| format!("feature number {i}"))),
        abstractive: FeatureList::default(),
    }
}

#[test]
fn criterion_5_paper_statistics() {
    let mut records = Vec::new();
    let mut serial = 0usize;
    for (license, count) in [
        (License::Mit, 1436usize),
        (License::Apache, 334),
        (License::Bsd, 325),
        (License::Epl, 6),
    ] {
        for _ in 0..count {
            records.push(synthetic_record(format!("o/r{serial}"), license, 2));
            serial += 1;
        }
    }
    assert_eq!(records.len(), 2101);
    let rows = license_distribution(&records);
    assert_eq!(rows[0].license, License::Mit);
    assert_eq!(rows[0].count, 1436);
    // 0.01 tolerance from the published table; +1e-9 covers the binary
    // representation of the decimal tolerance itself.
    assert!(
        (rows[0].percent - 68.34).abs() <= 0.01 + 1e-9,
        "MIT percent {}",
        rows[0].percent
    );

    let spec = SplitSpec { train_n: 1801, val_n: 100, test_n: 200, seed: 17 };
    let split = split_corpus(records, &spec).unwrap();
    assert_eq!(
        (split.train.len(), split.val.len(), split.test.len()),
        (1801, 100, 200)
    );
    println!("PASS: criterion 5 — license table percentages and 1801/100/200 split reproduce");
}

#[test]
fn criterion_6_self_match_sanity() {
    let records = load_corpus(fixture("corpus.jsonl")).unwrap();
    let predictions: Vec<Prediction> = records
        .iter()
        .map(|r| Prediction { repo_id: r.repo_id.clone(), features: r.extractive.clone() })
        .collect();
    let config = EvalConfig {
        thresholds: vec![0.3, 0.5, 1.0],
        workers: 1,
        ..EvalConfig::default()
    };
    let report = run_evaluation(&records, &predictions, &config).unwrap();
    for threshold in &report.per_threshold {
        assert_eq!(threshold.n_skipped_empty, 0, "no record may be skipped on self-match");
        for summary in &threshold.match_scores {
            assert_eq!(
                (summary.precision, summary.recall, summary.f1),
                (1.0, 1.0, 1.0),
                "{:?} at threshold {}",
                summary.scheme,
                threshold.threshold
            );
        }
        for pair in &threshold.pair_metrics {
            let scores = pair.scores.as_ref().expect("matched pairs exist");
            for prf in [scores.rouge1, scores.rouge2, scores.rouge_l, scores.semantic] {
                assert_eq!(prf.f1, 1.0, "pair metric f1 at {}", threshold.threshold);
            }
        }
    }
    println!("PASS: criterion 6 — self-match yields 1.000 in all schemes and pair metrics up to threshold 1.0");
}

#[test]
fn criterion_7_determinism() {
    let exe = env!("CARGO_BIN_EXE_featex");
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("corpus.jsonl");
    let predictions = fixture("predictions.jsonl");
    let run = |out: &std::path::Path, workers: &str| {
        let status = std::process::Command::new(exe)
            .args([
                "eval",
                "--corpus",
                corpus.to_str().unwrap(),
                "--predictions",
                predictions.to_str().unwrap(),
                "--threshold",
                "0.3,0.4,0.5",
                "--format",
                "json",
                "--workers",
                workers,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("run featex eval");
        assert!(status.success(), "eval exited with {status}");
        std::fs::read(out).unwrap()
    };
    let first = run(&dir.path().join("a.json"), "4");
    let second = run(&dir.path().join("b.json"), "4");
    let serial = run(&dir.path().join("c.json"), "1");
    assert_eq!(first, second, "two identical runs differ");
    assert_eq!(first, serial, "worker count changed output bytes");
    let golden = std::fs::read(fixture("golden_report.json")).unwrap();
    assert_eq!(first, golden, "report differs from checked-in golden file");
    println!("PASS: criterion 7 — eval is byte-identical across runs, worker counts, and the golden file");
}

#[test]
fn criterion_8_format_round_trips() {
    // 50-record corpus: save then load is the identity.
    let mut rng = ChaCha8Rng::seed_from_u64(0x50);
    let licenses = License::ALL;
    let records: Vec<CorpusRecord> = (0..50)
        .map(|i| {
            let license = licenses[rng.random_range(0..licenses.len())];
            let n = rng.random_range(2..=6);
            let mut record = synthetic_record(format!("owner{i}/repo{i}"), license, n);
            record.readme_text = format!("readme {i} with unicode — ünïcode ✓ and \"quotes\"\n");
            record.abstractive =
                FeatureList::new((0..n).map(|j| format!("it does thing {j} of {i}")));
            record
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.jsonl");
    save_corpus(&records, &path).unwrap();
    let loaded = load_corpus(&path).unwrap();
    assert_eq!(loaded, records, "save→load is not the identity");

    // parse_feature_list ∘ numbered-render is the identity on 200 random
    // normalized feature lists.
    let mut rng = ChaCha8Rng::seed_from_u64(0x200);
    for case in 0..200 {
        let n_items = rng.random_range(1..=8);
        let items: Vec<String> = (0..n_items)
            .map(|i| {
                let words = rng.random_range(1..=5);
                let mut parts: Vec<String> = (0..words)
                    .map(|_| {
                        let len = rng.random_range(1..=8);
                        (0..len)
                            .map(|_| char::from(rng.random_range(b'a'..=b'z')))
                            .collect()
                    })
                    .collect();
                parts.push(format!("u{i}"));
                parts.join(" ")
            })
            .collect();
        let list = FeatureList::new(&items);
        assert_eq!(list.len(), n_items, "generator produced duplicates");
        let rendered = render_numbered(&list);
        let parsed = parse_feature_list(&rendered);
        assert_eq!(parsed, list, "case {case}: round trip failed for {rendered:?}");
    }
    println!("PASS: criterion 8 — corpus save→load and render→parse round trips hold");
}

#[test]
fn criterion_9_ingestion_fixtures() {
    let client = GithubClient::with_transport(
        Arc::new(FixtureTransport::new(fixture("github"))),
        ClientConfig { max_retries: 1, max_concurrency: 2 },
    );

    let meta = client.fetch_repo_metadata("acme", "trader").unwrap();
    assert_eq!(meta.license_spdx, "MIT");
    assert_eq!(meta.license(), License::Mit);
    assert!(featex::ingest::license_permitted(&meta));

    let readme = client.fetch_readme("acme", "trader").unwrap();
    assert!(readme.starts_with("# Trader demo\n"));

    assert!(matches!(
        client.fetch_repo_metadata("ghost", "missing"),
        Err(IngestError::NotFound(_))
    ));
    assert!(matches!(
        client.fetch_repo_metadata("limited", "busy"),
        Err(IngestError::RateLimited { .. })
    ));

    // Stats surface on a corpus assembled from the fixture record.
    let records = vec![CorpusRecord {
        repo_id: meta.repo_id.clone(),
        url: format!("https://github.com/{}", meta.repo_id),
        license: meta.license(),
        readme_text: readme,
        extractive: FeatureList::new(["login for users", "lookup stock quotes"]),
        abstractive: FeatureList::default(),
    }];
    assert_eq!(feature_count_stats(&records).unwrap().max, 2);

    println!("PASS: criterion 9 — recorded fixtures cover metadata, decode, 404, and rate limit without network");
}
