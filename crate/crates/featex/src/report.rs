//! Report rendering: markdown tables shaped like the published results
//! tables, plus CSV and JSON carrying the same values.
//!
//! The matching table's metric columns run `F1# P# R# F1* P* R* F1+ P+`
//! (recall for the weighted scheme is omitted — it equals the many-to-one
//! recall). Markdown rounds to three decimals; CSV and JSON carry full
//! precision.

use crate::align::MatchScheme;
use crate::eval::{MetricReport, SchemePairMetrics, SchemeSummary, ThresholdReport};
use crate::textmetrics::Prf;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected markdown|csv|json)")),
        }
    }
}

/// Render a report in the requested format.
pub fn render_report(report: &MetricReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
    }
}

/// Per-scheme metric column headers, in the published order.
fn scheme_columns(scheme: MatchScheme) -> Vec<String> {
    let symbol = scheme.symbol();
    match scheme {
        // Recall omitted for the weighted scheme.
        MatchScheme::WeightedManyToOne => vec![format!("F1{symbol}"), format!("P{symbol}")],
        _ => vec![format!("F1{symbol}"), format!("P{symbol}"), format!("R{symbol}")],
    }
}

fn scheme_cells(summary: &SchemeSummary) -> Vec<String> {
    let cells = vec![
        format!("{:.3}", summary.f1),
        format!("{:.3}", summary.precision),
        format!("{:.3}", summary.recall),
    ];
    match summary.scheme {
        MatchScheme::WeightedManyToOne => cells[..2].to_vec(),
        _ => cells,
    }
}

fn markdown_row(cells: &[String]) -> String {
    format!("| {} |", cells.join(" | "))
}

fn prf_cells(prf: &Prf) -> Vec<String> {
    vec![
        format!("{:.3}", prf.f1),
        format!("{:.3}", prf.precision),
        format!("{:.3}", prf.recall),
    ]
}

fn render_markdown(report: &MetricReport) -> String {
    let mut out = String::new();
    let config = &report.config;
    writeln!(out, "# Evaluation report").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "- corpus records: {}", report.n_corpus_records).unwrap();
    writeln!(out, "- prediction records: {}", report.n_prediction_records).unwrap();
    writeln!(
        out,
        "- embedder: {}",
        match config.embedder.endpoint.as_deref() {
            Some(endpoint) => format!("http-service ({endpoint})"),
            None => format!("builtin-hash (dim {})", config.embedder.dim),
        }
    )
    .unwrap();
    writeln!(out, "- gold target: {}", config.target.name()).unwrap();
    writeln!(
        out,
        "- schemes: {}",
        config.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
    )
    .unwrap();
    writeln!(out).unwrap();

    writeln!(out, "## Matching scores").unwrap();
    writeln!(out).unwrap();
    let mut header = vec!["Threshold".to_string(), "Scored".to_string(), "Skipped".to_string()];
    for &scheme in &config.schemes {
        header.extend(scheme_columns(scheme));
    }
    writeln!(out, "{}", markdown_row(&header)).unwrap();
    writeln!(out, "{}", markdown_row(&vec!["---".to_string(); header.len()])).unwrap();
    for threshold in &report.per_threshold {
        let mut cells = vec![
            format!("{}", threshold.threshold),
            threshold.n_records_scored.to_string(),
            threshold.n_skipped_empty.to_string(),
        ];
        for summary in &threshold.match_scores {
            cells.extend(scheme_cells(summary));
        }
        writeln!(out, "{}", markdown_row(&cells)).unwrap();
    }

    for &scheme in &config.schemes {
        writeln!(out).unwrap();
        writeln!(out, "## Pair metrics — {} ({})", scheme.name(), scheme.symbol()).unwrap();
        writeln!(out).unwrap();
        let mut header = vec!["Threshold".to_string(), "Pairs".to_string()];
        for group in ["ROUGE-1", "ROUGE-2", "ROUGE-L", "Semantic"] {
            for metric in ["F1", "P", "R"] {
                header.push(format!("{group} {metric}"));
            }
        }
        writeln!(out, "{}", markdown_row(&header)).unwrap();
        writeln!(out, "{}", markdown_row(&vec!["---".to_string(); header.len()])).unwrap();
        for threshold in &report.per_threshold {
            let Some(pair) = threshold.pair_metrics.iter().find(|p| p.scheme == scheme) else {
                continue;
            };
            let mut cells = vec![format!("{}", threshold.threshold), pair.n_pairs.to_string()];
            match &pair.scores {
                Some(scores) => {
                    cells.extend(prf_cells(&scores.rouge1));
                    cells.extend(prf_cells(&scores.rouge2));
                    cells.extend(prf_cells(&scores.rouge_l));
                    cells.extend(prf_cells(&scores.semantic));
                }
                None => {
                    cells.extend(vec!["no matched pairs".to_string()]);
                    cells.extend(vec![String::new(); header.len() - 3]);
                }
            }
            writeln!(out, "{}", markdown_row(&cells)).unwrap();
        }
    }
    out
}

fn csv_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn render_csv(report: &MetricReport) -> String {
    let mut out = String::new();
    csv_row(
        &mut out,
        &["kind", "threshold", "scheme", "metric", "precision", "recall", "f1", "count"]
            .map(String::from),
    );
    for threshold in &report.per_threshold {
        let t = format!("{}", threshold.threshold);
        csv_row(
            &mut out,
            &[
                "counts".into(),
                t.clone(),
                String::new(),
                "records_scored".into(),
                String::new(),
                String::new(),
                String::new(),
                threshold.n_records_scored.to_string(),
            ],
        );
        csv_row(
            &mut out,
            &[
                "counts".into(),
                t.clone(),
                String::new(),
                "records_skipped".into(),
                String::new(),
                String::new(),
                String::new(),
                threshold.n_skipped_empty.to_string(),
            ],
        );
        for summary in &threshold.match_scores {
            csv_row(
                &mut out,
                &[
                    "match".into(),
                    t.clone(),
                    summary.scheme.name().into(),
                    String::new(),
                    format!("{}", summary.precision),
                    format!("{}", summary.recall),
                    format!("{}", summary.f1),
                    String::new(),
                ],
            );
        }
        for pair in &threshold.pair_metrics {
            render_pair_csv(&mut out, &t, pair);
        }
    }
    out
}

fn render_pair_csv(out: &mut String, threshold: &str, pair: &SchemePairMetrics) {
    let metrics: [(&str, Option<Prf>); 4] = match &pair.scores {
        Some(scores) => [
            ("rouge1", Some(scores.rouge1)),
            ("rouge2", Some(scores.rouge2)),
            ("rouge_l", Some(scores.rouge_l)),
            ("semantic", Some(scores.semantic)),
        ],
        None => [("rouge1", None), ("rouge2", None), ("rouge_l", None), ("semantic", None)],
    };
    for (name, prf) in metrics {
        let (p, r, f1) = match prf {
            Some(prf) => (
                format!("{}", prf.precision),
                format!("{}", prf.recall),
                format!("{}", prf.f1),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        csv_row(
            out,
            &[
                "pair".into(),
                threshold.to_string(),
                pair.scheme.name().into(),
                name.into(),
                p,
                r,
                f1,
                pair.n_pairs.to_string(),
            ],
        );
    }
}

#[allow(dead_code)]
fn threshold_by_value<'a>(report: &'a MetricReport, threshold: f64) -> Option<&'a ThresholdReport> {
    report.per_threshold.iter().find(|t| t.threshold == threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{FeatureList, GoldTarget, License};
    use crate::corpus::{CorpusRecord, Prediction};
    use crate::embed::EmbedderSpec;
    use crate::eval::{run_evaluation, EvalConfig};

    fn sample_report() -> MetricReport {
        let records = vec![CorpusRecord {
            repo_id: "a/one".into(),
            url: String::new(),
            license: License::Mit,
            readme_text: "r".into(),
            extractive: FeatureList::new(["user login support", "stock quote lookup"]),
            abstractive: FeatureList::default(),
        }];
        let predictions = vec![Prediction {
            repo_id: "a/one".into(),
            features: FeatureList::new(["user login support", "stock quote lookup"]),
        }];
        let config = EvalConfig {
            thresholds: vec![0.3],
            embedder: EmbedderSpec::builtin(),
            target: GoldTarget::Extractive,
            workers: 1,
            ..EvalConfig::default()
        };
        run_evaluation(&records, &predictions, &config).unwrap()
    }

    #[test]
    fn markdown_self_match_renders_ones() {
        let md = render_report(&sample_report(), ReportFormat::Markdown);
        let row = md.lines().find(|l| l.starts_with("| 0.3 |")).unwrap();
        let ones = row.matches("1.000").count();
        // F1#,P#,R#,F1*,P*,R*,F1+,P+ all 1.000.
        assert_eq!(ones, 8, "row: {row}");
    }

    #[test]
    fn markdown_column_order_matches_published_header() {
        let md = render_report(&sample_report(), ReportFormat::Markdown);
        let header = md.lines().find(|l| l.contains("F1#")).unwrap();
        let positions: Vec<usize> = ["F1#", "P#", "R#", "F1*", "P*", "R*", "F1+", "P+"]
            .iter()
            .map(|c| header.find(c).unwrap_or_else(|| panic!("missing column {c}")))
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "header: {header}");
        assert!(!header.contains("R+"), "weighted recall must be omitted: {header}");
    }

    #[test]
    fn csv_and_json_carry_equal_values() {
        let report = sample_report();
        let csv = render_report(&report, ReportFormat::Csv);
        let json = render_report(&report, ReportFormat::Json);
        let parsed: MetricReport = serde_json::from_str(&json).unwrap();
        let summary = &parsed.per_threshold[0].match_scores[0];
        let csv_match_line = csv
            .lines()
            .find(|l| l.starts_with("match,0.3,one2one"))
            .expect("match row present");
        let fields: Vec<&str> = csv_match_line.split(',').collect();
        assert_eq!(fields[4].parse::<f64>().unwrap(), summary.precision);
        assert_eq!(fields[5].parse::<f64>().unwrap(), summary.recall);
        assert_eq!(fields[6].parse::<f64>().unwrap(), summary.f1);
    }

    #[test]
    fn no_pairs_marker_rendered() {
        let records = vec![CorpusRecord {
            repo_id: "a/one".into(),
            url: String::new(),
            license: License::Mit,
            readme_text: "r".into(),
            extractive: FeatureList::new(["alpha beta gamma", "delta epsilon"]),
            abstractive: FeatureList::default(),
        }];
        let predictions = vec![Prediction { repo_id: "a/one".into(), features: FeatureList::default() }];
        let config = EvalConfig { workers: 1, ..EvalConfig::default() };
        let report = run_evaluation(&records, &predictions, &config).unwrap();
        assert_eq!(report.per_threshold[0].n_skipped_empty, 1);
        let md = render_report(&report, ReportFormat::Markdown);
        assert!(md.contains("no matched pairs"), "markdown: {md}");
    }
}
