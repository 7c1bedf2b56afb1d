use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use featex::agree::{cohen_kappa, load_ratings_csv, rating_distribution, AgreeError};
use featex::align::MatchScheme;
use featex::corpus::{
    load_corpus, load_generations, make_inference_prompt, make_training_example, save_corpus,
    save_predictions, split_corpus, strip_markdown_with, CorpusError, CorpusRecord, GoldTarget,
    PiiScrubber, SplitSpec, StripOptions,
};
use featex::embed::{EmbedError, EmbedderSpec};
use featex::eval::{run_evaluation_files, EvalError, MetricReport};
use featex::ingest::{
    feature_count_stats, license_distribution, license_permitted, ClientConfig, FixtureTransport,
    GithubClient, IngestError,
};
use featex::report::{render_report, ReportFormat};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "featex", version, about = "README feature-extraction corpus and evaluation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch README text and license metadata for repositories
    Ingest(IngestArgs),
    /// Strip markdown and scrub PII from corpus readme text
    Preprocess(PreprocessArgs),
    /// Split a corpus into train/val/test by seeded shuffle
    Split(SplitArgs),
    /// Render training examples (or inference prompts) from a corpus
    MakeTrain(MakeTrainArgs),
    /// Parse raw model generations into prediction lists
    ParsePreds(ParsePredsArgs),
    /// Score predictions against gold annotations
    Eval(EvalArgs),
    /// Inter-annotator agreement from a ratings CSV
    Kappa(KappaArgs),
    /// Corpus statistics: license table and feature counts
    Stats(StatsArgs),
    /// Re-render a JSON evaluation report as markdown or CSV
    Report(ReportArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// File of `owner/name` lines to fetch
    #[arg(long, conflicts_with = "sample")]
    repos: Option<PathBuf>,
    /// Sample this many repositories from the public listing
    #[arg(long)]
    sample: Option<usize>,
    /// Seed for repository sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replay recorded fixtures from this directory (default mode)
    #[arg(long, conflicts_with = "live")]
    fixtures: Option<PathBuf>,
    /// Talk to api.github.com (uses GITHUB_TOKEN if set)
    #[arg(long)]
    live: bool,
    /// Keep repositories whose license is outside the permitted set
    #[arg(long)]
    all_licenses: bool,
    /// Concurrent request bound
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Output corpus JSONL
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PreprocessArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Keep fenced code block contents instead of dropping them
    #[arg(long)]
    keep_code: bool,
    /// Extra regex pattern replaced with [NAME] (repeatable)
    #[arg(long = "name-pattern")]
    name_patterns: Vec<String>,
    /// Drop records with fewer extractive features than this
    #[arg(long, default_value_t = 0)]
    min_features: usize,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    train: usize,
    #[arg(long)]
    val: usize,
    #[arg(long)]
    test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for train.jsonl / val.jsonl / test.jsonl
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct MakeTrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Gold list to render after the designator
    #[arg(long, default_value = "extractive")]
    target: GoldTarget,
    /// Emit inference prompts (README + designator, no gold list)
    #[arg(long)]
    prompts_only: bool,
}

#[derive(Args)]
struct ParsePredsArgs {
    /// Generations JSONL: {"repo_id": ..., "generation": ...}
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    /// Comma-separated similarity thresholds in (0, 1]
    #[arg(long, default_value = "0.3", value_delimiter = ',')]
    threshold: Vec<f64>,
    /// Comma-separated matching schemes
    #[arg(long, default_value = "one2one,many2one,weighted", value_delimiter = ',')]
    schemes: Vec<MatchScheme>,
    /// Embedding backend
    #[arg(long, default_value = "builtin")]
    embedder: String,
    /// Endpoint of the http embedding service
    #[arg(long)]
    endpoint: Option<String>,
    /// Builtin embedder dimension
    #[arg(long, default_value_t = 512)]
    dim: usize,
    /// Gold list to score against
    #[arg(long, default_value = "extractive")]
    target: GoldTarget,
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
    /// Parallel per-record workers (output is identical for any count)
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Write the rendered report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KappaArgs {
    /// CSV of repo_id,annotator_id,rating rows
    #[arg(long)]
    ratings: PathBuf,
    /// The two annotators to compare (defaults to the only two present)
    #[arg(long, value_delimiter = ',')]
    annotators: Vec<String>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report produced by `featex eval --format json`
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::Preprocess(args) => preprocess(args),
        Command::Split(args) => split(args),
        Command::MakeTrain(args) => make_train(args),
        Command::ParsePreds(args) => parse_preds(args),
        Command::Eval(args) => eval(args),
        Command::Kappa(args) => kappa(args),
        Command::Stats(args) => stats(args),
        Command::Report(args) => report(args),
    }
}

/// Exit code policy: 1 for validation errors, 2 for I/O and transport.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CorpusError>() {
            return match e {
                CorpusError::Io(_) => 2,
                _ => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return match e {
                EvalError::Corpus(CorpusError::Io(_)) => 2,
                EvalError::Embed(inner) => embed_exit_code(inner),
                _ => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<IngestError>() {
            return match e {
                IngestError::EmptyInput(_) => 1,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<AgreeError>() {
            return match e {
                AgreeError::Io(_) => 2,
                _ => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<EmbedError>() {
            return embed_exit_code(e);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn embed_exit_code(err: &EmbedError) -> i32 {
    match err {
        EmbedError::Spec(_) | EmbedError::DimMismatch { .. } => 1,
        _ => 2,
    }
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<()> {
    let config = ClientConfig { max_concurrency: args.concurrency, ..ClientConfig::default() };
    let client = if args.live {
        let token = std::env::var("GITHUB_TOKEN").ok().filter(|t| !t.is_empty());
        GithubClient::live(token)?
    } else {
        let dir = args
            .fixtures
            .clone()
            .ok_or_else(|| anyhow!("either --live or --fixtures DIR is required"))?;
        GithubClient::with_transport(Arc::new(FixtureTransport::new(dir)), config)
    };

    let repos: Vec<(String, String)> = if let Some(count) = args.sample {
        client.sample_repositories(count, args.seed)?
    } else {
        let path = args
            .repos
            .as_ref()
            .ok_or_else(|| anyhow!("either --repos FILE or --sample N is required"))?;
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split_once('/')
                    .map(|(o, n)| (o.to_string(), n.to_string()))
                    .ok_or_else(|| anyhow!("bad repo line `{l}` (expected owner/name)"))
            })
            .collect::<Result<_>>()?
    };

    let mut records = Vec::new();
    let mut skipped_license = 0usize;
    let mut failed = 0usize;
    for (repo_id, result) in client.fetch_many(&repos) {
        match result {
            Ok((meta, readme_text)) => {
                if !args.all_licenses && !license_permitted(&meta) {
                    skipped_license += 1;
                    continue;
                }
                records.push(CorpusRecord {
                    url: format!("https://github.com/{repo_id}"),
                    repo_id,
                    license: meta.license(),
                    readme_text,
                    extractive: Default::default(),
                    abstractive: Default::default(),
                });
            }
            Err(err) => {
                eprintln!("warning: {repo_id}: {err}");
                failed += 1;
            }
        }
    }
    save_corpus(&records, &args.out)?;
    eprintln!(
        "ingested {} records ({} skipped by license, {} failed) -> {}",
        records.len(),
        skipped_license,
        failed,
        args.out.display()
    );
    Ok(())
}

fn preprocess(args: PreprocessArgs) -> Result<()> {
    let records = load_corpus(&args.input)?;
    let scrubber = PiiScrubber::with_name_patterns(&args.name_patterns)?;
    let opts = StripOptions { keep_code: args.keep_code };
    let mut kept = Vec::new();
    let mut dropped = 0usize;
    for mut record in records {
        record.readme_text = scrubber.scrub(&strip_markdown_with(&record.readme_text, &opts));
        if record.extractive.len() < args.min_features {
            dropped += 1;
            continue;
        }
        kept.push(record);
    }
    save_corpus(&kept, &args.out)?;
    eprintln!(
        "preprocessed {} records ({dropped} dropped below --min-features) -> {}",
        kept.len(),
        args.out.display()
    );
    Ok(())
}

fn split(args: SplitArgs) -> Result<()> {
    let records = load_corpus(&args.input)?;
    let spec = SplitSpec { train_n: args.train, val_n: args.val, test_n: args.test, seed: args.seed };
    let split = split_corpus(records, &spec)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for (name, part) in [("train", &split.train), ("val", &split.val), ("test", &split.test)] {
        let path = args.out_dir.join(format!("{name}.jsonl"));
        save_corpus(part, &path)?;
        eprintln!("{name}: {} records -> {}", part.len(), path.display());
    }
    Ok(())
}

fn make_train(args: MakeTrainArgs) -> Result<()> {
    let records = load_corpus(&args.input)?;
    let file = std::fs::File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut writer = std::io::BufWriter::new(file);
    let mut written = 0usize;
    let mut skipped = 0usize;
    for record in &records {
        let rendered = if args.prompts_only {
            make_inference_prompt(record)
        } else {
            make_training_example(record, args.target)
        };
        match rendered {
            Ok(text) => {
                let line = serde_json::json!({ "repo_id": record.repo_id, "text": text });
                writeln!(writer, "{line}")?;
                written += 1;
            }
            Err(err) => {
                eprintln!("warning: {err}");
                skipped += 1;
            }
        }
    }
    writer.flush()?;
    eprintln!("wrote {written} examples ({skipped} skipped) -> {}", args.out.display());
    Ok(())
}

fn parse_preds(args: ParsePredsArgs) -> Result<()> {
    let predictions = load_generations(&args.input)?;
    save_predictions(&predictions, &args.out)?;
    eprintln!("parsed {} predictions -> {}", predictions.len(), args.out.display());
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let embedder = match args.embedder.as_str() {
        "builtin" => EmbedderSpec::builtin_with_dim(args.dim),
        "http" => {
            let endpoint =
                args.endpoint.clone().ok_or_else(|| anyhow!("--embedder http needs --endpoint"))?;
            EmbedderSpec::http(endpoint)
        }
        other => bail!("unknown embedder `{other}` (expected builtin|http)"),
    };
    let config = featex::eval::EvalConfig {
        thresholds: args.threshold.clone(),
        schemes: args.schemes.clone(),
        embedder,
        target: args.target,
        workers: args.workers,
    };
    let report = run_evaluation_files(&args.corpus, &args.predictions, &config)?;
    write_output(&render_report(&report, args.format), args.out.as_deref())
}

fn kappa(args: KappaArgs) -> Result<()> {
    let sheets = load_ratings_csv(&args.ratings)?;
    let (a, b) = if args.annotators.len() == 2 {
        let find = |id: &str| {
            sheets
                .iter()
                .find(|s| s.annotator_id == id)
                .ok_or_else(|| anyhow!("annotator `{id}` not in ratings file"))
        };
        (find(&args.annotators[0])?, find(&args.annotators[1])?)
    } else if sheets.len() == 2 {
        (&sheets[0], &sheets[1])
    } else {
        bail!(
            "ratings file has {} annotators ({}); pick two with --annotators A,B",
            sheets.len(),
            sheets.iter().map(|s| s.annotator_id.as_str()).collect::<Vec<_>>().join(", ")
        );
    };
    let kappa = cohen_kappa(a, b)?;
    println!("annotators: {} vs {}", a.annotator_id, b.annotator_id);
    for sheet in [a, b] {
        let dist = rating_distribution(sheet);
        println!(
            "{}: n={} ratings 1..4 = {:?}",
            sheet.annotator_id,
            sheet.len(),
            dist
        );
    }
    println!("cohen_kappa: {kappa:.6}");
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let records = load_corpus(&args.input)?;
    let rows = license_distribution(&records);
    let feature_stats = feature_count_stats(&records)?;
    let text = match args.format {
        ReportFormat::Json => {
            let value = serde_json::json!({
                "n_records": records.len(),
                "licenses": rows,
                "features": feature_stats,
            });
            format!("{}\n", serde_json::to_string_pretty(&value)?)
        }
        ReportFormat::Csv => {
            let mut out = String::from("kind,key,count,value\n");
            for row in &rows {
                out.push_str(&format!("license,{},{},{}\n", row.license, row.count, row.percent));
            }
            out.push_str(&format!("features,mean,,{}\n", feature_stats.mean));
            out.push_str(&format!("features,max,,{}\n", feature_stats.max));
            for (count, n) in &feature_stats.histogram {
                out.push_str(&format!("histogram,{count},{n},\n"));
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("# Corpus statistics ({} records)\n\n", records.len()));
            out.push_str("| License | Count | Percent |\n|---|---|---|\n");
            for row in &rows {
                out.push_str(&format!("| {} | {} | {:.2} |\n", row.license, row.count, row.percent));
            }
            out.push_str(&format!(
                "\nExtractive features per record: mean {:.2}, max {}\n\n| Features | Records |\n|---|---|\n",
                feature_stats.mean, feature_stats.max
            ));
            for (count, n) in &feature_stats.histogram {
                out.push_str(&format!("| {count} | {n} |\n"));
            }
            out
        }
    };
    print!("{text}");
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let raw = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let report: MetricReport =
        serde_json::from_str(&raw).with_context(|| "parsing evaluation report JSON")?;
    write_output(&render_report(&report, args.format), args.out.as_deref())
}
