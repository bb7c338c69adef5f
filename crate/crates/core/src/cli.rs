//! Command-line front end: `noise`, `denoise`, `eval`, `analyze`, `stats`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::analysis::{
    check_aligned, classify_edit, EvalReport, OperationCounts, SystemAccumulator,
    DEFAULT_MATCH_THRESHOLD,
};
use crate::corpus::{read_corpus, CorpusReader, CorpusRecord, CorpusWriter};
use crate::denoise::{overlap_denoise, ExternalDenoiser};
use crate::error::{Error, Result};
use crate::metrics::DEFAULT_REPETITION_THRESHOLD;
use crate::noising::{
    generate_noisy_dataset, GenerationConfig, IdentityParaphraser, LexicalParaphraser,
    NoiseDistribution, NoiseType, Paraphraser, DEFAULT_VARIANTS,
};
use crate::text::SummaryDoc;

/// Records processed per parallel batch.
const BATCH: usize = 2048;

#[derive(Debug, Parser)]
#[command(name = "sumdenoise", version, about = "Summary redundancy noising, denoising and evaluation")]
pub struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate noisy variants of every clean summary.
    Noise(NoiseArgs),
    /// Denoise summaries with the overlap rule or an external command.
    Denoise(DenoiseArgs),
    /// Before/after table of ROUGE, Repeat rate, length and repetitions.
    Eval(EvalArgs),
    /// Distribution of edit operations between two corpora.
    Analyze(AnalyzeArgs),
    /// Length and redundancy statistics of one corpus.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParaphraserKind {
    Identity,
    Lexical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenoiseMethod {
    Overlap,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    /// `noisy` when present, otherwise `summary`.
    Target,
    Summary,
    Noisy,
    Article,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSONL corpus to read.
    #[arg(short, long)]
    pub input: PathBuf,

    /// Corpus fields are running text to be sentence-split.
    #[arg(long)]
    pub raw_text: bool,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// JSONL corpus to write.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Kind of redundancy noise to inject.
    #[arg(long = "type", value_enum)]
    pub noise_type: NoiseType,

    /// Probabilities of noising 0, 1, ..., N sentences.
    #[arg(long, default_value_t = NoiseDistribution::default())]
    pub p_noise: NoiseDistribution,

    /// Noisy variants generated per clean summary.
    #[arg(long, default_value_t = DEFAULT_VARIANTS)]
    pub variants: usize,

    /// Rewriting applied to sentences inserted by `extra` noise.
    #[arg(long, value_enum, default_value_t = ParaphraserKind::Identity)]
    pub paraphraser: ParaphraserKind,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// JSONL corpus to write.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Denoiser to run.
    #[arg(long, value_enum, default_value_t = DenoiseMethod::Overlap)]
    pub method: DenoiseMethod,

    /// Overlap above which a sentence counts as a repetition.
    #[arg(long, default_value_t = DEFAULT_REPETITION_THRESHOLD)]
    pub threshold: f64,

    /// Shell command for `--method external`.
    #[arg(long)]
    pub command: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportOutput {
    /// Write the table here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Corpus before denoising.
    #[arg(long)]
    pub before: PathBuf,

    /// Corpus after denoising, aligned with `--before` by id.
    #[arg(long)]
    pub after: PathBuf,

    /// Corpus whose `summary` field holds the references.
    #[arg(long)]
    pub references: Option<PathBuf>,

    /// Overlap above which a sentence counts as a repetition.
    #[arg(long, default_value_t = DEFAULT_REPETITION_THRESHOLD)]
    pub threshold: f64,

    /// Corpus fields are running text to be sentence-split.
    #[arg(long)]
    pub raw_text: bool,

    #[command(flatten)]
    pub report: ReportOutput,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Corpus before denoising.
    #[arg(long)]
    pub before: PathBuf,

    /// Corpus after denoising, aligned with `--before` by id.
    #[arg(long)]
    pub after: PathBuf,

    /// Minimum similarity for an output sentence to count as an edit.
    #[arg(long, default_value_t = DEFAULT_MATCH_THRESHOLD)]
    pub match_threshold: f64,

    /// Corpus fields are running text to be sentence-split.
    #[arg(long)]
    pub raw_text: bool,

    #[command(flatten)]
    pub report: ReportOutput,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Field to measure; `target` is `noisy` when present, else `summary`.
    #[arg(long, value_enum, default_value_t = Field::Target)]
    pub field: Field,

    /// Overlap above which a sentence counts as a repetition.
    #[arg(long, default_value_t = DEFAULT_REPETITION_THRESHOLD)]
    pub threshold: f64,

    #[command(flatten)]
    pub report: ReportOutput,
}

/// Resolved settings for a run, checked before any record is read.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub noise_type: Option<NoiseType>,
    pub p_noise: NoiseDistribution,
    pub seed: u64,
    pub threshold: f64,
    pub match_threshold: f64,
    pub variants_per_summary: usize,
    pub paraphraser: ParaphraserKind,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            noise_type: None,
            p_noise: NoiseDistribution::default(),
            seed: 0,
            threshold: DEFAULT_REPETITION_THRESHOLD,
            match_threshold: DEFAULT_MATCH_THRESHOLD,
            variants_per_summary: DEFAULT_VARIANTS,
            paraphraser: ParaphraserKind::Identity,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        let mut config = RunConfig {
            seed: cli.seed,
            workers: cli.workers,
            ..RunConfig::default()
        };
        match &cli.command {
            Command::Noise(a) => {
                config.noise_type = Some(a.noise_type);
                config.p_noise = a.p_noise.clone();
                config.variants_per_summary = a.variants;
                config.paraphraser = a.paraphraser;
            }
            Command::Denoise(a) => config.threshold = a.threshold,
            Command::Eval(a) => config.threshold = a.threshold,
            Command::Analyze(a) => config.match_threshold = a.match_threshold,
            Command::Stats(a) => config.threshold = a.threshold,
        }
        config
    }

    pub fn validate(&self) -> Result<()> {
        for t in [self.threshold, self.match_threshold] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidThreshold(t));
            }
        }
        if self.variants_per_summary == 0 {
            return Err(Error::InvalidDistribution("at least one variant per summary is required".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Process(io::Error::new(
                io::ErrorKind::InvalidInput,
                "--workers must be at least 1",
            )));
        }
        Ok(())
    }

    fn paraphraser(&self) -> Box<dyn Paraphraser> {
        match self.paraphraser {
            ParaphraserKind::Identity => Box::new(IdentityParaphraser),
            ParaphraserKind::Lexical => Box::new(LexicalParaphraser),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code: 0 success, 1 processing error, 2 usage.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let config = RunConfig::from_cli(cli);
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Process(io::Error::other(e)))?;
    pool.install(|| match &cli.command {
        Command::Noise(args) => run_noise(args, &config),
        Command::Denoise(args) => run_denoise(args, &config),
        Command::Eval(args) => run_eval(args, &config),
        Command::Analyze(args) => run_analyze(args, &config),
        Command::Stats(args) => run_stats(args, &config),
    })
}

fn batches<R: BufRead>(
    reader: CorpusReader<R>,
) -> impl Iterator<Item = Result<Vec<CorpusRecord>>> {
    let mut reader = reader.peekable();
    std::iter::from_fn(move || {
        reader.peek()?;
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match reader.next() {
                Some(Ok(record)) => batch.push(record),
                Some(Err(e)) => return Some(Err(e)),
                None => break,
            }
        }
        Some(Ok(batch))
    })
}

fn run_noise(args: &NoiseArgs, config: &RunConfig) -> Result<()> {
    let noise_type = config.noise_type.unwrap_or(args.noise_type);
    let paraphraser = config.paraphraser();
    let gen_config = GenerationConfig {
        noise_type,
        base_seed: config.seed,
        variants: config.variants_per_summary,
    };
    let mut writer = CorpusWriter::create(&args.output)?;
    let (mut written, mut skipped, mut inputs) = (0usize, 0usize, 0usize);
    for batch in batches(read_corpus(&args.input.input, args.input.raw_text)?) {
        let batch = batch?;
        inputs += batch.len();
        let pairs: Vec<_> = batch.iter().map(CorpusRecord::source_pair).collect();
        let generation =
            generate_noisy_dataset(&pairs, gen_config, &config.p_noise, paraphraser.as_ref())?;
        for diag in &generation.skipped {
            eprintln!(
                "skipped {}#{}: {}",
                diag.source_id, diag.variant_index, diag.error
            );
        }
        skipped += generation.skipped.len();
        let articles: std::collections::HashMap<&str, &[String]> = batch
            .iter()
            .map(|r| (r.id.as_str(), r.article.as_slice()))
            .collect();
        for record in &generation.records {
            writer.write(&CorpusRecord::from_noisy(record, articles[record.source_id.as_str()]))?;
            written += 1;
        }
    }
    if inputs == 0 {
        return Err(Error::EmptyCorpus);
    }
    writer.finish()?;
    eprintln!("noise: {inputs} summaries, {written} records written, {skipped} skipped");
    Ok(())
}

fn with_output(mut record: CorpusRecord, output: &SummaryDoc) -> CorpusRecord {
    record.noisy = Some(output.raw_sentences());
    record
}

fn run_denoise(args: &DenoiseArgs, config: &RunConfig) -> Result<()> {
    let reader = read_corpus(&args.input.input, args.input.raw_text)?;
    let mut writer = CorpusWriter::create(&args.output)?;
    match args.method {
        DenoiseMethod::Overlap => {
            let mut deleted = 0usize;
            for batch in batches(reader) {
                let batch = batch?;
                let results: Vec<_> = batch
                    .par_iter()
                    .map(|r| {
                        overlap_denoise(&r.target_doc(), config.threshold)
                            .map_err(|e| e.in_record(r.id.clone()))
                    })
                    .collect::<Result<_>>()?;
                for (record, result) in batch.into_iter().zip(results) {
                    deleted += result.deleted_indices.len();
                    writer.write(&with_output(record, &result.output))?;
                }
            }
            eprintln!("denoise: {deleted} sentences deleted");
        }
        DenoiseMethod::External => {
            let command = args.command.as_deref().ok_or_else(|| {
                Error::Process(io::Error::new(
                    io::ErrorKind::InvalidInput,
                    "--method external requires --command",
                ))
            })?;
            let records = reader.collect::<Result<Vec<_>>>()?;
            let docs: Vec<SummaryDoc> = records.iter().map(CorpusRecord::target_doc).collect();
            let outputs = ExternalDenoiser::new(command).denoise(&docs)?;
            for (record, output) in records.into_iter().zip(&outputs) {
                writer.write(&with_output(record, output))?;
            }
        }
    }
    writer.finish()?;
    Ok(())
}

fn emit_report<S: serde::Serialize>(table: &str, value: &S, out: &ReportOutput) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, table).map_err(|e| Error::io(path, e))?,
        None => io::stdout()
            .write_all(table.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    if let Some(path) = &out.json {
        let mut json = serde_json::to_string_pretty(value)?;
        json.push('\n');
        fs::write(path, json).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Walks two corpora in lockstep, failing on the first id mismatch.
fn lockstep(
    before: &Path,
    after: &Path,
    raw_text: bool,
    mut visit: impl FnMut(CorpusRecord, CorpusRecord) -> Result<()>,
) -> Result<usize> {
    let mut b = read_corpus(before, raw_text)?;
    let mut a = read_corpus(after, raw_text)?;
    let mut n = 0;
    loop {
        match (b.next().transpose()?, a.next().transpose()?) {
            (None, None) => break,
            (Some(rec), None) | (None, Some(rec)) => {
                return Err(Error::AlignmentError { id: rec.id });
            }
            (Some(rb), Some(ra)) => {
                if rb.id != ra.id {
                    return Err(Error::AlignmentError { id: ra.id });
                }
                visit(rb, ra)?;
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(n)
}

fn run_eval(args: &EvalArgs, config: &RunConfig) -> Result<()> {
    let mut refs = args
        .references
        .as_ref()
        .map(|p| read_corpus(p, args.raw_text))
        .transpose()?;
    let mut b_acc = SystemAccumulator::default();
    let mut a_acc = SystemAccumulator::default();
    lockstep(&args.before, &args.after, args.raw_text, |rb, ra| {
        let (b, a) = (rb.target_doc(), ra.target_doc());
        let reference = match refs.as_mut() {
            Some(reader) => {
                let record = reader
                    .next()
                    .transpose()?
                    .ok_or_else(|| Error::AlignmentError { id: rb.id.clone() })?;
                let reference = record.summary_doc();
                check_aligned(&b, &reference)?;
                Some(reference)
            }
            None => None,
        };
        b_acc.add(&b, reference.as_ref(), config.threshold)?;
        a_acc.add(&a, reference.as_ref(), config.threshold)
    })?;
    if let Some(extra) = refs.as_mut().and_then(|r| r.next()) {
        return Err(Error::AlignmentError { id: extra?.id });
    }
    let report = EvalReport {
        rows: vec![b_acc.finish("before"), a_acc.finish("after")],
    };
    emit_report(&report.to_tsv(), &report, &args.report)
}

fn run_analyze(args: &AnalyzeArgs, config: &RunConfig) -> Result<()> {
    let mut counts = OperationCounts::default();
    lockstep(&args.before, &args.after, args.raw_text, |rb, ra| {
        let c = classify_edit(&rb.target_doc(), &ra.target_doc(), config.match_threshold)
            .map_err(|e| e.in_record(rb.id.clone()))?;
        counts.add(c.kind);
        Ok(())
    })?;
    let dist = counts.distribution()?;
    emit_report(&dist.to_tsv(), &dist, &args.report)
}

fn run_stats(args: &StatsArgs, config: &RunConfig) -> Result<()> {
    let mut acc = SystemAccumulator::default();
    let mut n = 0;
    for record in read_corpus(&args.input.input, args.input.raw_text)? {
        let record = record?;
        let doc = match args.field {
            Field::Target => record.target_doc(),
            Field::Summary => record.summary_doc(),
            Field::Article => record.article_doc(),
            Field::Noisy => record.noisy_doc().ok_or_else(|| {
                Error::MalformedRecord {
                    line: n + 1,
                    reason: format!("record `{}` has no `noisy` field", record.id),
                }
            })?,
        };
        acc.add(&doc, None, config.threshold)?;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyCorpus);
    }
    let name = match args.field {
        Field::Target => "target",
        Field::Summary => "summary",
        Field::Noisy => "noisy",
        Field::Article => "article",
    };
    let report = EvalReport {
        rows: vec![acc.finish(name)],
    };
    emit_report(&report.to_tsv(), &report, &args.report)
}
