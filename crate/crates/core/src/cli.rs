//! Command-line front end: `score`, `select`, `retention`, `report`, `synth`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation or usage failure.
//! Diagnostics go to stderr; data only to the files named by `--out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    corpus_means, difference_curve, percent_increase, retention_curve, uncertainty_vs_quality_curve, CorpusMeans,
    ScoredRecord, DEFAULT_INCREASE_FRACTIONS,
};
use crate::corpusio::{
    format_float, read_corpus, read_reports, write_corpus, write_curve, ReadOptions, ReportWriter, RunConfig,
};
use crate::metrics::RougeVariant;
use crate::pipeline::{score_stream, DEFAULT_CHUNK};
use crate::synthgen::{generate_corpus, LevelSchedule, NoiseOp, NoiseSpec, SynonymTable};
use crate::{Error, Result};

pub const THREADS_ENV: &str = "BLEUVAR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "bleuvar",
    version,
    about = "Uncertainty of sampled summaries: BLEUVarN, median summaries, retention curves"
)]
pub struct Cli {
    /// TOML file with defaults (`max_order`, `threads`, `grid`, `metric`); flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads [env: BLEUVAR_THREADS]. Never changes output bytes.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every document of a JSONL corpus into a report CSV.
    Score(ScoreArgs),
    /// Emit the median summary of every document as JSONL.
    Select(ScoreArgs),
    /// Retention curve (or BLEUVarN-vs-quality curve) from a report CSV.
    Retention(RetentionArgs),
    /// Corpus means, percent-increase table and difference curves.
    Report(ReportArgs),
    /// Generate a synthetic corpus from reference sentences.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_order: Option<u64>,
    /// Accept documents with differing candidate counts.
    #[arg(long)]
    allow_ragged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveMode {
    /// Mean ROUGE after discarding the highest-BLEUVarN documents.
    Retention,
    /// Mean BLEUVarN after discarding the lowest-ROUGE-1 documents.
    Quality,
}

#[derive(Debug, Args)]
struct RetentionArgs {
    #[arg(long)]
    reports: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// r1, r2 or rl.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, value_enum, default_value_t = CurveMode::Retention)]
    mode: CurveMode,
    /// Comma-separated discard fractions starting at 0.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    reports: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// One reference summary per line.
    #[arg(long)]
    refs: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    /// `uniform`, `random`, a number, or a comma-separated list.
    #[arg(long, default_value = "uniform")]
    levels: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Two-column TSV of word -> synonym.
    #[arg(long)]
    synonyms: Option<PathBuf>,
    /// Comma-separated subset of drop,swap,synonym,duplicate.
    #[arg(long)]
    ops: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    max_order: Option<usize>,
    threads: Option<usize>,
    grid: Option<Vec<f64>>,
    metric: Option<String>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Validation {
        path: path.to_path_buf(),
        line: 0,
        message: e.message().to_string(),
    })
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad grid value `{p}`")))
        })
        .collect()
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

pub fn main() -> ExitCode {
    main_with_args(std::env::args_os())
}

fn run(cli: Cli) -> Result<()> {
    let file = load_file_config(cli.config.as_deref())?;
    let threads = cli.threads.or(file.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let mut config = RunConfig::default();
    if let Some(order) = file.max_order {
        config.max_order = order;
    }
    if let Some(grid) = file.grid.clone() {
        config.retention_grid = grid;
    }
    if let Some(metric) = file.metric.clone() {
        config.metric = metric;
    }

    pool.install(|| match cli.command {
        Command::Score(args) => score(args, config),
        Command::Select(args) => select(args, config),
        Command::Retention(args) => retention(args, config),
        Command::Report(args) => report(args, config),
        Command::Synth(args) => synth(args),
    })
}

fn scoring_config(args: &ScoreArgs, mut config: RunConfig) -> Result<RunConfig> {
    if let Some(order) = args.max_order {
        config.max_order = order as usize;
    }
    if config.max_order == 0 {
        return Err(Error::InvalidArgument("max_order must be >= 1".into()));
    }
    Ok(config)
}

fn score(args: ScoreArgs, config: RunConfig) -> Result<()> {
    let config = scoring_config(&args, config)?;
    let reader = read_corpus(
        &args.input,
        ReadOptions {
            allow_ragged: args.allow_ragged,
        },
    )?;
    let mut writer = ReportWriter::create(&args.out, &config)?;
    let count = score_stream(reader, &config.scoring(), DEFAULT_CHUNK, |_, report| {
        writer.write(report)
    })?;
    writer.finish()?;
    eprintln!("scored {count} documents -> {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct Selection<'a> {
    doc_id: &'a str,
    median_index: usize,
    summary: &'a str,
    bleuvarn: f64,
}

fn select(args: ScoreArgs, config: RunConfig) -> Result<()> {
    let config = scoring_config(&args, config)?;
    let reader = read_corpus(
        &args.input,
        ReadOptions {
            allow_ragged: args.allow_ragged,
        },
    )?;
    let out_path = args.out.clone();
    let mut out = BufWriter::new(File::create(&out_path).map_err(|e| Error::io(&out_path, e))?);
    score_stream(reader, &config.scoring(), DEFAULT_CHUNK, |set, report| {
        let line = Selection {
            doc_id: &set.doc_id,
            median_index: report.median_index,
            summary: &set.candidates[report.median_index],
            bleuvarn: format_float(report.bleuvarn).parse().expect("formatted float parses"),
        };
        let json = serde_json::to_string(&line).expect("selection serializes");
        writeln!(out, "{json}").map_err(|e| Error::io(&out_path, e))
    })?;
    out.flush().map_err(|e| Error::io(&out_path, e))
}

fn load_records(path: &Path, mut config: RunConfig) -> Result<(RunConfig, Vec<ScoredRecord>)> {
    let (embedded, rows) = read_reports(path)?;
    if let Some(embedded) = embedded {
        config.max_order = embedded.max_order;
        config.smoothing = embedded.smoothing;
        config.tie_break = embedded.tie_break;
    }
    Ok((config, rows.iter().map(|r| r.scored_record()).collect()))
}

fn retention(args: RetentionArgs, config: RunConfig) -> Result<()> {
    let (mut config, records) = load_records(&args.reports, config)?;
    if let Some(grid) = &args.grid {
        config.retention_grid = parse_grid(grid)?;
    }
    let curve = match args.mode {
        CurveMode::Retention => {
            if let Some(metric) = &args.metric {
                config.metric = metric.clone();
            }
            let variant: RougeVariant = config.metric.parse()?;
            config.metric = variant.name().to_string();
            retention_curve(&records, variant, &config.retention_grid)?
        }
        CurveMode::Quality => {
            config.metric = "bleuvarn".to_string();
            uncertainty_vs_quality_curve(&records, &config.retention_grid)?
        }
    };
    write_curve(&curve, &args.out, &config)
}

fn report(args: ReportArgs, config: RunConfig) -> Result<()> {
    let (mut config, records) = load_records(&args.reports, config)?;
    if let Some(grid) = &args.grid {
        config.retention_grid = parse_grid(grid)?;
    }
    config.metric = "all".to_string();
    let text = render_report(&records, &config)?;
    std::fs::write(&args.out, text).map_err(|e| Error::io(&args.out, e))
}

/// Plain-text summary: corpus means, percent increases, difference curves.
pub fn render_report(records: &[ScoredRecord], config: &RunConfig) -> Result<String> {
    let means = corpus_means(records)?;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "{}", config.header_line()).unwrap();
    writeln!(w, "documents: {}", means.count).unwrap();
    writeln!(w).unwrap();
    writeln!(w, "corpus means (F1 x 100, R-1/R-2/R-L)").unwrap();
    writeln!(w, "median summary: {}", CorpusMeans::format_percent(&means.median)).unwrap();
    if let Some(det) = &means.deterministic {
        writeln!(w, "deterministic:  {}", CorpusMeans::format_percent(det)).unwrap();
    }
    writeln!(w).unwrap();

    writeln!(
        w,
        "percent increase after discarding highest-BLEUVarN documents (R-1/R-2/R-L)"
    )
    .unwrap();
    match percent_increase(records, &DEFAULT_INCREASE_FRACTIONS) {
        Ok(rows) => {
            for row in rows {
                writeln!(
                    w,
                    "{:>3.0}%: {:.2}/{:.2}/{:.2}",
                    row.fraction * 100.0,
                    row.r1,
                    row.r2,
                    row.rl
                )
                .unwrap();
            }
        }
        Err(e @ Error::UndefinedBaseline(_)) => {
            eprintln!("notice: {e}");
            writeln!(w, "undefined: {e}").unwrap();
        }
        Err(e) => return Err(e),
    }
    writeln!(w).unwrap();

    writeln!(w, "difference curves (median - deterministic, F1 x 100)").unwrap();
    if means.deterministic.is_none() {
        let notice = "omitted: reports have no deterministic columns";
        eprintln!("notice: difference curves {notice}");
        writeln!(w, "{notice}").unwrap();
        return Ok(out);
    }
    let curves = RougeVariant::ALL
        .iter()
        .map(|&v| difference_curve(records, v, &config.retention_grid))
        .collect::<Result<Vec<_>>>()?;
    writeln!(w, "fraction,r1,r2,rl").unwrap();
    for i in 0..config.retention_grid.len() {
        writeln!(
            w,
            "{},{:.2},{:.2},{:.2}",
            format_float(curves[0].points[i].fraction),
            curves[0].points[i].value * 100.0,
            curves[1].points[i].value * 100.0,
            curves[2].points[i].value * 100.0
        )
        .unwrap();
    }
    Ok(out)
}

fn synth(args: SynthArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.refs).map_err(|e| Error::io(&args.refs, e))?;
    let references: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    if references.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{}: no references",
            args.refs.display()
        )));
    }
    let synonyms = args.synonyms.as_ref().map(SynonymTable::load).transpose()?;
    let schedule: LevelSchedule = args.levels.parse()?;
    let noise = match &args.ops {
        Some(ops) => {
            let ops = ops
                .split(',')
                .map(|o| o.trim().parse::<NoiseOp>())
                .collect::<Result<Vec<_>>>()?;
            NoiseSpec::with_ops(0.0, args.seed, ops, synonyms)?
        }
        None => NoiseSpec::new(0.0, args.seed, synonyms)?,
    };
    let corpus = generate_corpus(&references, args.n as usize, &schedule, &noise)?;
    write_corpus(&corpus, &args.out)?;
    eprintln!("wrote {} documents -> {}", corpus.len(), args.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0, 0.25,0.5").unwrap(), vec![0.0, 0.25, 0.5]);
        assert!(parse_grid("0,x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn file_config_rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("max_order = 3\ngrid = [0.0, 0.5]").is_ok());
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
