//! The `tracesample` command line: synth, analyze, sample, compare, oracle.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage or configuration error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{
    histogram, parse_histogram_spec, parse_records, synthesize, Arrangement, ClassHistogram,
    InputFormat, TraceDataset, DEFAULT_LABEL_COLUMN,
};
use crate::error::{Error, Result};
use crate::metrics::{
    class_report, identity_report, miss_probability_analytic, systematic_shuffled_missing,
};
use crate::report::{missing_series_export, render_table, ComparisonMatrix, RenderFormat, SeriesPoint};
use crate::samplers::{random_sample, systematic_sample, Family, SampleSpec};

#[derive(Debug, Parser)]
#[command(name = "tracesample", version, about = "Sampling and class-imbalance analysis for labeled packet traces")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset CSV from a `label,count` histogram file.
    Synth(SynthArgs),
    /// Per-class counts, shares and selection probabilities of a dataset.
    Analyze(AnalyzeArgs),
    /// Draw one sample; writes the sample CSV and a class report.
    Sample(SampleArgs),
    /// Run a matrix of samplers and tabulate per-class shares side by side.
    Compare(CompareArgs),
    /// Expected vs observed missing classes over a series of sample sizes.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrangementArg {
    Shuffled,
    Grouped,
}

impl From<ArrangementArg> for Arrangement {
    fn from(a: ArrangementArg) -> Self {
        match a {
            ArrangementArg::Shuffled => Arrangement::Shuffled,
            ArrangementArg::Grouped => Arrangement::Grouped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
    Json,
}

impl From<FormatArg> for RenderFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => RenderFormat::Markdown,
            FormatArg::Csv => RenderFormat::Csv,
            FormatArg::Json => RenderFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormatArg {
    Csv,
    Ndjson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Random,
    Systematic,
    Bycount,
    Stratified,
    Underover,
}

/// Exactly one of `--input` or `--histogram`.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Labeled record file (CSV or NDJSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Histogram spec; a dataset is synthesized from it with `--seed`.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub source: Source,
    /// Column holding the protocol label.
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    pub label_column: String,
    /// Input file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormatArg>,
    /// Record order when synthesizing from `--histogram`.
    #[arg(long, value_enum, default_value_t = ArrangementArg::Shuffled)]
    pub arrangement: ArrangementArg,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
    pub format: FormatArg,
    /// Decimal places for percentages; probabilities get two more.
    #[arg(long, default_value_t = 3)]
    pub decimals: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub histogram: PathBuf,
    #[arg(long, value_enum, default_value_t = ArrangementArg::Shuffled)]
    pub arrangement: ArrangementArg,
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    pub label_column: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SamplerArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Target count (random, bycount).
    #[arg(long)]
    pub n: Option<usize>,
    /// Sampling interval I (systematic, stratified).
    #[arg(long)]
    pub interval: Option<usize>,
    /// Per-class quota (underover).
    #[arg(long)]
    pub k: Option<usize>,
    /// Draw with replacement (random).
    #[arg(long)]
    pub with_replacement: bool,
}

impl SamplerArgs {
    pub fn family(&self) -> Result<Family> {
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("--family {:?} needs --{flag}", self.family).to_lowercase()))
        };
        let family = match self.family {
            FamilyArg::Random => Family::Random {
                n: need(self.n, "n")?,
                with_replacement: self.with_replacement,
            },
            FamilyArg::Systematic => Family::Systematic {
                interval: need(self.interval, "interval")?,
            },
            FamilyArg::Bycount => Family::SystematicByCount { n: need(self.n, "n")? },
            FamilyArg::Stratified => Family::Stratified {
                interval: need(self.interval, "interval")?,
            },
            FamilyArg::Underover => Family::UnderOver { k: need(self.k, "k")? },
        };
        family.validate()?;
        Ok(family)
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Where to write the class report. Defaults to standard output when
    /// `--out` is given, otherwise the report is skipped.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Run-matrix file: one `<family> <value>[,<value>...] [with-replacement]` per line.
    #[arg(long)]
    pub matrix: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleFamily {
    Random,
    Systematic,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = OracleFamily::Random)]
    pub family: OracleFamily,
    /// Comma-separated sample sizes (random).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Comma-separated intervals (systematic).
    #[arg(long, value_delimiter = ',')]
    pub interval: Vec<usize>,
    #[arg(long)]
    pub with_replacement: bool,
    /// Shuffled orderings averaged for the systematic expected column.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs, and maps errors onto the exit-code contract.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a, cli.seed, stdout),
        Command::Analyze(a) => cmd_analyze(a, cli.seed, stdout),
        Command::Sample(a) => cmd_sample(a, cli.seed, stdout),
        Command::Compare(a) => cmd_compare(a, cli.seed, stdout),
        Command::Oracle(a) => cmd_oracle(a, cli.seed, stdout),
    }
}

fn read_histogram(path: &Path) -> Result<ClassHistogram> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::HistogramSpec {
            line: 0,
            reason: format!("{}: {e}", path.display()),
        }
    })?;
    parse_histogram_spec(&text)
}

fn guard_output(out: Option<&Path>, inputs: &[&Path]) -> Result<()> {
    let Some(out) = out else { return Ok(()) };
    let Ok(out) = out.canonicalize() else { return Ok(()) };
    for input in inputs {
        if input.canonicalize().map(|i| i == out).unwrap_or(false) {
            return Err(Error::InvalidParameter(format!(
                "output {} would overwrite an input",
                out.display()
            )));
        }
    }
    Ok(())
}

fn emit<W: Write>(out: Option<&Path>, bytes: &[u8], stdout: &mut W) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

impl SourceArgs {
    fn path(&self) -> &Path {
        self.source
            .input
            .as_deref()
            .or(self.source.histogram.as_deref())
            .expect("clap enforces one source")
    }

    /// The dataset and its class histogram. A histogram source keeps the
    /// spec file's row order; a record file uses first-appearance order.
    pub fn load(&self, seed: u64) -> Result<(TraceDataset, ClassHistogram)> {
        if let Some(path) = &self.source.histogram {
            let spec = read_histogram(path)?;
            let ds = synthesize(&spec, seed, self.arrangement.into())?;
            return Ok((ds, spec));
        }
        let path = self.source.input.as_deref().expect("clap enforces one source");
        let format = match self.input_format {
            Some(InputFormatArg::Csv) => InputFormat::Csv,
            Some(InputFormatArg::Ndjson) => InputFormat::Ndjson,
            None => match path.extension().and_then(|e| e.to_str()) {
                Some("ndjson" | "jsonl") => InputFormat::Ndjson,
                _ => InputFormat::Csv,
            },
        };
        let file = fs::File::open(path)?;
        let ds = parse_records(std::io::BufReader::new(file), format, &self.label_column)?;
        let hist = histogram(&ds)?;
        Ok((ds, hist))
    }
}

pub fn cmd_synth<W: Write>(args: &SynthArgs, seed: u64, stdout: &mut W) -> Result<()> {
    guard_output(args.out.as_deref(), &[&args.histogram])?;
    let spec = read_histogram(&args.histogram)?;
    let ds = synthesize(&spec, seed, args.arrangement.into())?;
    let mut buf = Vec::new();
    ds.write_csv(&mut buf, &args.label_column)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &buf)?;
            writeln!(
                stdout,
                "wrote {}: P={} L={} seed={}",
                path.display(),
                ds.population(),
                spec.class_count(),
                seed
            )?;
        }
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

pub fn cmd_analyze<W: Write>(args: &AnalyzeArgs, seed: u64, stdout: &mut W) -> Result<()> {
    guard_output(args.output.out.as_deref(), &[args.source.path()])?;
    let (_, hist) = args.source.load(seed)?;
    let report = identity_report(&hist, args.output.decimals)?;
    let text = render_table(&report, args.output.format.into(), args.output.decimals)?;
    emit(args.output.out.as_deref(), text.as_bytes(), stdout)
}

pub fn cmd_sample<W: Write>(args: &SampleArgs, seed: u64, stdout: &mut W) -> Result<()> {
    let family = args.sampler.family()?;
    guard_output(args.output.out.as_deref(), &[args.source.path()])?;
    guard_output(args.report.as_deref(), &[args.source.path()])?;
    let (ds, hist) = args.source.load(seed)?;
    let sample = SampleSpec::new(family, seed).run(&ds)?;
    let mut csv = Vec::new();
    sample.write_csv(&mut csv)?;
    emit(args.output.out.as_deref(), &csv, stdout)?;

    if args.output.out.is_some() || args.report.is_some() {
        let report = class_report(&hist, &sample, args.output.decimals)?;
        let text = render_table(&report, args.output.format.into(), args.output.decimals)?;
        emit(args.report.as_deref(), text.as_bytes(), stdout)?;
    }
    Ok(())
}

/// Parses a run-matrix file. Each non-comment line is
/// `<family> <value>[,<value>...] [with-replacement]` with family one of
/// `random`, `systematic`, `bycount`, `stratified`, `underover`; every value
/// becomes one column, in file order.
pub fn parse_run_matrix(text: &str) -> Result<Vec<Family>> {
    let mut runs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::RunMatrix { line: i + 1, reason };
        let mut words = line.split_whitespace();
        let family = words.next().unwrap_or_default();
        let values = words.next().ok_or_else(|| err("missing parameter value".into()))?;
        let with_replacement = match words.next() {
            None => false,
            Some("with-replacement") if family == "random" => true,
            Some(other) => return Err(err(format!("unexpected `{other}`"))),
        };
        if let Some(extra) = words.next() {
            return Err(err(format!("unexpected `{extra}`")));
        }
        for v in values.split(',') {
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| err(format!("bad value `{v}`")))?;
            let run = match family {
                "random" => Family::Random { n: v, with_replacement },
                "systematic" => Family::Systematic { interval: v },
                "bycount" => Family::SystematicByCount { n: v },
                "stratified" => Family::Stratified { interval: v },
                "underover" => Family::UnderOver { k: v },
                other => return Err(err(format!("unknown family `{other}`"))),
            };
            run.validate().map_err(|e| err(e.to_string()))?;
            runs.push(run);
        }
    }
    if runs.is_empty() {
        return Err(Error::RunMatrix {
            line: 0,
            reason: "no runs".into(),
        });
    }
    Ok(runs)
}

/// One report per run over `ds`, tabulated with `hist`'s row order.
pub fn compare(
    ds: &TraceDataset,
    hist: &ClassHistogram,
    runs: &[Family],
    seed: u64,
    decimals: usize,
) -> Result<ComparisonMatrix> {
    let reports = runs
        .iter()
        .map(|f| class_report(hist, &SampleSpec::new(*f, seed).run(ds)?, decimals))
        .collect::<Result<Vec<_>>>()?;
    ComparisonMatrix::from_reports(&reports)
}

pub fn cmd_compare<W: Write>(args: &CompareArgs, seed: u64, stdout: &mut W) -> Result<()> {
    guard_output(args.output.out.as_deref(), &[args.source.path(), &args.matrix])?;
    let text = fs::read_to_string(&args.matrix).map_err(|e| Error::RunMatrix {
        line: 0,
        reason: format!("{}: {e}", args.matrix.display()),
    })?;
    let runs = parse_run_matrix(&text)?;
    let (ds, hist) = args.source.load(seed)?;
    let matrix = compare(&ds, &hist, &runs, seed, args.output.decimals)?;
    let text = render_table(&matrix, args.output.format.into(), args.output.decimals)?;
    emit(args.output.out.as_deref(), text.as_bytes(), stdout)
}

/// Random: one seeded run per `n` (observed) beside the analytic expectation.
/// Systematic: missing classes of the dataset as ordered (observed) beside the
/// mean over `trials` shuffled orderings.
pub fn oracle_series(
    ds: &TraceDataset,
    hist: &ClassHistogram,
    args: &OracleArgs,
    seed: u64,
) -> Result<(String, Vec<SeriesPoint>)> {
    let hist = hist.clone();
    match args.family {
        OracleFamily::Random => {
            if args.n.is_empty() {
                return Err(Error::InvalidParameter("oracle needs --n".into()));
            }
            let points = args
                .n
                .iter()
                .map(|&n| {
                    let expected = miss_probability_analytic(&hist, n, args.with_replacement)?
                        .expected_missing;
                    let observed = if n == 0 {
                        hist.class_count() as u64
                    } else {
                        let s = random_sample(ds, n as usize, args.with_replacement, seed)?;
                        class_report(&hist, &s, 3)?.missing_count as u64
                    };
                    Ok(SeriesPoint {
                        x: n,
                        observed: Some(observed),
                        expected: Some(expected),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(("n".into(), points))
        }
        OracleFamily::Systematic => {
            if args.interval.is_empty() {
                return Err(Error::InvalidParameter("oracle --family systematic needs --interval".into()));
            }
            let points = args
                .interval
                .iter()
                .map(|&i| {
                    let observed = class_report(&hist, &systematic_sample(ds, i)?, 3)?.missing_count;
                    let expected = (args.trials > 0)
                        .then(|| systematic_shuffled_missing(&hist, i, args.trials, seed))
                        .transpose()?
                        .map(|d| d.mean());
                    Ok(SeriesPoint {
                        x: i as u64,
                        observed: Some(observed as u64),
                        expected,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(("I".into(), points))
        }
    }
}

pub fn cmd_oracle<W: Write>(args: &OracleArgs, seed: u64, stdout: &mut W) -> Result<()> {
    guard_output(args.out.as_deref(), &[args.source.path()])?;
    let (ds, hist) = args.source.load(seed)?;
    let (axis, points) = oracle_series(&ds, &hist, args, seed)?;
    let text = missing_series_export(&axis, &points).map_err(|e| match e {
        Error::NonMonotonicAxis { .. } | Error::EmptySeries => Error::InvalidParameter(e.to_string()),
        other => other,
    })?;
    emit(args.out.as_deref(), text.as_bytes(), stdout)
}
