//! Markdown, CSV and JSON renderings of reports and sampler comparisons.
//!
//! Display rounding (half-up) is applied only to markdown and CSV; JSON
//! carries every number at full precision. Probabilities are shown with two
//! more decimals than percentages, so both columns carry the same precision.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::ClassHistogram;
use crate::error::{Error, Result};
use crate::metrics::{ClassShare, ImbalanceReport};
use crate::samplers::SampleSpec;

/// JSON schema for [`ReportEnvelope`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
/// JSON schema for [`MatrixEnvelope`].
pub const COMPARISON_SCHEMA: &str = include_str!("../schema/comparison.schema.json");

pub const REPORT_SCHEMA_ID: &str = "tracesample.report/1";
pub const COMPARISON_SCHEMA_ID: &str = "tracesample.comparison/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Markdown,
    Csv,
    Json,
}

impl FromStr for RenderFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Fixed-point text rounded half-up at `decimals` places.
pub fn fixed(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    // Lift values sitting one ulp below a half so that 0.0005 -> 0.001.
    let scaled = x * scale * (1.0 + 4.0 * f64::EPSILON);
    let rounded = (scaled + 0.5).floor() / scale;
    format!("{rounded:.decimals$}")
}

pub trait Render {
    fn render(&self, format: RenderFormat, decimals: usize) -> Result<String>;
}

pub fn render_table<T: Render + ?Sized>(table: &T, format: RenderFormat, decimals: usize) -> Result<String> {
    table.render(format, decimals)
}

fn spec_title(spec: Option<&SampleSpec>) -> String {
    match spec {
        Some(s) => s.family.to_string(),
        None => "identity (whole dataset)".to_string(),
    }
}

fn csv_line<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(fields.into_iter().map(|f| f.as_ref().to_string()))
        .expect("in-memory csv write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceClass {
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub population: u64,
    pub classes: Vec<SourceClass>,
}

impl SourceSummary {
    fn of(h: &ClassHistogram) -> Self {
        Self {
            population: h.total(),
            classes: h
                .entries()
                .iter()
                .map(|(label, count)| SourceClass {
                    label: label.clone(),
                    count: *count,
                })
                .collect(),
        }
    }

    fn histogram(&self) -> Result<ClassHistogram> {
        ClassHistogram::new(self.classes.iter().map(|c| (c.label.clone(), c.count)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTotals {
    pub sampled: u64,
    pub size_percent: f64,
    pub missing_count: usize,
    pub imbalance_ratio: Option<f64>,
}

/// The stable JSON form of an [`ImbalanceReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema: String,
    pub source: SourceSummary,
    pub spec: Option<SampleSpec>,
    pub per_class: Vec<ClassShare>,
    pub totals: ReportTotals,
    pub missing: Vec<String>,
}

impl From<&ImbalanceReport> for ReportEnvelope {
    fn from(r: &ImbalanceReport) -> Self {
        Self {
            schema: REPORT_SCHEMA_ID.to_string(),
            source: SourceSummary::of(&r.source),
            spec: r.spec,
            per_class: r.per_class.clone(),
            totals: ReportTotals {
                sampled: r.total_sampled,
                size_percent: r.size_percent,
                missing_count: r.missing_count,
                imbalance_ratio: r.imbalance_ratio,
            },
            missing: r.missing_classes.clone(),
        }
    }
}

impl ReportEnvelope {
    pub fn into_report(self, display_decimals: usize) -> Result<ImbalanceReport> {
        Ok(ImbalanceReport {
            source: self.source.histogram()?,
            spec: self.spec,
            per_class: self.per_class,
            total_sampled: self.totals.sampled,
            size_percent: self.totals.size_percent,
            missing_count: self.totals.missing_count,
            missing_classes: self.missing,
            imbalance_ratio: self.totals.imbalance_ratio,
            display_decimals,
        })
    }
}

pub fn parse_report_json(text: &str, display_decimals: usize) -> Result<ImbalanceReport> {
    serde_json::from_str::<ReportEnvelope>(text)?.into_report(display_decimals)
}

impl Render for ImbalanceReport {
    fn render(&self, format: RenderFormat, decimals: usize) -> Result<String> {
        let pdec = decimals + 2;
        let mut out = String::new();
        match format {
            RenderFormat::Markdown => {
                let seed = self.spec.map(|s| s.seed).unwrap_or(0);
                writeln!(
                    out,
                    "# tracesample report | {} | seed: {} | P: {} | L: {}",
                    spec_title(self.spec.as_ref()),
                    seed,
                    self.source.total(),
                    self.source.class_count()
                )
                .unwrap();
                out.push('\n');
                out.push_str("| Protocol | Source count | Sampled count | % of sample | P(s) |\n");
                out.push_str("|---|---:|---:|---:|---:|\n");
                for c in &self.per_class {
                    writeln!(
                        out,
                        "| {} | {} | {} | {} | {} |",
                        md_cell(&c.label),
                        c.source_count,
                        c.sampled_count,
                        fixed(c.sampled_percent, decimals),
                        fixed(c.selection_probability, pdec)
                    )
                    .unwrap();
                }
                out.push('\n');
                writeln!(
                    out,
                    "- n(s): {} ({}% of {})",
                    self.total_sampled,
                    fixed(self.size_percent, decimals),
                    self.source.total()
                )
                .unwrap();
                let missing = if self.missing_classes.is_empty() {
                    "none".to_string()
                } else {
                    self.missing_classes.join(", ")
                };
                writeln!(out, "- missing classes: {} ({})", self.missing_count, missing).unwrap();
                let ratio = self
                    .imbalance_ratio
                    .map(|r| fixed(r, decimals))
                    .unwrap_or_else(|| "n/a".into());
                writeln!(out, "- imbalance ratio: {ratio}").unwrap();
            }
            RenderFormat::Csv => {
                out.push_str(&csv_line([
                    "label",
                    "source_count",
                    "sampled_count",
                    "sampled_percent",
                    "selection_probability",
                ]));
                for c in &self.per_class {
                    out.push_str(&csv_line([
                        c.label.clone(),
                        c.source_count.to_string(),
                        c.sampled_count.to_string(),
                        fixed(c.sampled_percent, decimals),
                        fixed(c.selection_probability, pdec),
                    ]));
                }
            }
            RenderFormat::Json => {
                out = serde_json::to_string_pretty(&ReportEnvelope::from(self))?;
                out.push('\n');
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDescriptor {
    pub family: String,
    pub parameter_name: String,
    pub parameter: usize,
    /// Sample size of the run.
    pub n: u64,
    pub seed: u64,
}

impl ColumnDescriptor {
    pub fn title(&self) -> String {
        if self.parameter_name == "n" && self.parameter as u64 == self.n {
            format!("{} n={}", self.family, self.n)
        } else {
            format!("{} {}={}, n={}", self.family, self.parameter_name, self.parameter, self.n)
        }
    }
}

/// Per-class sample shares for several sampler runs over one source.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    source: ClassHistogram,
    columns: Vec<ColumnDescriptor>,
    /// `cells[row][column]`, percent of the column's sample.
    cells: Vec<Vec<f64>>,
    missing: Vec<usize>,
}

impl ComparisonMatrix {
    /// One column per report; all reports must share the same source histogram.
    pub fn from_reports(reports: &[ImbalanceReport]) -> Result<Self> {
        let first = reports.first().ok_or(Error::EmptyComparison)?;
        let source = first.source.clone();
        let mut columns = Vec::with_capacity(reports.len());
        let mut cells = vec![Vec::with_capacity(reports.len()); source.class_count()];
        let mut missing = Vec::with_capacity(reports.len());
        for r in reports {
            if r.source != source {
                return Err(Error::InvalidParameter(
                    "comparison columns come from different sources".into(),
                ));
            }
            let spec = r.spec.ok_or_else(|| {
                Error::InvalidParameter("comparison column needs a sampler spec".into())
            })?;
            columns.push(ColumnDescriptor {
                family: spec.family.name().to_string(),
                parameter_name: spec.family.parameter_name().to_string(),
                parameter: spec.family.parameter(),
                n: r.total_sampled,
                seed: spec.seed,
            });
            for (row, share) in cells.iter_mut().zip(&r.per_class) {
                row.push(share.sampled_percent);
            }
            missing.push(r.missing_count);
        }
        Ok(Self {
            source,
            columns,
            cells,
            missing,
        })
    }

    pub fn source(&self) -> &ClassHistogram {
        &self.source
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        &self.columns
    }

    pub fn cell(&self, row: usize, column: usize) -> f64 {
        self.cells[row][column]
    }

    pub fn missing_counts(&self) -> &[usize] {
        &self.missing
    }

    pub fn column_sum(&self, column: usize) -> f64 {
        self.cells.iter().map(|r| r[column]).sum()
    }

    fn envelope(&self) -> MatrixEnvelope {
        MatrixEnvelope {
            schema: COMPARISON_SCHEMA_ID.to_string(),
            source: SourceSummary::of(&self.source),
            rows: self.source.labels().map(str::to_string).collect(),
            columns: self
                .columns
                .iter()
                .enumerate()
                .map(|(j, c)| MatrixColumn {
                    descriptor: c.clone(),
                    percent: self.cells.iter().map(|r| r[j]).collect(),
                    missing_count: self.missing[j],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixColumn {
    #[serde(flatten)]
    pub descriptor: ColumnDescriptor,
    pub percent: Vec<f64>,
    pub missing_count: usize,
}

/// The stable JSON form of a [`ComparisonMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub schema: String,
    pub source: SourceSummary,
    pub rows: Vec<String>,
    pub columns: Vec<MatrixColumn>,
}

impl Render for ComparisonMatrix {
    fn render(&self, format: RenderFormat, decimals: usize) -> Result<String> {
        let mut out = String::new();
        match format {
            RenderFormat::Markdown => {
                let seeds: Vec<String> = self.columns.iter().map(|c| c.seed.to_string()).collect();
                let mut seeds_dedup = seeds.clone();
                seeds_dedup.dedup();
                writeln!(
                    out,
                    "# tracesample comparison | seed: {} | P: {} | L: {}",
                    seeds_dedup.join(","),
                    self.source.total(),
                    self.source.class_count()
                )
                .unwrap();
                out.push('\n');
                out.push_str("| Protocol |");
                for c in &self.columns {
                    write!(out, " {} |", c.title()).unwrap();
                }
                out.push_str("\n|---|");
                out.push_str(&"---:|".repeat(self.columns.len()));
                out.push('\n');
                for (label, row) in self.source.labels().zip(&self.cells) {
                    write!(out, "| {} |", md_cell(label)).unwrap();
                    for v in row {
                        write!(out, " {} |", fixed(*v, decimals)).unwrap();
                    }
                    out.push('\n');
                }
                out.push_str("| **missing classes** |");
                for m in &self.missing {
                    write!(out, " {m} |").unwrap();
                }
                out.push('\n');
            }
            RenderFormat::Csv => {
                let mut header = vec!["label".to_string()];
                header.extend(self.columns.iter().map(ColumnDescriptor::title));
                out.push_str(&csv_line(header));
                for (label, row) in self.source.labels().zip(&self.cells) {
                    let mut fields = vec![label.to_string()];
                    fields.extend(row.iter().map(|v| fixed(*v, decimals)));
                    out.push_str(&csv_line(fields));
                }
                let mut footer = vec!["missing_count".to_string()];
                footer.extend(self.missing.iter().map(usize::to_string));
                out.push_str(&csv_line(footer));
            }
            RenderFormat::Json => {
                out = serde_json::to_string_pretty(&self.envelope())?;
                out.push('\n');
            }
        }
        Ok(out)
    }
}

/// One point of a missing-class series (random `n` or systematic `I`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: u64,
    pub observed: Option<u64>,
    pub expected: Option<f64>,
}

/// Three-column CSV `<axis>,observed,expected`; absent values are blank.
pub fn missing_series_export(axis: &str, series: &[SeriesPoint]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(i) = series.windows(2).position(|w| w[1].x <= w[0].x) {
        return Err(Error::NonMonotonicAxis { index: i + 1 });
    }
    let mut out = csv_line([axis, "observed", "expected"]);
    for p in series {
        out.push_str(&csv_line([
            p.x.to_string(),
            p.observed.map(|o| o.to_string()).unwrap_or_default(),
            p.expected.map(|e| e.to_string()).unwrap_or_default(),
        ]));
    }
    Ok(out)
}
