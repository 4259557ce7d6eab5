//! Labeled packet records, class histograms, ingestion and synthesis.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::TraceRng;

/// Label column of a Wireshark-style CSV export
/// (`No.,Time,Source,Destination,Protocol,Length,Info`).
pub const DEFAULT_LABEL_COLUMN: &str = "Protocol";

/// The 30000-record, 25-protocol PU-TDS class histogram.
pub const PU_TDS_HIST: &str = include_str!("../data/pu_tds.hist");

/// One labeled traffic record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketRecord {
    /// 1-based ordinal within the owning dataset.
    pub position: usize,
    pub label: String,
    /// Every non-label column, in input order.
    pub attributes: Vec<(String, String)>,
}

/// An ordered population of records. Positions are always `1..=P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceDataset {
    records: Vec<PacketRecord>,
}

impl TraceDataset {
    /// Builds a dataset from labels in order, with no attributes.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let rows = labels.into_iter().map(|l| (l.into(), Vec::new()));
        Self::from_rows(rows)
    }

    fn from_rows<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<(String, String)>)>,
    {
        let mut records = Vec::new();
        for (i, (label, attributes)) in rows.into_iter().enumerate() {
            let label = label.trim();
            if label.is_empty() {
                return Err(Error::EmptyLabel { row: i + 1 });
            }
            records.push(PacketRecord {
                position: i + 1,
                label: label.to_string(),
                attributes,
            });
        }
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[PacketRecord] {
        &self.records
    }

    /// Total record count `P`.
    pub fn population(&self) -> usize {
        self.records.len()
    }

    /// Record at 1-based `position`.
    pub fn get(&self, position: usize) -> Option<&PacketRecord> {
        position.checked_sub(1).and_then(|i| self.records.get(i))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.label.as_str())
    }

    /// Writes the dataset as CSV: `No.`, the label column, then every attribute
    /// key in first-seen order.
    pub fn write_csv<W: Write>(&self, writer: W, label_column: &str) -> Result<()> {
        let mut keys: Vec<&str> = Vec::new();
        for rec in &self.records {
            for (k, _) in &rec.attributes {
                if k != "No." && k != label_column && !keys.contains(&k.as_str()) {
                    keys.push(k);
                }
            }
        }
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["No.", label_column];
        header.extend(keys.iter().copied());
        out.write_record(&header)?;
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for rec in &self.records {
            row.clear();
            row.push(rec.position.to_string());
            row.push(rec.label.clone());
            for key in &keys {
                let value = rec
                    .attributes
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default();
                row.push(value);
            }
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Per-label instance counts in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassHistogram {
    entries: Vec<(String, u64)>,
}

impl ClassHistogram {
    /// Every count must be positive and every label unique and non-blank.
    pub fn new(entries: Vec<(String, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroTotal);
        }
        let mut seen = HashMap::new();
        let mut clean = Vec::with_capacity(entries.len());
        for (label, count) in entries {
            let label = label.trim().to_string();
            if label.is_empty() {
                return Err(Error::InvalidParameter("histogram label is empty".into()));
            }
            if count == 0 {
                return Err(Error::InvalidParameter(format!(
                    "class `{label}` has zero instances"
                )));
            }
            if seen.insert(label.clone(), ()).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "class `{label}` listed twice"
                )));
            }
            clean.push((label, count));
        }
        Ok(Self { entries: clean })
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    /// Number of classes, `L`.
    pub fn class_count(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn count_of(&self, label: &str) -> Option<u64> {
        self.index_of(label).map(|i| self.entries[i].1)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|(l, _)| l == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    /// Largest count over smallest count.
    pub fn imbalance_ratio(&self) -> f64 {
        let max = self.entries.iter().map(|e| e.1).max().unwrap_or(0);
        let min = self.entries.iter().map(|e| e.1).min().unwrap_or(0);
        max as f64 / min as f64
    }

    /// Renders the `label,count` spec format read by [`parse_histogram_spec`].
    pub fn to_spec(&self) -> String {
        self.entries
            .iter()
            .map(|(l, c)| format!("{l},{c}\n"))
            .collect()
    }
}

/// Parses `label,count` lines; blank lines and `#` comments are skipped.
/// The count follows the last comma, so labels may contain commas.
pub fn parse_histogram_spec(text: &str) -> Result<ClassHistogram> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::HistogramSpec { line: i + 1, reason };
        let (label, count) = line
            .rsplit_once(',')
            .ok_or_else(|| err("expected `label,count`".into()))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| err(format!("bad count `{}`", count.trim())))?;
        if label.trim().is_empty() {
            return Err(err("empty label".into()));
        }
        if count == 0 {
            return Err(err(format!("class `{}` has zero count", label.trim())));
        }
        entries.push((label.trim().to_string(), count));
    }
    ClassHistogram::new(entries).map_err(|e| match e {
        Error::InvalidParameter(reason) => Error::HistogramSpec { line: 0, reason },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Ndjson,
}

impl FromStr for InputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "ndjson" | "jsonl" => Ok(Self::Ndjson),
            other => Err(Error::InvalidParameter(format!("unknown input format `{other}`"))),
        }
    }
}

/// Reads labeled records in file order; positions are assigned `1..=P`.
pub fn parse_records<R: Read>(
    reader: R,
    format: InputFormat,
    label_column: &str,
) -> Result<TraceDataset> {
    match format {
        InputFormat::Csv => parse_csv(reader, label_column),
        InputFormat::Ndjson => parse_ndjson(reader, label_column),
    }
}

fn parse_csv<R: Read>(reader: R, label_column: &str) -> Result<TraceDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| malformed(&e, 1))?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| Error::MissingLabelColumn(label_column.to_string()))?;

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| malformed(&e, i + 2))?;
        let label = rec.get(label_idx).unwrap_or_default().to_string();
        let attributes = headers
            .iter()
            .zip(rec.iter())
            .enumerate()
            .filter(|(j, _)| *j != label_idx)
            .map(|(_, (k, v))| (k.to_string(), v.to_string()))
            .collect();
        rows.push((label, attributes));
    }
    TraceDataset::from_rows(rows)
}

fn malformed(e: &csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    let reason = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
        _ => e.to_string(),
    };
    Error::MalformedRow { line, reason }
}

fn parse_ndjson<R: Read>(mut reader: R, label_column: &str) -> Result<TraceDataset> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| {
        if e.kind() == std::io::ErrorKind::InvalidData {
            Error::MalformedRow {
                line: 0,
                reason: "invalid UTF-8".into(),
            }
        } else {
            Error::Io(e)
        }
    })?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::MalformedRow { line: i + 1, reason };
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let serde_json::Value::Object(map) = value else {
            return Err(bad("expected a JSON object".into()));
        };
        let mut label = None;
        let mut attributes = Vec::with_capacity(map.len());
        for (k, v) in map {
            let text = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            };
            if k == label_column {
                label = Some(text);
            } else {
                attributes.push((k, text));
            }
        }
        let label = label.ok_or_else(|| bad(format!("missing field `{label_column}`")))?;
        rows.push((label, attributes));
    }
    TraceDataset::from_rows(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arrangement {
    /// Seeded uniform permutation of all records.
    Shuffled,
    /// Classes emitted contiguously in histogram order.
    Grouped,
}

impl FromStr for Arrangement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffled" => Ok(Self::Shuffled),
            "grouped" => Ok(Self::Grouped),
            other => Err(Error::InvalidParameter(format!("unknown arrangement `{other}`"))),
        }
    }
}

/// Builds a dataset with exactly the counts of `spec`.
pub fn synthesize(spec: &ClassHistogram, seed: u64, arrangement: Arrangement) -> Result<TraceDataset> {
    if spec.total() == 0 {
        return Err(Error::ZeroTotal);
    }
    let mut order: Vec<u32> = spec
        .entries()
        .iter()
        .enumerate()
        .flat_map(|(i, (_, c))| std::iter::repeat_n(i as u32, *c as usize))
        .collect();
    if arrangement == Arrangement::Shuffled {
        TraceRng::new(seed).shuffle(&mut order);
    }
    let labels = spec.entries();
    TraceDataset::from_labels(order.into_iter().map(|i| labels[i as usize].0.as_str()))
}

/// Class counts in first-appearance order.
pub fn histogram(dataset: &TraceDataset) -> Result<ClassHistogram> {
    if dataset.population() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut entries: Vec<(String, u64)> = Vec::new();
    for label in dataset.labels() {
        let slot = *index.entry(label).or_insert_with(|| {
            entries.push((label.to_string(), 0));
            entries.len() - 1
        });
        entries[slot].1 += 1;
    }
    ClassHistogram::new(entries)
}
