//! Random, systematic, stratified and under/over sampling over a [`TraceDataset`].
//!
//! All samplers are pure functions of `(dataset, spec)`. Output order is
//! canonical so that equal inputs give entry-for-entry equal results:
//!
//! | family                   | order                                                  |
//! |--------------------------|--------------------------------------------------------|
//! | random, no replacement   | ascending source position                              |
//! | random, with replacement | draw order                                             |
//! | systematic / by count    | ascending source position                              |
//! | stratified               | strata in first-appearance order, ascending within     |
//! | under/over               | strata in first-appearance order; originals ascending, |
//! |                          | then synthetic duplicates in draw order                |

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::TraceDataset;
use crate::error::{Error, Result};
use crate::metrics::sampling_interval;
use crate::rng::{derive_seed, TraceRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Random { n: usize, with_replacement: bool },
    Systematic { interval: usize },
    SystematicByCount { n: usize },
    Stratified { interval: usize },
    UnderOver { k: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Random { with_replacement: false, .. } => "random",
            Family::Random { with_replacement: true, .. } => "random-wr",
            Family::Systematic { .. } => "systematic",
            Family::SystematicByCount { .. } => "bycount",
            Family::Stratified { .. } => "stratified",
            Family::UnderOver { .. } => "underover",
        }
    }

    /// The family's single numeric parameter (`n`, `I` or `k`).
    pub fn parameter(&self) -> usize {
        match *self {
            Family::Random { n, .. } | Family::SystematicByCount { n } => n,
            Family::Systematic { interval } | Family::Stratified { interval } => interval,
            Family::UnderOver { k } => k,
        }
    }

    /// Name of the parameter as printed in reports.
    pub fn parameter_name(&self) -> &'static str {
        match self {
            Family::Random { .. } | Family::SystematicByCount { .. } => "n",
            Family::Systematic { .. } | Family::Stratified { .. } => "I",
            Family::UnderOver { .. } => "k",
        }
    }

    pub fn is_seeded(&self) -> bool {
        matches!(self, Family::Random { .. } | Family::UnderOver { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if self.parameter() == 0 {
            return Err(Error::InvalidParameter(format!(
                "{} needs {} >= 1",
                self.name(),
                self.parameter_name()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}={}", self.name(), self.parameter_name(), self.parameter())
    }
}

/// A sampling request. `seed` is ignored by the systematic and stratified families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }

    pub fn run(&self, dataset: &TraceDataset) -> Result<SampleResult> {
        self.family.validate()?;
        match self.family {
            Family::Random { n, with_replacement } => {
                random_sample(dataset, n, with_replacement, self.seed)
            }
            Family::Systematic { interval } => systematic_sample(dataset, interval),
            Family::SystematicByCount { n } => systematic_by_count(dataset, n),
            Family::Stratified { interval } => stratified_sample(dataset, interval),
            Family::UnderOver { k } => under_over_sample(dataset, k, self.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledRecord {
    pub source_position: usize,
    pub label: String,
    /// Set only on over-sampling duplicates added beyond a class's originals.
    pub synthetic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleResult {
    pub spec: SampleSpec,
    pub entries: Vec<SampledRecord>,
    pub source_population: usize,
    pub source_class_count: usize,
}

impl SampleResult {
    fn new(
        spec: SampleSpec,
        dataset: &TraceDataset,
        class_count: usize,
        positions: impl IntoIterator<Item = (usize, bool)>,
    ) -> Self {
        let entries = positions
            .into_iter()
            .map(|(pos, synthetic)| SampledRecord {
                source_position: pos,
                label: dataset.get(pos).expect("position in range").label.clone(),
                synthetic,
            })
            .collect();
        Self {
            spec,
            entries,
            source_population: dataset.population(),
            source_class_count: class_count,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn synthetic_count(&self) -> usize {
        self.entries.iter().filter(|e| e.synthetic).count()
    }

    /// CSV with columns `source_position,label,synthetic`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["source_position", "label", "synthetic"])?;
        for e in &self.entries {
            out.write_record([
                e.source_position.to_string().as_str(),
                e.label.as_str(),
                if e.synthetic { "true" } else { "false" },
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Positions of each class, classes in first-appearance order.
pub(crate) fn strata(dataset: &TraceDataset) -> Vec<(&str, Vec<usize>)> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<(&str, Vec<usize>)> = Vec::new();
    for rec in dataset.records() {
        let slot = *index.entry(rec.label.as_str()).or_insert_with(|| {
            out.push((rec.label.as_str(), Vec::new()));
            out.len() - 1
        });
        out[slot].1.push(rec.position);
    }
    out
}

fn require_nonempty(dataset: &TraceDataset) -> Result<()> {
    if dataset.population() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

fn require_positive(value: usize, what: &str) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidParameter(format!("{what} must be >= 1")));
    }
    Ok(())
}

/// Simple random sample of `n` records.
///
/// Without replacement, `min(n, P)` distinct positions come back in ascending
/// order; with replacement, `n` independent uniform draws in draw order.
pub fn random_sample(
    dataset: &TraceDataset,
    n: usize,
    with_replacement: bool,
    seed: u64,
) -> Result<SampleResult> {
    require_nonempty(dataset)?;
    require_positive(n, "n")?;
    let spec = SampleSpec::new(Family::Random { n, with_replacement }, seed);
    let population = dataset.population();
    let mut rng = TraceRng::new(seed);
    let positions: Vec<usize> = if with_replacement {
        (0..n).map(|_| rng.index(population) + 1).collect()
    } else {
        rng.distinct_sorted(population, n)
            .into_iter()
            .map(|i| i + 1)
            .collect()
    };
    let classes = strata(dataset).len();
    Ok(SampleResult::new(spec, dataset, classes, positions.into_iter().map(|p| (p, false))))
}

/// Every `interval`-th record starting at position 1.
pub fn systematic_sample(dataset: &TraceDataset, interval: usize) -> Result<SampleResult> {
    require_nonempty(dataset)?;
    require_positive(interval, "interval")?;
    let spec = SampleSpec::new(Family::Systematic { interval }, 0);
    let picks = (1..=dataset.population()).step_by(interval).map(|p| (p, false));
    Ok(SampleResult::new(spec, dataset, strata(dataset).len(), picks))
}

/// Systematic sample of exactly `n` records with interval `floor(P / n)`.
pub fn systematic_by_count(dataset: &TraceDataset, n: usize) -> Result<SampleResult> {
    require_nonempty(dataset)?;
    require_positive(n, "n")?;
    let interval = sampling_interval(dataset.population() as u64, n as u64)? as usize;
    let mut result = systematic_sample(dataset, interval)?;
    result.entries.truncate(n);
    result.spec = SampleSpec::new(Family::SystematicByCount { n }, 0);
    Ok(result)
}

/// Two-phase sampling: partition by label, then take positions 1, 1+I, ...
/// of every stratum. Each class contributes `ceil(n_i / I)` records.
pub fn stratified_sample(dataset: &TraceDataset, interval: usize) -> Result<SampleResult> {
    require_nonempty(dataset)?;
    require_positive(interval, "interval")?;
    let spec = SampleSpec::new(Family::Stratified { interval }, 0);
    let strata = strata(dataset);
    let classes = strata.len();
    let picks: Vec<(usize, bool)> = strata
        .into_iter()
        .flat_map(|(_, positions)| {
            positions
                .into_iter()
                .step_by(interval)
                .map(|p| (p, false))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(SampleResult::new(spec, dataset, classes, picks))
}

/// Draws exactly `k` records from every class.
///
/// Classes above the quota are under-sampled uniformly without replacement.
/// Classes below it keep all originals and are topped up with uniform
/// duplicates drawn with replacement, flagged `synthetic`. Class `s` (in
/// first-appearance order) uses its own stream `derive_seed(seed, s)`.
pub fn under_over_sample(dataset: &TraceDataset, k: usize, seed: u64) -> Result<SampleResult> {
    require_nonempty(dataset)?;
    require_positive(k, "k")?;
    let spec = SampleSpec::new(Family::UnderOver { k }, seed);
    let strata = strata(dataset);
    let classes = strata.len();
    let mut picks: Vec<(usize, bool)> = Vec::with_capacity(k * classes);
    for (s, (_, positions)) in strata.into_iter().enumerate() {
        let mut rng = TraceRng::new(derive_seed(seed, s as u64));
        let count = positions.len();
        if count >= k {
            picks.extend(
                rng.distinct_sorted(count, k)
                    .into_iter()
                    .map(|i| (positions[i], false)),
            );
        } else {
            picks.extend(positions.iter().map(|&p| (p, false)));
            picks.extend((count..k).map(|_| (positions[rng.index(count)], true)));
        }
    }
    Ok(SampleResult::new(spec, dataset, classes, picks))
}
