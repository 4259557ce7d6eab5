//! Selection probabilities, sample sizes, per-class shares, missing classes,
//! and the analytic and Monte Carlo estimates of information loss.
//!
//! The number of classes appears in the literature as `L`, `l` or `s`; here it
//! is always [`ClassHistogram::class_count`].

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::ClassHistogram;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, TraceRng};
use crate::samplers::{SampleResult, SampleSpec};

/// `n / P`.
pub fn selection_probability(n: u64, population: u64) -> Result<f64> {
    if population == 0 {
        return Err(Error::ZeroPopulation);
    }
    if n > population {
        return Err(Error::CountExceedsPopulation { count: n, population });
    }
    Ok(n as f64 / population as f64)
}

/// `100 * n / P`. `n` may exceed `P` (over-sampling, draws with replacement).
pub fn sample_size_percent(n: u64, population: u64) -> Result<f64> {
    if population == 0 {
        return Err(Error::ZeroPopulation);
    }
    Ok(100.0 * n as f64 / population as f64)
}

/// Systematic interval `floor(P / n)`, never below 1.
pub fn sampling_interval(population: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if n > population {
        return Err(Error::TargetExceedsPopulation { n, population });
    }
    Ok(population / n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedTotals {
    /// `n(s)`, the sum of per-stratum sample counts.
    pub total: u64,
    /// `n_i / P` per stratum.
    pub probabilities: Vec<f64>,
    pub size_percent: f64,
}

pub fn stratified_totals(per_stratum_counts: &[u64], population: u64) -> Result<StratifiedTotals> {
    if population == 0 {
        return Err(Error::ZeroPopulation);
    }
    let total: u64 = per_stratum_counts.iter().sum();
    let probabilities = per_stratum_counts
        .iter()
        .map(|&c| c as f64 / population as f64)
        .collect();
    Ok(StratifiedTotals {
        total,
        probabilities,
        size_percent: sample_size_percent(total, population)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassShare {
    pub label: String,
    pub source_count: u64,
    pub sampled_count: u64,
    /// Share of the sample, in percent.
    pub sampled_percent: f64,
    /// `sampled_count / P`.
    pub selection_probability: f64,
}

/// Per-class composition of one sample against its source histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceReport {
    pub source: ClassHistogram,
    pub spec: Option<SampleSpec>,
    pub per_class: Vec<ClassShare>,
    pub total_sampled: u64,
    pub size_percent: f64,
    pub missing_classes: Vec<String>,
    pub missing_count: usize,
    /// Largest over smallest non-zero sampled count; `None` for an empty sample.
    pub imbalance_ratio: Option<f64>,
    pub display_decimals: usize,
}

impl ImbalanceReport {
    fn from_counts(
        source: &ClassHistogram,
        spec: Option<SampleSpec>,
        counts: &[u64],
        display_decimals: usize,
    ) -> Result<Self> {
        let population = source.total();
        let total_sampled: u64 = counts.iter().sum();
        let mut per_class = Vec::with_capacity(counts.len());
        let mut missing_classes = Vec::new();
        for ((label, source_count), &sampled) in source.entries().iter().zip(counts) {
            if sampled == 0 {
                missing_classes.push(label.clone());
            }
            per_class.push(ClassShare {
                label: label.clone(),
                source_count: *source_count,
                sampled_count: sampled,
                sampled_percent: if total_sampled == 0 {
                    0.0
                } else {
                    100.0 * sampled as f64 / total_sampled as f64
                },
                selection_probability: sampled as f64 / population as f64,
            });
        }
        let nonzero = counts.iter().copied().filter(|&c| c > 0);
        let imbalance_ratio = match (nonzero.clone().max(), nonzero.min()) {
            (Some(max), Some(min)) => Some(max as f64 / min as f64),
            _ => None,
        };
        Ok(Self {
            source: source.clone(),
            spec,
            per_class,
            total_sampled,
            size_percent: sample_size_percent(total_sampled, population)?,
            missing_count: missing_classes.len(),
            missing_classes,
            imbalance_ratio,
            display_decimals,
        })
    }

    pub fn share(&self, label: &str) -> Option<&ClassShare> {
        self.per_class.iter().find(|c| c.label == label)
    }
}

/// The whole-population view: every class sampled at its source count.
pub fn identity_report(source: &ClassHistogram, display_decimals: usize) -> Result<ImbalanceReport> {
    let counts: Vec<u64> = source.entries().iter().map(|e| e.1).collect();
    ImbalanceReport::from_counts(source, None, &counts, display_decimals)
}

/// Per-class composition of `sample`, rows in source-histogram order.
pub fn class_report(
    source: &ClassHistogram,
    sample: &SampleResult,
    display_decimals: usize,
) -> Result<ImbalanceReport> {
    let index: HashMap<&str, usize> = source.labels().enumerate().map(|(i, l)| (l, i)).collect();
    let mut counts = vec![0u64; source.class_count()];
    for e in &sample.entries {
        let i = index
            .get(e.label.as_str())
            .ok_or_else(|| Error::UnknownLabelInSample(e.label.clone()))?;
        counts[*i] += 1;
    }
    ImbalanceReport::from_counts(source, Some(sample.spec), &counts, display_decimals)
}

/// Probability that a class with `count` of `population` records is absent
/// from a uniform sample of size `n`.
///
/// Without replacement this is `C(P-c, n) / C(P, n)`, evaluated as the
/// equivalent product `prod_{j<m} (1 - q / (P - j))` with `(m, q)` the smaller
/// and larger of `(c, n)`, summed in log space. With replacement it is
/// `(1 - c/P)^n`.
pub fn miss_probability(population: u64, count: u64, n: u64, with_replacement: bool) -> Result<f64> {
    if population == 0 {
        return Err(Error::ZeroPopulation);
    }
    if count > population {
        return Err(Error::CountExceedsPopulation { count, population });
    }
    if n == 0 || count == 0 {
        return Ok(1.0);
    }
    if with_replacement {
        if count == population {
            return Ok(0.0);
        }
        let p = count as f64 / population as f64;
        return Ok((n as f64 * (-p).ln_1p()).exp().clamp(0.0, 1.0));
    }
    if n > population {
        return Err(Error::CountExceedsPopulation { count: n, population });
    }
    if count > population - n {
        return Ok(0.0);
    }
    let (terms, q) = if count <= n { (count, n) } else { (n, count) };
    let log: f64 = (0..terms)
        .map(|j| (-(q as f64) / (population - j) as f64).ln_1p())
        .sum();
    Ok(log.exp().clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissRow {
    pub label: String,
    pub source_count: u64,
    pub miss_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissProbabilityTable {
    pub n: u64,
    pub with_replacement: bool,
    pub rows: Vec<MissRow>,
    /// Expected number of missing classes.
    pub expected_missing: f64,
}

pub fn miss_probability_analytic(
    source: &ClassHistogram,
    n: u64,
    with_replacement: bool,
) -> Result<MissProbabilityTable> {
    let population = source.total();
    let rows = source
        .entries()
        .iter()
        .map(|(label, count)| {
            Ok(MissRow {
                label: label.clone(),
                source_count: *count,
                miss_probability: miss_probability(population, *count, n, with_replacement)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let expected_missing = rows.iter().map(|r| r.miss_probability).sum();
    Ok(MissProbabilityTable {
        n,
        with_replacement,
        rows,
        expected_missing,
    })
}

/// `(n, expected_missing)` for each requested sample size.
pub fn expected_missing_series(
    source: &ClassHistogram,
    n_values: &[u64],
    with_replacement: bool,
) -> Result<Vec<(u64, f64)>> {
    n_values
        .iter()
        .map(|&n| Ok((n, miss_probability_analytic(source, n, with_replacement)?.expected_missing)))
        .collect()
}

/// Distribution of missing-class counts over seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingDistribution {
    pub trials: u64,
    /// `counts[m]` is the number of trials that missed exactly `m` classes.
    pub counts: Vec<u64>,
}

impl MissingDistribution {
    fn from_trials(per_trial: Vec<usize>, classes: usize) -> Self {
        let mut counts = vec![0u64; classes + 1];
        for m in &per_trial {
            counts[*m] += 1;
        }
        Self {
            trials: per_trial.len() as u64,
            counts,
        }
    }

    pub fn mean(&self) -> f64 {
        let sum: u64 = self.counts.iter().enumerate().map(|(m, c)| m as u64 * c).sum();
        sum as f64 / self.trials as f64
    }

    /// Standard error of [`Self::mean`].
    pub fn std_error(&self) -> f64 {
        let mean = self.mean();
        let sq: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(m, &c)| c as f64 * (m as f64 - mean).powi(2))
            .sum();
        let var = sq / (self.trials as f64 - 1.0).max(1.0);
        (var / self.trials as f64).sqrt()
    }

    /// Smallest `m` whose cumulative frequency reaches `q`.
    pub fn quantile(&self, q: f64) -> usize {
        let target = q * self.trials as f64;
        let mut acc = 0u64;
        for (m, &c) in self.counts.iter().enumerate() {
            acc += c;
            if acc as f64 >= target {
                return m;
            }
        }
        self.counts.len() - 1
    }
}

fn class_of_position(cumulative: &[u64], position: u64) -> usize {
    cumulative.partition_point(|&end| end <= position)
}

fn count_missing(present: &mut [bool], classes: impl Iterator<Item = usize>) -> usize {
    present.iter_mut().for_each(|p| *p = false);
    for c in classes {
        present[c] = true;
    }
    present.iter().filter(|p| !**p).count()
}

/// Missing-class counts of `trials` random samples of size `n`; trial `t`
/// uses seed `derive_seed(seed, t)`. Trials run in parallel and are
/// aggregated as integers, so the result does not depend on scheduling.
pub fn monte_carlo_missing(
    source: &ClassHistogram,
    n: u64,
    with_replacement: bool,
    trials: u64,
    seed: u64,
) -> Result<MissingDistribution> {
    let population = source.total();
    if !with_replacement && n > population {
        return Err(Error::CountExceedsPopulation { count: n, population });
    }
    let cumulative: Vec<u64> = source
        .entries()
        .iter()
        .scan(0u64, |acc, (_, c)| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let classes = source.class_count();
    let per_trial: Vec<usize> = (0..trials)
        .into_par_iter()
        .map_init(
            || vec![false; classes],
            |present, t| {
                let mut rng = TraceRng::new(derive_seed(seed, t));
                let positions: Vec<usize> = if with_replacement {
                    (0..n).map(|_| rng.index(population as usize)).collect()
                } else {
                    rng.distinct_sorted(population as usize, n as usize)
                };
                count_missing(
                    present,
                    positions
                        .into_iter()
                        .map(|p| class_of_position(&cumulative, p as u64)),
                )
            },
        )
        .collect();
    Ok(MissingDistribution::from_trials(per_trial, classes))
}

/// Missing-class counts of systematic sampling at `interval` over `trials`
/// independently shuffled orderings of the population.
pub fn systematic_shuffled_missing(
    source: &ClassHistogram,
    interval: usize,
    trials: u64,
    seed: u64,
) -> Result<MissingDistribution> {
    if interval == 0 {
        return Err(Error::InvalidParameter("interval must be >= 1".into()));
    }
    let grouped: Vec<usize> = source
        .entries()
        .iter()
        .enumerate()
        .flat_map(|(i, (_, c))| std::iter::repeat_n(i, *c as usize))
        .collect();
    let classes = source.class_count();
    let per_trial: Vec<usize> = (0..trials)
        .into_par_iter()
        .map_init(
            || (vec![false; classes], grouped.clone()),
            |(present, order), t| {
                order.copy_from_slice(&grouped);
                TraceRng::new(derive_seed(seed, t)).shuffle(order);
                count_missing(present, order.iter().step_by(interval).copied())
            },
        )
        .collect();
    Ok(MissingDistribution::from_trials(per_trial, classes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_histogram_spec, synthesize, Arrangement, PU_TDS_HIST};
    use crate::samplers::{stratified_sample, under_over_sample};

    fn pu_tds() -> ClassHistogram {
        parse_histogram_spec(PU_TDS_HIST).unwrap()
    }

    fn round(x: f64, d: i32) -> f64 {
        let s = 10f64.powi(d);
        (x * s).round() / s
    }

    #[test]
    fn selection_probability_cases() {
        assert_eq!(round(selection_probability(11735, 30000).unwrap(), 5), 0.39117);
        assert_eq!(round(selection_probability(1, 30000).unwrap(), 5), 0.00003);
        assert_eq!(selection_probability(7, 7).unwrap(), 1.0);
        assert!(matches!(selection_probability(1, 0), Err(Error::ZeroPopulation)));
        assert!(matches!(
            selection_probability(8, 7),
            Err(Error::CountExceedsPopulation { .. })
        ));
    }

    #[test]
    fn size_percent_cases() {
        assert!((sample_size_percent(6012, 30000).unwrap() - 20.04).abs() < 1e-12);
        assert_eq!(sample_size_percent(0, 30000).unwrap(), 0.0);
        assert_eq!(round(sample_size_percent(3235, 30000).unwrap(), 3), 10.783);
        assert!(matches!(sample_size_percent(1, 0), Err(Error::ZeroPopulation)));
    }

    #[test]
    fn interval_cases() {
        assert_eq!(sampling_interval(10000, 1000).unwrap(), 10);
        assert_eq!(sampling_interval(55, 55).unwrap(), 1);
        // 7 * 4286 = 30002 > 30000, so the floor is 6; ceil(30000 / 6) = 5000 >= 4286.
        assert_eq!(sampling_interval(30000, 4286).unwrap(), 6);
        assert!(30000u64.div_ceil(6) >= 4286);
        assert_eq!(sampling_interval(30000, 3000).unwrap(), 10);
        assert!(matches!(
            sampling_interval(10, 11),
            Err(Error::TargetExceedsPopulation { .. })
        ));
    }

    #[test]
    fn stratified_totals_cases() {
        let h = pu_tds();
        let at = |i: u64| -> Vec<u64> { h.entries().iter().map(|e| e.1.div_ceil(i)).collect() };
        assert_eq!(stratified_totals(&at(5), 30000).unwrap().total, 6012);
        let t = stratified_totals(&at(10), 30000).unwrap();
        assert_eq!(t.total, 3015);
        assert!((t.size_percent - 10.05).abs() < 1e-12);
        let z = stratified_totals(&[0, 0, 0], 10).unwrap();
        assert_eq!((z.total, z.size_percent), (0, 0.0));
        assert_eq!(z.probabilities, vec![0.0; 3]);
    }

    #[test]
    fn report_stratified_dhcp() {
        let h = pu_tds();
        let ds = synthesize(&h, 0, Arrangement::Shuffled).unwrap();
        let r = class_report(&h, &stratified_sample(&ds, 5).unwrap(), 3).unwrap();
        assert_eq!(r.total_sampled, 6012);
        let dhcp = r.share("DHCP").unwrap();
        assert_eq!(dhcp.sampled_count, 70);
        assert_eq!(round(dhcp.sampled_percent, 3), 1.164);
        assert_eq!(r.missing_count, 0);
    }

    #[test]
    fn identity_report_matches_probabilities() {
        let h = pu_tds();
        let r = identity_report(&h, 3).unwrap();
        assert_eq!(r.missing_count, 0);
        assert_eq!(r.imbalance_ratio, Some(11735.0));
        let sum: f64 = r.per_class.iter().map(|c| c.selection_probability).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        for c in &r.per_class {
            assert_eq!(
                c.selection_probability,
                selection_probability(c.source_count, 30000).unwrap()
            );
        }
    }

    #[test]
    fn under_over_report_balanced() {
        let h = pu_tds();
        let ds = synthesize(&h, 0, Arrangement::Shuffled).unwrap();
        let r = class_report(&h, &under_over_sample(&ds, 100, 0).unwrap(), 3).unwrap();
        assert!(r.per_class.iter().all(|c| (c.sampled_percent - 4.0).abs() < 1e-12));
        assert_eq!(r.imbalance_ratio, Some(1.0));
        assert_eq!(r.missing_count, 0);
    }

    #[test]
    fn unknown_label_rejected() {
        let h = parse_histogram_spec("A,2\n").unwrap();
        let ds = crate::dataset::TraceDataset::from_labels(["A", "B"]).unwrap();
        let s = crate::samplers::systematic_sample(&ds, 1).unwrap();
        assert!(matches!(class_report(&h, &s, 3), Err(Error::UnknownLabelInSample(l)) if l == "B"));
    }

    #[test]
    fn miss_probability_cases() {
        let p = miss_probability(30000, 1, 500, false).unwrap();
        assert!((p - 29500.0 / 30000.0).abs() < 1e-14);
        let t = miss_probability_analytic(&pu_tds(), 0, false).unwrap();
        assert!(t.rows.iter().all(|r| r.miss_probability == 1.0));
        assert_eq!(t.expected_missing, 25.0);
        assert_eq!(miss_probability(10, 4, 7, false).unwrap(), 0.0);
        assert!(matches!(
            miss_probability(10, 1, 11, false),
            Err(Error::CountExceedsPopulation { .. })
        ));
        assert!((miss_probability(10, 2, 3, true).unwrap() - 0.8f64.powi(3)).abs() < 1e-14);
        assert_eq!(miss_probability(5, 5, 1, true).unwrap(), 0.0);
    }

    #[test]
    fn expected_missing_at_500() {
        let e = miss_probability_analytic(&pu_tds(), 500, false).unwrap().expected_missing;
        assert!((e - 8.545259214).abs() < 1e-6, "{e}");
    }

    #[test]
    fn series_at_population_is_zero() {
        let s = expected_missing_series(&pu_tds(), &[30000], false).unwrap();
        assert_eq!(s, vec![(30000, 0.0)]);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let h = pu_tds();
        let a = monte_carlo_missing(&h, 500, false, 64, 3).unwrap();
        let b = monte_carlo_missing(&h, 500, false, 64, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 64);
        let s = systematic_shuffled_missing(&h, 7, 16, 0).unwrap();
        assert_eq!(s, systematic_shuffled_missing(&h, 7, 16, 0).unwrap());
    }

    #[test]
    fn distribution_stats() {
        let d = MissingDistribution::from_trials(vec![1, 1, 3, 3], 4);
        assert_eq!(d.mean(), 2.0);
        assert_eq!(d.quantile(0.5), 1);
        assert_eq!(d.quantile(0.975), 3);
        assert!((d.std_error() - (4.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
    }
}
