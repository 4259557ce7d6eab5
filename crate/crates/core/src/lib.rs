//! Deterministic sampling toolkit for protocol-labeled packet traces.
//!
//! The crate ingests or synthesizes labeled packet records, draws samples with
//! random, systematic, stratified (two-phase) and under/over resampling, and
//! measures what each sample loses: per-class shares, selection probabilities,
//! missing classes and the imbalance ratio.
//!
//! Every randomized routine takes an explicit `u64` seed and is bit-exact
//! across runs and platforms; see [`rng`] for the generator contract.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod samplers;

pub use dataset::{
    histogram, parse_histogram_spec, parse_records, synthesize, Arrangement, ClassHistogram,
    InputFormat, PacketRecord, TraceDataset, DEFAULT_LABEL_COLUMN, PU_TDS_HIST,
};
pub use error::{Error, Result};
pub use metrics::{
    class_report, expected_missing_series, miss_probability_analytic, sample_size_percent,
    sampling_interval, selection_probability, stratified_totals, ImbalanceReport,
    MissProbabilityTable,
};
pub use report::{ComparisonMatrix, RenderFormat};
pub use samplers::{
    random_sample, stratified_sample, systematic_by_count, systematic_sample,
    under_over_sample, Family, SampleResult, SampleSpec, SampledRecord,
};
