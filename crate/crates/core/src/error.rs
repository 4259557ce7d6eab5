use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("row {row}: label is empty")]
    EmptyLabel { row: usize },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("histogram total is zero")]
    ZeroTotal,
    #[error("target count {n} exceeds population {population}")]
    TargetExceedsPopulation { n: u64, population: u64 },
    #[error("population is zero")]
    ZeroPopulation,
    #[error("count {count} exceeds population {population}")]
    CountExceedsPopulation { count: u64, population: u64 },
    #[error("sample references label `{0}` absent from the source histogram")]
    UnknownLabelInSample(String),
    #[error("series is empty")]
    EmptySeries,
    #[error("series axis is not strictly increasing at row {index}")]
    NonMonotonicAxis { index: usize },
    #[error("comparison matrix needs at least one column")]
    EmptyComparison,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("histogram spec line {line}: {reason}")]
    HistogramSpec { line: usize, reason: String },
    #[error("run matrix line {line}: {reason}")]
    RunMatrix { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad configuration or arguments rather than bad data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::HistogramSpec { .. }
                | Error::RunMatrix { .. }
                | Error::ZeroTotal
                | Error::TargetExceedsPopulation { .. }
        )
    }
}
