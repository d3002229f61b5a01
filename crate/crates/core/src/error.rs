use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing data for {what} at {date}")]
    MissingData { what: String, date: NaiveDate },

    #[error("{what} is out of range: {detail}")]
    OutOfRange { what: String, detail: String },

    #[error("election cycles {first} and {second} overlap")]
    Overlap { first: i32, second: i32 },

    #[error("{path}: line {line}: schema error: {msg}")]
    Schema { path: String, line: u64, msg: String },

    #[error("{path}: line {line}: invalid value: {msg}")]
    Value { path: String, line: u64, msg: String },

    #[error("degenerate quote: both contract prices are zero")]
    DegenerateQuote,

    #[error("{series} for {period} not yet published as of {as_of}")]
    NotYetPublished {
        series: String,
        period: String,
        as_of: NaiveDate,
    },

    #[error("rank deficient design (condition {condition:.3e}); offending columns: {}", columns.join(", "))]
    RankDeficient { condition: f64, columns: Vec<String> },

    #[error("X'WX is numerically singular")]
    SingularBread,

    #[error("cycle {cycle} has only {usable} usable days; at least {needed} required")]
    InsufficientHistory {
        cycle: i32,
        usable: usize,
        needed: usize,
    },

    #[error("cycle {0} has no recorded winner")]
    UnknownOutcome(i32),

    #[error("shock has zero variance on the estimation sample at horizon {horizon}")]
    DegenerateShock { horizon: usize },

    #[error("insufficient sample at horizon {horizon}: {rows} rows for {params} parameters")]
    InsufficientSample {
        horizon: usize,
        rows: usize,
        params: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
