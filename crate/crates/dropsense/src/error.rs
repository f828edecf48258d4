//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants are
//! grouped by pipeline stage so callers (and the CLI) can report which stage
//! rejected a trace without string-matching.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The raw trace failed validation (empty, non-finite sample, bad rate).
    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    /// Not enough samples for the requested window or analysis.
    #[error("segment too short: {len} samples, need at least {min}")]
    SegmentTooShort { len: usize, min: usize },

    /// No window of the power series is quiet enough to be free fall.
    #[error("no weightless region: the signal never enters free fall")]
    NoWeightlessRegion,

    /// No sample after the weightless region exceeds the impact threshold.
    #[error("no touchdown: no impact spike found after the weightless region")]
    NoTouchdown,

    /// The tail of the signal never stays near gravity long enough.
    #[error("never settles: the signal does not stabilize near gravity after impact")]
    NeverSettles,

    /// The cut segment cannot support feature extraction (all-zero, constant).
    #[error("degenerate segment: {0}")]
    DegenerateSegment(String),

    /// Peak-dependent features are undefined for this segment.
    #[error("degenerate peak structure: {0}")]
    DegeneratePeak(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A simulation scenario is physically meaningless.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A function argument violates its documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dataset or manifest violates a structural requirement.
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// A file parsed, but its contents do not match the expected schema.
    #[error("{path}: malformed {format}: {reason}")]
    Malformed {
        path: PathBuf,
        format: &'static str,
        reason: String,
    },

    /// A required CSV column is absent.
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    /// A versioned artifact was written by an incompatible producer.
    #[error("{path}: unsupported format version {found} (supported: {supported})")]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        supported: u32,
    },

    /// A manifest references a file that does not exist.
    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    /// An I/O failure, annotated with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(
        path: impl Into<PathBuf>,
        format: &'static str,
        reason: impl Into<String>,
    ) -> Self {
        Error::Malformed {
            path: path.into(),
            format,
            reason: reason.into(),
        }
    }
}
