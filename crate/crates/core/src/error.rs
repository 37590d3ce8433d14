//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// NaN or an infinity reached an aggregation entry point.
    #[error("non-finite value {0} is not supported")]
    NonFiniteValue(f64),

    /// `remove` was called on an aggregate that cannot retract values.
    #[error("{0} does not support removal; only whole-window recomputation applies")]
    RemovalUnsupported(&'static str),

    /// `remove` was called on a state with no matching rows left.
    #[error("cannot remove from an empty aggregate state")]
    EmptyState,

    /// `leave` was called on a deque holding no entries.
    #[error("cannot leave an empty deque")]
    EmptyDeque,

    /// Exact integer accumulation left the 128-bit range.
    #[error("integer accumulator overflow")]
    NumericOverflow,

    /// Exhaustive enumeration was requested past the factorial guard.
    #[error("width {0} exceeds the exhaustive enumeration limit of {1}")]
    WidthTooLarge(usize, usize),

    /// A width parameter must be at least 1.
    #[error("width must be at least 1")]
    ZeroWidth,

    /// A numeric parameter is outside its legal domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Frame clause failed validation.
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    /// Strategy cannot evaluate the requested aggregate.
    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    /// Input table could not be ingested.
    #[error("ingest error: {0}")]
    Ingest(String),

    /// Page file I/O failed.
    #[error("spill I/O error: {0}")]
    SpillIo(#[from] std::io::Error),

    /// Result or stats output could not be written.
    #[error("output error: {0}")]
    Output(String),
}

/// Expression parse failure with a byte offset and the token set that would
/// have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.position,
            self.expected.join(" | "),
            self.found
        )
    }
}
