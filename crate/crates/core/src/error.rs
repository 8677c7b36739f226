//! Shared error type for the library.

use std::fmt;

/// Errors raised across the library. Negative mathematical results (a matrix
/// that does not decompose, a subset that does not exist, an extension with
/// no witness) are reported as `Option::None` by the operations concerned;
/// this enum covers genuine contract violations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("graph sides must both be nonempty")]
    ZeroSide,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("duplicate target index: {0}")]
    DuplicateTarget(String),
    #[error("source vertex already mapped: {0}")]
    AlreadyMapped(String),
    #[error("map is not a partial isomorphism: {0}")]
    NotPartialIso(String),
    #[error("input too small for the requested analysis: {0}")]
    TooSmall(String),
    #[error("flip matrix fails the 2x2 parity test; the map lies outside the two-sided switch class")]
    NotInSLR,
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("{0}")]
    Parse(#[from] TextError),
}

/// Parse failure in one of the text formats, with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl TextError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        TextError {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for TextError {}
