//! Error type shared by all modules of the crate.

use std::fmt;

/// Errors raised by signal construction, decomposition, and feature extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input has fewer samples than the operation requires.
    TooShort { needed: usize, got: usize },
    /// A constructor or operation was handed an invalid parameter.
    InvalidParam(String),
    /// Spline knots must have strictly increasing x.
    NonIncreasingKnots { index: usize },
    /// Spline fitting needs at least two knots.
    TooFewKnots { got: usize },
    /// The series has too few extrema to build both envelopes; the caller
    /// should treat it as a residue rather than sift further.
    MonotoneResidue,
    /// Two series that must share a grid (length, rate, start time) do not.
    GridMismatch,
    /// The SD stopping ratio is undefined because the reference iterate is
    /// identically zero.
    SdUndefined,
    /// Amplitude is identically zero, so no frequency statistic exists.
    AllZeroAmplitude,
    /// The operation needs at least one IMF.
    EmptyDecomposition,
    /// Feature extraction was called with no detected peaks.
    NoPeaks,
    /// Level sizes in a wavelet decomposition are inconsistent.
    MalformedDecomposition(String),
    /// A text input failed to parse; `line` is 1-based.
    Parse { line: usize, message: String },
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooShort { needed, got } => {
                write!(f, "series too short: need at least {needed} samples, got {got}")
            }
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonIncreasingKnots { index } => {
                write!(f, "knot x values must be strictly increasing (violated at knot {index})")
            }
            Error::TooFewKnots { got } => {
                write!(f, "spline needs at least 2 knots, got {got}")
            }
            Error::MonotoneResidue => {
                write!(f, "too few extrema to build envelopes (monotone residue)")
            }
            Error::GridMismatch => write!(f, "series do not share a sampling grid"),
            Error::SdUndefined => write!(f, "SD undefined: previous iterate is identically zero"),
            Error::AllZeroAmplitude => write!(f, "amplitude is identically zero"),
            Error::EmptyDecomposition => write!(f, "decomposition contains no IMFs"),
            Error::NoPeaks => write!(f, "no peaks supplied for feature extraction"),
            Error::MalformedDecomposition(msg) => write!(f, "malformed decomposition: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
