use alloc::string::String;
use core::fmt;

use crate::stats::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two sequences that must be aligned have different lengths.
    LengthMismatch {
        left: usize,
        right: usize,
    },
    /// A statistic was asked for on an empty input.
    Empty(&'static str),
    LabelOutOfDomain(Label),
    EmptyDomain,
    DomainMismatch,
    DuplicatePair {
        annotator: String,
        sample: String,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    NonFinite {
        annotator: String,
        sample: String,
    },
    NegativeWeight {
        annotator: String,
        sample: String,
        value: f64,
    },
    ZeroWeightSum {
        annotator: String,
        sample: String,
    },
    /// A Fleiss item has fewer than two raters.
    TooFewRaters {
        item: usize,
        raters: u64,
    },
    RaggedCounts {
        item: usize,
        expected: usize,
        found: usize,
    },
    ZeroVariance,
    ZeroNorm {
        annotator: Option<String>,
    },
    SizeMismatch {
        left: usize,
        right: usize,
    },
    EmptyMask,
    InvalidThreshold(usize),
    NoValidPair {
        tau: usize,
    },
    AnnotatorMismatch,
    TauMismatch {
        left: usize,
        right: usize,
    },
    KeyMismatch {
        annotator: String,
        sample: String,
    },
    MissingAnnotator(String),
    ZeroDenominator,
    TooFewPoints {
        found: usize,
        required: usize,
    },
    NoConvergence {
        sweeps: usize,
    },
    DegenerateConfiguration,
    InvalidConfig(String),
}

impl Error {
    /// Errors caused by numerically degenerate data rather than malformed
    /// input. The CLI maps these to a distinct exit code.
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            Error::ZeroVariance
                | Error::ZeroNorm { .. }
                | Error::EmptyMask
                | Error::NoValidPair { .. }
                | Error::ZeroDenominator
                | Error::NoConvergence { .. }
                | Error::DegenerateConfiguration
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::Empty(what) => write!(f, "empty input: {what}"),
            Error::LabelOutOfDomain(l) => write!(f, "label {l} is outside the label domain"),
            Error::EmptyDomain => f.write_str("label domain is empty"),
            Error::DomainMismatch => f.write_str("label domains differ"),
            Error::DuplicatePair { annotator, sample } => {
                write!(f, "duplicate record for annotator {annotator:?}, sample {sample:?}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite { annotator, sample } => {
                write!(f, "non-finite value for annotator {annotator:?}, sample {sample:?}")
            }
            Error::NegativeWeight { annotator, sample, value } => {
                write!(f, "negative attention weight {value} for annotator {annotator:?}, sample {sample:?}")
            }
            Error::ZeroWeightSum { annotator, sample } => {
                write!(f, "attention weights sum to zero for annotator {annotator:?}, sample {sample:?}")
            }
            Error::TooFewRaters { item, raters } => {
                write!(f, "item {item} has {raters} raters, need at least 2")
            }
            Error::RaggedCounts { item, expected, found } => {
                write!(f, "item {item} has {found} category counts, expected {expected}")
            }
            Error::ZeroVariance => f.write_str("zero variance (constant vector)"),
            Error::ZeroNorm { annotator: Some(a) } => {
                write!(f, "zero-norm mean vector for annotator {a:?}")
            }
            Error::ZeroNorm { annotator: None } => f.write_str("zero-norm vector"),
            Error::SizeMismatch { left, right } => {
                write!(f, "matrix size mismatch: {left} vs {right}")
            }
            Error::EmptyMask => f.write_str("no jointly valid off-diagonal entries"),
            Error::InvalidThreshold(tau) => write!(f, "minimum overlap must be >= 2, got {tau}"),
            Error::NoValidPair { tau } => {
                write!(f, "no annotator pair shares at least {tau} samples")
            }
            Error::AnnotatorMismatch => f.write_str("annotator sets differ"),
            Error::TauMismatch { left, right } => {
                write!(f, "minimum-overlap mismatch: {left} vs {right}")
            }
            Error::KeyMismatch { annotator, sample } => {
                write!(f, "key sets differ at annotator {annotator:?}, sample {sample:?}")
            }
            Error::MissingAnnotator(a) => write!(f, "annotator {a:?} has no entries"),
            Error::ZeroDenominator => f.write_str("reference matrix has zero norm"),
            Error::TooFewPoints { found, required } => {
                write!(f, "need at least {required} points, got {found}")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge after {sweeps} sweeps")
            }
            Error::DegenerateConfiguration => f.write_str("all points coincide"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
