use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("value {value} at index {index} is outside [{lower}, {upper}]")]
    OutOfRange {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("identical images: PSNR is infinite")]
    IdenticalImages,

    #[error("constant image: correlation is undefined")]
    ConstantImage,

    #[error("SSIM of the non-separable region is zero; |1/SSIM| diverges")]
    ZeroSsim,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("population of {size} is too small; at least {needed} members are required")]
    PopulationTooSmall { size: usize, needed: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("pixel value {value} at index {index} is neither black nor white")]
    NotBinary { index: usize, value: u8 },

    #[error("unsupported image format in {path}: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("failed to decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("incompatible target: {0}")]
    IncompatibleTarget(String),

    #[error("configuration error: {}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("encoding error on {path}: {reason}")]
    Encode { path: PathBuf, reason: String },
}

/// One invalid field in a run configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub reason: String,
}

impl ConfigIssue {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("{}: {}", i.field, i.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config(vec![ConfigIssue::new(field, reason)])
    }

    /// True for failures caused by the file system rather than by inputs.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Decode { .. } | Error::Encode { .. }
        )
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
