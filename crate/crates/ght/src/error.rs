//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GhtError {
    #[error("empty image")]
    EmptyImage,
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("bin centers must be nondecreasing (violation at index {0})")]
    UnsortedBins(usize),
    #[error("counts must be finite and nonnegative (violation at index {0})")]
    NegativeCount(usize),
    #[error("total count must be positive")]
    ZeroTotal,
    #[error("bin centers must be finite (violation at index {0})")]
    NonFiniteBin(usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("histogram csv: {0}")]
    HistogramCsv(String),
    #[error("image dimensions mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("unsupported image format: {0}")]
    UnsupportedImage(String),
    #[error("uniform ground truth")]
    UniformGroundTruth,
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("image codec: {0}")]
    Codec(String),
}
