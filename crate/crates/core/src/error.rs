use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unreadable image {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),

    #[error("zero-dimension image")]
    ZeroDimension,

    #[error("image too small: {width}x{height}, need at least {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("layout infeasible after {0} attempts")]
    LayoutInfeasible(usize),

    #[error("malformed template: {0}")]
    MalformedTemplate(String),

    #[error("malformed score file: {0}")]
    MalformedScoreSet(String),

    #[error("unresolvable template id in pair record {index}")]
    UnresolvedPair { index: usize },

    #[error("no non-mated partners")]
    NoNonMatedPartners,

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("need >= 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("unoriented block at ({x}, {y})")]
    UnorientedBlock { x: usize, y: usize },

    #[error("flat signature")]
    FlatSignature,

    #[error("no measurable patches")]
    NoMeasurablePatches,

    #[error("nfiq2 score {0} outside [0, 100]")]
    Nfiq2OutOfRange(i64),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
