use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] elbp_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Image { path: PathBuf, source: ImageError },
    #[error("{}: {source}", path.display())]
    Model {
        path: PathBuf,
        source: elbp_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Manifest {
        path: PathBuf,
        source: ManifestError,
    },
    #[error("{}: image is {found:?}, expected {expected:?} like the rest of the dataset", path.display())]
    DimensionMismatch {
        path: PathBuf,
        expected: (u32, u32),
        found: (u32, u32),
    },
    #[error("{}: {source}", path.display())]
    Build {
        path: PathBuf,
        source: elbp_core::Error,
    },
    #[error("dataset has no {0} images")]
    EmptySplit(&'static str),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("unrecognized image format (expected PGM P5 or PNG)")]
    UnknownFormat,
    #[error("corrupt image: {0}")]
    Corrupt(String),
    #[error("unsupported bit depth: {0}")]
    UnsupportedDepth(String),
    #[error("unsupported color type {0} (expected 8-bit gray or RGB)")]
    UnsupportedColor(String),
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("line {line}: expected 3 tab-separated columns (path, subject, split), found {found}")]
    Columns { line: u64, found: usize },
    #[error("line {line}: unknown split `{token}` (allowed: gallery, probe)")]
    UnknownSplit { line: u64, token: String },
    #[error("line {line}: empty {field}")]
    EmptyField { line: u64, field: &'static str },
    #[error("line {line}: duplicate path {}", path.display())]
    DuplicatePath { line: u64, path: PathBuf },
    #[error("line {line}: probe subject `{subject}` has no gallery image")]
    UnseenSubject { line: u64, subject: String },
    #[error("manifest has no gallery entries")]
    NoGallery,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
