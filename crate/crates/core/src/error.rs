use crate::descriptor::Margins;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid image dimensions {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("coordinate ({x}, {y}) is out of bounds")]
    OutOfBounds { x: i64, y: i64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("unsupported point-set topology size {0} (expected 1, 4 or 9)")]
    InvalidTopology(u32),
    #[error("image {width}x{height} is too small for operator margins {margins:?}")]
    ImageTooSmall {
        width: u32,
        height: u32,
        margins: Margins,
    },
    #[error("face models were built with different parameters")]
    IncompatibleModels,
    #[error("gallery is empty")]
    EmptyGallery,
    #[error("subject id must not be empty")]
    EmptySubject,
    #[error("bad model magic")]
    BadMagic,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u16),
    #[error("model data truncated: need {expected} bytes, have {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("corrupt model: {0}")]
    CorruptModel(&'static str),
}
