//! Array (NPY v1.0) and grayscale image (binary PGM) files.

mod npy;
mod pgm;

pub use npy::{load_array, read_npy, save_array, write_npy, ArrayData, NdArray};
pub use pgm::{load_image, read_pgm, save_image, write_pgm, PgmDepth};

use thiserror::Error;

/// Malformed or incompatible file contents.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}.{1}")]
    UnsupportedVersion(u8, u8),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("dtype mismatch: expected {expected}, found {found}")]
    DtypeMismatch { expected: String, found: String },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}
