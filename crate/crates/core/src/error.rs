//! Error types shared across the crate.
//!
//! Contract violations (mismatched barcode dimensions, out-of-range
//! homology dimensions) are programming errors and panic; everything
//! environmental or data-dependent comes back as an [`Error`].

use std::path::PathBuf;

/// Errors produced while loading data or orchestrating a run.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The file could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The file was readable but not decodable as an image.
    #[error("cannot decode {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    /// The requested run is misconfigured (bad manifest shape, bad
    /// arguments, design/manifest mismatch). CLI exit code 2.
    #[error("configuration error: {0}")]
    Config(String),

    /// Inputs are inconsistent with each other (missing barcode, missing
    /// matrix entry, corrupt cache file). CLI exit code 3.
    #[error("data integrity error: {0}")]
    Integrity(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    pub fn decode(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Decode {
            path: path.into(),
            source,
        }
    }

    /// Process exit code convention: 2 for configuration mistakes the user
    /// can fix on the command line, 3 for anything wrong with the data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Decode { .. } | Error::Integrity(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
