//! On-disk barcode cache.
//!
//! Files are keyed by the sha-256 of the image bytes plus the processing
//! options that shape the complex (the resize cap), never by path, so a
//! renamed or duplicated image file reuses its barcodes. One JSON file per
//! (digest, options, channel, dimension).

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::imaging::Channel;
use crate::persistence::format::BarcodeFile;
use crate::persistence::{Barcode, HomologyDim};

/// Hex sha-256 of arbitrary bytes.
pub fn content_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").expect("writing to a string");
    }
    hex
}

fn resize_tag(resize: Option<u32>) -> String {
    match resize {
        Some(n) => format!("r{n}"),
        None => "native".to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct BarcodeStore {
    dir: PathBuf,
}

impl BarcodeStore {
    pub fn open(dir: &Path) -> Result<BarcodeStore> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(BarcodeStore {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn barcode_path(
        &self,
        digest: &str,
        resize: Option<u32>,
        channel: Channel,
        dim: HomologyDim,
    ) -> PathBuf {
        self.dir.join(format!(
            "{}_{}_{}_d{}.json",
            &digest[..32.min(digest.len())],
            resize_tag(resize),
            channel.as_str(),
            dim.index()
        ))
    }

    /// Whether all ten barcodes of an image are already cached.
    pub fn is_complete(&self, digest: &str, resize: Option<u32>) -> bool {
        Channel::ALL.iter().all(|&ch| {
            HomologyDim::ALL
                .iter()
                .all(|&dim| self.barcode_path(digest, resize, ch, dim).is_file())
        })
    }

    pub fn save(
        &self,
        digest: &str,
        resize: Option<u32>,
        channel: Channel,
        dim: HomologyDim,
        image_id: &str,
        barcode: &Barcode,
    ) -> Result<()> {
        let path = self.barcode_path(digest, resize, channel, dim);
        let file = BarcodeFile::from_barcode(image_id, channel, barcode);
        std::fs::write(&path, file.to_json_bytes()).map_err(|e| Error::io(&path, e))
    }

    /// Load and validate one cached barcode; `None` if it is not cached.
    pub fn load(
        &self,
        digest: &str,
        resize: Option<u32>,
        channel: Channel,
        dim: HomologyDim,
    ) -> Result<Option<Barcode>> {
        let path = self.barcode_path(digest, resize, channel, dim);
        let bytes = match std::fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let file = BarcodeFile::from_json_bytes(&bytes)
            .map_err(|e| Error::integrity(format!("{}: {e}", path.display())))?;
        Ok(Some(file.to_barcode()?))
    }

    /// Load a barcode that must exist.
    pub fn load_required(
        &self,
        digest: &str,
        resize: Option<u32>,
        channel: Channel,
        dim: HomologyDim,
    ) -> Result<Barcode> {
        self.load(digest, resize, channel, dim)?.ok_or_else(|| {
            Error::integrity(format!(
                "barcode {} is missing from the cache; run `barcodes` first",
                self.barcode_path(digest, resize, channel, dim).display()
            ))
        })
    }
}
