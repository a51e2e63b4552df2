//! Corpus manifests: the CSV listing of images, their ids, and their
//! group labels, plus the per-run processing options.
//!
//! Parsing is split from filesystem validation so the parser can be fed
//! arbitrary bytes (it must reject them gracefully, never panic), while
//! [`CorpusManifest::load`] additionally resolves relative paths against
//! the manifest's directory and checks that every listed file exists.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const MANIFEST_HEADER: [&str; 3] = ["image_id", "path", "group"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub image_id: String,
    pub path: PathBuf,
    pub group: String,
}

/// A parsed and validated corpus listing with processing options.
#[derive(Debug, Clone)]
pub struct CorpusManifest {
    entries: Vec<ManifestEntry>,
    /// Cap on the longest image side; `None` analyzes native resolution.
    pub resize: Option<u32>,
    /// Minimum persistence kept on the 1-Wasserstein path; `None` keeps
    /// everything.
    pub prune: Option<f64>,
}

impl CorpusManifest {
    /// Parse manifest CSV bytes. Pure function of the bytes: no path
    /// resolution, no existence checks.
    pub fn parse_csv(bytes: &[u8]) -> Result<Vec<ManifestEntry>> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(bytes);
        let mut records = reader.records();
        let header = match records.next() {
            Some(Ok(rec)) => rec,
            Some(Err(e)) => return Err(Error::config(format!("malformed manifest CSV: {e}"))),
            None => return Err(Error::config("manifest CSV is empty")),
        };
        let header_fields: Vec<&str> = header.iter().collect();
        if header_fields != MANIFEST_HEADER {
            return Err(Error::config(format!(
                "manifest header must be `image_id,path,group`, got `{}`",
                header_fields.join(",")
            )));
        }
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, rec) in records.enumerate() {
            let rec = rec.map_err(|e| Error::config(format!("malformed manifest CSV: {e}")))?;
            if rec.len() != 3 {
                return Err(Error::config(format!(
                    "manifest row {} has {} fields, expected 3",
                    i + 2,
                    rec.len()
                )));
            }
            let (id, path, group) = (&rec[0], &rec[1], &rec[2]);
            if id.is_empty() || path.is_empty() || group.is_empty() {
                return Err(Error::config(format!(
                    "manifest row {} has an empty field",
                    i + 2
                )));
            }
            if !seen.insert(id.to_string()) {
                return Err(Error::config(format!("duplicate image id `{id}`")));
            }
            entries.push(ManifestEntry {
                image_id: id.to_string(),
                path: PathBuf::from(path),
                group: group.to_string(),
            });
        }
        if entries.is_empty() {
            return Err(Error::config("manifest lists no images"));
        }
        Ok(entries)
    }

    /// Load a manifest file: parse, resolve relative paths against the
    /// manifest's directory, and require every listed image to exist.
    pub fn load(path: &Path, resize: Option<u32>, prune: Option<f64>) -> Result<CorpusManifest> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut entries = CorpusManifest::parse_csv(&bytes)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for entry in &mut entries {
            if entry.path.is_relative() {
                entry.path = base.join(&entry.path);
            }
            if !entry.path.is_file() {
                return Err(Error::integrity(format!(
                    "image `{}` listed in the manifest does not exist at {}",
                    entry.image_id,
                    entry.path.display()
                )));
            }
        }
        if let Some(max_side) = resize {
            if max_side == 0 {
                return Err(Error::config("--resize must be at least 1"));
            }
        }
        if let Some(eps) = prune {
            if !eps.is_finite() || eps < 0.0 {
                return Err(Error::config("--prune must be a finite nonnegative value"));
            }
        }
        Ok(CorpusManifest {
            entries,
            resize,
            prune,
        })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.image_id.clone()).collect()
    }

    /// id → group lookup.
    pub fn group_map(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|e| (e.image_id.clone(), e.group.clone()))
            .collect()
    }

    /// Group labels in first-appearance order with their member counts.
    pub fn group_sizes(&self) -> Vec<(String, usize)> {
        let mut order: Vec<(String, usize)> = Vec::new();
        for entry in &self.entries {
            match order.iter_mut().find(|(g, _)| g == &entry.group) {
                Some((_, count)) => *count += 1,
                None => order.push((entry.group.clone(), 1)),
            }
        }
        order
    }
}
