//! Corpus orchestration: manifests in, barcodes cached, distance matrices
//! out, experiments and reports on top.

pub mod cache;
pub mod experiment;
pub mod manifest;
pub mod report;
pub mod toy;

pub use cache::{content_digest, BarcodeStore};
pub use manifest::{CorpusManifest, ManifestEntry};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::cubical::build_filtration;
use crate::error::{Error, Result};
use crate::imaging::{decode_image, extract_channels, resize_capped, Channel};
use crate::metrics::{self, DistanceMatrix, Metric};
use crate::persistence::{compute_barcode, HomologyDim};

/// One corpus image after the barcode stage.
#[derive(Debug, Clone)]
pub struct ImageRecord {
    pub image_id: String,
    pub group: String,
    /// sha-256 of the image file bytes; the cache key.
    pub digest: String,
}

/// Outcome of running the barcode stage over a manifest.
#[derive(Debug, Clone)]
pub struct BarcodeRun {
    /// Images in manifest order.
    pub images: Vec<ImageRecord>,
    pub resize: Option<u32>,
    /// Images whose barcodes were computed this run.
    pub computed: usize,
    /// Images served entirely from the cache.
    pub cached: usize,
}

/// Compute (or reuse) the ten barcodes of every manifest image.
///
/// Any per-image failure aborts the whole run — a partial corpus would
/// silently change what the downstream tests mean.
pub fn compute_all_barcodes(manifest: &CorpusManifest, store: &BarcodeStore) -> Result<BarcodeRun> {
    let resize = manifest.resize;
    let outcomes = manifest
        .entries()
        .par_iter()
        .map(|entry| {
            let bytes = std::fs::read(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
            let record = ImageRecord {
                image_id: entry.image_id.clone(),
                group: entry.group.clone(),
                digest: content_digest(&bytes),
            };
            if store.is_complete(&record.digest, resize) {
                return Ok((record, false));
            }
            let img = decode_image(&bytes).map_err(|e| Error::decode(&entry.path, e))?;
            let img = match resize {
                Some(max_side) => resize_capped(&img, max_side),
                None => img,
            };
            let channels = extract_channels(&img);
            for channel in Channel::ALL {
                let complex = build_filtration(channels.get(channel));
                for dim in HomologyDim::ALL {
                    let barcode = compute_barcode(&complex, dim);
                    store.save(
                        &record.digest,
                        resize,
                        channel,
                        dim,
                        &entry.image_id,
                        &barcode,
                    )?;
                }
            }
            Ok((record, true))
        })
        .collect::<Result<Vec<(ImageRecord, bool)>>>()?;
    let computed = outcomes.iter().filter(|(_, fresh)| *fresh).count();
    Ok(BarcodeRun {
        cached: outcomes.len() - computed,
        images: outcomes.into_iter().map(|(record, _)| record).collect(),
        resize,
        computed,
    })
}

/// Hash every manifest image without touching barcodes: the run skeleton
/// for commands that require an already-populated cache and must fail —
/// not silently recompute — when it is missing.
pub fn digest_run(manifest: &CorpusManifest) -> Result<BarcodeRun> {
    let images = manifest
        .entries()
        .par_iter()
        .map(|entry| {
            let bytes = std::fs::read(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
            Ok(ImageRecord {
                image_id: entry.image_id.clone(),
                group: entry.group.clone(),
                digest: content_digest(&bytes),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BarcodeRun {
        images,
        resize: manifest.resize,
        computed: 0,
        cached: 0,
    })
}

/// Pairwise distances between all corpus images for one
/// (channel, dimension, metric), from cached barcodes only.
///
/// `prune` drops intervals with persistence below the threshold before the
/// 1-Wasserstein matching (never before bottleneck).
pub fn distance_matrix(
    store: &BarcodeStore,
    run: &BarcodeRun,
    channel: Channel,
    dim: HomologyDim,
    metric: Metric,
    prune: Option<f64>,
) -> Result<DistanceMatrix> {
    let points = run
        .images
        .iter()
        .map(|img| {
            let barcode = store.load_required(&img.digest, run.resize, channel, dim)?;
            let mut pts = metrics::capped_points(&barcode);
            if metric == Metric::Wasserstein1 {
                if let Some(eps) = prune {
                    pts = metrics::pruned_points(&pts, eps);
                }
            }
            Ok(pts)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let distances: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| match metric {
            Metric::Bottleneck => metrics::bottleneck_points(&points[i], &points[j]),
            Metric::Wasserstein1 => metrics::wasserstein1_points(&points[i], &points[j]),
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), &d) in pairs.iter().zip(&distances) {
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    DistanceMatrix::from_entries(
        run.images.iter().map(|r| r.image_id.clone()).collect(),
        values,
    )
}

/// Reproducibility sidecar written next to experiment outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub software_version: String,
    /// Digest over ids, group labels, and image content digests, in
    /// manifest order: any input byte change changes it.
    pub manifest_digest: String,
    pub design: Option<String>,
    pub seed: u64,
    pub n_perms: usize,
    pub alpha: f64,
    pub resize: Option<u32>,
    pub prune: Option<f64>,
    pub timings_ms: BTreeMap<String, u128>,
    pub outputs: Vec<String>,
}

/// Digest of everything the experiment consumed.
pub fn manifest_digest(run: &BarcodeRun) -> String {
    let mut acc = String::new();
    for img in &run.images {
        acc.push_str(&img.image_id);
        acc.push('\0');
        acc.push_str(&img.group);
        acc.push('\0');
        acc.push_str(&img.digest);
        acc.push('\n');
    }
    content_digest(acc.as_bytes())
}
