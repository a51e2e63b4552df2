//! The two experiment designs: every group against the rest of the corpus,
//! and a cohort measured against a single outlier image.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::imaging::Channel;
use crate::metrics::{DistanceMatrix, Metric};
use crate::persistence::HomologyDim;
use crate::stats::{self, PermutationOutcome};

use super::{distance_matrix, BarcodeRun, BarcodeStore};

/// Which permutation tests run over the corpus groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    /// Every group in turn is sample A against all remaining images.
    OneVsRestAll,
    /// One multi-image cohort against a designated single-image group;
    /// the corpus must contain exactly one group of size 1.
    VsSingle,
}

impl Design {
    pub fn as_str(self) -> &'static str {
        match self {
            Design::OneVsRestAll => "one-vs-rest-all",
            Design::VsSingle => "vs-single",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "one-vs-rest-all" => Ok(Design::OneVsRestAll),
            "vs-single" => Ok(Design::VsSingle),
            other => Err(Error::config(format!(
                "unknown design `{other}` (expected `one-vs-rest-all` or `vs-single`)"
            ))),
        }
    }
}

impl std::fmt::Display for Design {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Test parameters shared by every cell of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_perms: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_perms: 10_000,
            seed: 0,
            alpha: 0.05,
        }
    }
}

/// One permutation test, addressed by what was compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub target: String,
    pub channel: Channel,
    pub dimension: HomologyDim,
    pub metric: Metric,
    #[serde(flatten)]
    pub outcome: PermutationOutcome,
}

/// A distance matrix together with the coordinates it was computed for.
#[derive(Debug, Clone)]
pub struct ExperimentMatrix {
    pub channel: Channel,
    pub dimension: HomologyDim,
    pub metric: Metric,
    pub matrix: DistanceMatrix,
}

/// Everything an experiment produced, ready for rendering.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub design: Design,
    /// Groups in manifest first-appearance order with their sizes.
    pub groups: Vec<(String, usize)>,
    /// Groups that served as sample A, in first-appearance order.
    pub targets: Vec<String>,
    /// One record per (target, channel, dimension, metric), nested in
    /// that order.
    pub outcomes: Vec<OutcomeRecord>,
    /// The twenty matrices behind the tests, in (channel, dimension,
    /// metric) order.
    pub matrices: Vec<ExperimentMatrix>,
    pub timings_ms: BTreeMap<String, u128>,
}

impl ExperimentResult {
    /// The record for one table cell.
    pub fn cell(
        &self,
        target: &str,
        channel: Channel,
        dimension: HomologyDim,
        metric: Metric,
    ) -> Option<&OutcomeRecord> {
        self.outcomes.iter().find(|r| {
            r.target == target
                && r.channel == channel
                && r.dimension == dimension
                && r.metric == metric
        })
    }
}

/// On-disk bundle of an experiment's outcomes, written by `permtest` and
/// reloaded by `report` (distance matrices travel separately as CSV).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema_version: u32,
    pub design: Design,
    pub groups: Vec<(String, usize)>,
    pub targets: Vec<String>,
    pub config: ExperimentConfig,
    pub timings_ms: BTreeMap<String, u128>,
    pub outcomes: Vec<OutcomeRecord>,
}

impl ResultsFile {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new(result: &ExperimentResult, config: &ExperimentConfig) -> Self {
        ResultsFile {
            schema_version: Self::SCHEMA_VERSION,
            design: result.design,
            groups: result.groups.clone(),
            targets: result.targets.clone(),
            config: *config,
            timings_ms: result.timings_ms.clone(),
            outcomes: result.outcomes.clone(),
        }
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("results serialize to JSON");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        let file: ResultsFile = serde_json::from_slice(bytes)
            .map_err(|e| Error::integrity(format!("malformed results JSON: {e}")))?;
        if file.schema_version != Self::SCHEMA_VERSION {
            return Err(Error::integrity(format!(
                "results JSON has schema version {}, this build reads {}",
                file.schema_version,
                Self::SCHEMA_VERSION
            )));
        }
        Ok(file)
    }

    /// Rebuild the in-memory result; table rendering never needs the
    /// distance matrices, so they come back empty.
    pub fn into_result(self) -> (ExperimentResult, ExperimentConfig) {
        (
            ExperimentResult {
                design: self.design,
                groups: self.groups,
                targets: self.targets,
                outcomes: self.outcomes,
                matrices: Vec::new(),
                timings_ms: self.timings_ms,
            },
            self.config,
        )
    }
}

/// Groups in first-appearance order, each with its image ids.
fn group_structure(run: &BarcodeRun) -> Vec<(String, Vec<String>)> {
    let mut order: Vec<(String, Vec<String>)> = Vec::new();
    for img in &run.images {
        match order.iter_mut().find(|(g, _)| *g == img.group) {
            Some((_, ids)) => ids.push(img.image_id.clone()),
            None => order.push((img.group.clone(), vec![img.image_id.clone()])),
        }
    }
    order
}

/// Which groups act as sample A under `design`, after shape validation.
fn targets_for(design: Design, groups: &[(String, Vec<String>)]) -> Result<Vec<String>> {
    match design {
        Design::OneVsRestAll => {
            if groups.len() < 2 {
                return Err(Error::config(format!(
                    "design one-vs-rest-all needs at least 2 groups, manifest has {}",
                    groups.len()
                )));
            }
            Ok(groups.iter().map(|(g, _)| g.clone()).collect())
        }
        Design::VsSingle => {
            let singles: Vec<&str> = groups
                .iter()
                .filter(|(_, ids)| ids.len() == 1)
                .map(|(g, _)| g.as_str())
                .collect();
            if singles.len() != 1 {
                return Err(Error::config(format!(
                    "design vs-single needs exactly one group of size 1, manifest has {}",
                    singles.len()
                )));
            }
            let targets: Vec<String> = groups
                .iter()
                .filter(|(_, ids)| ids.len() > 1)
                .map(|(g, _)| g.clone())
                .collect();
            if targets.is_empty() {
                return Err(Error::config(
                    "design vs-single needs at least one multi-image group besides the singleton",
                ));
            }
            Ok(targets)
        }
    }
}

/// Run every test of `design` over the corpus: twenty distance matrices
/// (channel × dimension × metric), then one permutation test per
/// (target, channel, dimension, metric).
///
/// Each test draws its Monte Carlo seed from `config.seed` plus the
/// test's position in the enumeration, so outcomes are independent of
/// scheduling and of each other.
pub fn run_experiment(
    store: &BarcodeStore,
    run: &BarcodeRun,
    design: Design,
    config: &ExperimentConfig,
    prune: Option<f64>,
) -> Result<ExperimentResult> {
    if config.n_perms == 0 {
        return Err(Error::config("--n-perms must be at least 1"));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::config(format!(
            "--alpha must lie strictly between 0 and 1, got {}",
            config.alpha
        )));
    }
    let groups = group_structure(run);
    let targets = targets_for(design, &groups)?;
    let mut timings_ms = BTreeMap::new();

    let start = Instant::now();
    let mut matrices = Vec::with_capacity(20);
    for channel in Channel::ALL {
        for dimension in HomologyDim::ALL {
            for metric in Metric::ALL {
                let matrix = distance_matrix(store, run, channel, dimension, metric, prune)?;
                matrices.push(ExperimentMatrix {
                    channel,
                    dimension,
                    metric,
                    matrix,
                });
            }
        }
    }
    timings_ms.insert("distances".to_string(), start.elapsed().as_millis());

    let id_to_group: BTreeMap<String, String> = run
        .images
        .iter()
        .map(|img| (img.image_id.clone(), img.group.clone()))
        .collect();

    let start = Instant::now();
    let mut outcomes = Vec::with_capacity(targets.len() * matrices.len());
    let mut test_index = 0u64;
    for target in &targets {
        for channel in Channel::ALL {
            for dimension in HomologyDim::ALL {
                for metric in Metric::ALL {
                    let entry = matrices
                        .iter()
                        .find(|m| {
                            m.channel == channel && m.dimension == dimension && m.metric == metric
                        })
                        .expect("matrix enumeration covers every cell");
                    let outcome = stats::one_vs_rest(
                        &entry.matrix,
                        &id_to_group,
                        target,
                        config.n_perms,
                        config.seed.wrapping_add(test_index),
                        config.alpha,
                    )?;
                    outcomes.push(OutcomeRecord {
                        target: target.clone(),
                        channel,
                        dimension,
                        metric,
                        outcome,
                    });
                    test_index += 1;
                }
            }
        }
    }
    timings_ms.insert("tests".to_string(), start.elapsed().as_millis());

    Ok(ExperimentResult {
        design,
        groups: groups.into_iter().map(|(g, ids)| (g, ids.len())).collect(),
        targets,
        outcomes,
        matrices,
        timings_ms,
    })
}
