//! One function per subcommand; all return `toposig` errors so `main`
//! can map them onto exit codes.

use std::path::Path;
use std::time::Instant;

use toposig::cubical::binarize;
use toposig::imaging::{extract_channels, load_image, Channel};
use toposig::metrics::Metric;
use toposig::persistence::HomologyDim;
use toposig::pipeline::experiment::{
    run_experiment, Design, ExperimentConfig, ExperimentResult, ResultsFile,
};
use toposig::pipeline::report::{diagram_svg, render_csv, render_markdown};
use toposig::pipeline::{
    compute_all_barcodes, digest_run, manifest_digest, toy, BarcodeRun, BarcodeStore,
    CorpusManifest, RunRecord,
};
use toposig::stats::Flag;
use toposig::{Error, Result};

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Keep ids and group labels safe to embed in file names.
fn file_slug(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn parse_metric(code: &str) -> Result<Metric> {
    Metric::parse_code(code).ok_or_else(|| {
        Error::config(format!(
            "unknown metric `{code}` (expected `b`, `bottleneck`, `w1`, or `wasserstein1`)"
        ))
    })
}

fn parse_channel(name: &str) -> Result<Channel> {
    Channel::parse(name).ok_or_else(|| {
        Error::config(format!(
            "unknown channel `{name}` (expected red, green, blue, gray, or edge)"
        ))
    })
}

fn parse_dim(dim: u8) -> Result<HomologyDim> {
    HomologyDim::from_index(dim)
        .ok_or_else(|| Error::config(format!("--dim must be 0 or 1, got {dim}")))
}

pub fn channels(image: &Path, binarize_at: Option<u8>, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let img = load_image(image)?;
    let stem = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string());
    let stem = file_slug(&stem);
    let set = extract_channels(&img);
    let mut written = 0;
    for channel in Channel::ALL {
        let grid = set.get(channel);
        grid.write_png(&out.join(format!("{stem}_{channel}.png")))?;
        written += 1;
        if let Some(t) = binarize_at {
            binarize(grid, t).write_png(&out.join(format!("{stem}_{channel}_le{t:03}.png")))?;
            written += 1;
        }
    }
    println!(
        "wrote {written} PNGs ({}x{} px) to {}",
        img.width(),
        img.height(),
        out.display()
    );
    Ok(())
}

pub fn toy(out: &Path) -> Result<()> {
    let main = toy::write_main_corpus(&out.join("main"))?;
    let single = toy::write_vs_single_corpus(&out.join("vs-single"))?;
    println!("wrote 12-image corpus, manifest {}", main.display());
    println!("wrote 10+1 outlier corpus, manifest {}", single.display());
    Ok(())
}

pub fn barcodes(manifest_path: &Path, cache: &Path, resize: Option<u32>) -> Result<()> {
    let manifest = CorpusManifest::load(manifest_path, resize, None)?;
    let store = BarcodeStore::open(cache)?;
    let start = Instant::now();
    let run = compute_all_barcodes(&manifest, &store)?;
    println!(
        "computed {} and reused {} of {} images ({} barcodes) in {} ms",
        run.computed,
        run.cached,
        run.images.len(),
        run.images.len() * 10,
        start.elapsed().as_millis()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn distmat(
    manifest_path: &Path,
    cache: &Path,
    metric: &str,
    dim: u8,
    channel: &str,
    resize: Option<u32>,
    prune: Option<f64>,
    out: &Path,
) -> Result<()> {
    let metric = parse_metric(metric)?;
    let channel = parse_channel(channel)?;
    let dim = parse_dim(dim)?;
    let manifest = CorpusManifest::load(manifest_path, resize, prune)?;
    let store = BarcodeStore::open(cache)?;
    let run = digest_run(&manifest)?;
    let dmat = toposig::pipeline::distance_matrix(&store, &run, channel, dim, metric, prune)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    dmat.write_csv(out)?;
    println!(
        "wrote {n}x{n} {metric} matrix ({channel}, dimension {dim}) to {}",
        out.display(),
        n = dmat.len(),
    );
    Ok(())
}

/// File name for one matrix of the experiment bundle.
fn matrix_file_name(metric: Metric, channel: Channel, dim: HomologyDim) -> String {
    format!(
        "{}_{}_d{}.csv",
        metric.as_str(),
        channel.as_str(),
        dim.index()
    )
}

/// Write every artifact of an experiment under `out`; returns the
/// relative paths written.
fn write_experiment_bundle(
    out: &Path,
    result: &ExperimentResult,
    config: &ExperimentConfig,
) -> Result<Vec<String>> {
    ensure_dir(out)?;
    ensure_dir(&out.join("distances"))?;
    ensure_dir(&out.join("outcomes"))?;
    let mut outputs = Vec::new();

    for entry in &result.matrices {
        let rel = format!(
            "distances/{}",
            matrix_file_name(entry.metric, entry.channel, entry.dimension)
        );
        entry.matrix.write_csv(&out.join(&rel))?;
        outputs.push(rel);
    }
    for rec in &result.outcomes {
        let rel = format!(
            "outcomes/{}_{}_d{}_{}.json",
            file_slug(&rec.target),
            rec.channel.as_str(),
            rec.dimension.index(),
            rec.metric.as_str()
        );
        let mut bytes = serde_json::to_vec_pretty(rec).expect("outcome serializes to JSON");
        bytes.push(b'\n');
        write_bytes(&out.join(&rel), &bytes)?;
        outputs.push(rel);
    }
    write_bytes(
        &out.join("results.json"),
        &ResultsFile::new(result, config).to_json_bytes(),
    )?;
    outputs.push("results.json".to_string());
    write_bytes(
        &out.join("tables.md"),
        render_markdown(result, config).as_bytes(),
    )?;
    outputs.push("tables.md".to_string());
    write_bytes(&out.join("outcomes.csv"), &render_csv(result)?)?;
    outputs.push("outcomes.csv".to_string());
    Ok(outputs)
}

#[allow(clippy::too_many_arguments)]
pub fn permtest(
    manifest_path: &Path,
    cache: &Path,
    design: &str,
    n_perms: usize,
    seed: u64,
    alpha: f64,
    resize: Option<u32>,
    prune: Option<f64>,
    out: &Path,
) -> Result<()> {
    let design = Design::parse(design)?;
    let manifest = CorpusManifest::load(manifest_path, resize, prune)?;
    let store = BarcodeStore::open(cache)?;

    let start = Instant::now();
    let run = compute_all_barcodes(&manifest, &store)?;
    let barcode_ms = start.elapsed().as_millis();

    let config = ExperimentConfig {
        n_perms,
        seed,
        alpha,
    };
    let mut result = run_experiment(&store, &run, design, &config, prune)?;
    result.timings_ms.insert("barcodes".to_string(), barcode_ms);

    let mut outputs = write_experiment_bundle(out, &result, &config)?;
    let record = RunRecord {
        schema_version: 1,
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        manifest_digest: manifest_digest(&run),
        design: Some(design.as_str().to_string()),
        seed,
        n_perms,
        alpha,
        resize,
        prune,
        timings_ms: result.timings_ms.clone(),
        outputs: {
            outputs.push("run_record.json".to_string());
            outputs
        },
    };
    let mut bytes = serde_json::to_vec_pretty(&record).expect("run record serializes to JSON");
    bytes.push(b'\n');
    write_bytes(&out.join("run_record.json"), &bytes)?;

    let summary = match design {
        Design::OneVsRestAll => {
            let significant = result
                .outcomes
                .iter()
                .filter(|r| r.outcome.significant)
                .count();
            format!("{significant} significant at alpha {alpha}")
        }
        // Flags, not significance, are the vs-single readout.
        Design::VsSingle => {
            let max = result
                .outcomes
                .iter()
                .filter(|r| r.outcome.flag == Flag::Max)
                .count();
            let min = result
                .outcomes
                .iter()
                .filter(|r| r.outcome.flag == Flag::Min)
                .count();
            format!("{max} max-flagged, {min} min-flagged")
        }
    };
    println!(
        "{} design over {} images: {} tests, {}",
        design,
        run.images.len(),
        result.outcomes.len(),
        summary
    );
    println!("wrote {} files to {}", record.outputs.len(), out.display());
    Ok(())
}

pub fn report(
    manifest_path: &Path,
    cache: &Path,
    results_dir: &Path,
    resize: Option<u32>,
    out: &Path,
) -> Result<()> {
    let results_path = results_dir.join("results.json");
    let bytes = std::fs::read(&results_path).map_err(|e| Error::io(&results_path, e))?;
    let (result, config) = ResultsFile::from_json_bytes(&bytes)?.into_result();

    let manifest = CorpusManifest::load(manifest_path, resize, None)?;
    let store = BarcodeStore::open(cache)?;
    let run = digest_run(&manifest)?;

    ensure_dir(out)?;
    write_bytes(
        &out.join("tables.md"),
        render_markdown(&result, &config).as_bytes(),
    )?;
    write_bytes(&out.join("outcomes.csv"), &render_csv(&result)?)?;
    let diagrams = write_diagrams(&store, &run, &out.join("diagrams"))?;
    println!(
        "rendered tables and {diagrams} persistence diagrams to {}",
        out.display()
    );
    Ok(())
}

/// One scatter plot per (image, channel), both dimensions overlaid.
fn write_diagrams(store: &BarcodeStore, run: &BarcodeRun, dir: &Path) -> Result<usize> {
    ensure_dir(dir)?;
    let mut count = 0;
    for img in &run.images {
        for channel in Channel::ALL {
            let dim0 = store.load_required(&img.digest, run.resize, channel, HomologyDim::Zero)?;
            let dim1 = store.load_required(&img.digest, run.resize, channel, HomologyDim::One)?;
            let title = format!("{} - {}", img.image_id, channel);
            let svg = diagram_svg(&title, &dim0, &dim1);
            let name = format!("{}_{}.svg", file_slug(&img.image_id), channel.as_str());
            write_bytes(&dir.join(name), svg.as_bytes())?;
            count += 1;
        }
    }
    Ok(count)
}
