//! `toposig`: quantify image style topologically — split images into
//! intensity channels, compute sublevel cubical persistence barcodes,
//! compare them under bottleneck and 1-Wasserstein distances, and test
//! group separations with permutation tests.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "toposig", version, about, long_about = None)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode an image into its five channels (red, green, blue, gray,
    /// edge) and write each as a grayscale PNG.
    Channels {
        /// Input image (PNG or JPEG).
        image: PathBuf,
        /// Also write each channel's 1-bit sublevel mask at this
        /// threshold (pixels with value <= T are black).
        #[arg(long, value_name = "T")]
        binarize: Option<u8>,
        /// Output directory (created if absent).
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Write the bundled synthetic corpora: `main/` (3 styles x 4 images)
    /// and `vs-single/` (10 images + 1 outlier), each with a manifest.
    Toy {
        /// Output directory (created if absent).
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Compute and cache the ten barcodes (5 channels x 2 dimensions) of
    /// every image listed in the manifest.
    Barcodes {
        /// Corpus manifest: CSV with header `image_id,path,group`.
        #[arg(long, value_name = "CSV")]
        manifest: PathBuf,
        /// Barcode cache directory (created if absent).
        #[arg(long, value_name = "DIR")]
        cache: PathBuf,
        /// Downscale each image so its longer side is at most N pixels.
        #[arg(long, value_name = "N")]
        resize: Option<u32>,
    },
    /// Write the pairwise distance matrix for one (channel, dimension,
    /// metric) from already-cached barcodes.
    Distmat {
        /// Corpus manifest: CSV with header `image_id,path,group`.
        #[arg(long, value_name = "CSV")]
        manifest: PathBuf,
        /// Barcode cache directory populated by `barcodes`.
        #[arg(long, value_name = "DIR")]
        cache: PathBuf,
        /// Distance: `b` (bottleneck) or `w1` (1-Wasserstein).
        #[arg(long, value_name = "b|w1")]
        metric: String,
        /// Homology dimension: 0 or 1.
        #[arg(long, value_name = "0|1")]
        dim: u8,
        /// Channel: red, green, blue, gray, or edge.
        #[arg(long, value_name = "NAME")]
        channel: String,
        /// Resize switch the barcodes were cached under.
        #[arg(long, value_name = "N")]
        resize: Option<u32>,
        /// Drop intervals with persistence below EPS before the
        /// 1-Wasserstein matching (recorded; bottleneck is never pruned).
        #[arg(long, value_name = "EPS")]
        prune: Option<f64>,
        /// Output CSV path.
        #[arg(short, long, value_name = "CSV")]
        out: PathBuf,
    },
    /// Run permutation tests over every (group, channel, dimension,
    /// metric) cell and write outcomes, tables, and distance matrices.
    Permtest {
        /// Corpus manifest: CSV with header `image_id,path,group`.
        #[arg(long, value_name = "CSV")]
        manifest: PathBuf,
        /// Barcode cache directory (missing barcodes are computed).
        #[arg(long, value_name = "DIR")]
        cache: PathBuf,
        /// `one-vs-rest-all` (every group against the rest) or
        /// `vs-single` (each cohort against the rest, corpus holding
        /// exactly one single-image group).
        #[arg(long, value_name = "DESIGN")]
        design: String,
        /// Permutation budget per test; exhaustive enumeration engages
        /// automatically when all splits fit.
        #[arg(long, default_value_t = 10_000, value_name = "N")]
        n_perms: usize,
        /// Base seed for Monte Carlo sampling.
        #[arg(long, default_value_t = 0, value_name = "S")]
        seed: u64,
        /// Two-sided significance level.
        #[arg(long, default_value_t = 0.05, value_name = "A")]
        alpha: f64,
        /// Downscale each image so its longer side is at most N pixels.
        #[arg(long, value_name = "N")]
        resize: Option<u32>,
        /// Drop intervals with persistence below EPS before the
        /// 1-Wasserstein matching (recorded; bottleneck is never pruned).
        #[arg(long, value_name = "EPS")]
        prune: Option<f64>,
        /// Output directory (created if absent).
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Re-render tables from a `permtest` output directory and plot a
    /// persistence-diagram SVG per (image, channel).
    Report {
        /// Corpus manifest: CSV with header `image_id,path,group`.
        #[arg(long, value_name = "CSV")]
        manifest: PathBuf,
        /// Barcode cache directory populated by `barcodes`/`permtest`.
        #[arg(long, value_name = "DIR")]
        cache: PathBuf,
        /// Directory written by `permtest` (reads `results.json`).
        #[arg(long, value_name = "DIR")]
        results: PathBuf,
        /// Resize switch the barcodes were cached under.
        #[arg(long, value_name = "N")]
        resize: Option<u32>,
        /// Output directory (created if absent).
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: setting worker count: {e}");
            std::process::exit(2);
        }
    }
    let outcome = match cli.command {
        Command::Channels {
            image,
            binarize,
            out,
        } => commands::channels(&image, binarize, &out),
        Command::Toy { out } => commands::toy(&out),
        Command::Barcodes {
            manifest,
            cache,
            resize,
        } => commands::barcodes(&manifest, &cache, resize),
        Command::Distmat {
            manifest,
            cache,
            metric,
            dim,
            channel,
            resize,
            prune,
            out,
        } => commands::distmat(
            &manifest, &cache, &metric, dim, &channel, resize, prune, &out,
        ),
        Command::Permtest {
            manifest,
            cache,
            design,
            n_perms,
            seed,
            alpha,
            resize,
            prune,
            out,
        } => commands::permtest(
            &manifest, &cache, &design, n_perms, seed, alpha, resize, prune, &out,
        ),
        Command::Report {
            manifest,
            cache,
            results,
            resize,
            out,
        } => commands::report(&manifest, &cache, &results, resize, &out),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
