//! Render experiment results: Markdown tables, a flat CSV, and
//! persistence-diagram scatter plots as SVG.
//!
//! All rendering is pure string building over already-computed results, so
//! outputs are byte-identical across runs and worker counts.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::imaging::Channel;
use crate::metrics::Metric;
use crate::persistence::{Barcode, HomologyDim, ESSENTIAL_CAP};
use crate::stats::Flag;

use super::experiment::{Design, ExperimentConfig, ExperimentResult, OutcomeRecord};

/// One table cell.
///
/// Full form: `**0.998** (494/495)^*` — q to three decimals, bold when
/// significant, raw ≤-counts in parentheses, `^*` strict max / `_*` strict
/// min, `⚠` when permuted statistics tie the observed one. Flags-only form
/// (vs-single): just `max`, `min`, or `-`.
fn cell_text(rec: &OutcomeRecord, flags_only: bool) -> String {
    let o = &rec.outcome;
    if flags_only {
        let mut text = match o.flag {
            Flag::Max => "max".to_string(),
            Flag::Min => "min".to_string(),
            Flag::None => "-".to_string(),
        };
        if o.tie_count > 0 {
            text.push('⚠');
        }
        return text;
    }
    let q = format!("{:.3}", o.q);
    let mut text = if o.significant { format!("**{q}**") } else { q };
    let _ = write!(text, " ({}/{})", o.le_count, o.n_permutations);
    match o.flag {
        Flag::Max => text.push_str("^*"),
        Flag::Min => text.push_str("_*"),
        Flag::None => {}
    }
    if o.tie_count > 0 {
        text.push('⚠');
    }
    text
}

fn push_table(
    doc: &mut String,
    result: &ExperimentResult,
    metric: Metric,
    dimension: HomologyDim,
    flags_only: bool,
) {
    let _ = writeln!(doc, "## {metric} distance, dimension {dimension}\n");
    let mut header = String::from("| group |");
    let mut rule = String::from("|---|");
    for channel in Channel::ALL {
        let _ = write!(header, " {channel} |");
        rule.push_str("---|");
    }
    doc.push_str(&header);
    doc.push('\n');
    doc.push_str(&rule);
    doc.push('\n');
    for target in &result.targets {
        let _ = write!(doc, "| {target} |");
        for channel in Channel::ALL {
            let rec = result
                .cell(target, channel, dimension, metric)
                .expect("experiment results cover every cell");
            let _ = write!(doc, " {} |", cell_text(rec, flags_only));
        }
        doc.push('\n');
    }
    doc.push('\n');
}

/// The full Markdown report: run parameters, cell conventions, and one
/// table per (metric, dimension) with groups as rows and channels as
/// columns.
pub fn render_markdown(result: &ExperimentResult, config: &ExperimentConfig) -> String {
    let flags_only = result.design == Design::VsSingle;
    let mut doc = String::new();
    doc.push_str("# Stylistic distinguishability report\n\n");
    let groups: Vec<String> = result
        .groups
        .iter()
        .map(|(g, n)| format!("{g} ({n})"))
        .collect();
    let _ = writeln!(
        doc,
        "- design: `{}`\n- groups: {}\n- permutation budget: {} (exhaustive when all splits fit)\n- seed: {}\n- alpha: {}\n",
        result.design,
        groups.join(", "),
        config.n_perms,
        config.seed,
        config.alpha,
    );
    if flags_only {
        doc.push_str(
            "Each cell reports only whether the observed cohort-vs-rest split had the \
             strictly largest (`max`) or strictly smallest (`min`) cross-average distance \
             among all splits, or neither (`-`). With so few splits the attainable \
             quantiles are too coarse for a significance call, so none is made. `⚠` marks \
             cells where some permuted split exactly tied the observed statistic.\n\n",
        );
    } else {
        doc.push_str(
            "Each cell shows the quantile q of the observed cross-average distance within \
             the permutation distribution, to three decimals, then the raw counts \
             (statistics ≤ observed / total). **Bold** marks significant cells \
             (q ≤ α/2 or q ≥ 1 − α/2). `^*` marks splits strictly above every permuted \
             statistic, `_*` strictly below. `⚠` marks cells where some permuted split \
             exactly tied the observed statistic; ties void the extremum flags.\n\n",
        );
    }
    for metric in Metric::ALL {
        for dimension in HomologyDim::ALL {
            push_table(&mut doc, result, metric, dimension, flags_only);
        }
    }
    let _ = writeln!(doc, "## Timings\n");
    for (stage, ms) in &result.timings_ms {
        let _ = writeln!(doc, "- {stage}: {ms} ms");
    }
    doc
}

/// Flat CSV of every outcome, one row per
/// (target, channel, dimension, metric).
pub fn render_csv(result: &ExperimentResult) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::integrity(format!("serializing report CSV: {e}"));
    writer
        .write_record([
            "target",
            "channel",
            "dimension",
            "metric",
            "observed",
            "q",
            "le_count",
            "n_permutations",
            "tie_count",
            "mode",
            "seed",
            "flag",
            "significant",
        ])
        .map_err(to_err)?;
    for rec in &result.outcomes {
        let o = &rec.outcome;
        writer
            .write_record([
                rec.target.as_str(),
                rec.channel.as_str(),
                &rec.dimension.index().to_string(),
                rec.metric.as_str(),
                &o.observed.to_string(),
                &o.q.to_string(),
                &o.le_count.to_string(),
                &o.n_permutations.to_string(),
                &o.tie_count.to_string(),
                match o.mode {
                    crate::stats::PermMode::Exhaustive => "exhaustive",
                    crate::stats::PermMode::MonteCarlo => "monte-carlo",
                },
                &o.seed.map(|s| s.to_string()).unwrap_or_default(),
                match o.flag {
                    Flag::Min => "min",
                    Flag::Max => "max",
                    Flag::None => "none",
                },
                if o.significant { "true" } else { "false" },
            ])
            .map_err(to_err)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::integrity(format!("flushing report CSV: {e}")))
}

const SVG_MARGIN: f64 = 42.0;
const SVG_PLOT: f64 = 300.0;

fn svg_x(value: f64) -> f64 {
    SVG_MARGIN + value / ESSENTIAL_CAP as f64 * SVG_PLOT
}

fn svg_y(value: f64) -> f64 {
    SVG_MARGIN + (ESSENTIAL_CAP as f64 - value) / ESSENTIAL_CAP as f64 * SVG_PLOT
}

/// Persistence-diagram scatter plot: births on x, deaths on y, both
/// dimensions overlaid, the diagonal drawn, axes spanning 0..=256 with
/// essential intervals pinned to the cap line.
pub fn diagram_svg(title: &str, dim0: &Barcode, dim1: &Barcode) -> String {
    let size = SVG_PLOT + 2.0 * SVG_MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        size / 2.0,
        xml_escape(title),
    );
    // Frame and diagonal.
    let (x0, y0) = (svg_x(0.0), svg_y(0.0));
    let (x1, y1) = (svg_x(256.0), svg_y(256.0));
    let _ = writeln!(
        svg,
        r##"<rect x="{x0:.1}" y="{y1:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#444" stroke-width="1"/>"##,
        w = x1 - x0,
        h = y0 - y1,
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}" stroke="#999" stroke-width="1" stroke-dasharray="4 3"/>"##
    );
    for tick in [0u16, 64, 128, 192, 256] {
        let tx = svg_x(tick as f64);
        let ty = svg_y(tick as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{tx:.1}" y="{0:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{tick}</text>"#,
            y0 + 14.0,
        );
        let _ = writeln!(
            svg,
            r#"<text x="{0:.1}" y="{1:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{tick}</text>"#,
            x0 - 6.0,
            ty + 3.5,
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{tx:.1}" y1="{y0:.1}" x2="{tx:.1}" y2="{0:.1}" stroke="#444" stroke-width="1"/>"##,
            y0 + 4.0,
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.1}" y1="{ty:.1}" x2="{x0:.1}" y2="{ty:.1}" stroke="#444" stroke-width="1"/>"##,
            x0 - 4.0,
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">birth</text>"#,
        size / 2.0,
        size - 8.0,
    );
    let _ = writeln!(
        svg,
        r#"<text x="12" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 12 {:.1})">death</text>"#,
        size / 2.0,
        size / 2.0,
    );
    // Legend.
    let _ = writeln!(
        svg,
        r##"<circle cx="{0:.1}" cy="30" r="3.5" fill="#1f77b4" fill-opacity="0.7"/><text x="{1:.1}" y="33.5" font-family="sans-serif" font-size="10">dim 0</text>"##,
        x0 + 8.0,
        x0 + 16.0,
    );
    let _ = writeln!(
        svg,
        r##"<circle cx="{0:.1}" cy="30" r="3.5" fill="#d62728" fill-opacity="0.7"/><text x="{1:.1}" y="33.5" font-family="sans-serif" font-size="10">dim 1</text>"##,
        x0 + 68.0,
        x0 + 76.0,
    );
    for (barcode, color) in [(dim0, "#1f77b4"), (dim1, "#d62728")] {
        for interval in barcode.intervals() {
            let cx = svg_x(interval.birth as f64);
            let cy = svg_y(interval.death_capped() as f64);
            let _ = writeln!(
                svg,
                r#"<circle cx="{cx:.1}" cy="{cy:.1}" r="3.5" fill="{color}" fill-opacity="0.7"/>"#
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}
