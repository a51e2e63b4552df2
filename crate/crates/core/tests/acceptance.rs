//! Acceptance gate: one test per criterion, each printing a PASS line
//! with its measured numbers (run with `-- --nocapture` to see them).
//!
//! Every test here exercises the public API only and carries its own
//! fixed seeds, tolerances, and runtime budgets.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use toposig::cubical::build_filtration;
use toposig::imaging::{extract_channels, Channel, IntensityGrid, RgbImage};
use toposig::metrics::{
    self, reference::brute_force_distances, DiagramPoint, DistanceMatrix, Metric,
};
use toposig::persistence::{betti_at, compute_barcode, oracle::oracle_betti_curve, HomologyDim};
use toposig::pipeline::experiment::{run_experiment, Design, ExperimentConfig};
use toposig::pipeline::{compute_all_barcodes, BarcodeStore, CorpusManifest};
use toposig::stats::{permutation_test, permutation_test_with_mode, Flag, PermMode};

fn random_grid(rng: &mut ChaCha8Rng, max_side: u32) -> IntensityGrid {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let values = (0..w * h).map(|_| rng.random()).collect();
    IntensityGrid::new(w, h, values)
}

fn random_diagram(rng: &mut ChaCha8Rng, len: usize) -> Vec<DiagramPoint> {
    (0..len)
        .map(|_| {
            let birth = rng.random_range(0..=255u16);
            let death = rng.random_range(birth + 1..=256);
            DiagramPoint::new(birth as f64, death as f64)
        })
        .collect()
}

fn bundled_manifest(name: &str) -> CorpusManifest {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("assets")
        .join("toy")
        .join(name)
        .join("manifest.csv");
    CorpusManifest::load(&path, None, None).unwrap()
}

/// Criterion 1: barcodes agree with the per-threshold Betti oracle on 500
/// random grids at every threshold, both dimensions, in under 2 minutes.
#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    for case in 0..500 {
        let grid = random_grid(&mut rng, 16);
        let complex = build_filtration(&grid);
        for dim in HomologyDim::ALL {
            let barcode = compute_barcode(&complex, dim);
            let curve = oracle_betti_curve(&grid, dim);
            for (t, expected) in curve.iter().enumerate() {
                let got = betti_at(&barcode, t as u8);
                assert_eq!(
                    got,
                    *expected,
                    "case {case}: betti_{} at t={t} for {}x{} grid",
                    dim.index(),
                    grid.width(),
                    grid.height()
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "took {elapsed:?}, budget 2 min"
    );
    println!(
        "ACCEPTANCE PASS criterion 1 (oracle equivalence): 500 grids x 256 thresholds x 2 dims in {:.2?}",
        elapsed
    );
}

/// Criterion 2: both distances equal brute-force matching enumeration on
/// 200 random pairs with at most 6 intervals total, exactly, in under a
/// minute.
#[test]
fn criterion_2_distance_brute_force_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
    for case in 0..200 {
        let total = rng.random_range(0..=6usize);
        let split = rng.random_range(0..=total);
        let a = random_diagram(&mut rng, split);
        let b = random_diagram(&mut rng, total - split);
        let expected = brute_force_distances(&a, &b);
        let bottleneck = metrics::bottleneck_points(&a, &b);
        let wasserstein = metrics::wasserstein1_points(&a, &b);
        assert_eq!(bottleneck, expected.bottleneck, "case {case}: bottleneck");
        assert_eq!(
            wasserstein, expected.wasserstein1,
            "case {case}: wasserstein1"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "took {elapsed:?}, budget 1 min"
    );
    println!(
        "ACCEPTANCE PASS criterion 2 (brute-force equivalence): 200 pairs, exact match, in {:.2?}",
        elapsed
    );
}

/// Criterion 3: perturbing a grid by at most k moves each barcode by at
/// most k in bottleneck distance; 100 trials, both dimensions, zero
/// violations.
#[test]
fn criterion_3_bottleneck_stability() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC3);
    let mut max_ratio: f64 = 0.0;
    for case in 0..100 {
        let grid = random_grid(&mut rng, 16);
        let k = rng.random_range(1..=5i16);
        let perturbed_values: Vec<u8> = grid
            .values()
            .iter()
            .map(|&v| {
                let delta = rng.random_range(-k..=k);
                (v as i16 + delta).clamp(0, 255) as u8
            })
            .collect();
        let perturbed = IntensityGrid::new(grid.width(), grid.height(), perturbed_values);
        let complex_a = build_filtration(&grid);
        let complex_b = build_filtration(&perturbed);
        for dim in HomologyDim::ALL {
            let a = compute_barcode(&complex_a, dim);
            let b = compute_barcode(&complex_b, dim);
            let d = metrics::bottleneck(&a, &b);
            assert!(
                d <= k as f64,
                "case {case}: dim {} bottleneck {d} exceeds perturbation bound {k}",
                dim.index()
            );
            max_ratio = max_ratio.max(d / k as f64);
        }
    }
    println!(
        "ACCEPTANCE PASS criterion 3 (stability): 100 trials, 0 violations, worst distance/bound ratio {max_ratio:.3}"
    );
}

/// Criterion 4: symmetry, identity, triangle inequality, and the
/// wasserstein1 >= bottleneck dominance over 200 random triples, within
/// 1e-9.
#[test]
fn criterion_4_metric_axioms_and_dominance() {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC4);
    for case in 0..200 {
        let len_a = rng.random_range(0..=8);
        let a = random_diagram(&mut rng, len_a);
        let len_b = rng.random_range(0..=8);
        let b = random_diagram(&mut rng, len_b);
        let len_c = rng.random_range(0..=8);
        let c = random_diagram(&mut rng, len_c);
        for metric in Metric::ALL {
            let dist = |x: &[DiagramPoint], y: &[DiagramPoint]| match metric {
                Metric::Bottleneck => metrics::bottleneck_points(x, y),
                Metric::Wasserstein1 => metrics::wasserstein1_points(x, y),
            };
            let ab = dist(&a, &b);
            assert!(
                (ab - dist(&b, &a)).abs() <= TOL,
                "case {case}: {metric} symmetry"
            );
            assert!(dist(&a, &a).abs() <= TOL, "case {case}: {metric} identity");
            assert!(
                dist(&a, &c) <= ab + dist(&b, &c) + TOL,
                "case {case}: {metric} triangle inequality"
            );
        }
        assert!(
            metrics::wasserstein1_points(&a, &b) >= metrics::bottleneck_points(&a, &b) - TOL,
            "case {case}: dominance"
        );
    }
    println!(
        "ACCEPTANCE PASS criterion 4 (metric axioms + dominance): 200 triples, 0 violations at 1e-9"
    );
}

/// Criterion 5: exhaustive q matches hand enumeration on constructed
/// 4-element matrices, and 100,000 Monte Carlo draws land within 0.02 of
/// the exhaustive q.
#[test]
fn criterion_5_permutation_exactness() {
    // Two tight groups, all cross distances 10: the observed split is the
    // unique maximum among the 6, with the complement tying it.
    let ids: Vec<String> = ["a1", "a2", "b1", "b2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let block =
        DistanceMatrix::from_fn(ids, |i, j| if (i < 2) == (j < 2) { 0.0 } else { 10.0 }).unwrap();
    let labels: Vec<String> = vec!["a1".into(), "a2".into()];
    let outcome = permutation_test(&block, &labels, 10_000, 0, 0.05).unwrap();
    assert_eq!(outcome.mode, PermMode::Exhaustive);
    assert_eq!(outcome.n_permutations, 6);
    assert_eq!(outcome.observed, 10.0);
    assert_eq!(outcome.le_count, 6); // hand enumeration: 10,5,5,5,5,10
    assert_eq!(outcome.q, 1.0);
    assert_eq!(outcome.flag, Flag::Max);

    // Six distinct pairwise distances; every split statistic enumerated by
    // hand: 6.5 (observed), 6.75, 7.25, 7.25, 6.75, 6.5 (complement).
    let ids: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let spread = [
        (0, 1, 2.0),
        (0, 2, 3.0),
        (0, 3, 5.0),
        (1, 2, 7.0),
        (1, 3, 11.0),
        (2, 3, 13.0),
    ];
    let spread_matrix = DistanceMatrix::from_fn(ids, |i, j| {
        spread
            .iter()
            .find(|&&(p, q, _)| (p, q) == (i, j) || (q, p) == (i, j))
            .map(|&(_, _, d)| d)
            .unwrap_or(0.0)
    })
    .unwrap();
    let labels: Vec<String> = vec!["a".into(), "b".into()];
    let outcome = permutation_test(&spread_matrix, &labels, 10_000, 0, 0.05).unwrap();
    assert_eq!(outcome.mode, PermMode::Exhaustive);
    assert_eq!(outcome.observed, 6.5);
    assert_eq!(outcome.le_count, 2); // itself and its complement
    assert_eq!(outcome.q, 2.0 / 6.0);
    assert_eq!(outcome.flag, Flag::Min);

    // Monte Carlo agreement on both matrices.
    let mut worst: f64 = 0.0;
    for (dmat, labels, exact_q) in [
        (&block, ["a1", "a2"], 1.0),
        (&spread_matrix, ["a", "b"], 2.0 / 6.0),
    ] {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let mc = permutation_test_with_mode(
            dmat,
            &labels,
            100_000,
            0xACC5,
            0.05,
            Some(PermMode::MonteCarlo),
        )
        .unwrap();
        assert_eq!(mc.mode, PermMode::MonteCarlo);
        let gap = (mc.q - exact_q).abs();
        assert!(
            gap <= 0.02,
            "Monte Carlo q {} vs exhaustive {exact_q}",
            mc.q
        );
        worst = worst.max(gap);
    }
    println!(
        "ACCEPTANCE PASS criterion 5 (permutation exactness): hand-enumerated q values exact; MC gap {worst:.5} <= 0.02"
    );
}

/// Criterion 6: on the bundled 12-image corpus, one-vs-rest-all flags
/// every style as significant in at least one of its 20 cells, in under
/// 10 minutes.
#[test]
fn criterion_6_toy_corpus_separation() {
    let start = Instant::now();
    let manifest = bundled_manifest("main");
    let dir = tempfile::tempdir().unwrap();
    let store = BarcodeStore::open(&dir.path().join("cache")).unwrap();
    let run = compute_all_barcodes(&manifest, &store).unwrap();
    let config = ExperimentConfig {
        n_perms: 10_000,
        seed: 0,
        alpha: 0.05,
    };
    let result = run_experiment(&store, &run, Design::OneVsRestAll, &config, None).unwrap();

    assert_eq!(result.targets.len(), 3);
    for target in &result.targets {
        let significant = result
            .outcomes
            .iter()
            .filter(|r| r.target == *target && (r.outcome.q <= 0.025 || r.outcome.q >= 0.975))
            .count();
        assert!(
            significant >= 1,
            "style {target} has no significant cell among its 20"
        );
        println!("  style {target}: {significant}/20 cells significant (q <= 0.025 or >= 0.975)");
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "took {elapsed:?}, budget 10 min"
    );
    println!(
        "ACCEPTANCE PASS criterion 6 (toy-corpus separation): 3 styles x 20 cells in {:.2?}",
        elapsed
    );
}

/// Criterion 7: both barcodes of one 512x512 channel in under a second;
/// all ten barcodes of a full image in under five.
#[test]
fn criterion_7_performance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC7);
    let side = 512u32;
    let values: Vec<u8> = (0..side * side).map(|_| rng.random()).collect();
    let grid = IntensityGrid::new(side, side, values);

    let start = Instant::now();
    let complex = build_filtration(&grid);
    let d0 = compute_barcode(&complex, HomologyDim::Zero);
    let d1 = compute_barcode(&complex, HomologyDim::One);
    let single = start.elapsed();
    assert!(
        single.as_secs_f64() < 1.0,
        "single channel took {single:?}, budget 1 s"
    );

    let pixels: Vec<[u8; 3]> = (0..side * side)
        .map(|_| [rng.random(), rng.random(), rng.random()])
        .collect();
    let image = RgbImage::new(side, side, pixels);
    let start = Instant::now();
    let channels = extract_channels(&image);
    let mut intervals = 0usize;
    for channel in Channel::ALL {
        let complex = build_filtration(channels.get(channel));
        for dim in HomologyDim::ALL {
            intervals += compute_barcode(&complex, dim).intervals().len();
        }
    }
    let full = start.elapsed();
    assert!(
        full.as_secs_f64() < 5.0,
        "full image took {full:?}, budget 5 s"
    );
    println!(
        "ACCEPTANCE PASS criterion 7 (performance): one 512x512 channel ({} + {} intervals) in {:.3?}; full 5-channel image ({intervals} intervals) in {:.3?}",
        d0.intervals().len(),
        d1.intervals().len(),
        single,
        full
    );
}

/// Criterion 8: the bundled 10+1 corpus yields an exhaustive 11-split
/// test whose observed split is the strict MAX for at least one channel.
#[test]
fn criterion_8_vs_single_max_flag() {
    let manifest = bundled_manifest("vs-single");
    let dir = tempfile::tempdir().unwrap();
    let store = BarcodeStore::open(&dir.path().join("cache")).unwrap();
    let run = compute_all_barcodes(&manifest, &store).unwrap();
    let config = ExperimentConfig {
        n_perms: 10_000,
        seed: 0,
        alpha: 0.05,
    };
    let result = run_experiment(&store, &run, Design::VsSingle, &config, None).unwrap();

    for rec in &result.outcomes {
        assert_eq!(rec.outcome.mode, PermMode::Exhaustive);
        assert_eq!(rec.outcome.n_permutations, 11, "C(11,10) splits");
    }
    let max_channels: Vec<Channel> = Channel::ALL
        .into_iter()
        .filter(|&c| {
            result
                .outcomes
                .iter()
                .any(|r| r.channel == c && r.outcome.flag == Flag::Max)
        })
        .collect();
    assert!(
        !max_channels.is_empty(),
        "no channel flags the outlier split as MAX"
    );
    println!(
        "ACCEPTANCE PASS criterion 8 (vs-single MAX flag): 11-split exhaustive tests; MAX on {max_channels:?}"
    );
}

/// Criterion 9: two full runs from scratch with the same seed produce
/// byte-identical CSV reports (outcome table and all 20 distance
/// matrices).
#[test]
fn criterion_9_determinism() {
    use toposig::pipeline::report::render_csv;

    let manifest = bundled_manifest("main");
    let config = ExperimentConfig {
        n_perms: 10_000,
        seed: 42,
        alpha: 0.05,
    };
    let mut reports: Vec<(Vec<u8>, Vec<Vec<u8>>)> = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let store = BarcodeStore::open(&dir.path().join("cache")).unwrap();
        let run = compute_all_barcodes(&manifest, &store).unwrap();
        let result = run_experiment(&store, &run, Design::OneVsRestAll, &config, None).unwrap();
        let outcome_csv = render_csv(&result).unwrap();
        let distance_csvs = result
            .matrices
            .iter()
            .map(|m| m.matrix.to_csv_bytes())
            .collect();
        reports.push((outcome_csv, distance_csvs));
    }
    let (first_outcomes, first_matrices) = &reports[0];
    let (second_outcomes, second_matrices) = &reports[1];
    assert_eq!(first_outcomes, second_outcomes, "outcome CSV differs");
    assert_eq!(first_matrices.len(), 20);
    for (i, (a, b)) in first_matrices.iter().zip(second_matrices).enumerate() {
        assert_eq!(a, b, "distance CSV {i} differs between identical runs");
    }
    println!(
        "ACCEPTANCE PASS criterion 9 (determinism): outcome CSV + 20 distance CSVs byte-identical across fresh runs"
    );
}
