//! End-to-end tests of the `toposig` binary: every subcommand, the
//! documented exit codes, and output determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toposig"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "`toposig {}` failed\nstdout: {}\nstderr: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

fn path_str(path: &Path) -> &str {
    path.to_str().expect("temp paths are UTF-8")
}

/// `toy` corpora plus a populated cache under one temp root.
fn seeded_workspace() -> (tempfile::TempDir, PathBuf, PathBuf, PathBuf) {
    let root = tempfile::tempdir().unwrap();
    let corpus = root.path().join("corpus");
    run_ok(&["toy", "-o", path_str(&corpus)]);
    let main_manifest = corpus.join("main").join("manifest.csv");
    let single_manifest = corpus.join("vs-single").join("manifest.csv");
    let cache = root.path().join("cache");
    run_ok(&[
        "barcodes",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
    ]);
    (root, main_manifest, single_manifest, cache)
}

#[test]
fn barcodes_reruns_hit_the_cache() {
    let (_root, main_manifest, _, cache) = seeded_workspace();
    let again = run_ok(&[
        "barcodes",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
    ]);
    assert!(again.contains("computed 0 and reused 12"), "{again}");
    let files = std::fs::read_dir(&cache).unwrap().count();
    assert_eq!(files, 120);
}

#[test]
fn channels_writes_grids_and_masks() {
    let root = tempfile::tempdir().unwrap();
    let corpus = root.path().join("corpus");
    run_ok(&["toy", "-o", path_str(&corpus)]);
    let image = corpus.join("main").join("blob-00.png");
    let out = root.path().join("channels");
    run_ok(&[
        "channels",
        path_str(&image),
        "--binarize",
        "128",
        "-o",
        path_str(&out),
    ]);
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10, "{names:?}");
    for channel in ["red", "green", "blue", "gray", "edge"] {
        assert!(
            names.contains(&format!("blob-00_{channel}.png")),
            "{names:?}"
        );
        assert!(
            names.contains(&format!("blob-00_{channel}_le128.png")),
            "{names:?}"
        );
    }
}

#[test]
fn configuration_errors_exit_2() {
    let (_root, main_manifest, _, cache) = seeded_workspace();
    let out = run(&[
        "distmat",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
        "--metric",
        "chebyshev",
        "--dim",
        "0",
        "--channel",
        "red",
        "-o",
        "/dev/null",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown metric"));

    let out = run(&[
        "permtest",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
        "--design",
        "pairwise",
        "-o",
        "/dev/null",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown design"));

    // clap usage errors share the configuration exit code.
    let out = run(&["distmat", "--no-such-flag"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn integrity_errors_exit_3() {
    let (root, main_manifest, _, _cache) = seeded_workspace();
    // Cache directory exists but holds no barcodes.
    let empty = root.path().join("empty-cache");
    let out = run(&[
        "distmat",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&empty),
        "--metric",
        "b",
        "--dim",
        "0",
        "--channel",
        "red",
        "-o",
        path_str(&root.path().join("d.csv")),
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing from the cache"));

    // Manifest names a file that does not exist.
    let manifest = root.path().join("bad-manifest.csv");
    std::fs::write(&manifest, "image_id,path,group\nx,missing.png,g\n").unwrap();
    let out = run(&[
        "barcodes",
        "--manifest",
        path_str(&manifest),
        "--cache",
        path_str(&root.path().join("c2")),
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn permtest_csv_outputs_are_deterministic() {
    let (root, main_manifest, _, cache) = seeded_workspace();
    let out_a = root.path().join("run-a");
    let out_b = root.path().join("run-b");
    for out in [&out_a, &out_b] {
        run_ok(&[
            "permtest",
            "--manifest",
            path_str(&main_manifest),
            "--cache",
            path_str(&cache),
            "--design",
            "one-vs-rest-all",
            "--seed",
            "7",
            "-o",
            path_str(out),
        ]);
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(
        read(&out_a.join("outcomes.csv")),
        read(&out_b.join("outcomes.csv"))
    );
    let mut names: Vec<String> = std::fs::read_dir(out_a.join("distances"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 20);
    for name in &names {
        assert_eq!(
            read(&out_a.join("distances").join(name)),
            read(&out_b.join("distances").join(name)),
            "distance matrix {name} differs between identical runs"
        );
    }
}

#[test]
fn report_renders_tables_and_diagrams() {
    let (root, main_manifest, _, cache) = seeded_workspace();
    let results = root.path().join("results");
    run_ok(&[
        "permtest",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
        "--design",
        "one-vs-rest-all",
        "-o",
        path_str(&results),
    ]);
    let report = root.path().join("report");
    run_ok(&[
        "report",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
        "--results",
        path_str(&results),
        "-o",
        path_str(&report),
    ]);
    let tables = std::fs::read_to_string(report.join("tables.md")).unwrap();
    assert!(tables.contains("| group | red | green | blue | gray | edge |"));
    assert!(report.join("outcomes.csv").is_file());
    let diagrams: Vec<_> = std::fs::read_dir(report.join("diagrams"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(diagrams.len(), 60); // 12 images x 5 channels
    let svg = std::fs::read_to_string(&diagrams[0]).unwrap();
    assert!(svg.starts_with("<svg "), "{svg:.>60}");
}

#[test]
fn vs_single_design_reports_flags() {
    let (root, _, single_manifest, cache) = seeded_workspace();
    let results = root.path().join("vs-results");
    let stdout = run_ok(&[
        "permtest",
        "--manifest",
        path_str(&single_manifest),
        "--cache",
        path_str(&cache),
        "--design",
        "vs-single",
        "-o",
        path_str(&results),
    ]);
    assert!(stdout.contains("max-flagged"), "{stdout}");
    let tables = std::fs::read_to_string(results.join("tables.md")).unwrap();
    assert!(tables.contains("max"), "{tables}");
    assert!(
        !tables.contains("**"),
        "vs-single tables must not claim significance:\n{tables}"
    );
    // The main corpus has no singleton group, so vs-single rejects it.
    let main_manifest = single_manifest
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("main")
        .join("manifest.csv");
    let out = run(&[
        "permtest",
        "--manifest",
        path_str(&main_manifest),
        "--cache",
        path_str(&cache),
        "--design",
        "vs-single",
        "-o",
        path_str(&root.path().join("x")),
    ]);
    assert_eq!(out.status.code().unwrap(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exactly one group of size 1"));
}
