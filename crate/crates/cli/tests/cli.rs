use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn pltool(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pltool"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("pltool runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pltool(dir, args);
    assert!(
        out.status.success(),
        "pltool {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = pltool(dir, args);
    assert_eq!(out.status.code(), Some(1), "pltool {args:?} should fail");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("pltool: "), "{err}");
    err
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// Two small classes, far apart on the line.
fn two_classes(dir: &Path) {
    write(dir, "a1.txt", "0 2\n0.5 1.5\n");
    write(dir, "a2.txt", "0.1 2.1\n");
    write(dir, "a3.txt", "0 1.8\n0.2 1\n");
    write(dir, "b1.txt", "10 12\n");
    write(dir, "b2.txt", "10.2 12.4\n11 11.5\n");
    write(dir, "b3.txt", "9.8 12\n");
    write(dir, "a.list", "a1.txt\na2.txt\na3.txt\n");
    write(dir, "b.list", "# second class\nb1.txt\n\nb2.txt\nb3.txt\n");
    write(dir, "queries.list", "b2.txt\na1.txt\n");
}

#[test]
fn average_of_one_barcode_is_its_landscape() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "bar.txt", "1 4\n2 3\n");
    write(d, "one.list", "bar.txt\n");
    ok(d, &["average", "one.list", "avg.lan"]);
    assert_eq!(
        read(d, "avg.lan"),
        "0\n#lambda_0\n1 0\n2.5 1.5\n4 0\n#lambda_1\n2 0\n2.5 0.5\n3 0\n\n"
    );
}

#[test]
fn average_reads_landscape_files_too() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "bar.txt", "0 2\n");
    write(d, "list", "bar.txt\n");
    ok(d, &["average", "list", "first.lan"]);
    write(d, "list2", "first.lan\nbar.txt\n");
    ok(d, &["average", "list2", "second.lan"]);
    assert_eq!(read(d, "first.lan"), read(d, "second.lan"));
}

#[test]
fn norms_and_distance_matrix() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "x.txt", "0 2\n");
    write(d, "y.txt", "0 4\n");
    write(d, "list", "x.txt\ny.txt\n");
    // The tent of (0, 2) has area 1 and height 1.
    assert_eq!(ok(d, &["norms", "list", "1"]), "1\n4\n");
    assert_eq!(ok(d, &["norms", "list", "-1"]), "1\n2\n");
    ok(d, &["distance-matrix", "list", "1", "dist.txt"]);
    assert_eq!(read(d, "dist.txt"), "0\t3\n3\t0\n");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "30", "4", "7", "gen"]);
    ok(d, &["distance-matrix", "gen/files.txt", "2", "m1.txt"]);
    ok(d, &["distance-matrix", "gen/files.txt", "2", "m2.txt"]);
    assert_eq!(read(d, "m1.txt"), read(d, "m2.txt"));
    ok(d, &["average", "gen/files.txt", "avg1.lan"]);
    ok(d, &["average", "gen/files.txt", "avg2.lan"]);
    assert_eq!(read(d, "avg1.lan"), read(d, "avg2.lan"));
    let first = ok(
        d,
        &[
            "permutation-test",
            "2",
            "gen/files.txt",
            "gen/files.txt",
            "50",
            "2",
            "--seed",
            "3",
        ],
    );
    let second = ok(
        d,
        &[
            "permutation-test",
            "2",
            "gen/files.txt",
            "gen/files.txt",
            "50",
            "2",
            "--seed",
            "3",
        ],
    );
    assert_eq!(first, second);
}

#[test]
fn generate_writes_barcodes_and_a_list() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "5", "3", "1", "out"]);
    assert_eq!(
        read(d, "out/files.txt"),
        "barcode_0.txt\nbarcode_1.txt\nbarcode_2.txt\n"
    );
    for i in 0..3 {
        let text = read(d, &format!("out/barcode_{i}.txt"));
        assert_eq!(text.lines().count(), 5);
        for line in text.lines() {
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().unwrap())
                .collect();
            assert!(
                v.len() == 2 && 0.0 <= v[0] && v[0] < v[1] && v[1] <= 1.0,
                "{line}"
            );
        }
    }
    let again = TempDir::new().unwrap();
    ok(again.path(), &["generate", "5", "3", "1", "out"]);
    assert_eq!(
        read(d, "out/barcode_2.txt"),
        read(again.path(), "out/barcode_2.txt")
    );
}

#[test]
fn permutation_test_separates_classes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    two_classes(d);
    let out = pltool(
        d,
        &["permutation-test", "2", "a.list", "b.list", "200", "2"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split('\t').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[0][1], rows[1][0]);
    // Three against three: only the split matching the classes reaches the
    // observed difference, and it is not counted as exceeding it.
    assert!(rows[0][1] < 0.25, "{text}");
    let progress = String::from_utf8(out.stderr).unwrap();
    assert!(progress.contains("200/200"), "{progress}");
}

#[test]
fn permutation_test_argument_count() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    two_classes(d);
    let err = fails(
        d,
        &["permutation-test", "3", "a.list", "b.list", "100", "2"],
    );
    assert!(err.contains("arguments"), "{err}");
    fails(d, &["permutation-test", "1", "a.list", "10", "2"]);
}

#[test]
fn classify_construct_then_classify() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    two_classes(d);
    ok(
        d,
        &[
            "classify",
            "-construct",
            "2",
            "a.list",
            "b.list",
            "--model-dir",
            "model",
        ],
    );
    assert!(d.join("model/class_1.lan").is_file());
    assert!(d.join("model/class_2.lan").is_file());
    ok(
        d,
        &[
            "classify",
            "-classify",
            "2",
            "queries.list",
            "2",
            "0",
            "--model-dir",
            "model",
            "--output-dir",
            "res",
        ],
    );
    assert_eq!(read(d, "res/classification.txt"), "2\n1\n");

    ok(
        d,
        &[
            "classify",
            "-both",
            "2",
            "a.list",
            "b.list",
            "queries.list",
            "-1",
            "1",
            "--output-dir",
            "ranked",
        ],
    );
    let ranked = read(d, "ranked/classification.txt");
    let lines: Vec<&str> = ranked.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("(2,"), "{ranked}");
    assert!(lines[1].starts_with("(1,"), "{ranked}");
    assert!(ranked.ends_with(") \n"));
}

#[test]
fn classify_rejects_bad_arguments() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    two_classes(d);
    fails(d, &["classify", "-construct", "3", "a.list", "b.list"]);
    fails(
        d,
        &[
            "classify",
            "-both",
            "2",
            "a.list",
            "b.list",
            "queries.list",
            "2",
            "7",
        ],
    );
    fails(d, &["classify", "-guess", "2"]);
    // No model has been written here.
    fails(d, &["classify", "-classify", "2", "queries.list", "2", "0"]);
}

#[test]
fn classify_all_dims_sums_degrees() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    two_classes(d);
    // Degree 1 diagrams repeat degree 0, so the sum agrees with either.
    let args = [
        "classify-all-dims",
        "2",
        "2",
        "a.list",
        "a.list",
        "b.list",
        "b.list",
        "queries.list",
        "queries.list",
        "1",
        "0",
        "--output-dir",
        "res",
    ];
    ok(d, &args);
    assert_eq!(read(d, "res/classification.txt"), "2\n1\n");
    let short = &args[..args.len() - 3];
    fails(d, short);
}

#[test]
fn plot_writes_data_and_script() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "bar.txt", "1 4\n2 3\n");
    ok(d, &["plot", "bar.txt", "0", "2", "fig.dat"]);
    let data = read(d, "fig.dat");
    assert!(data.contains("2.5 1.5"), "{data}");
    assert!(data.contains("2.5 0.5"), "{data}");
    assert!(d.join("fig.gp").is_file());
    fails(d, &["plot", "bar.txt", "2", "1", "bad.dat"]);
}

#[test]
fn plot_many_names_outputs_by_position() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    two_classes(d);
    ok(d, &["plot-many", "a.list", "0", "1", "plots"]);
    for name in ["0_a1.dat", "1_a2.dat", "2_a3.dat"] {
        assert!(d.join("plots").join(name).is_file(), "{name}");
    }
}

#[test]
fn truncate_replaces_infinite_endpoints() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "inf.txt", "0 inf\n1 2\n");
    assert_eq!(ok(d, &["truncate", "inf.txt", "10"]), "0 10\n1 2\n");
    assert_eq!(ok(d, &["truncate", "inf.txt", "10", "--drop"]), "1 2\n");
    ok(d, &["truncate", "inf.txt", "5", "--output", "fin.txt"]);
    assert_eq!(read(d, "fin.txt"), "0 5\n1 2\n");
}

#[test]
fn grid_mode_from_config() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "x.txt", "0 2\n");
    write(d, "y.txt", "0 4\n");
    write(d, "list", "x.txt\ny.txt\n");
    write(
        d,
        "grid.cfg",
        "mode = grid\ngrid_begin = 0\ngrid_spacing = 0.5\ngrid_count = 10\n",
    );
    assert_eq!(
        ok(d, &["--config", "grid.cfg", "norms", "list", "1"]),
        "1\n4\n"
    );
    ok(
        d,
        &[
            "--config",
            "grid.cfg",
            "distance-matrix",
            "list",
            "-1",
            "dist.txt",
        ],
    );
    assert_eq!(read(d, "dist.txt"), "0\t2\n2\t0\n");

    // ./configure is picked up without --config.
    write(
        d,
        "configure",
        "mode = grid\ngrid_begin = 0\ngrid_spacing = 0.5\ngrid_count = 10\n",
    );
    assert_eq!(ok(d, &["norms", "list", "-1"]), "1\n2\n");
}

#[test]
fn bad_config_is_reported() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "x.txt", "0 2\n");
    write(d, "list", "x.txt\n");
    write(d, "bad.cfg", "colour = blue\n");
    let err = fails(d, &["--config", "bad.cfg", "norms", "list", "2"]);
    assert!(err.contains("colour"), "{err}");
    write(d, "half.cfg", "mode = grid\ngrid_begin = 0\n");
    fails(d, &["--config", "half.cfg", "norms", "list", "2"]);
}

#[test]
fn missing_and_malformed_inputs() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fails(d, &["norms", "nowhere.list", "2"]);
    write(d, "junk.txt", "hello world\n");
    write(d, "list", "junk.txt\n");
    fails(d, &["norms", "list", "2"]);
    write(d, "ok.txt", "0 1\n");
    write(d, "list2", "ok.txt\n");
    fails(d, &["norms", "list2", "0.5"]);
}
