use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fso_dnn::harness::csv::{read_ser_csv, SER_HEADER};
use fso_dnn::harness::RunManifest;
use fso_dnn::neuralnet::load_params;

fn fso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fso-dnn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fso(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_writes_one_row_per_grid_point_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&[
            "sweep",
            "--trials",
            "1000",
            "--grid",
            "0,10,20",
            "--seed",
            "9",
            "--set",
            "detector=qam_ml_perfect",
            "--out",
            path(dir),
        ]);
    }
    let csv = fs::read_to_string(a.join("ser.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(SER_HEADER));
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(csv, fs::read_to_string(b.join("ser.csv")).unwrap());
    assert!(fs::read_to_string(a.join("ser.svg"))
        .unwrap()
        .contains("<polyline"));

    let manifest = RunManifest::read(&a).unwrap();
    assert_eq!(manifest.command, "sweep");
    assert_eq!(manifest.master_seed, 9);
    assert!(manifest.mismatched_files(&a).is_empty());
    assert!(manifest.files.iter().any(|f| f.name == "ser.csv"));
    assert!(manifest.config.contains("grid = 0,10,20"));
}

#[test]
fn train_then_sweep_with_saved_model() {
    let tmp = tempfile::tempdir().unwrap();
    let models = tmp.path().join("models");
    let cfg = tmp.path().join("e2e.cfg");
    fs::write(
        &cfg,
        "# small end-to-end run\ndetector = end_to_end_dnn\nmodulation_order = 4\niterations = 40\n",
    )
    .unwrap();
    ok(&["train", "--config", path(&cfg), "--out", path(&models)]);
    for f in [
        "rx.fsomlp",
        "tx.fsomlp",
        "loss.csv",
        "constellation.csv",
        "manifest.json",
    ] {
        assert!(models.join(f).exists(), "{f}");
    }
    let tx = load_params(models.join("tx.fsomlp")).unwrap();
    assert_eq!(tx.dims(), &[4, 40, 40, 40, 40, 2]);
    assert_eq!(
        fs::read_to_string(models.join("loss.csv"))
            .unwrap()
            .lines()
            .count(),
        41
    );

    let sweep = tmp.path().join("sweep");
    let stdout = ok(&[
        "sweep",
        "--config",
        path(&cfg),
        "--trials",
        "2000",
        "--grid",
        "0,30",
        "--set",
        &format!("model_dir={}", path(&models)),
        "--set",
        "plot=false",
        "--out",
        path(&sweep),
    ]);
    assert!(stdout.starts_with(SER_HEADER));
    let curve = read_ser_csv(&fs::read_to_string(sweep.join("ser.csv")).unwrap(), &sweep).unwrap();
    assert_eq!(curve.points.len(), 2);
    assert!(!sweep.join("ser.svg").exists());
    assert!(!sweep.join("rx.fsomlp").exists());
}

#[test]
fn validate_channel_reports_strong_scintillation() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "validate-channel",
        "--set",
        "channel_samples=200000",
        "--out",
        path(tmp.path()),
    ]);
    let si: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("scintillation_index = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(((si - 1.1224) / 1.1224).abs() < 0.02, "{si}");
    assert!(stdout.contains("ks_pass = true"));
    assert!(tmp.path().join("channel_report.txt").exists());
}

#[test]
fn plot_combines_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut inputs = Vec::new();
    for (name, det) in [("perfect", "qam_ml_perfect"), ("blind", "qam_ml_blind")] {
        let dir = tmp.path().join(name);
        ok(&[
            "sweep",
            "--trials",
            "500",
            "--grid",
            "0,10",
            "--set",
            &format!("detector={det}"),
            "--set",
            "blind_block_len=50",
            "--out",
            path(&dir),
        ]);
        inputs.push(dir.join("ser.csv"));
    }
    let out = tmp.path().join("plot");
    ok(&[
        "plot",
        path(&inputs[0]),
        path(&inputs[1]),
        "--out",
        path(&out),
    ]);
    let svg = fs::read_to_string(out.join("plot.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn exit_codes_distinguish_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.cfg");
    fs::write(&bad, "modulation_order = 16\nwhatever = 1\n").unwrap();
    let out = fso(&["sweep", "--config", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = fso(&["sweep", "--set", "modulation_order=5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("modulation_order"));

    let out = fso(&["train", "--config", path(&tmp.path().join("missing.cfg"))]);
    assert_eq!(out.status.code(), Some(4));

    let diverge = tmp.path().join("diverge");
    let out = fso(&[
        "train",
        "--set",
        "learning_rate=1e300",
        "--set",
        "iterations=20",
        "--set",
        "modulation_order=4",
        "--out",
        path(&diverge),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!diverge.join("manifest.json").exists());

    let csv = tmp.path().join("broken.csv");
    fs::write(&csv, "es_n0_db,ser\n1,2\n").unwrap();
    let out = fso(&["plot", path(&csv), "--out", path(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
}
