//! End-to-end tests driving the compiled `acpv` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn acpv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acpv"))
        .args(args)
        .env_remove("ACPV_CONFIG")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = acpv(args);
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth_patches(dir: &Path, count: usize, seed: u64) {
    run_ok(&[
        "synth",
        "--out",
        path_str(dir),
        "--count",
        &count.to_string(),
        "--seed",
        &seed.to_string(),
        "--width",
        "48",
        "--height",
        "48",
        "--cells",
        "8",
        "--sigma",
        "2.0",
    ]);
}

fn uniform_mask(path: &Path) {
    let mut pgm = b"P5\n6 4\n255\n".to_vec();
    pgm.extend(std::iter::repeat(3u8).take(24));
    fs::write(path, pgm).unwrap();
}

#[test]
fn vectorize_uniform_mask_mode_none() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("m.pgm");
    uniform_mask(&mask);
    let out = dir.path().join("p.json");
    let stdout = run_ok(&[
        "vectorize",
        "--mask",
        path_str(&mask),
        "--mode",
        "none",
        "--out",
        path_str(&out),
    ]);
    assert!(stdout.contains("gap 0.00 inter 0.00 intra 0.00 sec 100.00"), "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["features"].as_array().unwrap().len(), 1);
}

#[test]
fn vss_without_heatmap_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("m.pgm");
    uniform_mask(&mask);
    let out = acpv(&[
        "vectorize",
        "--mask",
        path_str(&mask),
        "--mode",
        "vss",
        "--out",
        path_str(&dir.path().join("p.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_then_vectorize_vss_reports_clean_topology() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 7);
    let out = dir.path().join("pred.json");
    let stdout = run_ok(&[
        "vectorize",
        "--mask",
        path_str(&dir.path().join("patch_0000.pgm")),
        "--heatmap",
        path_str(&dir.path().join("patch_0000.pfm")),
        "--mode",
        "vss",
        "--tau",
        "3",
        "--out",
        path_str(&out),
        "--svg",
        path_str(&dir.path().join("pred.svg")),
    ]);
    assert!(stdout.contains("gap 0.00 inter 0.00 intra 0.00 sec 100.00"), "{stdout}");
    assert!(dir.path().join("pred.svg").exists());
}

#[test]
fn synth_is_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    synth_patches(d1.path(), 2, 3);
    synth_patches(d2.path(), 2, 3);
    for name in ["patch_0000.json", "patch_0000.pgm", "patch_0000.pfm", "patch_0001.json"] {
        assert_eq!(
            fs::read(d1.path().join(name)).unwrap(),
            fs::read(d2.path().join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d1.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["patches"].as_array().unwrap().len(), 2);
    assert!(manifest["patches"][0]["config_hash"].is_string());
}

fn setup_eval_dirs(base: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let (pred, gt, masks) = (base.join("pred"), base.join("gt"), base.join("masks"));
    for d in [&pred, &gt, &masks] {
        fs::create_dir_all(d).unwrap();
    }
    (pred, gt, masks)
}

#[test]
fn evaluate_self_gives_perfect_scores() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 2, 11);
    let (pred, gt, masks) = setup_eval_dirs(dir.path());
    for i in 0..2 {
        let stem = format!("patch_{i:04}");
        fs::copy(dir.path().join(format!("{stem}.json")), pred.join(format!("{stem}.json")))
            .unwrap();
        fs::copy(dir.path().join(format!("{stem}.json")), gt.join(format!("{stem}.json")))
            .unwrap();
        fs::copy(dir.path().join(format!("{stem}.pgm")), masks.join(format!("{stem}.pgm")))
            .unwrap();
    }
    let report_dir = dir.path().join("report");
    run_ok(&[
        "evaluate",
        "--pred",
        path_str(&pred),
        "--gt",
        path_str(&gt),
        "--masks",
        path_str(&masks),
        "--out",
        path_str(&report_dir),
        "--workers",
        "2",
    ]);
    let csv = fs::read_to_string(report_dir.join("summary.csv")).unwrap();
    assert!(csv.contains("patch_0000"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report_dir.join("summary.json")).unwrap())
            .unwrap();
    assert!((summary["mean_iou"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let per_patch: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(report_dir.join("patch_0000.metrics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(per_patch["sec"].as_f64().unwrap(), 1.0);
}

#[test]
fn evaluate_empty_pred_dir_exits_partial() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 2);
    let (pred, gt, masks) = setup_eval_dirs(dir.path());
    fs::copy(dir.path().join("patch_0000.json"), gt.join("patch_0000.json")).unwrap();
    fs::copy(dir.path().join("patch_0000.pgm"), masks.join("patch_0000.pgm")).unwrap();
    let out = acpv(&[
        "evaluate",
        "--pred",
        path_str(&pred),
        "--gt",
        path_str(&gt),
        "--masks",
        path_str(&masks),
        "--out",
        path_str(&dir.path().join("report")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_dp_eps_vertex_counts_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 5);
    let csv_path = dir.path().join("sweep.csv");
    run_ok(&[
        "sweep",
        "--axis",
        "dp-eps",
        "--values",
        "1,2,3,4",
        "--mask",
        path_str(&dir.path().join("patch_0000.pgm")),
        "--gt",
        path_str(&dir.path().join("patch_0000.json")),
        "--out",
        path_str(&csv_path),
    ]);
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut per_value: std::collections::BTreeMap<String, usize> = Default::default();
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        *per_value.entry(cells[0].to_string()).or_default() +=
            cells[2].parse::<usize>().unwrap();
    }
    let totals: Vec<usize> = ["1", "2", "3", "4"].iter().map(|v| per_value[*v]).collect();
    assert!(totals.windows(2).all(|w| w[0] >= w[1]), "not non-increasing: {totals:?}");
}

#[test]
fn sweep_single_value_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 5);
    let out = acpv(&[
        "sweep",
        "--axis",
        "dp-eps",
        "--values",
        "2",
        "--mask",
        path_str(&dir.path().join("patch_0000.pgm")),
        "--gt",
        path_str(&dir.path().join("patch_0000.json")),
        "--out",
        path_str(&dir.path().join("sweep.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_accepts_synth_partition() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 9);
    let stdout = run_ok(&["validate", path_str(&dir.path().join("patch_0000.json"))]);
    assert!(stdout.contains("minimal redundancy: ok"), "{stdout}");
}

#[test]
fn validate_rejects_overlap_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = serde_json::json!({
        "type": "FeatureCollection",
        "properties": { "width": 4, "height": 4 },
        "features": [
            { "type": "Feature", "properties": { "class": 0 },
              "geometry": { "type": "Polygon",
                "coordinates": [[[0.0,0.0],[3.0,0.0],[3.0,4.0],[0.0,4.0],[0.0,0.0]]] } },
            { "type": "Feature", "properties": { "class": 1 },
              "geometry": { "type": "Polygon",
                "coordinates": [[[2.0,0.0],[4.0,0.0],[4.0,4.0],[2.0,4.0],[2.0,0.0]]] } }
        ]
    });
    let path = dir.path().join("bad.json");
    fs::write(&path, fixture.to_string()).unwrap();
    let out = acpv(&["validate", path_str(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("VIOLATED"));
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 13);
    let (s1, s2) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for out in [&s1, &s2] {
        run_ok(&[
            "render",
            path_str(&dir.path().join("patch_0000.json")),
            "--out",
            path_str(out),
            "--vertices",
        ]);
    }
    let svg = fs::read(&s1).unwrap();
    assert_eq!(svg, fs::read(&s2).unwrap());
    let text = String::from_utf8(svg).unwrap();
    assert!(!text.contains("fill=\"red\""));
    assert!(text.contains("<circle"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    synth_patches(dir.path(), 1, 4);
    let config = dir.path().join("acpv.toml");
    fs::write(&config, "dp_eps = 2.0\npalette = [\"#112233\"]\n").unwrap();
    let out = dir.path().join("p.json");
    run_ok(&[
        "--config",
        path_str(&config),
        "vectorize",
        "--mask",
        path_str(&dir.path().join("patch_0000.pgm")),
        "--mode",
        "dp",
        "--out",
        path_str(&out),
        "--svg",
        path_str(&dir.path().join("p.svg")),
    ]);
    let svg = fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.contains("#112233"));
}
