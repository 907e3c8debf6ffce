use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fenc() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fenc"));
    cmd.env_remove("FENC_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    fenc().args(args).output().unwrap()
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_ok(args)).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn workloads_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../workloads")
}

fn zero_fraction(rows: &Value) -> f64 {
    let bits: Vec<char> = rows.as_array().unwrap().iter().flat_map(|r| r.as_str().unwrap().chars().collect::<Vec<_>>()).collect();
    bits.iter().filter(|&&b| b == '0').count() as f64 / bits.len() as f64
}

#[test]
fn perf_matches_golden() {
    assert_eq!(stdout_ok(&["perf"]), golden("perf_default.json"));
    assert_eq!(stdout_ok(&["perf", "--format", "csv"]), golden("perf_default.csv"));
}

#[test]
fn perf_wide_sense_amps_per_block() {
    let report = json(&["perf", "--sa", "128", "--granularity", "per-block"]);
    assert_eq!(report["in_situ"]["dec_latency_cycles"], 1.0);
}

#[test]
fn perf_frequency_scales_throughput() {
    let base = json(&["perf"]);
    let fast = json(&["perf", "--freq", "50MHz"]);
    for field in ["enc_throughput_mbps", "dec_throughput_mbps"] {
        let a = base["in_situ"][field].as_f64().unwrap();
        let b = fast["in_situ"][field].as_f64().unwrap();
        assert!((b - 2.0 * a).abs() < 1e-9, "{field}: {a} -> {b}");
    }
    assert_eq!(fast["in_situ"]["enc_latency_cycles"], base["in_situ"]["enc_latency_cycles"]);
}

#[test]
fn workloads_match_golden() {
    let dir = workloads_dir();
    let dir = dir.to_str().unwrap();
    assert_eq!(stdout_ok(&["workloads", "--dir", dir]), golden("workloads_default.json"));
    assert_eq!(stdout_ok(&["workloads", "--dir", dir, "--format", "csv"]), golden("workloads_default.csv"));
}

#[test]
fn shipped_alexnet_matches_torchvision_weight_count() {
    let spec = fenc::workload_io::load_workload(&workloads_dir().join("alexnet.json")).unwrap();
    assert_eq!(spec.layers.len(), 8);
    // torchvision alexnet: 61,100,840 parameters, 10,344 of them biases
    assert_eq!(spec.total_weight_bits(), (61_100_840 - 10_344) * 8);
}

#[test]
fn single_balanced_layer_workload() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("one.json"),
        r#"{"name":"one","layers":[{"name":"fc","weight_bits":128000,"output_bits":128000}]}"#,
    )
    .unwrap();
    let report = json(&["workloads", "--dir", dir.path().to_str().unwrap()]);
    // 1000 words each way: (5 + 16) / (115.5 + 117)
    let expected = 1.0 - 21.0 / 232.5;
    let got = report["average_reduction"].as_f64().unwrap();
    assert!((got - expected).abs() < 1e-12, "{got}");
}

#[test]
fn empty_workload_dir_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["workloads", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn roundtrip_checkerboard_recovers_plaintext() {
    let report = json(&["--seed", "11", "roundtrip", "--pattern", "checkerboard", "--random-keys"]);
    assert_eq!(report["accuracy"], 1.0);
    assert_eq!(report["recovered"], report["pt"]);
    assert_eq!(report["pt"][0], "1010101");
    let states = report["state_map"].as_array().unwrap();
    assert_eq!(states.len(), 8);
    for pair in states.chunks(2) {
        let (top, bottom) = (pair[0].as_str().unwrap(), pair[1].as_str().unwrap());
        assert!(top.chars().zip(bottom.chars()).all(|(t, b)| t != b));
    }
}

#[test]
fn roundtrip_all_zero_attack_scores_zero_key_fraction() {
    for seed in ["1", "2", "3"] {
        let report = json(&["--seed", seed, "roundtrip", "--attack", "all-zero"]);
        assert_eq!(report["accuracy"].as_f64().unwrap(), zero_fraction(&report["keys"]));
        assert_eq!(report["recovered"], report["ct"]);
        assert_eq!(report["correct_key_accuracy"], 1.0);
    }
}

#[test]
fn roundtrip_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let pt = dir.path().join("pt.txt");
    let keys = dir.path().join("keys.txt");
    let dump = dir.path().join("dump.json");
    std::fs::write(&pt, "# two rows\n10110\n01001\n").unwrap();
    std::fs::write(&keys, "granularity per-bit\nrows 2\ncols 5\n18\nF8\n").unwrap();
    let report = json(&[
        "roundtrip",
        "--pt",
        pt.to_str().unwrap(),
        "--keys",
        keys.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(report["keys"], serde_json::json!(["00011", "11111"]));
    assert_eq!(report["ct"], serde_json::json!(["10101", "10110"]));
    assert_eq!(report["recovered"], serde_json::json!(["10110", "01001"]));
    let array = fenc::dump::load(&dump).unwrap();
    assert_eq!((array.rows(), array.cols()), (2, 5));
}

#[test]
fn empty_plaintext_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let pt = dir.path().join("empty.txt");
    std::fs::write(&pt, "").unwrap();
    let out = run(&["roundtrip", "--pt", pt.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_scenario_is_usage_error() {
    assert_eq!(run(&["attack"]).status.code(), Some(2));
}

#[test]
fn attack_scenarios() {
    let correct = json(&["attack", "--scenario", "correct", "--trials", "100"]);
    assert_eq!(correct["accuracy_mean"], 1.0);
    assert_eq!(correct["accuracy_std"], 0.0);
    for scenario in ["all-zero", "random"] {
        let report = json(&["--seed", "4", "attack", "--scenario", scenario]);
        assert_eq!(report["trials"], 1000);
        assert_eq!(report["bits_per_trial"], 128);
        let mean = report["accuracy_mean"].as_f64().unwrap();
        assert!((mean - 0.5).abs() <= 0.02, "{scenario}: {mean}");
    }
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["--seed", "9", "roundtrip", "--pattern", "random", "--rows", "6", "--cols", "9"][..],
        &["--seed", "9", "attack", "--scenario", "random", "--trials", "50"][..],
        &["--seed", "9", "ber", "--sigmas", "0.1,0.2", "--format", "csv"][..],
    ] {
        assert_eq!(stdout_ok(args), stdout_ok(args));
    }
}

#[test]
fn out_dir_receives_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_ok(&["--out", dir.path().to_str().unwrap(), "perf", "--format", "csv"]);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1, "{out}");
    assert_eq!(std::fs::read_to_string(&files[0]).unwrap(), golden("perf_default.csv"));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fenc.json");
    std::fs::write(&path, r#"{"perf": {"num_sense_amps": 128, "key_granularity": "per-block"}}"#).unwrap();
    let out = fenc().env("FENC_CONFIG", &path).arg("perf").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["in_situ"]["dec_latency_cycles"], 1.0);

    // explicit flag wins over the environment
    let other = dir.path().join("other.json");
    std::fs::write(&other, r#"{"perf": {"freq_hz": 50000000.0}}"#).unwrap();
    let out = fenc().env("FENC_CONFIG", &path).args(["--config", other.to_str().unwrap(), "perf"]).output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["in_situ"]["dec_latency_cycles"], 16.0);
    assert_eq!(report["in_situ"]["enc_throughput_mbps"], 1280.0);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"array": {"colz": 4}}"#).unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "perf"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn ber_sweep_starts_at_zero() {
    let csv = stdout_ok(&["ber", "--sigmas", "0", "--format", "csv"]);
    assert_eq!(csv, "vth_sigma,bits,errors,ber\n0,10000,0,0\n");
}
