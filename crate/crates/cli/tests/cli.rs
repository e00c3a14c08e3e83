use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_syk-entropy"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"{
  "times": [2.0, 4.0],
  "shots": 4000,
  "rm": { "n_unitaries": 10, "shots_per_unitary": 128 },
  "executor": { "workers": 1 }
}"#;

#[test]
fn run_writes_results_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = bin()
            .args(["run", cfg.to_str().unwrap(), "--seed", "7", "--output-dir"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read_to_string(out.join("results.csv")).unwrap());
        assert!(out.join("config.resolved.json").exists());
        assert!(out.join("gate_counts.json").exists());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].lines().count(), 1 + 2 * 2 * 2);
    let resolved = fs::read_to_string(dir.path().join("a/config.resolved.json")).unwrap();
    assert!(resolved.contains("\"master_seed\": 7"));
}

#[test]
fn oracle_and_counts_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{}");
    let out = dir.path().join("o");
    let status = bin().args(["oracle", cfg.to_str().unwrap(), "--output-dir"]).arg(&out).status().unwrap();
    assert!(status.success());
    let oracle = fs::read_to_string(out.join("oracle.csv")).unwrap();
    assert_eq!(oracle.lines().count(), 1 + 5 * 2);

    let bits = dir.path().join("bits");
    let status = bin()
        .args(["oracle", cfg.to_str().unwrap(), "--log2", "--output-dir"])
        .arg(&bits)
        .status()
        .unwrap();
    assert!(status.success());
    let s2 = |text: &str| -> f64 { text.lines().nth(1).unwrap().split(',').nth(6).unwrap().parse().unwrap() };
    let in_bits = fs::read_to_string(bits.join("oracle.csv")).unwrap();
    assert!((s2(&in_bits) * std::f64::consts::LN_2 - s2(&oracle)).abs() < 1e-12);

    let status = bin().args(["counts", cfg.to_str().unwrap(), "--output-dir"]).arg(&out).status().unwrap();
    assert!(status.success());
    let counts = fs::read_to_string(out.join("gate_counts.json")).unwrap();
    assert!(counts.contains("all-zeros") && counts.contains("two_qubit_gates"));
}

#[test]
fn failures_exit_with_category_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "{\n  \"times\": [3.0]\n}");
    let out = bin().args(["run", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");

    let out = bin().args(["run", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));

    let good = write_config(dir.path(), "{}");
    let out = bin().args(["counts", good.to_str().unwrap(), "--workers", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin().args(["bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
