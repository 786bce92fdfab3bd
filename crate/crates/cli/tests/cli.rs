//! End-to-end checks of the binary: flag parsing, file outputs, overrides.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vlc-noma"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn constellation_two_tx_equal_gains() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "constellation",
        "--eta",
        "1,1",
        "--gains",
        "1,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let table = read(dir.path(), "constellation.txt");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "tx\teta\tlambda\traw_levels\tnormalized_levels");
    // decode-order tx 1 carries the widest levels, tx 2 the base PAM set
    assert!(lines[1].starts_with("1\t1\t5\t3,8\t"));
    assert!(lines[2].starts_with("2\t1\t1\t1,2\t"));
    let norm: Vec<Vec<f64>> = lines[1..=2]
        .iter()
        .map(|l| l.split('\t').last().unwrap().split(',').map(|p| p.parse().unwrap()).collect())
        .collect();
    for (got, want) in norm.iter().flatten().zip([0.3, 0.8, 0.1, 0.2]) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn ber_mac_csv_shape_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "ber-mac",
        "--scenario",
        "fig3a",
        "--eta",
        "2,2",
        "--decoder",
        "jml",
        "--snr",
        "10:10:70",
        "--bits",
        "1e4",
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path(), "ber.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "snr_db,entity_id,bits,errors,ber");
    // 7 grid points x 2 transmitters
    assert_eq!(lines.len(), 1 + 7 * 2);
    for chunk in lines[1..].chunks(2) {
        assert!(chunk[0].split(',').nth(1) == Some("1"));
        assert!(chunk[1].split(',').nth(1) == Some("2"));
    }
}

#[test]
fn ber_bc_two_users() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "ber-bc",
        "--scenario",
        "fig3c",
        "--eta",
        "1,1",
        "--snr",
        "40",
        "--bits",
        "1e4",
        "--seed",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path(), "ber.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "snr_db,entity_id,bits,errors,ber");
    assert_eq!(lines.len(), 1 + 2);
}

#[test]
fn oma_baseline_decoder() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "ber-mac",
        "--scenario",
        "fig3a",
        "--eta",
        "1,1",
        "--decoder",
        "oma",
        "--snr",
        "20:10:40",
        "--bits",
        "1e4",
        "--seed",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "ber.csv");
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
}

#[test]
fn complexity_table_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "complexity",
        "--eta",
        "7,7",
        "--nfft",
        "256",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path(), "complexity.csv");
    for value in ["384", "16384", "6420", "26900", "768"] {
        assert!(csv.contains(value), "complexity.csv missing {value}:\n{csv}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{
            "scenario": "fig3a",
            "txs": {"etas": [1, 1]},
            "sweep": {"snr": "20:10:30", "bits": 1e4, "seed": 1},
            "decoder": {"kind": "sic"}
        }"#,
    )
    .unwrap();

    let out_dir = dir.path().join("a");
    let out = run(&[
        "ber-mac",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let echoed = read(&out_dir, "effective_config.json");
    let v: serde_json::Value = serde_json::from_str(&echoed).unwrap();
    assert_eq!(v["sweep"]["seed"], 2, "flag must override the file seed");
    assert_eq!(v["decoder"], "sic");
    assert_eq!(v["sweep"]["snr_db"].as_array().unwrap().len(), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let out = run(&[
            "ber-mac",
            "--scenario",
            "fig3a",
            "--eta",
            "2,2",
            "--decoder",
            "hybrid:2",
            "--snr",
            "25:5:40",
            "--bits",
            "2e4",
            "--seed",
            "42",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        csvs.push(std::fs::read(out_dir.join("ber.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn optimal_m_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "optimal-m",
        "--scenario",
        "fig3b",
        "--eta",
        "2,2,2,2",
        "--v",
        "3",
        "--target",
        "1",
        "--gamma",
        "70",
        "--bits",
        "1e5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path(), "optimal_m.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "v,target,target_ber,m_hat,computations,feasible");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols[0], "3");
    assert_eq!(cols[1], "1");
    assert_eq!(cols[5], "true");
}

#[test]
fn unknown_scenario_fails_cleanly() {
    let out = run(&["constellation", "--scenario", "fig9z", "--eta", "1,1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
