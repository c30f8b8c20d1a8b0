//! End-to-end checks of the command-line surface.

use std::path::Path;
use std::process::{Command, Output};

fn furlong(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_furlong"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

#[test]
fn synth_stream_then_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let out = furlong(
        &["synth", "stream", "--markets", "2", "--messages", "60", "--seed", "3", "--out", "data", "--compress"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("wrote 2 market files"));

    let out = furlong(&["ingest", "data"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("120 messages"), "{text}");
    assert!(text.contains("0 warnings"), "{text}");
}

#[test]
fn build_writes_datasets() {
    let dir = tempfile::tempdir().unwrap();
    furlong(
        &["synth", "stream", "--markets", "2", "--messages", "50", "--seed", "5", "--out", "data"],
        dir.path(),
    );
    let out = furlong(&["build", "data", "--out", "built"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("built/winners.csv").exists());
    assert!(dir.path().join("built/market_definitions.csv").exists());
    assert!(dir.path().join("built/market_definitions_full.csv").exists());
    assert!(stdout(&out).contains("2 winners"));
}

#[test]
fn returns_writes_settlement_files() {
    let dir = tempfile::tempdir().unwrap();
    furlong(
        &["synth", "stream", "--markets", "1", "--messages", "80", "--seed", "8", "--out", "data"],
        dir.path(),
    );
    let out = furlong(
        &["returns", "data", "--out", "ret", "--commission", "0.02"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(dir.path().join("ret/returns_all.csv").exists());
    let text = std::fs::read_to_string(dir.path().join("ret/returns_all.csv")).unwrap();
    assert!(text.starts_with("t,eventId,marketId,selectionId,side,stake,odds,net_return"));
    assert!(text.lines().count() > 10);
}

#[test]
fn analyze_empty_directory_fails_with_machine_readable_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("empty")).unwrap();
    let out = furlong(&["analyze", "empty", "--out", "out"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no markets found"), "{stderr}");
    let parsed: serde_json::Value =
        serde_json::from_str(stderr.lines().last().unwrap()).expect("stderr line is JSON");
    assert!(parsed["error"].is_string());
}

#[test]
fn hurst_toggle_omits_only_hurst() {
    let dir = tempfile::tempdir().unwrap();
    furlong(
        &["synth", "stream", "--markets", "2", "--messages", "600", "--seed", "12", "--out", "data"],
        dir.path(),
    );
    let full = furlong(&["analyze", "data", "--out", "full"], dir.path());
    assert!(full.status.success(), "{}", String::from_utf8_lossy(&full.stderr));
    let toggled = furlong(&["analyze", "data", "--out", "toggled", "--no-hurst"], dir.path());
    assert!(toggled.status.success());

    let full_report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("full/report.json")).unwrap())
            .unwrap();
    let toggled_report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("toggled/report.json")).unwrap(),
    )
    .unwrap();

    let full_markets = full_report["per_market"].as_array().unwrap();
    let toggled_markets = toggled_report["per_market"].as_array().unwrap();
    assert_eq!(full_markets.len(), toggled_markets.len());
    for (a, b) in full_markets.iter().zip(toggled_markets) {
        assert!(a.get("hurst").is_some());
        assert!(b.get("hurst").is_none());
        assert_eq!(a["adf_abs"], b["adf_abs"]);
        assert_eq!(a["kpss_abs"], b["kpss_abs"]);
        assert_eq!(a["power_law_abs"], b["power_law_abs"]);
        assert_eq!(a["n_returns"], b["n_returns"]);
    }
    assert_eq!(full_report["log_returns"], toggled_report["log_returns"]);
}

#[test]
fn report_rederives_tables_from_json() {
    let dir = tempfile::tempdir().unwrap();
    furlong(
        &["synth", "stream", "--markets", "1", "--messages", "120", "--seed", "14", "--out", "data"],
        dir.path(),
    );
    furlong(&["analyze", "data", "--out", "out"], dir.path());
    let out = furlong(
        &["report", "out/report.json", "--out", "rederived"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let original = std::fs::read(dir.path().join("out/table_adf_abs.csv")).unwrap();
    let rederived = std::fs::read(dir.path().join("rederived/table_adf_abs.csv")).unwrap();
    assert_eq!(original, rederived);
}

#[test]
fn analyze_accepts_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    furlong(
        &["synth", "stream", "--markets", "1", "--messages", "80", "--seed", "19", "--out", "data"],
        dir.path(),
    );
    std::fs::write(
        dir.path().join("run.toml"),
        "scale = 2.0\nmax_lag = 50\nks_level = 0.05\n",
    )
    .unwrap();
    let out = furlong(
        &[
            "analyze", "data", "--out", "out", "--config", "run.toml", "--commission", "0.03",
            "--seed", "9",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    let config = &report["provenance"]["config"];
    assert_eq!(config["scale"], 2.0);
    assert_eq!(config["max_lag"], 50);
    assert_eq!(config["commission"], 0.03);
    assert_eq!(config["seed"], 9);
}

#[test]
fn synth_series_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = furlong(
        &[
            "synth", "series", "--family", "generalized_gaussian", "--beta", "1.19", "--n", "500",
            "--seed", "7", "--out", "gg.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("gg.csv")).unwrap();
    assert_eq!(text.lines().count(), 501);
    assert!(text.starts_with("t,value"));
}
