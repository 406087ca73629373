use std::fs;
use std::path::PathBuf;
use std::process::Command;

use mbkdv::cli::*;
use serde_json::json;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mbkdv-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mbkdv"));
    cmd.env_remove(OUT_DIR_ENV);
    cmd
}

#[test]
fn config_round_trips_through_json() {
    let config = RunConfig::new(CommandName::ResonanceScan, json!({ "alpha": "1/2", "n_max": 50 }));
    let text = serde_json::to_string(&config).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), config);
    assert_eq!(config.output_dir, PathBuf::from(DEFAULT_OUT_DIR));
}

#[test]
fn unknown_fields_are_rejected() {
    let err = RunConfig::from_json(r#"{"command": "roots", "colour": 1}"#).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    let config = RunConfig::new(CommandName::Roots, json!({ "alpha": "1/2", "beta": 3 }));
    assert!(matches!(run(&config), Err(CliError::Config(_))));
    let config = RunConfig::new(CommandName::Roots, json!({}));
    assert!(matches!(run(&config), Err(CliError::Config(_))));
}

#[test]
fn resonance_scan_table() {
    let config = RunConfig::new(CommandName::ResonanceScan, json!({ "alpha": "1/2", "n_max": 20 }));
    let report = run(&config).unwrap();
    let table = report.table("gaps").unwrap();
    assert_eq!(table.rows.len(), 20);
    assert_eq!(table.rows[19][4], Cell::Num(250.0));
    let dat = emit_plot_data(&report, "gaps").unwrap();
    assert!(dat.starts_with("# log(N) log(gap)"));
    assert!(matches!(emit_plot_data(&report, "nope"), Err(CliError::UnknownTable(_))));
}

#[test]
fn report_is_written_to_disk() {
    let dir = scratch("write");
    let config = RunConfig::new(CommandName::Diophantine, json!({ "alpha": "1/2", "n_max": 1000 }));
    run(&config).unwrap().write(&dir).unwrap();
    for name in ["summary.json", "convergents.csv", "convergents.dat", "witnesses.csv", "witnesses.dat"] {
        assert!(dir.join(name).is_file(), "{name}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["metadata"]["config"]["command"], "diophantine");
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn runs_are_deterministic() {
    let config = RunConfig {
        seed: 7,
        ..RunConfig::new(CommandName::Simulate, json!({ "alpha": "1/2", "n": 32, "dt": 1e-3, "t": 0.05, "init": "random" }))
    };
    let a = run(&config).unwrap();
    let b = run(&config).unwrap();
    assert_eq!(a.summary, b.summary);
    assert_eq!(a.table("conservation").unwrap().to_csv(), b.table("conservation").unwrap().to_csv());
}

#[test]
fn binary_runs_subcommand() {
    let dir = scratch("bin");
    let out = binary().args(["roots", "--alpha", "12/7", "--out"]).arg(&dir).output().unwrap();
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["c1"]["exact"], "5/6");
    assert!(dir.join("roots.csv").is_file());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn binary_runs_config_file() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.json");
    let config = json!({ "command": "omega-count", "params": { "alpha": "1/2", "m_max_exp": 4 }, "output_dir": dir.join("out") });
    fs::write(&path, config.to_string()).unwrap();
    let out = binary().arg("--config").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("out").join("omega.csv").is_file());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_input_exits_with_two() {
    let out = binary().args(["roots", "--alpha", "5"]).arg("--out").arg(scratch("bad")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = binary().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = binary().args(["roots", "--alpha", "1/2", "--config", "x.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
