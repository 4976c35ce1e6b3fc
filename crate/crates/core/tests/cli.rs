use std::path::Path;
use std::process::{Command, Output};

use usv_igc::cli::{
    CONFIG_FILE, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_IO, EXIT_MONITOR, EXIT_OK, LOG_FILE, MONITOR_FILE, SUMMARY_FILE,
};
use usv_igc::{preset, ControllerKind, ScenarioConfig};

fn usv_igc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usv-igc"))
        .args(args)
        .env_remove("IGC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn presets_lists_every_path_start_and_controller() {
    let out = usv_igc(&["presets"]);
    assert_eq!(code(&out), EXIT_OK);
    let text = stdout(&out);
    for path in ["ellipse", "eight"] {
        for ic in ["P1", "P2", "P3"] {
            for c in ["smc_adhoc", "backstepping_sat"] {
                assert!(text.contains(&format!("{path}-{ic}-{c}")), "{path}-{ic}-{c} missing");
            }
        }
    }
    let json = usv_igc(&["presets", "--json"]);
    let list: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(list.as_array().unwrap().len(), 14);
}

#[test]
fn full_run_writes_outputs_and_passes_its_monitors() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("eight-p1");
    let out = Command::new(env!("CARGO_BIN_EXE_usv-igc"))
        .args(["run", "--path", "eight", "--ic", "P1", "--controller", "smc_adhoc"])
        .env("IGC_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), EXIT_OK, "{}{}", stdout(&out), stderr(&out));
    for f in [CONFIG_FILE, LOG_FILE, SUMMARY_FILE, MONITOR_FILE] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join(SUMMARY_FILE)).unwrap()).unwrap();
    let align = summary["t_align"].as_f64().unwrap();
    let reach = summary["t_reach"].as_f64().unwrap();
    assert!(align < reach, "aligned at {align}, reached at {reach}");

    let exported = ScenarioConfig::from_file(&out_dir.join(CONFIG_FILE)).unwrap();
    assert_eq!(exported, preset("eight", "P1", ControllerKind::SmcAdhoc).unwrap());

    let log = out_dir.join(LOG_FILE);
    let json = dir.path().join("report.json");
    let again = usv_igc(&["monitor", s(&log), "--json", s(&json)]);
    assert_eq!(code(&again), EXIT_OK, "{}", stdout(&again));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] != "fail"));
}

#[test]
fn short_run_fails_its_monitors_but_keeps_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = usv_igc(&[
        "run",
        "--path",
        "ellipse",
        "--ic",
        "P2",
        "--horizon",
        "2",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), EXIT_MONITOR);
    assert!(stderr(&out).contains("ordering"), "{}", stderr(&out));
    assert!(dir.path().join(LOG_FILE).is_file());
    let monitor = usv_igc(&["monitor", s(&dir.path().join(LOG_FILE))]);
    assert_eq!(code(&monitor), EXIT_MONITOR);
}

#[test]
fn invalid_configuration_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(dir.path());
    for args in [
        vec!["run", "--dt", "-1", "--out", o],
        vec!["run", "--horizon", "-5", "--out", o],
        vec!["run", "--path", "spiral", "--out", o],
        vec!["run", "--path", "ellipse", "--ic", "C1", "--out", o],
        vec!["run", "--controller", "pid", "--out", o],
        vec!["frobnicate"],
    ] {
        let out = usv_igc(&args);
        assert_eq!(code(&out), EXIT_CONFIG, "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "dt = \"fast\"\n").unwrap();
    assert_eq!(code(&usv_igc(&["run", "--config", s(&bad), "--out", o])), EXIT_CONFIG);
}

#[test]
fn integration_failure_exits_with_integration_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = usv_igc(&[
        "run",
        "--path",
        "eight",
        "--ic",
        "C1",
        "--controller",
        "backstepping_sat",
        "--horizon",
        "1",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), EXIT_INTEGRATION, "{}", stderr(&out));
}

#[test]
fn unwritable_output_and_missing_log_exit_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = usv_igc(&["run", "--horizon", "1", "--out", s(&blocker.join("sub"))]);
    assert_eq!(code(&out), EXIT_IO, "{}", stderr(&out));

    let cfg = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        preset("ellipse", "P1", ControllerKind::SmcAdhoc)
            .unwrap()
            .to_toml_string(),
    )
    .unwrap();
    let missing = usv_igc(&["monitor", s(&dir.path().join("none.csv")), "--config", s(&cfg)]);
    assert_eq!(code(&missing), EXIT_IO, "{}", stderr(&missing));
}

#[test]
fn config_file_selects_its_own_controller() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("ellipse", "P3", ControllerKind::BacksteppingSat).unwrap();
    cfg.horizon = 0.5;
    let file = dir.path().join("scenario.toml");
    std::fs::write(&file, cfg.to_toml_string()).unwrap();
    let out_dir = dir.path().join("run");
    let out = usv_igc(&["run", "--config", s(&file), "--out", s(&out_dir)]);
    assert!(stdout(&out).contains("backstepping_sat"), "{}", stdout(&out));
    assert_eq!(ScenarioConfig::from_file(&out_dir.join(CONFIG_FILE)).unwrap(), cfg);

    let swapped = dir.path().join("swapped");
    usv_igc(&[
        "run",
        "--config",
        s(&file),
        "--controller",
        "smc_adhoc",
        "--out",
        s(&swapped),
    ]);
    let used = ScenarioConfig::from_file(&swapped.join(CONFIG_FILE)).unwrap();
    assert_eq!(used.controller, ControllerKind::SmcAdhoc);
}

#[test]
fn sweep_writes_one_directory_per_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = usv_igc(&[
        "sweep",
        "--path",
        "ellipse",
        "--ic",
        "P1",
        "--ic",
        "P2",
        "--horizon",
        "1",
        "--jobs",
        "2",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), EXIT_MONITOR);
    for ic in ["P1", "P2"] {
        for c in ["smc_adhoc", "backstepping_sat"] {
            assert!(dir.path().join(format!("ellipse-{ic}-{c}")).join(LOG_FILE).is_file());
        }
    }
    let table: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(table.as_array().unwrap().len(), 4);

    let none = usv_igc(&["sweep", "--path", "spiral", "--out", s(dir.path())]);
    assert_eq!(code(&none), EXIT_CONFIG);
}
