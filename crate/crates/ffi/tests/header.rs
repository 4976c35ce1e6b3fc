use std::path::PathBuf;
use std::process::Command;

const CONSUMER: &str = r#"
#include "usv_igc.h"
#include <stdio.h>

int main(void) {
    UsvScenario *scenario = NULL;
    UsvLog *log = NULL;
    double row[24];
    int passed = 0;
    char *report = NULL;
    if (usv_scenario_preset("ellipse", "P1", USV_CONTROLLER_BACKSTEPPING_SAT, &scenario) != USV_STATUS_OK) {
        fprintf(stderr, "%s\n", usv_last_error());
        return 1;
    }
    usv_scenario_set_horizon(scenario, 1.0);
    if (usv_simulate(scenario, &log) != USV_STATUS_OK) {
        return 2;
    }
    usv_log_row(log, usv_log_rows(log) - 1, row, sizeof row / sizeof row[0]);
    usv_monitor(scenario, log, &passed, &report);
    printf("%s %zu %s %g\n", usv_version(), usv_log_columns(), usv_log_column_name(10), row[0]);
    usv_string_free(report);
    usv_log_free(log);
    usv_scenario_free(scenario);
    return 0;
}
"#;

fn include_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn compiles(compiler: &str, extra: &[&str], ext: &str) {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join(format!("consumer.{ext}"));
    std::fs::write(&src, CONSUMER).unwrap();
    let out = Command::new(compiler)
        .args(extra)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .output()
        .unwrap_or_else(|e| panic!("{compiler} not runnable: {e}"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn header_compiles_as_c() {
    compiles("cc", &["-std=c99", "-pedantic"], "c");
}

#[test]
fn header_compiles_as_cpp() {
    compiles("c++", &["-std=c++17"], "cpp");
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(include_dir().join("usv_igc.h")).unwrap();
    let source = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from the header");
    }
    for ty in [
        "typedef struct UsvScenario UsvScenario;",
        "typedef struct UsvLog UsvLog;",
        "USV_STATUS_IO = 5",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn consumer_links_against_the_static_library_and_runs() {
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libusv_igc_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("consumer.c");
    let exe = dir.path().join("consumer");
    std::fs::write(&src, CONSUMER).unwrap();
    let build = Command::new("cc")
        .arg("-std=c99")
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(text.trim(), format!("{} 24 R 1", env!("CARGO_PKG_VERSION")));
}
