use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use usv_igc_ffi::*;

fn last_error() -> String {
    let p = usv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn scenario(path: &str, start: &str, controller: UsvController) -> *mut UsvScenario {
    let mut out = ptr::null_mut();
    let status = unsafe { usv_scenario_preset(cstr(path).as_ptr(), cstr(start).as_ptr(), controller, &mut out) };
    assert_eq!(status, UsvStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn preset_simulate_and_read_rows() {
    let s = scenario("ellipse", "P1", UsvController::BacksteppingSat);
    unsafe {
        assert_eq!(usv_scenario_set_horizon(s, 0.5), UsvStatus::Ok);
        let (mut dt, mut horizon, mut controller) = (0.0, 0.0, UsvController::SmcAdhoc);
        assert_eq!(
            usv_scenario_get(s, &mut dt, &mut horizon, &mut controller),
            UsvStatus::Ok
        );
        assert_eq!((dt, horizon, controller), (1e-3, 0.5, UsvController::BacksteppingSat));

        let mut log = ptr::null_mut();
        assert_eq!(usv_simulate(s, &mut log), UsvStatus::Ok);
        assert_eq!(usv_log_rows(log), 501);
        assert_eq!(usv_log_columns(), 24);
        assert_eq!(CStr::from_ptr(usv_log_column_name(0)).to_str().unwrap(), "t");
        assert_eq!(CStr::from_ptr(usv_log_column_name(23)).to_str().unwrap(), "gate_r");
        assert!(usv_log_column_name(24).is_null());

        let mut row = [f64::NAN; 24];
        assert_eq!(usv_log_row(log, 0, row.as_mut_ptr(), row.len()), UsvStatus::Ok);
        assert_eq!(&row[..3], &[0.0, -2.0, -5.0]);
        assert_eq!(usv_log_row(log, 500, row.as_mut_ptr(), row.len()), UsvStatus::Ok);
        assert!((row[0] - 0.5).abs() < 1e-12);

        assert_eq!(
            usv_log_row(log, 501, row.as_mut_ptr(), row.len()),
            UsvStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));
        assert_eq!(usv_log_row(log, 0, row.as_mut_ptr(), 3), UsvStatus::InvalidArgument);
        assert_eq!(usv_log_row(log, 0, ptr::null_mut(), 24), UsvStatus::NullPointer);

        let mut passed: c_int = -1;
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(usv_monitor(s, log, &mut passed, &mut report), UsvStatus::Ok);
        assert_eq!(passed, 0);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert!(json["checks"].as_array().unwrap().len() > 3);
        usv_string_free(report);

        usv_log_free(log);
        usv_scenario_free(s);
    }
}

#[test]
fn full_preset_passes_its_monitors() {
    let s = scenario("eight", "P1", UsvController::SmcAdhoc);
    unsafe {
        let mut log = ptr::null_mut();
        assert_eq!(usv_simulate(s, &mut log), UsvStatus::Ok);
        let mut passed: c_int = -1;
        assert_eq!(usv_monitor(s, log, &mut passed, ptr::null_mut()), UsvStatus::Ok);
        assert_eq!(passed, 1);
        usv_log_free(log);
        usv_scenario_free(s);
    }
}

#[test]
fn toml_round_trip() {
    let s = scenario("eight", "C1", UsvController::SmcAdhoc);
    unsafe {
        assert_eq!(usv_scenario_set_dt(s, 5e-4), UsvStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(usv_scenario_to_toml(s, &mut text), UsvStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(usv_scenario_from_toml(text, &mut back), UsvStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(usv_scenario_to_toml(back, &mut again), UsvStatus::Ok);
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(again));
        usv_string_free(text);
        usv_string_free(again);
        usv_scenario_free(back);
        usv_scenario_free(s);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        let status = usv_scenario_preset(
            cstr("spiral").as_ptr(),
            cstr("P1").as_ptr(),
            UsvController::SmcAdhoc,
            &mut s,
        );
        assert_eq!(status, UsvStatus::Config);
        assert!(s.is_null());
        assert!(last_error().contains("spiral"));

        let status = usv_scenario_preset(ptr::null(), cstr("P1").as_ptr(), UsvController::SmcAdhoc, &mut s);
        assert_eq!(status, UsvStatus::NullPointer);
        assert_eq!(last_error(), "path is NULL");

        let bad = [0xffu8, 0];
        let status = usv_scenario_preset(
            bad.as_ptr().cast(),
            cstr("P1").as_ptr(),
            UsvController::SmcAdhoc,
            &mut s,
        );
        assert_eq!(status, UsvStatus::InvalidArgument);

        assert_eq!(
            usv_scenario_from_toml(cstr("dt = -1").as_ptr(), &mut s),
            UsvStatus::Config
        );
        assert_eq!(usv_simulate(ptr::null(), &mut ptr::null_mut()), UsvStatus::NullPointer);

        let s = scenario("ellipse", "P2", UsvController::SmcAdhoc);
        assert_eq!(usv_scenario_set_dt(s, -1.0), UsvStatus::InvalidArgument);
        assert_eq!(usv_scenario_set_dt(s, f64::NAN), UsvStatus::InvalidArgument);
        assert_eq!(usv_scenario_set_horizon(s, -1.0), UsvStatus::InvalidArgument);
        assert!(last_error().contains("horizon"));
        usv_scenario_free(s);

        usv_scenario_free(ptr::null_mut());
        usv_log_free(ptr::null_mut());
        usv_string_free(ptr::null_mut());
        assert_eq!(usv_log_rows(ptr::null()), 0);
    }
}

#[test]
fn integration_failure_and_io_failure() {
    let s = scenario("eight", "C1", UsvController::BacksteppingSat);
    unsafe {
        assert_eq!(usv_scenario_set_horizon(s, 1.0), UsvStatus::Ok);
        let mut log = ptr::null_mut();
        assert_eq!(usv_simulate(s, &mut log), UsvStatus::Integration);
        assert!(log.is_null());
        assert!(last_error().contains("gate"));

        assert_eq!(usv_scenario_set_controller(s, UsvController::SmcAdhoc), UsvStatus::Ok);
        assert_eq!(usv_simulate(s, &mut log), UsvStatus::Ok);
        let dir = tempfile::tempdir().unwrap();
        let good = cstr(dir.path().join("log.csv").to_str().unwrap());
        assert_eq!(usv_log_write_csv(log, good.as_ptr()), UsvStatus::Ok);
        let text = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
        assert!(text.starts_with("t,x,y,psi,"));
        assert_eq!(text.lines().count(), 1002);

        let bad = cstr(dir.path().join("missing").join("log.csv").to_str().unwrap());
        assert_eq!(usv_log_write_csv(log, bad.as_ptr()), UsvStatus::Io);
        usv_log_free(log);
        usv_scenario_free(s);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut s = ptr::null_mut();
        usv_scenario_preset(ptr::null(), ptr::null(), UsvController::SmcAdhoc, &mut s);
    }
    let other = std::thread::spawn(|| usv_last_error().is_null()).join().unwrap();
    assert!(other);
    assert_eq!(last_error(), "path is NULL");
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(usv_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
