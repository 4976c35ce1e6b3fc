//! C ABI for the usv-igc simulator.
//!
//! Scenarios and logs are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns a [`UsvStatus`];
//! on failure the message is available from [`usv_last_error`] on the same
//! thread. Strings returned through `char **` are released with
//! [`usv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use usv_igc::logio::write_log_file;
use usv_igc::{monitor_suite, preset, simulate, ControllerKind, ScenarioConfig, SimError, SimLog, COLUMNS};

/// Result of an API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsvStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument was out of range or not valid UTF-8.
    InvalidArgument = 2,
    /// The scenario is invalid or could not be parsed.
    Config = 3,
    /// The simulation stopped before the horizon.
    Integration = 4,
    /// A file could not be written.
    Io = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Controller selection.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsvController {
    /// Sliding-mode law on the raw demand.
    SmcAdhoc = 0,
    /// Backstepping law through the smooth saturation model.
    BacksteppingSat = 1,
}

impl From<UsvController> for ControllerKind {
    fn from(c: UsvController) -> Self {
        match c {
            UsvController::SmcAdhoc => ControllerKind::SmcAdhoc,
            UsvController::BacksteppingSat => ControllerKind::BacksteppingSat,
        }
    }
}

impl From<ControllerKind> for UsvController {
    fn from(c: ControllerKind) -> Self {
        match c {
            ControllerKind::SmcAdhoc => UsvController::SmcAdhoc,
            ControllerKind::BacksteppingSat => UsvController::BacksteppingSat,
        }
    }
}

/// Opaque scenario configuration.
pub struct UsvScenario {
    cfg: ScenarioConfig,
}

/// Opaque simulation log.
pub struct UsvLog {
    log: SimLog,
}

struct Failure {
    status: UsvStatus,
    message: String,
}

impl Failure {
    fn new(status: UsvStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let status = match e {
            SimError::Config(_) => UsvStatus::Config,
            _ => UsvStatus::Integration,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> UsvStatus {
    let failure = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => return UsvStatus::Ok,
        Ok(Err(f)) => f,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            Failure::new(UsvStatus::Panic, format!("panic: {msg}"))
        }
    };
    set_last_error(&failure.message);
    failure.status
}

fn null(name: &str) -> Failure {
    Failure::new(UsvStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(UsvStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(UsvStatus::InvalidArgument, "string contains a NUL byte"))
}

fn config_failure(e: impl std::fmt::Display) -> Failure {
    Failure::new(UsvStatus::Config, e.to_string())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn usv_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn usv_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).expect("no NUL"))
        .as_ptr()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn usv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a preset scenario from a path name ("ellipse", "eight") and a start
/// name ("P1", "P2", "P3", or "C1" on the eight).
///
/// # Safety
/// `path` and `start` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_preset(
    path: *const c_char,
    start: *const c_char,
    controller: UsvController,
    out: *mut *mut UsvScenario,
) -> UsvStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = ptr::null_mut();
        let cfg = preset(text(path, "path")?, text(start, "start")?, controller.into()).map_err(config_failure)?;
        *out = Box::into_raw(Box::new(UsvScenario { cfg }));
        Ok(())
    })
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_from_toml(toml: *const c_char, out: *mut *mut UsvScenario) -> UsvStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = ptr::null_mut();
        let cfg = ScenarioConfig::from_toml_str(text(toml, "toml")?).map_err(config_failure)?;
        cfg.validate().map_err(config_failure)?;
        *out = Box::into_raw(Box::new(UsvScenario { cfg }));
        Ok(())
    })
}

/// Serializes a scenario to TOML; release the result with `usv_string_free`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_to_toml(scenario: *const UsvScenario, out: *mut *mut c_char) -> UsvStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = ptr::null_mut();
        *out = owned_string(borrow(scenario, "scenario")?.cfg.to_toml_string())?;
        Ok(())
    })
}

/// Sets the integration step in seconds; must be positive and finite.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_set_dt(scenario: *mut UsvScenario, dt: f64) -> UsvStatus {
    guard(|| {
        let s = borrow_mut(scenario, "scenario")?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Failure::new(
                UsvStatus::InvalidArgument,
                format!("dt must be positive, got {dt}"),
            ));
        }
        s.cfg.dt = dt;
        Ok(())
    })
}

/// Sets the simulated time in seconds; must be non-negative and finite.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_set_horizon(scenario: *mut UsvScenario, horizon: f64) -> UsvStatus {
    guard(|| {
        let s = borrow_mut(scenario, "scenario")?;
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Failure::new(
                UsvStatus::InvalidArgument,
                format!("horizon must be non-negative, got {horizon}"),
            ));
        }
        s.cfg.horizon = horizon;
        Ok(())
    })
}

/// Selects the controller.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_set_controller(
    scenario: *mut UsvScenario,
    controller: UsvController,
) -> UsvStatus {
    guard(|| {
        borrow_mut(scenario, "scenario")?.cfg.controller = controller.into();
        Ok(())
    })
}

/// Reads the integration step, horizon and controller; any output pointer
/// may be NULL.
///
/// # Safety
/// `scenario` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_get(
    scenario: *const UsvScenario,
    dt: *mut f64,
    horizon: *mut f64,
    controller: *mut UsvController,
) -> UsvStatus {
    guard(|| {
        let cfg = &borrow(scenario, "scenario")?.cfg;
        if let Some(p) = dt.as_mut() {
            *p = cfg.dt;
        }
        if let Some(p) = horizon.as_mut() {
            *p = cfg.horizon;
        }
        if let Some(p) = controller.as_mut() {
            *p = cfg.controller.into();
        }
        Ok(())
    })
}

/// Releases a scenario. NULL is ignored.
///
/// # Safety
/// `scenario` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn usv_scenario_free(scenario: *mut UsvScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the closed loop over the scenario horizon.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn usv_simulate(scenario: *const UsvScenario, out: *mut *mut UsvLog) -> UsvStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = ptr::null_mut();
        let log = simulate(&borrow(scenario, "scenario")?.cfg)?;
        *out = Box::into_raw(Box::new(UsvLog { log }));
        Ok(())
    })
}

/// Number of logged rows; 0 for NULL.
///
/// # Safety
/// `log` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn usv_log_rows(log: *const UsvLog) -> usize {
    log.as_ref().map_or(0, |l| l.log.len())
}

/// Number of columns in every row.
#[no_mangle]
pub extern "C" fn usv_log_columns() -> usize {
    COLUMNS.len()
}

/// Static name of a column, or NULL when out of range.
#[no_mangle]
pub extern "C" fn usv_log_column_name(column: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    NAMES
        .get_or_init(|| COLUMNS.iter().map(|c| CString::new(*c).expect("no NUL")).collect())
        .get(column)
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Copies one row into `values`, which must hold `usv_log_columns()` doubles.
///
/// # Safety
/// `log` must be a live handle; `values` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn usv_log_row(log: *const UsvLog, row: usize, values: *mut f64, len: usize) -> UsvStatus {
    guard(|| {
        let log = &borrow(log, "log")?.log;
        if values.is_null() {
            return Err(null("values"));
        }
        if len < COLUMNS.len() {
            return Err(Failure::new(
                UsvStatus::InvalidArgument,
                format!("buffer holds {len} values, a row has {}", COLUMNS.len()),
            ));
        }
        let r = log.rows.get(row).ok_or_else(|| {
            Failure::new(
                UsvStatus::InvalidArgument,
                format!("row {row} out of range ({} rows)", log.len()),
            )
        })?;
        std::slice::from_raw_parts_mut(values, COLUMNS.len()).copy_from_slice(&r.to_array());
        Ok(())
    })
}

/// Writes the log as CSV with the standard header.
///
/// # Safety
/// `log` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn usv_log_write_csv(log: *const UsvLog, path: *const c_char) -> UsvStatus {
    guard(|| {
        let log = &borrow(log, "log")?.log;
        write_log_file(Path::new(text(path, "path")?), &log.rows)
            .map_err(|e| Failure::new(UsvStatus::Io, e.to_string()))
    })
}

/// Releases a log. NULL is ignored.
///
/// # Safety
/// `log` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn usv_log_free(log: *mut UsvLog) {
    if !log.is_null() {
        drop(Box::from_raw(log));
    }
}

/// Runs the monitor suite on a log produced from `scenario`. Stores whether
/// every check passed in `passed` and, when `report` is not NULL, the report
/// as JSON (release with `usv_string_free`).
///
/// # Safety
/// `scenario` and `log` must be live handles; `passed` must be writable;
/// `report` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn usv_monitor(
    scenario: *const UsvScenario,
    log: *const UsvLog,
    passed: *mut c_int,
    report: *mut *mut c_char,
) -> UsvStatus {
    guard(|| {
        let cfg = &borrow(scenario, "scenario")?.cfg;
        let log = &borrow(log, "log")?.log;
        let passed = borrow_mut(passed, "passed")?;
        if let Some(r) = report.as_mut() {
            *r = ptr::null_mut();
        }
        let rep = monitor_suite(log, cfg).map_err(config_failure)?;
        *passed = c_int::from(rep.passed());
        if let Some(r) = report.as_mut() {
            *r = owned_string(serde_json::to_string(&rep).expect("report serializes"))?;
        }
        Ok(())
    })
}
