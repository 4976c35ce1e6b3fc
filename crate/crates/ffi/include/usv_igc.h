#ifndef USV_IGC_H
#define USV_IGC_H

/* Generated by cbindgen from the usv-igc-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of an API call.
typedef enum UsvStatus {
  USV_STATUS_OK = 0,
  // A required pointer argument was NULL.
  USV_STATUS_NULL_POINTER = 1,
  // An argument was out of range or not valid UTF-8.
  USV_STATUS_INVALID_ARGUMENT = 2,
  // The scenario is invalid or could not be parsed.
  USV_STATUS_CONFIG = 3,
  // The simulation stopped before the horizon.
  USV_STATUS_INTEGRATION = 4,
  // A file could not be written.
  USV_STATUS_IO = 5,
  // An internal panic was caught at the boundary.
  USV_STATUS_PANIC = 6,
} UsvStatus;

// Controller selection.
typedef enum UsvController {
  // Sliding-mode law on the raw demand.
  USV_CONTROLLER_SMC_ADHOC = 0,
  // Backstepping law through the smooth saturation model.
  USV_CONTROLLER_BACKSTEPPING_SAT = 1,
} UsvController;

// Opaque simulation log.
typedef struct UsvLog UsvLog;

// Opaque scenario configuration.
typedef struct UsvScenario UsvScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *usv_last_error(void);

// Library version as a static NUL-terminated string.
const char *usv_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void usv_string_free(char *s);

// Builds a preset scenario from a path name ("ellipse", "eight") and a start
// name ("P1", "P2", "P3", or "C1" on the eight).
//
// # Safety
// `path` and `start` must be NUL-terminated strings; `out` must be writable.
enum UsvStatus usv_scenario_preset(const char *path,
                                   const char *start,
                                   enum UsvController controller,
                                   struct UsvScenario **out);

// Parses a scenario from TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum UsvStatus usv_scenario_from_toml(const char *toml, struct UsvScenario **out);

// Serializes a scenario to TOML; release the result with `usv_string_free`.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum UsvStatus usv_scenario_to_toml(const struct UsvScenario *scenario, char **out);

// Sets the integration step in seconds; must be positive and finite.
//
// # Safety
// `scenario` must be a live handle.
enum UsvStatus usv_scenario_set_dt(struct UsvScenario *scenario, double dt);

// Sets the simulated time in seconds; must be non-negative and finite.
//
// # Safety
// `scenario` must be a live handle.
enum UsvStatus usv_scenario_set_horizon(struct UsvScenario *scenario, double horizon);

// Selects the controller.
//
// # Safety
// `scenario` must be a live handle.
enum UsvStatus usv_scenario_set_controller(struct UsvScenario *scenario,
                                           enum UsvController controller);

// Reads the integration step, horizon and controller; any output pointer
// may be NULL.
//
// # Safety
// `scenario` must be a live handle; non-NULL outputs must be writable.
enum UsvStatus usv_scenario_get(const struct UsvScenario *scenario,
                                double *dt,
                                double *horizon,
                                enum UsvController *controller);

// Releases a scenario. NULL is ignored.
//
// # Safety
// `scenario` must be NULL or a live handle, not used afterwards.
void usv_scenario_free(struct UsvScenario *scenario);

// Runs the closed loop over the scenario horizon.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum UsvStatus usv_simulate(const struct UsvScenario *scenario, struct UsvLog **out);

// Number of logged rows; 0 for NULL.
//
// # Safety
// `log` must be NULL or a live handle.
size_t usv_log_rows(const struct UsvLog *log);

// Number of columns in every row.
size_t usv_log_columns(void);

// Static name of a column, or NULL when out of range.
const char *usv_log_column_name(size_t column);

// Copies one row into `values`, which must hold `usv_log_columns()` doubles.
//
// # Safety
// `log` must be a live handle; `values` must point to `len` writable doubles.
enum UsvStatus usv_log_row(const struct UsvLog *log, size_t row, double *values, size_t len);

// Writes the log as CSV with the standard header.
//
// # Safety
// `log` must be a live handle; `path` must be a NUL-terminated string.
enum UsvStatus usv_log_write_csv(const struct UsvLog *log, const char *path);

// Releases a log. NULL is ignored.
//
// # Safety
// `log` must be NULL or a live handle, not used afterwards.
void usv_log_free(struct UsvLog *log);

// Runs the monitor suite on a log produced from `scenario`. Stores whether
// every check passed in `passed` and, when `report` is not NULL, the report
// as JSON (release with `usv_string_free`).
//
// # Safety
// `scenario` and `log` must be live handles; `passed` must be writable;
// `report` must be NULL or writable.
enum UsvStatus usv_monitor(const struct UsvScenario *scenario,
                           const struct UsvLog *log,
                           int *passed,
                           char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* USV_IGC_H */
