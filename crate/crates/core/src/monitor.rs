//! Post-run invariant checks over a simulation log.
//!
//! Every check reports a status, the worst observed value and the limit it
//! is compared against. Checks that have nothing to evaluate (for instance a
//! decay fit without a sliding window) are reported as skipped.

use serde::{Deserialize, Serialize};

use crate::angle::wrap_pi;
use crate::backstepping::stabilizing_alpha;
use crate::engagement::{lateral_acceleration, EngagementState};
use crate::error::ConfigError;
use crate::saturation::SaturationBounds;
use crate::scenario::{ControllerKind, ScenarioConfig};
use crate::sim::{settling_time, LogRow, SimLog, Summary, ALIGN_THRESHOLD, REACH_THRESHOLD};
use crate::smc::{determinant_residual, surface_dynamics, SurfaceState};
use crate::vessel::{ControlInput, VesselModel};

/// Tolerance on |det G − g_u g_v cos θ_U / V_U|.
pub const DETERMINANT_TOL: f64 = 1e-12;
/// Per-step Lyapunov slack, multiplied by dt.
pub const LYAPUNOV_SLACK: f64 = 1e-6;
/// Backstepping steps excluded from the Lyapunov check while α̇ has no history.
pub const LYAPUNOV_WARMUP_STEPS: usize = 2;
/// Both surfaces must be below this before the range decay fit starts.
pub const SLIDING_THRESHOLD: f64 = 1e-3;
/// Relative tolerance on the fitted decay rate.
pub const DECAY_RATE_TOL: f64 = 0.05;
/// The fit stops once R has fallen by this factor.
pub const DECAY_SPAN: f64 = 0.05;
/// Minimum number of samples for a decay fit.
pub const DECAY_MIN_SAMPLES: usize = 20;
/// Tolerance on |Δγ_U/dt − a_U/V_U|.
pub const LATERAL_ACCELERATION_TOL: f64 = 1e-3;
/// Steps with V_U below this (m/s) at either end are left out of the
/// course-rate check, where γ̇_U = a_U / V_U is singular.
pub const MIN_SPEED: f64 = 1e-2;
/// Tolerance on the tail mean of |V_U − V_T|.
pub const SPEED_TRACKING_TOL: f64 = 0.02;
/// Tolerance on the final |S_θ| and |S_R|.
pub const FINAL_SURFACE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub limit: f64,
    /// Number of samples or steps that entered the check.
    pub samples: usize,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, worst: f64, limit: f64, samples: usize, detail: String) -> Self {
        Self {
            name: name.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
            worst,
            limit,
            samples,
            detail,
        }
    }

    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Skipped,
            worst: f64::NAN,
            limit: f64::NAN,
            samples: 0,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub checks: Vec<Check>,
}

impl MonitorReport {
    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Runs every enabled check. Fails only when the configuration itself is
/// unusable.
pub fn monitor_suite(log: &SimLog, cfg: &ScenarioConfig) -> Result<MonitorReport, ConfigError> {
    let spec = cfg.validate()?;
    let model = VesselModel::new(cfg.vessel)?;
    let rows = &log.rows;
    let on = &cfg.monitors;
    let mut checks = Vec::new();
    if rows.is_empty() {
        checks.push(Check::skipped("log", "empty log"));
        return Ok(MonitorReport { checks });
    }
    let surfs = match replay_surfaces(rows, cfg, &spec, &model) {
        Ok(s) => s,
        Err(msg) => {
            checks.push(Check::new("replay", false, f64::INFINITY, 0.0, 0, msg));
            return Ok(MonitorReport { checks });
        }
    };
    if on.determinant {
        checks.push(determinant_check(rows, &surfs, &model));
    }
    if on.lyapunov {
        checks.push(lyapunov_check(rows, cfg, log.controller, &surfs));
    }
    if on.range_decay {
        checks.push(match log.controller {
            ControllerKind::SmcAdhoc => range_decay_check(rows, cfg),
            ControllerKind::BacksteppingSat => Check::skipped(
                "range_decay",
                "surfaces converge asymptotically; no finite-time sliding phase",
            ),
        });
    }
    if on.bounds {
        checks.push(bounds_check(rows, cfg, log.controller));
    }
    if on.lateral_acceleration {
        checks.push(lateral_acceleration_check(rows, cfg, &model, log.controller));
    }
    let summary = Summary::from_log(log, cfg);
    if on.ordering {
        checks.push(ordering_check(rows, &summary));
    }
    if on.speed_tracking {
        checks.push(Check::new(
            "speed_tracking",
            summary.tail_mean_speed_error < SPEED_TRACKING_TOL,
            summary.tail_mean_speed_error,
            SPEED_TRACKING_TOL,
            rows.len(),
            "mean |V_U - V_T| over the final 20% of the run".into(),
        ));
    }
    if on.final_surfaces {
        let worst = summary.final_surfaces[0].abs().max(summary.final_surfaces[1].abs());
        checks.push(Check::new(
            "final_surfaces",
            worst < FINAL_SURFACE_TOL,
            worst,
            FINAL_SURFACE_TOL,
            1,
            format!(
                "S_theta = {:.3e}, S_R = {:.3e}",
                summary.final_surfaces[0], summary.final_surfaces[1]
            ),
        ));
    }
    Ok(MonitorReport { checks })
}

/// Surface state F, G at every logged sample.
fn replay_surfaces(
    rows: &[LogRow],
    cfg: &ScenarioConfig,
    spec: &crate::path::PathSpec,
    model: &VesselModel,
) -> Result<Vec<SurfaceState>, String> {
    rows.iter()
        .map(|row| {
            let vessel = row.vessel();
            let target = spec.target_state(row.t).map_err(|e| format!("t = {}: {e}", row.t))?;
            let eng = EngagementState::with_capture(&vessel, &target, cfg.capture_radius)
                .map_err(|e| format!("t = {}: {e}", row.t))?;
            Ok(surface_dynamics(model, &vessel, &target, &eng, cfg.smc.k_r))
        })
        .collect()
}

fn determinant_check(rows: &[LogRow], surfs: &[SurfaceState], model: &VesselModel) -> Check {
    let worst = rows
        .iter()
        .zip(surfs)
        .map(|(row, surf)| determinant_residual(model, surf, row.speed()).abs())
        .fold(0.0, f64::max);
    Check::new(
        "determinant",
        worst < DETERMINANT_TOL,
        worst,
        DETERMINANT_TOL,
        rows.len(),
        "max |det G - g_u g_v cos(theta_U) / V_U|".into(),
    )
}

/// Steps over which the Lyapunov function is expected to decrease, paired
/// with the increase observed on each.
pub fn lyapunov_increments(rows: &[LogRow], cfg: &ScenarioConfig, controller: ControllerKind) -> Vec<(usize, f64)> {
    let band = [2.0 * cfg.smc.m_theta * cfg.dt, 2.0 * cfg.smc.m_r * cfg.dt];
    let mut out = Vec::new();
    for (k, pair) in rows.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        // the engagement changes form across the capture boundary
        if (a.range < cfg.capture_radius) != (b.range < cfg.capture_radius) {
            continue;
        }
        if a.held() || b.held() {
            continue;
        }
        // θ_U wrapped across ±π
        if (b.theta_u - a.theta_u).abs() > std::f64::consts::PI {
            continue;
        }
        match controller {
            ControllerKind::SmcAdhoc => {
                // the sliding-mode reaching law only guarantees decrease
                // outside the discrete switching band and without clipping
                if a.clamped() || a.s_theta.abs() <= band[0] || a.s_range.abs() <= band[1] {
                    continue;
                }
            }
            ControllerKind::BacksteppingSat => {
                if k < LYAPUNOV_WARMUP_STEPS {
                    continue;
                }
            }
        }
        out.push((k, b.v_lyap - a.v_lyap));
    }
    out
}

fn lyapunov_check(rows: &[LogRow], cfg: &ScenarioConfig, controller: ControllerKind, surfs: &[SurfaceState]) -> Check {
    let incs = lyapunov_increments(rows, cfg, controller);
    let limit = LYAPUNOV_SLACK * cfg.dt;
    let name = "lyapunov";
    if incs.is_empty() {
        return Check::skipped(name, "no step qualifies");
    }
    let (k_worst, worst) = incs.iter().copied().fold(
        (0, f64::NEG_INFINITY),
        |acc, (k, d)| if d > acc.1 { (k, d) } else { acc },
    );
    let violations = incs.iter().filter(|(_, d)| *d > limit).count();
    let mut detail = format!(
        "{violations} increasing steps; largest increase at t = {}",
        rows[k_worst].t
    );
    match controller {
        ControllerKind::SmcAdhoc => detail.insert_str(0, "W: "),
        ControllerKind::BacksteppingSat => {
            let b = &cfg.saturation;
            let outside = incs
                .iter()
                .filter(|(k, d)| *d > limit && alpha_outside_bounds(&surfs[*k], cfg, b))
                .count();
            detail = format!("V2: {detail}; {outside} of them with the stabilising input outside the actuator bounds");
        }
    }
    Check::new(name, violations == 0, worst, limit, incs.len(), detail)
}

fn alpha_outside_bounds(surf: &SurfaceState, cfg: &ScenarioConfig, b: &SaturationBounds) -> bool {
    match stabilizing_alpha(surf, &cfg.backstepping) {
        Ok(a) => !(b.contains(0, a[0]) && b.contains(1, a[1])),
        Err(_) => true,
    }
}

/// Rows of the sliding window used for the range decay fit.
pub fn decay_window(rows: &[LogRow]) -> Option<std::ops::Range<usize>> {
    let start = rows
        .iter()
        .position(|r| r.s_theta.abs() < SLIDING_THRESHOLD && r.s_range.abs() < SLIDING_THRESHOLD)?;
    let floor = rows[start].range * DECAY_SPAN;
    let len = rows[start..].iter().take_while(|r| r.range > floor).count();
    (len >= DECAY_MIN_SAMPLES).then_some(start..start + len)
}

/// Least-squares slope of ln R against t, negated.
pub fn fitted_decay_rate(rows: &[LogRow]) -> f64 {
    let n = rows.len() as f64;
    let mt = rows.iter().map(|r| r.t).sum::<f64>() / n;
    let ml = rows.iter().map(|r| r.range.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for r in rows {
        let dt = r.t - mt;
        sxy += dt * (r.range.ln() - ml);
        sxx += dt * dt;
    }
    -sxy / sxx
}

fn range_decay_check(rows: &[LogRow], cfg: &ScenarioConfig) -> Check {
    let name = "range_decay";
    let Some(w) = decay_window(rows) else {
        return Check::skipped(name, "no sliding window with enough samples");
    };
    let rate = fitted_decay_rate(&rows[w.clone()]);
    let k_r = cfg.smc.k_r;
    let rel = ((rate - k_r) / k_r).abs();
    Check::new(
        name,
        rel < DECAY_RATE_TOL,
        rel,
        DECAY_RATE_TOL,
        w.len(),
        format!(
            "fitted rate {rate:.4} 1/s against k_R = {k_r} over t in [{}, {}]",
            rows[w.start].t,
            rows[w.end - 1].t
        ),
    )
}

fn bounds_check(rows: &[LogRow], cfg: &ScenarioConfig, controller: ControllerKind) -> Check {
    let b = &cfg.saturation;
    let name = "bounds";
    let (violations, detail) = match controller {
        ControllerKind::BacksteppingSat => (
            rows.iter()
                .filter(|r| !(b.contains(0, r.tau_u) && b.contains(1, r.tau_r)))
                .count(),
            "steps with tau outside the open bounds",
        ),
        ControllerKind::SmcAdhoc if cfg.smc_clip => (
            rows.iter()
                .filter(|r| {
                    !(b.lower[0] <= r.tau_u && r.tau_u <= b.upper[0] && b.lower[1] <= r.tau_r && r.tau_r <= b.upper[1])
                })
                .count(),
            "steps with clipped tau outside the closed bounds",
        ),
        ControllerKind::SmcAdhoc => return Check::skipped(name, "unbounded controller"),
    };
    Check::new(name, violations == 0, violations as f64, 0.0, rows.len(), detail.into())
}

/// |Δγ_U/dt − mean of a_U/V_U at both ends| per step; `None` where the
/// speed is below [`MIN_SPEED`].
pub fn lateral_acceleration_residuals(
    rows: &[LogRow],
    model: &VesselModel,
    controller: ControllerKind,
    dt: f64,
) -> Vec<Option<f64>> {
    let turn_rate = |row: &LogRow, tau: ControlInput| {
        let v = row.vessel();
        lateral_acceleration(model, &v, tau).map(|a| a / v.speed())
    };
    rows.windows(2)
        .map(|pair| {
            let (a, b) = (&pair[0], &pair[1]);
            if a.speed() < MIN_SPEED || b.speed() < MIN_SPEED {
                return None;
            }
            let tau_b = match controller {
                // zero-order hold across the step
                ControllerKind::SmcAdhoc => a.applied(),
                ControllerKind::BacksteppingSat => b.applied(),
            };
            let fd = wrap_pi(b.vessel().course() - a.vessel().course()) / dt;
            match (turn_rate(a, a.applied()), turn_rate(b, tau_b)) {
                (Ok(ra), Ok(rb)) => Some((fd - 0.5 * (ra + rb)).abs()),
                _ => None,
            }
        })
        .collect()
}

fn lateral_acceleration_check(
    rows: &[LogRow],
    cfg: &ScenarioConfig,
    model: &VesselModel,
    controller: ControllerKind,
) -> Check {
    let all = lateral_acceleration_residuals(rows, model, controller, cfg.dt);
    let slow = all.iter().filter(|r| r.is_none()).count();
    let res: Vec<(usize, f64)> = all.iter().enumerate().filter_map(|(k, r)| r.map(|r| (k, r))).collect();
    if res.is_empty() {
        return Check::skipped("lateral_acceleration", "no step with enough speed");
    }
    let (k, worst) = res
        .iter()
        .copied()
        .fold((0, 0.0), |acc, (k, r)| if r > acc.1 { (k, r) } else { acc });
    let over = res.iter().filter(|(_, r)| *r >= LATERAL_ACCELERATION_TOL).count();
    Check::new(
        "lateral_acceleration",
        over == 0,
        worst,
        LATERAL_ACCELERATION_TOL,
        res.len(),
        format!(
            "max |finite-difference course rate - a_U / V_U| at t = {}; {over} steps over the limit; {slow} steps below {MIN_SPEED} m/s skipped",
            rows[k].t
        ),
    )
}

fn ordering_check(rows: &[LogRow], summary: &Summary) -> Check {
    let name = "ordering";
    match (summary.t_align, summary.t_reach) {
        (Some(a), Some(r)) => Check::new(
            name,
            a < r,
            a - r,
            0.0,
            rows.len(),
            format!("|theta_U| < {ALIGN_THRESHOLD} from t = {a}; R < {REACH_THRESHOLD} from t = {r}"),
        ),
        (a, r) => Check::new(
            name,
            false,
            f64::INFINITY,
            0.0,
            rows.len(),
            format!("alignment settles at {a:?}, reach settles at {r:?}"),
        ),
    }
}

/// Σ|τ_{k+1} − τ_k| per channel divided by the elapsed time, over rows with
/// t ≤ `until`.
pub fn total_variation_rate(rows: &[LogRow], until: f64) -> [f64; 2] {
    let window: Vec<&LogRow> = rows.iter().take_while(|r| r.t <= until).collect();
    if window.len() < 2 {
        return [0.0; 2];
    }
    let mut tv = [0.0; 2];
    for pair in window.windows(2) {
        tv[0] += (pair[1].tau_u - pair[0].tau_u).abs();
        tv[1] += (pair[1].tau_r - pair[0].tau_r).abs();
    }
    let span = window[window.len() - 1].t - window[0].t;
    [tv[0] / span, tv[1] / span]
}

/// End of the transient: the time from which R stays below the reach
/// threshold, or the end of the log.
pub fn transient_end(rows: &[LogRow]) -> f64 {
    settling_time(rows, |r| r.range < REACH_THRESHOLD)
        .or_else(|| rows.last().map(|r| r.t))
        .unwrap_or(0.0)
}
