//! Closed-loop integration and the per-step log.

use nalgebra::{SVector, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::angle::wrap_pi;
use crate::backstepping::BacksteppingController;
use crate::engagement::EngagementState;
use crate::error::SimError;
use crate::path::PathSpec;
use crate::saturation::{gate, zeta_dot, ActuatorState, SaturationBounds};
use crate::scenario::{ControllerKind, ScenarioConfig};
use crate::smc::{surface_dynamics, SmcController, SurfaceState, SINGULAR_GUARD};
use crate::vessel::{ControlInput, VesselModel, VesselState};

/// Log column names, in file order.
pub const COLUMNS: [&str; 24] = [
    "t", "x", "y", "psi", "u", "v", "r", "xT", "yT", "VT", "R", "theta", "thetaU", "S_theta", "S_R", "V_lyap",
    "tauc_u", "tauc_r", "tau_u", "tau_r", "zeta_u", "zeta_r", "gate_u", "gate_r",
];

/// Integrated state: pose, body velocity, actuator outputs.
pub type PlantState = SVector<f64, 8>;

/// The derivative evaluated to a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonFiniteStage;

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<const N: usize>(
    f: impl Fn(f64, &SVector<f64, N>) -> SVector<f64, N>,
    t: f64,
    x: &SVector<f64, N>,
    dt: f64,
) -> Result<SVector<f64, N>, NonFiniteStage> {
    let check = |k: SVector<f64, N>| {
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(NonFiniteStage)
        }
    };
    let k1 = check(f(t, x))?;
    let k2 = check(f(t + 0.5 * dt, &(x + k1 * (0.5 * dt))))?;
    let k3 = check(f(t + 0.5 * dt, &(x + k2 * (0.5 * dt))))?;
    let k4 = check(f(t + dt, &(x + k3 * dt)))?;
    check(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

/// Input held over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    /// τ applied directly.
    Direct(ControlInput),
    /// τ_c fed to the saturation model; τ is the actuator state.
    Saturated {
        command: Vector2<f64>,
        bounds: SaturationBounds,
    },
}

pub fn vessel_of(x: &PlantState) -> VesselState {
    VesselState {
        eta: Vector3::new(x[0], x[1], x[2]),
        nu: Vector3::new(x[3], x[4], x[5]),
    }
}

/// Time derivative of the plant under a held drive.
pub fn plant_derivative(model: &VesselModel, x: &PlantState, drive: &Drive) -> PlantState {
    let vessel = vessel_of(x);
    let (tau, zdot) = match drive {
        Drive::Direct(tau) => (*tau, Vector2::zeros()),
        Drive::Saturated { command, bounds } => {
            let zeta = Vector2::new(x[6], x[7]);
            (ControlInput::new(zeta[0], zeta[1]), zeta_dot(&zeta, command, bounds))
        }
    };
    let (eta_dot, nu_dot) = model.state_dot(&vessel, tau);
    PlantState::from_column_slice(&[
        eta_dot[0], eta_dot[1], eta_dot[2], nu_dot[0], nu_dot[1], nu_dot[2], zdot[0], zdot[1],
    ])
}

/// One logged sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LogRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    #[serde(rename = "xT")]
    pub x_t: f64,
    #[serde(rename = "yT")]
    pub y_t: f64,
    #[serde(rename = "VT")]
    pub v_t: f64,
    #[serde(rename = "R")]
    pub range: f64,
    pub theta: f64,
    #[serde(rename = "thetaU")]
    pub theta_u: f64,
    #[serde(rename = "S_theta")]
    pub s_theta: f64,
    #[serde(rename = "S_R")]
    pub s_range: f64,
    /// ½SᵀS for the sliding-mode law, ½SᵀS + ½zᵀz for backstepping.
    #[serde(rename = "V_lyap")]
    pub v_lyap: f64,
    pub tauc_u: f64,
    pub tauc_r: f64,
    pub tau_u: f64,
    pub tau_r: f64,
    pub zeta_u: f64,
    pub zeta_r: f64,
    pub gate_u: f64,
    pub gate_r: f64,
}

impl LogRow {
    pub fn to_array(&self) -> [f64; 24] {
        [
            self.t,
            self.x,
            self.y,
            self.psi,
            self.u,
            self.v,
            self.r,
            self.x_t,
            self.y_t,
            self.v_t,
            self.range,
            self.theta,
            self.theta_u,
            self.s_theta,
            self.s_range,
            self.v_lyap,
            self.tauc_u,
            self.tauc_r,
            self.tau_u,
            self.tau_r,
            self.zeta_u,
            self.zeta_r,
            self.gate_u,
            self.gate_r,
        ]
    }

    pub fn from_array(a: &[f64; 24]) -> Self {
        Self {
            t: a[0],
            x: a[1],
            y: a[2],
            psi: a[3],
            u: a[4],
            v: a[5],
            r: a[6],
            x_t: a[7],
            y_t: a[8],
            v_t: a[9],
            range: a[10],
            theta: a[11],
            theta_u: a[12],
            s_theta: a[13],
            s_range: a[14],
            v_lyap: a[15],
            tauc_u: a[16],
            tauc_r: a[17],
            tau_u: a[18],
            tau_r: a[19],
            zeta_u: a[20],
            zeta_r: a[21],
            gate_u: a[22],
            gate_r: a[23],
        }
    }

    pub fn vessel(&self) -> VesselState {
        VesselState {
            eta: Vector3::new(self.x, self.y, self.psi),
            nu: Vector3::new(self.u, self.v, self.r),
        }
    }

    pub fn applied(&self) -> ControlInput {
        ControlInput::new(self.tau_u, self.tau_r)
    }

    pub fn speed(&self) -> f64 {
        self.u.hypot(self.v)
    }

    /// The controller held its previous output at this sample.
    pub fn held(&self) -> bool {
        self.theta_u.cos().abs() <= SINGULAR_GUARD
    }

    /// The applied input differs from the demand.
    pub fn clamped(&self) -> bool {
        self.tau_u != self.tauc_u || self.tau_r != self.tauc_r
    }
}

/// Full-rate record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub controller: ControllerKind,
    pub rows: Vec<LogRow>,
}

impl SimLog {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&LogRow> {
        self.rows.last()
    }
}

/// Per-step controller bookkeeping.
enum Controller {
    Smc(SmcController),
    Backstep(BacksteppingController),
}

struct StepOutput {
    drive: Drive,
    command: Vector2<f64>,
    applied: Vector2<f64>,
    lyapunov: f64,
}

impl Controller {
    fn for_config(cfg: &ScenarioConfig) -> Self {
        match cfg.controller {
            ControllerKind::SmcAdhoc => Controller::Smc(SmcController::new(
                cfg.smc,
                cfg.switching,
                cfg.smc_clip.then_some(cfg.saturation),
            )),
            ControllerKind::BacksteppingSat => {
                Controller::Backstep(BacksteppingController::new(cfg.backstepping, cfg.saturation))
            }
        }
    }

    fn step(&mut self, surf: &SurfaceState, zeta: Vector2<f64>, t: f64) -> Result<StepOutput, SimError> {
        match self {
            Controller::Smc(c) => {
                let out = c.update(surf);
                let applied = Vector2::new(out.applied.tau_u, out.applied.tau_r);
                Ok(StepOutput {
                    drive: Drive::Direct(out.applied),
                    command: Vector2::new(out.demand.tau_u, out.demand.tau_r),
                    applied,
                    lyapunov: surf.lyapunov(),
                })
            }
            Controller::Backstep(c) => {
                let act = ActuatorState { zeta };
                let out = c
                    .update(surf, &act, t)
                    .map_err(|source| SimError::Control { t, source })?;
                Ok(StepOutput {
                    drive: Drive::Saturated {
                        command: out.command,
                        bounds: c.bounds,
                    },
                    command: out.command,
                    applied: zeta,
                    lyapunov: out.v2,
                })
            }
        }
    }
}

/// Runs a scenario to its horizon, logging every step including t = 0. A
/// zero horizon gives an empty log.
pub fn simulate(cfg: &ScenarioConfig) -> Result<SimLog, SimError> {
    let spec = cfg.validate()?;
    let model = VesselModel::new(cfg.vessel).map_err(|e| SimError::Config(e.into()))?;
    simulate_with(cfg, &spec, &model)
}

/// As [`simulate`] with a prebuilt path and model; the config is assumed valid.
pub fn simulate_with(cfg: &ScenarioConfig, spec: &PathSpec, model: &VesselModel) -> Result<SimLog, SimError> {
    if cfg.horizon == 0.0 {
        return Ok(SimLog {
            controller: cfg.controller,
            rows: Vec::new(),
        });
    }
    let steps = cfg.steps();
    let mut rows = Vec::with_capacity(steps + 1);
    let ic = cfg.initial.state();
    let mut x = PlantState::from_column_slice(&[ic.x(), ic.y(), ic.psi(), ic.u(), ic.v(), ic.r(), 0.0, 0.0]);
    let mut controller = Controller::for_config(cfg);
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let vessel = vessel_of(&x);
        let target = spec.target_state(t).map_err(|source| SimError::Path { t, source })?;
        let eng = EngagementState::with_capture(&vessel, &target, cfg.capture_radius)
            .map_err(|source| SimError::Engagement { t, source })?;
        let surf = surface_dynamics(model, &vessel, &target, &eng, cfg.smc.k_r);
        let zeta = Vector2::new(x[6], x[7]);
        let out = controller.step(&surf, zeta, t)?;
        let g = match cfg.controller {
            ControllerKind::SmcAdhoc => Vector2::new(1.0, 1.0),
            ControllerKind::BacksteppingSat => gate(&zeta, &cfg.saturation),
        };
        rows.push(LogRow {
            t,
            x: x[0],
            y: x[1],
            psi: x[2],
            u: x[3],
            v: x[4],
            r: x[5],
            x_t: target.x,
            y_t: target.y,
            v_t: target.speed,
            range: (target.x - x[0]).hypot(target.y - x[1]),
            theta: eng.los,
            theta_u: eng.lead_vessel,
            s_theta: surf.s_theta,
            s_range: surf.s_range,
            v_lyap: out.lyapunov,
            tauc_u: out.command[0],
            tauc_r: out.command[1],
            tau_u: out.applied[0],
            tau_r: out.applied[1],
            zeta_u: out.applied[0],
            zeta_r: out.applied[1],
            gate_u: g[0],
            gate_r: g[1],
        });
        if k == steps {
            break;
        }
        let drive = out.drive;
        let mut next = rk4_step(|_, s| plant_derivative(model, s, &drive), t, &x, cfg.dt)
            .map_err(|_| SimError::NonFinite { step: k, t })?;
        next[2] = wrap_pi(next[2]);
        x = next;
    }
    Ok(SimLog {
        controller: cfg.controller,
        rows,
    })
}

/// Earliest logged time from which `pred` holds for every remaining row.
pub fn settling_time(rows: &[LogRow], pred: impl Fn(&LogRow) -> bool) -> Option<f64> {
    let mut first = None;
    for row in rows.iter().rev() {
        if pred(row) {
            first = Some(row.t);
        } else {
            break;
        }
    }
    first
}

/// Lead-angle threshold for the alignment time (rad).
pub const ALIGN_THRESHOLD: f64 = 0.01;
/// Range threshold for the reach time (m).
pub const REACH_THRESHOLD: f64 = 0.05;
/// Trailing fraction of the run used for steady-state averages.
pub const TAIL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub controller: ControllerKind,
    pub dt: f64,
    pub horizon: f64,
    pub samples: usize,
    /// Settling time of |θ_U| < 0.01 rad.
    pub t_align: Option<f64>,
    /// Settling time of R < 0.05 m.
    pub t_reach: Option<f64>,
    pub max_abs_tau: [f64; 2],
    pub max_abs_tauc: [f64; 2],
    /// Samples where τ is not strictly inside the actuator bounds.
    pub bound_violations: usize,
    pub tail_mean_range: f64,
    pub tail_mean_speed_error: f64,
    pub min_gate: [f64; 2],
    pub held_samples: usize,
    pub clamped_samples: usize,
    /// Samples inside the capture radius.
    pub captured_samples: usize,
    pub final_position: [f64; 2],
    pub final_surfaces: [f64; 2],
}

impl Summary {
    pub fn from_log(log: &SimLog, cfg: &ScenarioConfig) -> Self {
        let rows = &log.rows;
        let b = &cfg.saturation;
        let tail_start = ((1.0 - TAIL_FRACTION) * rows.len() as f64).floor() as usize;
        let tail = &rows[tail_start.min(rows.len())..];
        let mean = |f: &dyn Fn(&LogRow) -> f64| {
            if tail.is_empty() {
                f64::NAN
            } else {
                tail.iter().map(f).sum::<f64>() / tail.len() as f64
            }
        };
        let max_abs = |f: &dyn Fn(&LogRow) -> f64| rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
        let last = rows.last().copied().unwrap_or_default();
        Self {
            controller: log.controller,
            dt: cfg.dt,
            horizon: cfg.horizon,
            samples: rows.len(),
            t_align: settling_time(rows, |r| r.theta_u.abs() < ALIGN_THRESHOLD),
            t_reach: settling_time(rows, |r| r.range < REACH_THRESHOLD),
            max_abs_tau: [max_abs(&|r| r.tau_u), max_abs(&|r| r.tau_r)],
            max_abs_tauc: [max_abs(&|r| r.tauc_u), max_abs(&|r| r.tauc_r)],
            bound_violations: rows
                .iter()
                .filter(|r| !(b.contains(0, r.tau_u) && b.contains(1, r.tau_r)))
                .count(),
            tail_mean_range: mean(&|r| r.range),
            tail_mean_speed_error: mean(&|r| (r.speed() - r.v_t).abs()),
            min_gate: [
                rows.iter().map(|r| r.gate_u).fold(f64::INFINITY, f64::min),
                rows.iter().map(|r| r.gate_r).fold(f64::INFINITY, f64::min),
            ],
            held_samples: rows.iter().filter(|r| r.held()).count(),
            clamped_samples: rows.iter().filter(|r| r.clamped()).count(),
            captured_samples: rows.iter().filter(|r| r.range < cfg.capture_radius).count(),
            final_position: [last.x, last.y],
            final_surfaces: [last.s_theta, last.s_range],
        }
    }
}
