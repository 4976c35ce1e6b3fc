//! Sliding-mode integrated guidance and control.
//!
//! Two surfaces are driven to zero: S_θ = θ_U aligns the velocity vector with
//! the line of sight and S_R = Ṙ + k_R R closes the range exponentially.
//! Their dynamics are affine in the inputs, Ṡ = F + G τ, so a single matrix
//! inversion yields both thrust and yaw moment.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::engagement::EngagementState;
use crate::error::ControlError;
use crate::path::TargetState;
use crate::saturation::SaturationBounds;
use crate::vessel::{ControlInput, VesselModel, VesselState};

/// Guard band on |cos θ_U| below which G is treated as singular.
pub const SINGULAR_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsUnbounded {
    /// Range surface slope k_R (1/s).
    pub k_r: f64,
    /// Switching gain on S_θ.
    pub m_theta: f64,
    /// Switching gain on S_R.
    pub m_r: f64,
    /// Proportional reaching gain on S_θ.
    pub n_theta: f64,
    /// Proportional reaching gain on S_R.
    pub n_r: f64,
}

impl Default for GainsUnbounded {
    fn default() -> Self {
        Self {
            k_r: 5.0,
            m_theta: 0.3,
            m_r: 0.08,
            n_theta: 0.3,
            n_r: 0.08,
        }
    }
}

impl GainsUnbounded {
    pub fn validate(&self) -> Result<(), ControlError> {
        for (name, value) in [
            ("k_r", self.k_r),
            ("m_theta", self.m_theta),
            ("m_r", self.m_r),
            ("n_theta", self.n_theta),
            ("n_r", self.n_r),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ControlError::InvalidGain { name, value });
            }
        }
        Ok(())
    }
}

/// Discontinuous switching term of the reaching law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Switching {
    /// sgn(s) with sgn(0) = 0.
    #[default]
    Sign,
    /// s / (|s| + width).
    BoundaryLayer { width: f64 },
}

impl Switching {
    pub fn apply(&self, s: f64) -> f64 {
        match *self {
            Switching::Sign => sgn(s),
            Switching::BoundaryLayer { width } => s / (s.abs() + width),
        }
    }
}

/// Sign with sgn(0) = 0.
pub fn sgn(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Surface values and their affine dynamics Ṡ = F + G τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceState {
    pub s_theta: f64,
    pub s_range: f64,
    pub f: Vector2<f64>,
    pub g: Matrix2<f64>,
    /// cos θ_U, kept for the singularity guard.
    pub cos_lead: f64,
}

impl SurfaceState {
    pub fn s(&self) -> Vector2<f64> {
        Vector2::new(self.s_theta, self.s_range)
    }

    pub fn is_singular(&self) -> bool {
        self.cos_lead.abs() <= SINGULAR_GUARD
    }

    /// Ṡ for a given input.
    pub fn rate(&self, tau: ControlInput) -> Vector2<f64> {
        self.f + self.g * Vector2::new(tau.tau_u, tau.tau_r)
    }

    /// W = ½ SᵀS.
    pub fn lyapunov(&self) -> f64 {
        0.5 * self.s().norm_squared()
    }

    pub fn inverse_g(&self) -> Result<Matrix2<f64>, ControlError> {
        if self.is_singular() {
            return Err(ControlError::SingularGain {
                cos_theta_u: self.cos_lead,
            });
        }
        self.g.try_inverse().ok_or(ControlError::SingularGain {
            cos_theta_u: self.cos_lead,
        })
    }
}

/// (S_θ, S_R) = (θ_U, Ṙ + k_R R).
pub fn surfaces(eng: &EngagementState, k_r: f64) -> (f64, f64) {
    (eng.lead_vessel, eng.range_rate + k_r * eng.range)
}

/// F and G of the surface dynamics at the current state.
pub fn surface_dynamics(
    model: &VesselModel,
    vessel: &VesselState,
    target: &TargetState,
    eng: &EngagementState,
    k_r: f64,
) -> SurfaceState {
    let c = model.compact_terms(&vessel.nu);
    let v_u = eng.speed;
    let (sb, cb) = eng.sideslip.sin_cos();
    let (stu, ctu) = eng.lead_vessel.sin_cos();
    let (stt, ctt) = eng.lead_target.sin_cos();
    let r = vessel.r();
    let thdot = eng.los_rate;
    let thdot_t = eng.target_lead_rate(target);

    let f_theta = (-c.f_u * sb + c.f_v * cb) / v_u + r - thdot;
    let g11 = -c.g_u * sb / v_u;
    let g12 = c.g_v * cb / v_u;

    // cβ cθU + sθU sβ and −sβ cθU + cβ sθU
    let along = cb * ctu + stu * sb;
    let across = -sb * ctu + cb * stu;
    let f_r = k_r * eng.range_rate + target.speed_rate * ctt - target.speed * stt * thdot_t - along * c.f_u
        + across * c.f_v
        + r * v_u * stu
        - thdot * v_u * stu;
    let g21 = -along * c.g_u;
    let g22 = across * c.g_v;

    let (s_theta, s_range) = surfaces(eng, k_r);
    SurfaceState {
        s_theta,
        s_range,
        f: Vector2::new(f_theta, f_r),
        g: Matrix2::new(g11, g12, g21, g22),
        cos_lead: ctu,
    }
}

/// det G − g_u g_v cos θ_U / V_U.
pub fn determinant_residual(model: &VesselModel, surf: &SurfaceState, speed: f64) -> f64 {
    let c = model.compact_terms(&nalgebra::Vector3::zeros());
    surf.g.determinant() - c.g_u * c.g_v * surf.cos_lead / speed
}

/// Reaching vector [M̃_θ sw(S_θ) + N_θ S_θ; M̃_R sw(S_R) + N_R S_R].
pub fn reaching_term(surf: &SurfaceState, gains: &GainsUnbounded, switching: Switching) -> Vector2<f64> {
    Vector2::new(
        gains.m_theta * switching.apply(surf.s_theta) + gains.n_theta * surf.s_theta,
        gains.m_r * switching.apply(surf.s_range) + gains.n_r * surf.s_range,
    )
}

/// τ = −G⁻¹F − G⁻¹·reaching.
pub fn control_law(
    surf: &SurfaceState,
    gains: &GainsUnbounded,
    switching: Switching,
) -> Result<ControlInput, ControlError> {
    let ginv = surf.inverse_g()?;
    let tau = -ginv * (surf.f + reaching_term(surf, gains, switching));
    Ok(ControlInput::new(tau[0], tau[1]))
}

/// Channel-wise clip into the actuator bounds.
pub fn clamp(tau: ControlInput, bounds: &SaturationBounds) -> ControlInput {
    ControlInput::new(bounds.clip(0, tau.tau_u), bounds.clip(1, tau.tau_r))
}

/// Output of one controller update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcOutput {
    /// Demand before clipping.
    pub demand: ControlInput,
    /// Input actually applied.
    pub applied: ControlInput,
    pub clamped: bool,
    /// The singularity guard held the previous demand.
    pub held: bool,
}

/// Sliding-mode controller with optional hard clipping and a one-step hold
/// across the G singularity.
#[derive(Debug, Clone)]
pub struct SmcController {
    pub gains: GainsUnbounded,
    pub switching: Switching,
    pub clip: Option<SaturationBounds>,
    last: ControlInput,
}

impl SmcController {
    pub fn new(gains: GainsUnbounded, switching: Switching, clip: Option<SaturationBounds>) -> Self {
        Self {
            gains,
            switching,
            clip,
            last: ControlInput::ZERO,
        }
    }

    pub fn update(&mut self, surf: &SurfaceState) -> SmcOutput {
        let (demand, held) = match control_law(surf, &self.gains, self.switching) {
            Ok(tau) => (tau, false),
            Err(_) => (self.last, true),
        };
        self.last = demand;
        let applied = match &self.clip {
            Some(b) => clamp(demand, b),
            None => demand,
        };
        SmcOutput {
            demand,
            applied,
            clamped: applied != demand,
            held,
        }
    }
}

/// Scalar surface rates from an explicit chain of intermediate quantities,
/// independent of the F/G factorisation. Test oracle.
#[doc(hidden)]
pub fn surface_rates_direct(
    model: &VesselModel,
    vessel: &VesselState,
    target: &TargetState,
    eng: &EngagementState,
    k_r: f64,
    tau: ControlInput,
) -> Vector2<f64> {
    let nd = model.nu_dot(&vessel.nu, tau);
    let (udot, vdot) = (nd[0], nd[1]);
    let (u, v) = (vessel.u(), vessel.v());
    // γ̇_U = β̇ + r with β̇ = (u v̇ − u̇ v)/V²
    let gamma_dot = (u * vdot - udot * v) / (eng.speed * eng.speed) + vessel.r();
    let theta_u_dot = gamma_dot - eng.los_rate;
    let v_dot = (u * udot + v * vdot) / eng.speed;
    let theta_t_dot = eng.target_lead_rate(target);
    let r_ddot = target.speed_rate * eng.lead_target.cos()
        - target.speed * eng.lead_target.sin() * theta_t_dot
        - v_dot * eng.lead_vessel.cos()
        + eng.speed * eng.lead_vessel.sin() * theta_u_dot;
    Vector2::new(theta_u_dot, r_ddot + k_r * eng.range_rate)
}
