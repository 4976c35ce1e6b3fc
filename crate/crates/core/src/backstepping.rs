//! Backstepping through the smooth saturation model.
//!
//! The actuator output τ = ζ becomes a state. A stabilising input
//! α = G⁻¹(−F − K₁S) is defined for the surface subsystem and the error
//! z = τ − α is driven to zero by choosing the command τ_c so that
//!
//! ```text
//! ż = −GᵀS − K₂z,     V₂ = ½SᵀS + ½zᵀz,     V̇₂ = −SᵀK₁S − zᵀK₂z.
//! ```
//!
//! α̇ is taken as a backward difference of successive α samples.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::ControlError;
use crate::saturation::{effective_gain, ActuatorState, SaturationBounds};
use crate::smc::SurfaceState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsBounded {
    /// Diagonal of K₁ (gains on S).
    pub k1: [f64; 2],
    /// Diagonal of K₂ (gains on z).
    pub k2: [f64; 2],
}

impl Default for GainsBounded {
    fn default() -> Self {
        Self {
            k1: [0.2, 0.1],
            k2: [5.0, 1.0],
        }
    }
}

impl GainsBounded {
    pub fn validate(&self) -> Result<(), ControlError> {
        for (name, value) in [
            ("k1[0]", self.k1[0]),
            ("k1[1]", self.k1[1]),
            ("k2[0]", self.k2[0]),
            ("k2[1]", self.k2[1]),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ControlError::InvalidGain { name, value });
            }
        }
        Ok(())
    }

    pub fn k1_matrix(&self) -> Matrix2<f64> {
        Matrix2::from_diagonal(&Vector2::from(self.k1))
    }

    pub fn k2_matrix(&self) -> Matrix2<f64> {
        Matrix2::from_diagonal(&Vector2::from(self.k2))
    }
}

/// α = G⁻¹(−F − K₁S).
pub fn stabilizing_alpha(surf: &SurfaceState, gains: &GainsBounded) -> Result<Vector2<f64>, ControlError> {
    let ginv = surf.inverse_g()?;
    Ok(ginv * (-surf.f - gains.k1_matrix() * surf.s()))
}

/// Retained α sample for backward differencing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BackstepState {
    prev: Option<(Vector2<f64>, f64)>,
}

impl BackstepState {
    /// (α_now − α_prev)/(t_now − t_prev); zero when no history exists or
    /// time has not advanced.
    pub fn alpha_dot(&self, alpha_now: &Vector2<f64>, t_now: f64) -> Vector2<f64> {
        match self.prev {
            Some((a, t)) if t_now > t => (alpha_now - a) / (t_now - t),
            _ => Vector2::zeros(),
        }
    }

    pub fn record(&mut self, alpha: Vector2<f64>, t: f64) {
        self.prev = Some((alpha, t));
    }

    pub fn last_alpha(&self) -> Option<Vector2<f64>> {
        self.prev.map(|(a, _)| a)
    }
}

/// τ_c = Γ⁻¹(ρτ + α̇ − GᵀS − K₂z), Γ the diagonal saturation gate.
///
/// With this command the saturation dynamics give τ̇ = α̇ − GᵀS − K₂z, so
/// ż = −GᵀS − K₂z exactly.
pub fn command_tau_c(
    surf: &SurfaceState,
    z: &Vector2<f64>,
    alpha_dot: &Vector2<f64>,
    act: &ActuatorState,
    bounds: &SaturationBounds,
    gains: &GainsBounded,
) -> Result<Vector2<f64>, ControlError> {
    let gate = effective_gain(act, bounds)?;
    let rho_tau = Vector2::new(bounds.leak[0] * act.zeta[0], bounds.leak[1] * act.zeta[1]);
    let inner = rho_tau + alpha_dot - surf.g.transpose() * surf.s() - gains.k2_matrix() * z;
    Ok(inner.component_div(&gate))
}

/// V₂ = ½SᵀS + ½zᵀz.
pub fn lyapunov_v2(surf: &SurfaceState, z: &Vector2<f64>) -> f64 {
    0.5 * surf.s().norm_squared() + 0.5 * z.norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackstepOutput {
    pub alpha: Vector2<f64>,
    pub alpha_dot: Vector2<f64>,
    pub z: Vector2<f64>,
    /// Command τ_c fed to the saturation model.
    pub command: Vector2<f64>,
    pub v2: f64,
    /// The singularity guard held the previous command.
    pub held: bool,
}

#[derive(Debug, Clone)]
pub struct BacksteppingController {
    pub gains: GainsBounded,
    pub bounds: SaturationBounds,
    history: BackstepState,
    last_command: Vector2<f64>,
}

impl BacksteppingController {
    pub fn new(gains: GainsBounded, bounds: SaturationBounds) -> Self {
        Self {
            gains,
            bounds,
            history: BackstepState::default(),
            last_command: Vector2::zeros(),
        }
    }

    pub fn update(&mut self, surf: &SurfaceState, act: &ActuatorState, t: f64) -> Result<BackstepOutput, ControlError> {
        let alpha = match stabilizing_alpha(surf, &self.gains) {
            Ok(a) => a,
            Err(ControlError::SingularGain { .. }) => {
                let alpha = self.history.last_alpha().unwrap_or_else(Vector2::zeros);
                let z = act.zeta - alpha;
                return Ok(BackstepOutput {
                    alpha,
                    alpha_dot: Vector2::zeros(),
                    z,
                    command: self.last_command,
                    v2: lyapunov_v2(surf, &z),
                    held: true,
                });
            }
            Err(e) => return Err(e),
        };
        let alpha_dot = self.history.alpha_dot(&alpha, t);
        self.history.record(alpha, t);
        let z = act.zeta - alpha;
        let command = command_tau_c(surf, &z, &alpha_dot, act, &self.bounds, &self.gains)?;
        self.last_command = command;
        Ok(BackstepOutput {
            alpha,
            alpha_dot,
            z,
            command,
            v2: lyapunov_v2(surf, &z),
            held: false,
        })
    }
}
