//! Smooth asymmetric actuator saturation.
//!
//! Each actuated channel (surge, yaw) carries a state ζ whose output τ = ζ
//! obeys
//!
//! ```text
//! ζ̇ = q (1 − (ζ/τ_M)ⁿ) τ_c + (1 − q)(1 − (ζ/τ_m)ⁿ) τ_c − ρ ζ
//! ```
//!
//! with q = 1 for ζ > 0 and 0 otherwise. Starting from ζ = 0 the output
//! never leaves (τ_m, τ_M) for any bounded command τ_c.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::ControlError;

/// Per-channel actuator limits and model shaping. Index 0 is surge, 1 is yaw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationBounds {
    /// Forward bounds τ_iM (> 0).
    pub upper: [f64; 2],
    /// Reverse bounds τ_im (< 0).
    pub lower: [f64; 2],
    /// Even shaping exponent n ≥ 2.
    pub order: u32,
    /// Leak rates ρ_i in (0, 1].
    pub leak: [f64; 2],
}

impl Default for SaturationBounds {
    fn default() -> Self {
        Self {
            upper: [2.0, 2.0],
            lower: [-1.5, -1.5],
            order: 2,
            leak: [0.2, 0.2],
        }
    }
}

impl SaturationBounds {
    pub fn validate(&self) -> Result<(), ControlError> {
        for i in 0..2 {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !(lo.is_finite() && hi.is_finite() && lo < 0.0 && hi > 0.0) {
                return Err(ControlError::InvalidBounds(format!(
                    "channel {i}: need lower < 0 < upper, got ({lo}, {hi})"
                )));
            }
            let rho = self.leak[i];
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(ControlError::InvalidBounds(format!(
                    "channel {i}: leak rate {rho} outside (0, 1]"
                )));
            }
        }
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(ControlError::InvalidBounds(format!(
                "order {} must be an even integer >= 2",
                self.order
            )));
        }
        Ok(())
    }

    /// Strict interior test for one channel.
    pub fn contains(&self, channel: usize, value: f64) -> bool {
        value > self.lower[channel] && value < self.upper[channel]
    }

    /// Hard clip of a value into [lower, upper].
    pub fn clip(&self, channel: usize, value: f64) -> f64 {
        value.clamp(self.lower[channel], self.upper[channel])
    }
}

/// Actuator model state, one entry per channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorState {
    pub zeta: Vector2<f64>,
}

/// Branch selector q(ζ): 1 on the forward branch, 0 otherwise.
pub fn branch(zeta: f64) -> f64 {
    if zeta > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn channel_gate(zeta: f64, upper: f64, lower: f64, order: u32) -> f64 {
    let n = order as i32;
    let q = branch(zeta);
    q * (1.0 - (zeta / upper).powi(n)) + (1.0 - q) * (1.0 - (zeta / lower).powi(n))
}

/// Diagonal of Q(I − G_M) + (I − Q)(I − G_m), without an interior check.
pub fn gate(zeta: &Vector2<f64>, bounds: &SaturationBounds) -> Vector2<f64> {
    Vector2::new(
        channel_gate(zeta[0], bounds.upper[0], bounds.lower[0], bounds.order),
        channel_gate(zeta[1], bounds.upper[1], bounds.lower[1], bounds.order),
    )
}

/// The gate multiplier per channel; errors when a channel is at or past its
/// bound and the gate can no longer be inverted.
pub fn effective_gain(state: &ActuatorState, bounds: &SaturationBounds) -> Result<Vector2<f64>, ControlError> {
    let g = gate(&state.zeta, bounds);
    for i in 0..2 {
        if g[i].is_nan() || g[i] <= 0.0 {
            return Err(ControlError::GateVanished {
                channel: i,
                zeta: state.zeta[i],
            });
        }
    }
    Ok(g)
}

/// ζ̇ for a held command.
pub fn zeta_dot(zeta: &Vector2<f64>, command: &Vector2<f64>, bounds: &SaturationBounds) -> Vector2<f64> {
    let g = gate(zeta, bounds);
    Vector2::new(
        g[0] * command[0] - bounds.leak[0] * zeta[0],
        g[1] * command[1] - bounds.leak[1] * zeta[1],
    )
}
