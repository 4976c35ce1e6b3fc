//! Pursuer/target relative geometry.
//!
//! R is the range from the vessel to the virtual target, θ the line-of-sight
//! angle, θ_U = γ_U − θ and θ_T = γ_T − θ the lead angles of vessel and
//! target. The rates follow the planar engagement kinematics
//!
//! ```text
//! Ṙ  = V_T cos θ_T − V_U cos θ_U
//! Rθ̇ = V_T sin θ_T − V_U sin θ_U
//! ```

use crate::angle::wrap_pi;
use crate::error::EngagementError;
use crate::path::TargetState;
use crate::vessel::{ControlInput, VesselModel, VesselState};

/// Range below which the line of sight is considered undefined.
pub const RENDEZVOUS_RANGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementState {
    pub range: f64,
    /// θ, LOS angle from North.
    pub los: f64,
    /// θ_U = γ_U − θ.
    pub lead_vessel: f64,
    /// θ_T = γ_T − θ.
    pub lead_target: f64,
    /// β.
    pub sideslip: f64,
    /// V_U.
    pub speed: f64,
    /// γ_U.
    pub course: f64,
    /// Ṙ.
    pub range_rate: f64,
    /// θ̇.
    pub los_rate: f64,
}

impl EngagementState {
    /// Builds the geometry from current vessel and target states.
    ///
    /// Fails with [`EngagementError::Rendezvous`] when R is below
    /// [`RENDEZVOUS_RANGE`]; callers then fall back to
    /// [`EngagementState::with_held_los`].
    pub fn compute(vessel: &VesselState, target: &TargetState) -> Result<Self, EngagementError> {
        Self::compute_with_floor(vessel, target, RENDEZVOUS_RANGE)
    }

    /// As [`EngagementState::compute`] with an explicit rendezvous floor.
    pub fn compute_with_floor(vessel: &VesselState, target: &TargetState, floor: f64) -> Result<Self, EngagementError> {
        let dx = target.x - vessel.x();
        let dy = target.y - vessel.y();
        let range = dx.hypot(dy);
        if range < floor {
            return Err(EngagementError::Rendezvous { range });
        }
        let mut eng = Self::with_held_los(vessel, target, dy.atan2(dx))?;
        eng.los_rate = (target.speed * eng.lead_target.sin() - eng.speed * eng.lead_vessel.sin()) / range;
        Ok(eng)
    }

    /// Geometry with the LOS angle frozen at `los` and θ̇ = 0. Ṙ is the
    /// closing speed along the frozen line of sight.
    pub fn with_held_los(vessel: &VesselState, target: &TargetState, los: f64) -> Result<Self, EngagementError> {
        let speed = vessel.speed();
        if speed <= 0.0 {
            return Err(EngagementError::DegenerateVessel);
        }
        let range = (target.x - vessel.x()).hypot(target.y - vessel.y());
        let sideslip = vessel.sideslip();
        let course = wrap_pi(sideslip + vessel.psi());
        let lead_vessel = wrap_pi(course - los);
        let lead_target = wrap_pi(target.course - los);
        Ok(Self {
            range,
            los,
            lead_vessel,
            lead_target,
            sideslip,
            speed,
            course,
            range_rate: target.speed * lead_target.cos() - speed * lead_vessel.cos(),
            los_rate: 0.0,
        })
    }

    /// Geometry for a vessel close behind the target. The line of sight is
    /// replaced by the target course (so θ̇ = γ̇_T and θ_T = 0) and R by the
    /// signed along-track offset of the target ahead of the vessel.
    pub fn along_track(vessel: &VesselState, target: &TargetState) -> Result<Self, EngagementError> {
        let mut eng = Self::with_held_los(vessel, target, target.course)?;
        let (s, c) = target.course.sin_cos();
        eng.range = (target.x - vessel.x()) * c + (target.y - vessel.y()) * s;
        eng.los_rate = target.course_rate;
        Ok(eng)
    }

    /// [`EngagementState::compute`] outside `capture_radius`,
    /// [`EngagementState::along_track`] inside it.
    pub fn with_capture(
        vessel: &VesselState,
        target: &TargetState,
        capture_radius: f64,
    ) -> Result<Self, EngagementError> {
        match Self::compute_with_floor(vessel, target, capture_radius) {
            Err(EngagementError::Rendezvous { .. }) => Self::along_track(vessel, target),
            other => other,
        }
    }

    /// θ̇_T = γ̇_T − θ̇.
    pub fn target_lead_rate(&self, target: &TargetState) -> f64 {
        target.course_rate - self.los_rate
    }
}

/// V̇_U = u̇ cos β + v̇ sin β.
pub fn speed_rate(vessel: &VesselState, udot: f64, vdot: f64) -> Result<f64, EngagementError> {
    let speed = vessel.speed();
    if speed <= 0.0 {
        return Err(EngagementError::DegenerateVessel);
    }
    let beta = vessel.sideslip();
    Ok(udot * beta.cos() + vdot * beta.sin())
}

/// Acceleration normal to the velocity vector,
/// a_U = (−u̇ sin β + v̇ cos β) + r V_U, so that γ̇_U = a_U / V_U.
pub fn lateral_acceleration(
    model: &VesselModel,
    vessel: &VesselState,
    tau: ControlInput,
) -> Result<f64, EngagementError> {
    let speed = vessel.speed();
    if speed <= 0.0 {
        return Err(EngagementError::DegenerateVessel);
    }
    let c = model.compact_terms(&vessel.nu);
    let beta = vessel.sideslip();
    Ok(-c.udot(tau) * beta.sin() + c.vdot(tau) * beta.cos() + vessel.r() * speed)
}
