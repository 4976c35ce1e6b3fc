//! Planar 3-DOF vessel model.
//!
//! ```text
//! η̇ = J(ψ) ν
//! M ν̇ = τ − C(ν) ν − D(ν) ν + b
//! ```
//!
//! with η = [x y ψ]ᵀ (x North, y East), ν = [u v r]ᵀ and τ = [τ_u 0 τ_r]ᵀ.
//! The sway channel has no actuator; sway motion is reached only through the
//! sway/yaw coupling captured by [`CompactTerms`].

use nalgebra::{Matrix3, Vector3};

use crate::angle::wrap_pi;
use crate::error::ParamError;
use crate::params::HydroParams;

/// Pose and body-fixed velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselState {
    /// (x, y, ψ) in metres and radians.
    pub eta: Vector3<f64>,
    /// (u, v, r) in m/s and rad/s.
    pub nu: Vector3<f64>,
}

impl VesselState {
    pub fn new(x: f64, y: f64, psi: f64, u: f64, v: f64, r: f64) -> Self {
        Self {
            eta: Vector3::new(x, y, wrap_pi(psi)),
            nu: Vector3::new(u, v, r),
        }
    }

    pub fn x(&self) -> f64 {
        self.eta[0]
    }
    pub fn y(&self) -> f64 {
        self.eta[1]
    }
    pub fn psi(&self) -> f64 {
        self.eta[2]
    }
    pub fn u(&self) -> f64 {
        self.nu[0]
    }
    pub fn v(&self) -> f64 {
        self.nu[1]
    }
    pub fn r(&self) -> f64 {
        self.nu[2]
    }

    /// Total speed V_U = √(u² + v²).
    pub fn speed(&self) -> f64 {
        self.u().hypot(self.v())
    }

    /// Sideslip β = atan2(v, u).
    pub fn sideslip(&self) -> f64 {
        self.v().atan2(self.u())
    }

    /// Course γ_U = β + ψ, wrapped.
    pub fn course(&self) -> f64 {
        wrap_pi(self.sideslip() + self.psi())
    }
}

/// Body-frame actuation. Sway force is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    /// Surge thrust τ_u (N).
    pub tau_u: f64,
    /// Yaw moment τ_r (N·m).
    pub tau_r: f64,
}

impl ControlInput {
    pub const ZERO: Self = Self { tau_u: 0.0, tau_r: 0.0 };

    pub fn new(tau_u: f64, tau_r: f64) -> Self {
        Self { tau_u, tau_r }
    }

    /// [τ_u, 0, τ_r]ᵀ.
    pub fn body_vector(&self) -> Vector3<f64> {
        Vector3::new(self.tau_u, 0.0, self.tau_r)
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.tau_u, self.tau_r]
    }
}

/// Inertia elements including added mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassElements {
    pub m11: f64,
    pub m22: f64,
    pub m23: f64,
    pub m32: f64,
    pub m33: f64,
}

impl MassElements {
    /// m22·m33 − m23·m32, the denominator of the decoupled sway equation.
    pub fn decoupling_det(&self) -> f64 {
        self.m22 * self.m33 - self.m23 * self.m32
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.m11, 0.0, 0.0, //
            0.0, self.m22, self.m23, //
            0.0, self.m32, self.m33,
        )
    }
}

/// Velocity-dependent damping elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingElements {
    pub d11: f64,
    pub d22: f64,
    pub d23: f64,
    pub d32: f64,
    pub d33: f64,
}

impl DampingElements {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.d11, 0.0, 0.0, //
            0.0, self.d22, self.d23, //
            0.0, self.d32, self.d33,
        )
    }
}

/// Scalars of the decoupled surge and sway equations:
/// u̇ = f_u + g_u τ_u, v̇ = f_v + g_v τ_r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactTerms {
    pub f_u: f64,
    pub g_u: f64,
    pub f_v: f64,
    pub g_v: f64,
}

impl CompactTerms {
    pub fn udot(&self, tau: ControlInput) -> f64 {
        self.f_u + self.g_u * tau.tau_u
    }

    pub fn vdot(&self, tau: ControlInput) -> f64 {
        self.f_v + self.g_v * tau.tau_r
    }
}

/// Earth-from-body rotation J(ψ).
pub fn rotation_matrix(psi: f64) -> Matrix3<f64> {
    let (s, c) = psi.sin_cos();
    Matrix3::new(
        c, -s, 0.0, //
        s, c, 0.0, //
        0.0, 0.0, 1.0,
    )
}

pub fn mass_elements(p: &HydroParams) -> Result<MassElements, ParamError> {
    let me = MassElements {
        m11: p.m - p.x_udot,
        m22: p.m - p.y_vdot,
        m23: p.m * p.x_g - p.y_rdot,
        m32: p.m * p.x_g - p.n_vdot,
        m33: p.iz - p.n_rdot,
    };
    for (name, value) in [("m11", me.m11), ("m22", me.m22), ("m33", me.m33)] {
        if value <= 0.0 {
            return Err(ParamError::NonPositiveMass { name, value });
        }
    }
    let det = me.decoupling_det();
    if det <= 0.0 {
        return Err(ParamError::SingularDecoupling(det));
    }
    Ok(me)
}

pub fn damping_elements(p: &HydroParams, nu: &Vector3<f64>) -> DampingElements {
    let (u, v, r) = (nu[0].abs(), nu[1].abs(), nu[2].abs());
    DampingElements {
        d11: -p.x_u - p.x_abs_u_u * u,
        d22: -p.y_v - p.y_abs_v_v * v - p.y_abs_r_v * r,
        d23: -p.y_r - p.y_abs_v_r * v - p.y_abs_r_r * r,
        d32: -p.n_v - p.n_abs_v_v * v - p.n_abs_r_v * r,
        d33: -p.n_r - p.n_abs_v_r * v - p.n_abs_r_r * r,
    }
}

/// η̇ = J(ψ) ν.
pub fn eta_dot(state: &VesselState) -> Vector3<f64> {
    rotation_matrix(state.psi()) * state.nu
}

/// A validated parameter set with its constant inertia elements cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselModel {
    params: HydroParams,
    mass: MassElements,
}

impl VesselModel {
    pub fn new(params: HydroParams) -> Result<Self, ParamError> {
        params.validate()?;
        let mass = mass_elements(&params)?;
        Ok(Self { params, mass })
    }

    pub fn cybership2() -> Self {
        Self::new(HydroParams::cybership2()).expect("bundled parameters are valid")
    }

    pub fn params(&self) -> &HydroParams {
        &self.params
    }

    pub fn mass(&self) -> &MassElements {
        &self.mass
    }

    pub fn damping(&self, nu: &Vector3<f64>) -> DampingElements {
        damping_elements(&self.params, nu)
    }

    pub fn coriolis(&self, nu: &Vector3<f64>) -> Matrix3<f64> {
        let MassElements { m11, m22, m23, .. } = self.mass;
        let (u, v, r) = (nu[0], nu[1], nu[2]);
        let c13 = -m22 * v - m23 * r;
        Matrix3::new(
            0.0,
            0.0,
            c13, //
            0.0,
            0.0,
            m11 * u, //
            -c13,
            -m11 * u,
            0.0,
        )
    }

    /// ν̇ from the full matrix equation with no disturbance.
    pub fn nu_dot(&self, nu: &Vector3<f64>, tau: ControlInput) -> Vector3<f64> {
        self.nu_dot_disturbed(nu, tau, &Vector3::zeros())
    }

    /// ν̇ = M⁻¹[τ − C(ν)ν − D(ν)ν + b], solved as a linear system.
    pub fn nu_dot_disturbed(&self, nu: &Vector3<f64>, tau: ControlInput, disturbance: &Vector3<f64>) -> Vector3<f64> {
        let rhs = tau.body_vector() - self.coriolis(nu) * nu - self.damping(nu).matrix() * nu + disturbance;
        self.mass
            .matrix()
            .lu()
            .solve(&rhs)
            .expect("mass matrix is non-singular for validated parameters")
    }

    pub fn compact_terms(&self, nu: &Vector3<f64>) -> CompactTerms {
        let MassElements { m11, m22, m23, m33, .. } = self.mass;
        let d = self.damping(nu);
        let (u, v, r) = (nu[0], nu[1], nu[2]);
        let det = self.mass.decoupling_det();
        CompactTerms {
            f_u: m22 / m11 * v * r + m23 / m11 * r * r - d.d11 / m11 * u,
            g_u: 1.0 / m11,
            f_v: (-m23 * ((m11 - m22) * v * u - m23 * u * r - d.d32 * v - d.d33 * r)
                + m33 * (-m11 * u * r - d.d22 * v - d.d23 * r))
                / det,
            g_v: -m23 / det,
        }
    }

    /// Full state derivative (η̇, ν̇).
    pub fn state_dot(&self, state: &VesselState, tau: ControlInput) -> (Vector3<f64>, Vector3<f64>) {
        (eta_dot(state), self.nu_dot(&state.nu, tau))
    }
}
