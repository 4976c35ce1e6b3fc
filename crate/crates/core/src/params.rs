//! Hydrodynamic parameter sets.
//!
//! Field names follow the SNAME derivative notation. In files the keys are
//! spelled out (`Y_abs_v_v` for Y_{|v|v}, `X_udot` for X_{u̇}) so a parameter
//! file can be read by anyone holding the model's derivative table.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ParamError};

const CYBERSHIP2: &str = include_str!("../data/cybership2.yaml");

/// Rigid-body, added-mass and damping constants of a 3-DOF surface vessel.
///
/// `x_uuu` is carried for completeness but does not enter the surge damping
/// d11, which uses only the linear and quadratic terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroParams {
    pub m: f64,
    #[serde(rename = "I_z")]
    pub iz: f64,
    pub x_g: f64,
    #[serde(rename = "X_udot")]
    pub x_udot: f64,
    #[serde(rename = "Y_vdot")]
    pub y_vdot: f64,
    #[serde(rename = "Y_rdot")]
    pub y_rdot: f64,
    #[serde(rename = "N_vdot")]
    pub n_vdot: f64,
    #[serde(rename = "N_rdot")]
    pub n_rdot: f64,
    #[serde(rename = "X_u")]
    pub x_u: f64,
    #[serde(rename = "X_abs_u_u")]
    pub x_abs_u_u: f64,
    #[serde(rename = "X_uuu")]
    pub x_uuu: f64,
    #[serde(rename = "Y_v")]
    pub y_v: f64,
    #[serde(rename = "Y_abs_v_v")]
    pub y_abs_v_v: f64,
    #[serde(rename = "Y_abs_r_v")]
    pub y_abs_r_v: f64,
    #[serde(rename = "Y_r")]
    pub y_r: f64,
    #[serde(rename = "Y_abs_v_r")]
    pub y_abs_v_r: f64,
    #[serde(rename = "Y_abs_r_r")]
    pub y_abs_r_r: f64,
    #[serde(rename = "N_v")]
    pub n_v: f64,
    #[serde(rename = "N_abs_v_v")]
    pub n_abs_v_v: f64,
    #[serde(rename = "N_abs_r_v")]
    pub n_abs_r_v: f64,
    #[serde(rename = "N_r")]
    pub n_r: f64,
    #[serde(rename = "N_abs_v_r")]
    pub n_abs_v_r: f64,
    #[serde(rename = "N_abs_r_r")]
    pub n_abs_r_r: f64,
}

impl HydroParams {
    /// The bundled CyberShip II model.
    pub fn cybership2() -> Self {
        Self::from_yaml_str(CYBERSHIP2).expect("bundled parameter file is valid")
    }

    pub fn from_yaml_str(text: &str) -> Result<Self, ParamError> {
        let params: Self = serde_yaml::from_str(text).map_err(|e| ParamError::Parse(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_yaml_str(&text)?)
    }

    pub fn to_yaml_string(&self) -> String {
        serde_yaml::to_string(self).expect("parameters serialize")
    }

    fn named(&self) -> [(&'static str, f64); 23] {
        [
            ("m", self.m),
            ("I_z", self.iz),
            ("x_g", self.x_g),
            ("X_udot", self.x_udot),
            ("Y_vdot", self.y_vdot),
            ("Y_rdot", self.y_rdot),
            ("N_vdot", self.n_vdot),
            ("N_rdot", self.n_rdot),
            ("X_u", self.x_u),
            ("X_abs_u_u", self.x_abs_u_u),
            ("X_uuu", self.x_uuu),
            ("Y_v", self.y_v),
            ("Y_abs_v_v", self.y_abs_v_v),
            ("Y_abs_r_v", self.y_abs_r_v),
            ("Y_r", self.y_r),
            ("Y_abs_v_r", self.y_abs_v_r),
            ("Y_abs_r_r", self.y_abs_r_r),
            ("N_v", self.n_v),
            ("N_abs_v_v", self.n_abs_v_v),
            ("N_abs_r_v", self.n_abs_r_v),
            ("N_r", self.n_r),
            ("N_abs_v_r", self.n_abs_v_r),
            ("N_abs_r_r", self.n_abs_r_r),
        ]
    }

    /// Checks finiteness, positive diagonal inertia and a non-singular
    /// sway/yaw block.
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, value) in self.named() {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name });
            }
        }
        crate::vessel::mass_elements(self).map(|_| ())
    }
}

impl Default for HydroParams {
    fn default() -> Self {
        Self::cybership2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_matches_table_values() {
        let p = HydroParams::cybership2();
        assert_eq!(p.m, 23.8);
        assert_eq!(p.iz, 1.76);
        assert_eq!(p.x_g, 0.046);
        assert_eq!(p.x_udot, -2.0);
        assert_eq!(p.y_vdot, -10.0);
        assert_eq!(p.x_u, -0.72253);
        assert_eq!(p.x_abs_u_u, -1.32742);
        assert_eq!(p.x_uuu, -5.86643);
        assert_eq!(p.y_abs_v_v, -36.47287);
        assert_eq!(p.n_v, 0.0313);
        assert_eq!(p.n_abs_v_v, 3.95645);
        assert_eq!(p.y_abs_r_v, -0.805);
        assert_eq!(p.y_r, -7.25);
        assert_eq!(p.y_abs_v_r, -0.845);
        assert_eq!(p.y_abs_r_r, -3.45);
        assert_eq!(p.n_abs_r_v, 0.13);
        assert_eq!(p.n_r, -1.9);
        assert_eq!(p.n_abs_v_r, 0.08);
        assert_eq!(p.n_abs_r_r, -0.75);
    }

    #[test]
    fn yaml_round_trip() {
        let p = HydroParams::cybership2();
        let back = HydroParams::from_yaml_str(&p.to_yaml_string()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{CYBERSHIP2}\nY_bogus: 1.0\n");
        assert!(matches!(HydroParams::from_yaml_str(&text), Err(ParamError::Parse(_))));
    }

    #[test]
    fn singular_decoupling_rejected() {
        let mut p = HydroParams::cybership2();
        // m23 * m32 = m22 * m33 makes the sway/yaw block singular.
        p.y_vdot = 0.0;
        p.m = 1.0;
        p.iz = 1.0;
        p.x_g = 1.0;
        assert!(matches!(p.validate(), Err(ParamError::SingularDecoupling(_))));
    }
}
