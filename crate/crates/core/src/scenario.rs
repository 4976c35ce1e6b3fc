//! Scenario configuration and the built-in presets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backstepping::GainsBounded;
use crate::error::ConfigError;
use crate::params::HydroParams;
use crate::path::{HermitePath, PathSpec};
use crate::saturation::SaturationBounds;
use crate::smc::{GainsUnbounded, Switching};
use crate::vessel::VesselState;

/// Default integration step (s).
pub const DEFAULT_DT: f64 = 1e-3;
/// Default horizon (s); a little over one ellipse period.
pub const DEFAULT_HORIZON: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Sliding-mode law with hard clipping of the demand.
    SmcAdhoc,
    /// Backstepping through the smooth saturation model.
    BacksteppingSat,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 2] = [ControllerKind::SmcAdhoc, ControllerKind::BacksteppingSat];

    pub fn name(&self) -> &'static str {
        match self {
            ControllerKind::SmcAdhoc => "smc_adhoc",
            ControllerKind::BacksteppingSat => "backstepping_sat",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smc_adhoc" => Ok(ControllerKind::SmcAdhoc),
            "backstepping_sat" => Ok(ControllerKind::BacksteppingSat),
            other => Err(ConfigError::UnknownPreset(format!("controller {other}"))),
        }
    }
}

/// Serializable path description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathConfig {
    Ellipse {
        ax: f64,
        ay: f64,
        rate: f64,
    },
    Eight {
        a1: f64,
        offset: f64,
        a2: f64,
        rate1: f64,
        rate2: f64,
    },
    /// CSV of (t, x_T, y_T) samples.
    Custom {
        csv: PathBuf,
    },
}

impl PathConfig {
    pub fn ellipse() -> Self {
        PathConfig::Ellipse {
            ax: 4.0,
            ay: 2.5,
            rate: 0.05,
        }
    }

    pub fn eight() -> Self {
        PathConfig::Eight {
            a1: 8.0,
            offset: -4.0,
            a2: 4.0,
            rate1: 0.05,
            rate2: 0.1,
        }
    }

    pub fn build(&self) -> Result<PathSpec, ConfigError> {
        let finite = |name: &'static str, v: &[f64]| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("non-finite {name} path parameter")))
            }
        };
        Ok(match self {
            PathConfig::Ellipse { ax, ay, rate } => {
                finite("ellipse", &[*ax, *ay, *rate])?;
                PathSpec::Ellipse {
                    ax: *ax,
                    ay: *ay,
                    rate: *rate,
                }
            }
            PathConfig::Eight {
                a1,
                offset,
                a2,
                rate1,
                rate2,
            } => {
                finite("eight", &[*a1, *offset, *a2, *rate1, *rate2])?;
                PathSpec::Eight {
                    a1: *a1,
                    offset: *offset,
                    a2: *a2,
                    rate1: *rate1,
                    rate2: *rate2,
                }
            }
            PathConfig::Custom { csv } => PathSpec::Custom(HermitePath::from_csv(csv)?),
        })
    }
}

/// Initial pose and body velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub x: f64,
    pub y: f64,
    /// Heading (rad).
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

impl InitialCondition {
    /// Position in metres, heading in degrees, surge 0.5 m/s.
    pub fn at(x: f64, y: f64, psi_deg: f64) -> Self {
        Self {
            x,
            y,
            psi: psi_deg.to_radians(),
            u: 0.5,
            v: 0.0,
            r: 0.0,
        }
    }

    pub fn state(&self) -> VesselState {
        VesselState::new(self.x, self.y, self.psi, self.u, self.v, self.r)
    }
}

/// Which post-run monitors are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorToggles {
    pub determinant: bool,
    pub lyapunov: bool,
    pub range_decay: bool,
    pub bounds: bool,
    pub lateral_acceleration: bool,
    pub ordering: bool,
    pub speed_tracking: bool,
    pub final_surfaces: bool,
}

impl Default for MonitorToggles {
    fn default() -> Self {
        Self {
            determinant: true,
            lyapunov: true,
            range_decay: true,
            bounds: true,
            lateral_acceleration: true,
            ordering: true,
            speed_tracking: true,
            final_surfaces: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub controller: ControllerKind,
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
    /// Clip the sliding-mode demand to the actuator bounds.
    #[serde(default)]
    pub smc_clip: bool,
    #[serde(default)]
    pub switching: Switching,
    /// Range (m) inside which the engagement switches to along-track geometry.
    #[serde(default = "default_capture_radius")]
    pub capture_radius: f64,
    pub path: PathConfig,
    pub initial: InitialCondition,
    #[serde(default)]
    pub smc: GainsUnbounded,
    #[serde(default)]
    pub backstepping: GainsBounded,
    #[serde(default)]
    pub saturation: SaturationBounds,
    #[serde(default)]
    pub monitors: MonitorToggles,
    #[serde(default)]
    pub vessel: HydroParams,
}

/// Default capture radius (m).
pub const DEFAULT_CAPTURE_RADIUS: f64 = 1e-3;

fn default_capture_radius() -> f64 {
    DEFAULT_CAPTURE_RADIUS
}

impl ScenarioConfig {
    pub fn new(path: PathConfig, initial: InitialCondition, controller: ControllerKind) -> Self {
        Self {
            controller,
            dt: DEFAULT_DT,
            horizon: DEFAULT_HORIZON,
            seed: 0,
            smc_clip: false,
            switching: Switching::Sign,
            capture_radius: DEFAULT_CAPTURE_RADIUS,
            path,
            initial,
            smc: GainsUnbounded::default(),
            backstepping: GainsBounded::default(),
            saturation: SaturationBounds::default(),
            monitors: MonitorToggles::default(),
            vessel: HydroParams::cybership2(),
        }
    }

    /// Number of integration steps; a zero horizon gives zero steps.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Checks everything that can be checked without integrating.
    pub fn validate(&self) -> Result<PathSpec, ConfigError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConfigError::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && (self.horizon == 0.0 || self.horizon >= self.dt)) {
            return Err(ConfigError::Invalid(format!(
                "horizon must be zero or at least one step, got {}",
                self.horizon
            )));
        }
        if !(self.capture_radius > 0.0 && self.capture_radius.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "capture radius must be positive, got {}",
                self.capture_radius
            )));
        }
        let ic = &self.initial;
        if [ic.x, ic.y, ic.psi, ic.u, ic.v, ic.r].iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::Invalid("non-finite initial condition".into()));
        }
        if ic.u.hypot(ic.v) <= 0.0 {
            return Err(ConfigError::Invalid("initial vessel speed must be positive".into()));
        }
        if let Switching::BoundaryLayer { width } = self.switching {
            if !(width > 0.0 && width.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "boundary layer width {width} must be positive"
                )));
            }
        }
        self.vessel.validate()?;
        self.smc.validate()?;
        self.backstepping.validate()?;
        self.saturation.validate()?;
        let spec = self.path.build()?;
        let samples = ((self.horizon / 0.1).ceil() as usize).max(1);
        spec.check_horizon(self.horizon, samples)?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        // custom path CSVs are resolved relative to the config file
        if let PathConfig::Custom { csv } = &mut cfg.path {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        Ok(cfg)
    }
}

/// Named reference paths with preset starting points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathPreset {
    Ellipse,
    Eight,
}

impl PathPreset {
    pub const ALL: [PathPreset; 2] = [PathPreset::Ellipse, PathPreset::Eight];

    pub fn name(&self) -> &'static str {
        match self {
            PathPreset::Ellipse => "ellipse",
            PathPreset::Eight => "eight",
        }
    }

    pub fn config(&self) -> PathConfig {
        match self {
            PathPreset::Ellipse => PathConfig::ellipse(),
            PathPreset::Eight => PathConfig::eight(),
        }
    }

    /// Starting-point names available on this path.
    pub fn initial_names(&self) -> &'static [&'static str] {
        match self {
            PathPreset::Ellipse => &["P1", "P2", "P3"],
            PathPreset::Eight => &["P1", "P2", "P3", "C1"],
        }
    }

    pub fn initial(&self, name: &str) -> Option<(InitialCondition, &'static str)> {
        // x is North, y is East
        Some(match (self, name) {
            (PathPreset::Ellipse, "P1") => (
                InitialCondition::at(-2.0, -5.0, 30.0),
                "2 m South, 5 m West, heading 30 deg",
            ),
            (PathPreset::Ellipse, "P2") => (
                InitialCondition::at(-3.0, 3.0, -30.0),
                "3 m South, 3 m East, heading -30 deg",
            ),
            (PathPreset::Ellipse, "P3") => (
                InitialCondition::at(6.0, -4.0, 140.0),
                "6 m North, 4 m West, heading 140 deg",
            ),
            (PathPreset::Eight, "P1") => (InitialCondition::at(5.0, 0.0, 120.0), "(5 m, 0 m), heading 120 deg"),
            (PathPreset::Eight, "P2") => (InitialCondition::at(2.0, -2.0, 70.0), "(2 m, -2 m), heading 70 deg"),
            (PathPreset::Eight, "P3") => (InitialCondition::at(5.0, -3.0, 100.0), "(5 m, -3 m), heading 100 deg"),
            (PathPreset::Eight, "C1") => (
                InitialCondition::at(5.0, 0.0, 60.0),
                "(5 m, 0 m), heading 60 deg; controller comparison start",
            ),
            _ => return None,
        })
    }
}

impl FromStr for PathPreset {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ellipse" => Ok(PathPreset::Ellipse),
            "eight" => Ok(PathPreset::Eight),
            other => Err(ConfigError::UnknownPreset(format!("path {other}"))),
        }
    }
}

/// One entry of the preset catalogue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetInfo {
    pub name: String,
    pub path: &'static str,
    pub initial: &'static str,
    pub controller: ControllerKind,
    pub description: String,
}

/// Builds the scenario for a named path, start and controller.
pub fn preset(path: &str, initial: &str, controller: ControllerKind) -> Result<ScenarioConfig, ConfigError> {
    let p: PathPreset = path.parse()?;
    let (ic, _) = p
        .initial(initial)
        .ok_or_else(|| ConfigError::UnknownPreset(format!("{path}/{initial}")))?;
    let mut cfg = ScenarioConfig::new(p.config(), ic, controller);
    cfg.smc_clip = initial == COMPARISON_START;
    Ok(cfg)
}

/// Start used for the controller comparison; its sliding-mode run is clipped.
pub const COMPARISON_START: &str = "C1";

/// Resolves `path-IC-controller` names such as `ellipse-P1-backstepping_sat`.
pub fn preset_by_name(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut parts = name.splitn(3, '-');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(p), Some(ic), Some(c)) => preset(p, ic, c.parse()?),
        _ => Err(ConfigError::UnknownPreset(name.to_string())),
    }
}

pub fn catalogue() -> Vec<PresetInfo> {
    let mut out = Vec::new();
    for p in PathPreset::ALL {
        for &ic in p.initial_names() {
            let (_, desc) = p.initial(ic).expect("listed start exists");
            for c in ControllerKind::ALL {
                let gains = match c {
                    ControllerKind::SmcAdhoc if ic == COMPARISON_START => {
                        "k_R=5, M_theta=0.3, M_R=0.08, N_theta=0.3, N_R=0.08, clipped to (-1.5, 2)"
                    }
                    ControllerKind::SmcAdhoc => "k_R=5, M_theta=0.3, M_R=0.08, N_theta=0.3, N_R=0.08, unbounded",
                    ControllerKind::BacksteppingSat => {
                        "K1=diag(0.2,0.1), K2=diag(5,1), rho=diag(0.2,0.2), bounds (-1.5, 2)"
                    }
                };
                out.push(PresetInfo {
                    name: format!("{}-{}-{}", p.name(), ic, c.name()),
                    path: p.name(),
                    initial: ic,
                    controller: c,
                    description: format!("{} path; start {desc}; {gains}", p.name()),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_covers_paths_starts_and_controllers() {
        let cat = catalogue();
        assert_eq!(cat.len(), (3 + 4) * 2);
        for p in ["ellipse", "eight"] {
            for ic in ["P1", "P2", "P3"] {
                for c in ControllerKind::ALL {
                    let name = format!("{p}-{ic}-{c}");
                    assert!(cat.iter().any(|e| e.name == name), "{name}");
                    preset_by_name(&name).unwrap();
                }
            }
        }
    }

    #[test]
    fn every_preset_validates_and_round_trips() {
        for info in catalogue() {
            let cfg = preset_by_name(&info.name).unwrap();
            cfg.validate().unwrap();
            let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(cfg, back, "{}", info.name);
        }
    }

    #[test]
    fn preset_start_coordinates() {
        let c = preset("ellipse", "P1", ControllerKind::SmcAdhoc).unwrap();
        assert_eq!((c.initial.x, c.initial.y), (-2.0, -5.0));
        assert_eq!(c.initial.psi, 30f64.to_radians());
        assert_eq!(c.initial.u, 0.5);
        let c = preset("eight", "C1", ControllerKind::BacksteppingSat).unwrap();
        assert_eq!((c.initial.x, c.initial.y), (5.0, 0.0));
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            preset("circle", "P1", ControllerKind::SmcAdhoc),
            Err(ConfigError::UnknownPreset(_))
        ));
        assert!(matches!(
            preset("ellipse", "P9", ControllerKind::SmcAdhoc),
            Err(ConfigError::UnknownPreset(_))
        ));
        assert!(preset_by_name("ellipse-P1").is_err());
        assert!(preset_by_name("ellipse-P1-pid").is_err());
    }

    #[test]
    fn validation_errors() {
        let mut c = preset("ellipse", "P1", ControllerKind::SmcAdhoc).unwrap();
        c.dt = -1.0;
        assert!(c.validate().is_err());
        let mut c = preset("ellipse", "P1", ControllerKind::SmcAdhoc).unwrap();
        c.horizon = 0.0005;
        assert!(c.validate().is_err());
        c.horizon = 0.0;
        assert!(c.validate().is_ok());
        let mut c = preset("ellipse", "P1", ControllerKind::SmcAdhoc).unwrap();
        c.initial.u = 0.0;
        assert!(c.validate().is_err());
        let mut c = preset("ellipse", "P1", ControllerKind::SmcAdhoc).unwrap();
        c.path = PathConfig::Ellipse {
            ax: 0.0,
            ay: 0.0,
            rate: 0.05,
        };
        assert!(matches!(c.validate(), Err(ConfigError::Path(_))));
    }

    #[test]
    fn malformed_toml() {
        assert!(matches!(
            ScenarioConfig::from_toml_str("dt = ["),
            Err(ConfigError::Parse(_))
        ));
        let mut text = preset("ellipse", "P1", ControllerKind::SmcAdhoc)
            .unwrap()
            .to_toml_string();
        text.push_str("\nbogus = 1\n");
        assert!(matches!(
            ScenarioConfig::from_toml_str(&text),
            Err(ConfigError::Parse(_))
        ));
    }
}
