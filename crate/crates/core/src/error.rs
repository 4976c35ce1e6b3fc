use std::path::PathBuf;

use thiserror::Error;

/// Vessel parameter set rejected at load or validation time.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("mass element {name} = {value} must be positive")]
    NonPositiveMass { name: &'static str, value: f64 },
    #[error("sway/yaw decoupling determinant m22*m33 - m23*m32 = {0} is not positive")]
    SingularDecoupling(f64),
    #[error("parameter {name} is not finite")]
    NonFinite { name: &'static str },
    #[error("could not parse parameter file: {0}")]
    Parse(String),
}

/// Failures while evaluating the virtual target.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("target speed vanishes at t = {t} s; course is undefined")]
    DegenerateTarget { t: f64 },
    #[error("t = {t} s lies outside the sampled path interval [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("custom path needs at least two samples with strictly increasing time")]
    BadSamples,
    #[error("negative time {0} s")]
    NegativeTime(f64),
    #[error("non-finite path parameter {0}")]
    NonFinite(&'static str),
}

/// Engagement geometry cannot be formed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngagementError {
    #[error("vessel speed is zero; sideslip and course are undefined")]
    DegenerateVessel,
    #[error("range {range} m is inside the capture radius")]
    Rendezvous { range: f64 },
}

/// Controller-level failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("surface input matrix is near singular (|cos thetaU| = {cos_theta_u:.3e})")]
    SingularGain { cos_theta_u: f64 },
    #[error("saturation gate vanished on channel {channel} (zeta = {zeta})")]
    GateVanished { channel: usize, zeta: f64 },
    #[error("invalid gain {name} = {value}: must be strictly positive")]
    InvalidGain { name: &'static str, value: f64 },
    #[error("invalid saturation bounds: {0}")]
    InvalidBounds(String),
}

/// Scenario configuration rejected before integration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Errors raised during closed-loop integration.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("integration produced a non-finite state at step {step} (t = {t} s)")]
    NonFinite { step: usize, t: f64 },
    #[error("at t = {t} s: {source}")]
    Path {
        t: f64,
        #[source]
        source: PathError,
    },
    #[error("at t = {t} s: {source}")]
    Engagement {
        t: f64,
        #[source]
        source: EngagementError,
    },
    #[error("at t = {t} s: {source}")]
    Control {
        t: f64,
        #[source]
        source: ControlError,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Reading or writing logs and summaries.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}
