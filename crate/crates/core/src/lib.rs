//! Closed-loop integrated guidance and control for an underactuated surface
//! vessel following a moving virtual target.
//!
//! The crate models a three-degree-of-freedom vessel, a virtual target on a
//! parametric path, the line-of-sight engagement between them, and two
//! controllers acting on the sliding surfaces (lead angle, range): a
//! sliding-mode law with hard clipping and a backstepping law through a
//! smooth actuator saturation model.

pub mod angle;
pub mod backstepping;
pub mod cli;
pub mod engagement;
pub mod error;
pub mod logio;
pub mod monitor;
pub mod params;
pub mod path;
pub mod saturation;
pub mod scenario;
pub mod sim;
pub mod smc;
pub mod vessel;

pub use backstepping::{BacksteppingController, GainsBounded};
pub use engagement::EngagementState;
pub use error::{ConfigError, ControlError, EngagementError, IoError, ParamError, PathError, SimError};
pub use monitor::{monitor_suite, MonitorReport};
pub use params::HydroParams;
pub use path::{PathSpec, TargetState};
pub use saturation::SaturationBounds;
pub use scenario::{preset, preset_by_name, ControllerKind, InitialCondition, PathConfig, ScenarioConfig};
pub use sim::{simulate, LogRow, SimLog, Summary, COLUMNS};
pub use smc::{GainsUnbounded, SmcController, Switching};
pub use vessel::{ControlInput, VesselModel, VesselState};
