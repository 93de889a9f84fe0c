//! Deterministic, headless execution of the scene event model.

mod config;
mod hsv;
mod interp;
mod lod;
mod proximity;
mod script;
mod sim;
mod timesensor;
mod trace;
mod world;

pub use config::{ConfigError, SimConfig, Verbosity, CONFIG_ENV};
pub use hsv::{hsv_to_rgb, rgb_to_hsv};
pub use interp::{
    interpolate_color, interpolate_orientation, interpolate_position, lerp_color_hsv, slerp_rotation, KeyframeTrack,
    TrackError,
};
pub use lod::{lod_index, select_lod_child};
pub use proximity::{evaluate_proximity, ProximityRegion, ProximityState, ViewerPose};
pub use script::{parse_script, write_script, ScriptError, SimEvent, SimEventKind};
pub use sim::{SimError, Simulation};
pub use timesensor::{timesensor_fraction, TimeSensorState};
pub use trace::{value_to_json, write_trace, TraceRecord, TraceSummary};
pub use world::{NodeId, RtNode, RtRoute, World};
