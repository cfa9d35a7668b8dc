//! Experiment driver: config text, scenario construction, and end-to-end
//! runs that write rasters, images, metric tables and a manifest.

mod config;
mod pipeline;
mod runner;
mod ship;

pub use config::{
    parse_config, ClutterConfig, PlatformConfig, RunConfig, ScenarioConfig, ShipConfig, SystemConfig, TargetConfig,
};
pub use pipeline::{Mode, Processed, Scenario, Simulated};
pub use runner::{pgm_bytes, qpsk_ber, run_scenario, Artifact, Manifest, StageRecord, IMAGE_RANGE_DB, LOCK_FILE};
pub use ship::{stencil_image, stencil_offsets};

/// The shipped default scenario.
pub const DEFAULT_SCENARIO: &str = include_str!("../../../../scenarios/default.cfg");
