//! Scenario files, trajectory CSV and phase-portrait SVG.

pub mod config;
pub mod csv;
pub mod scenario;
pub mod svg;

pub use config::{parse_config, OutputFormat, ScenarioConfig};
pub use csv::{emit_trajectory_csv, format_g};
pub use scenario::{run_scenario, ScenarioRun};
pub use svg::emit_phase_svg;
