//! Command-line front end for the bohmpair simulator: scenario configuration,
//! execution and artifact output.

pub mod config;
pub mod output;
pub mod scenario;

pub use config::{load_config, parse_config, validate_config, ConfigError, Diagnostic, Overrides, Scenario, ScenarioConfig};
pub use scenario::{execute, run_scenario, ExitStatus, Outcome, RunError, Summary};
