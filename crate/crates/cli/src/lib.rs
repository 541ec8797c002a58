//! Scenario runner for the weak-measurement simulator.
//!
//! A scenario file declares one demonstration (weak-value extraction,
//! derailment check, additivity comparison, interferometer sweep or a generic
//! `g` sweep). [`parse_scenario`] validates it, [`run_scenario`] executes it
//! and [`emit`] encodes the resulting [`Report`] as CSV or JSON.

pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{CliError, ErrorCode, ParseError};
pub use report::{emit, Report, Table};
pub use run::{run_scenario, run_with_tolerances};
pub use scenario::{parse_scenario, Format, Kind, ScenarioConfig};
