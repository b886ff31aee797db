//! Experiment configuration, execution and tabular output.

mod checks;
mod config;
mod diff;
mod presets;
mod run;
mod table;

pub use checks::{run_oracle, OracleReport, ORACLE_CHECKS};
pub use config::*;
pub use diff::{finite_diff, uniform_spacing};
pub use presets::{find_preset, preset, Preset, PRESETS};
pub use run::run;
pub use table::ResultTable;
