//! Command-line front end: single runs, benchmark sweeps, standalone
//! sub-region detection and scene generation.

pub mod bench;
pub mod detect;
pub mod error;
pub mod overrides;
pub mod run;

pub use bench::{cmd_bench, BenchSpec};
pub use detect::{cmd_detect, DetectArgs};
pub use error::CliError;
pub use run::{cmd_run, ConfigArgs, RunArgs};
