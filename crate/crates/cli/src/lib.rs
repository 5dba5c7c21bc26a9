//! Command-line front end: scenario ingestion, command dispatch and the
//! trace, report and manifest file formats.

mod artifacts;
mod commands;
mod config;
mod error;
mod manifest;

pub use artifacts::{
    read_trace, trace_header, write_json, write_report, write_sweep_csv, write_trace, TraceBounds,
    TraceRow, TraceTable,
};
pub use commands::{dispatch, manifest_path_for, run_command, run_from_args, Cli, Command};
pub use config::{load_config, parse_config};
pub use error::{CliError, Result};
pub use manifest::{Admissibility, Artifacts, Outcome, RunManifest, Verdict, TOOL_VERSION};
