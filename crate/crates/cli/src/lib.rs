//! Command-line front end for feedback-based state preparation runs.
//!
//! `run` executes a config and writes a trace CSV, a replayable circuit file,
//! a JSON report and a text summary. `spectrum` prints the exact spectrum of a
//! model. `replay` applies a saved circuit to fresh initial states.

pub mod commands;
pub mod config;
pub mod error;
pub mod resolve;
pub mod runner;

pub use commands::{cmd_replay, cmd_run, cmd_spectrum, RunOptions, DEFAULT_OUTPUT_DIR};
pub use config::{bundled_config, load_config, ControlSpec, Experiment, ExperimentConfig, LoadedConfig};
pub use error::{CliError, CliResult, ExitKind};
pub use runner::{check_descent, execute, summary, write_outputs, RunOutcome, DESCENT_TOLERANCE};
