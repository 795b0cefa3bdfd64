//! Experiment harness: configuration, commands and result files.

pub mod commands;
pub mod config;
pub mod csv;
pub mod io;
pub mod manifest;
pub mod plot;

pub use commands::{
    cmd_plot, cmd_sweep, cmd_train, cmd_validate_channel, exit_code, ChannelReport,
};
pub use config::ExperimentConfig;
pub use manifest::RunManifest;
