//! Batch experiments: configuration, the six commands, verifier suites and
//! report output.

pub mod commands;
pub mod config;
pub mod pilot;
pub mod report;
pub mod suites;

pub use commands::{
    cmd_chaos_probe, cmd_identity_check, cmd_lower_probe, cmd_schedule, cmd_simulate, cmd_verify, execute, run,
    simulate_checkpoints,
};
pub use config::{parse_config_text, Command, ExperimentConfig, Format, Scale, SeedSpec};
pub use report::{ExperimentReport, QuantileRow, Table};
