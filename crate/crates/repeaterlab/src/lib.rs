//! Experiment runner and CSV front end for `repeaterlab-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod montecarlo;

pub use config::{ExperimentConfig, Params};
pub use error::{AppError, AppResult};
pub use montecarlo::simulate_time_c_parallel;
