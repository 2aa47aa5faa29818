//! Noisy entanglement purification, entanglement swapping and the nested
//! quantum repeater, with a dense density-matrix oracle for validation.
#![no_std]

extern crate alloc;

pub mod bell;
pub mod connection;
pub mod error;
pub mod noise;
pub mod oracle;
pub mod purification;
pub mod repeater;
pub mod scaling;
pub mod timing;

pub use bell::{BellDiagonal, BellState};
pub use connection::ConnectionStrategy;
pub use error::{Error, Result};
pub use noise::NoiseParams;
pub use purification::Scheme;
pub use repeater::{RepeaterConfig, RepeaterReport};
pub use timing::{TimeReport, TimingParams};
