//! Sampling, evaluation and verification toolkit for Rademacher random
//! multiplicative functions and their Euler products.

pub mod arith;
pub mod error;
pub mod euler;
pub mod experiment;
pub mod quad;
pub mod sampler;
pub mod schedules;
pub mod sums;
pub mod verify;
pub mod stats;

pub use error::{LabError, Result};
