//! Tail behaviour of the signal-to-interference ratio in spatial networks.

pub mod analytic;
pub mod battery;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod model;
pub mod process;
pub mod special;

pub use error::{Error, Result};
