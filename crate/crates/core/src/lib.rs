pub mod config;
pub mod ecg;
pub mod eeg;
pub mod error;
pub mod fusion;
pub mod io;
pub mod ml;
pub mod rng;
pub mod signal;
pub mod spectrum;
pub mod spline;
pub mod stats;
pub mod synth;
pub mod temperature;

pub use error::{Error, Result};
