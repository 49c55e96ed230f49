//! Estimation of hop-distance performability metrics: parallel estimators,
//! exact enumeration, heuristic set construction, file formats and the
//! `dperf` command line.
//!
//! The algorithms live in [`dperf_core`]; this crate adds threads, clocks,
//! files and built-in networks.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod fixtures;
pub mod heuristic;
pub mod io;
pub mod oracle;
pub mod report;

pub use dperf_core as core;
pub use error::{Error, Result};
