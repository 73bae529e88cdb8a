//! Dataset IO, experiment orchestration and reporting on top of
//! `trustrec-core`.

pub mod analysis;
pub mod config;
pub mod error;
pub mod grid;
pub mod io;
pub mod methods;
pub mod pipeline;
pub mod report;
pub mod reproduce;

pub use config::{ConfigMap, ExperimentConfig, Mode};
pub use error::{BenchError, Result};
