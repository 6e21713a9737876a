//! Experiment harness for planted vertex cuts.
//!
//! An [`config::ExperimentConfig`] names a regime, a parameter grid and a
//! trial count. [`commands::cmd_pipeline`] runs every `(cell, trial)` pair
//! on a worker pool, stores one JSON record per trial and writes
//! plot-ready CSV files whose first header field names the schema version.
//! Reruns with the same config reuse stored records and produce identical
//! CSV files; wall-clock data goes to `timings.csv` and `meta.json` only.

pub mod commands;
pub mod config;
pub mod store;
pub mod trial;

pub use config::{preset, Cell, ExperimentConfig, Grid, Regime};
pub use trial::{run_trial, TrialRecord};
