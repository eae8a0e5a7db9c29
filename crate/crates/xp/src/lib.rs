//! Experiment harness for random walks on the directed block model: regime
//! presets and guards, profile sweeps, gate statistics, annealed
//! comparisons, and CSV/SVG output with a manifest per run.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod svg;

pub use config::{ExperimentConfig, RegimeSpec, StartSpec, Timescale};
pub use manifest::{RunManifest, Verdict};
