//! Ensembles of learning trajectories and their CSV and SVG output.

mod config;
mod csv_out;
mod ensemble;
mod figures;
mod trajectory;

pub use config::{ConfigFile, ExperimentConfig, Mode};
pub use csv_out::{emit_csv, read_csv, HEADER};
pub use ensemble::{run_ensemble, run_ensemble_with, success_onset, Aggregator, MetricsRow};
pub use figures::{emit_figures, modes_in};
pub use trajectory::{run_trajectory, trajectory_rng, StepRecord};
