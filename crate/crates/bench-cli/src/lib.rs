//! Experiment driver for the node-comparison solver stack: method x family
//! grids, 1-shifted geometric mean aggregation, and report files. The binary
//! in this package is the single command-line entry point for generating
//! instances, solving, collecting imitation data, training, and evaluating.

pub mod config;
pub mod experiment;
pub mod metrics;

pub use config::{ConfigError, ExperimentConfig, LimitsSpec, Method, SplitSpec};
pub use experiment::{
    load_split_instances, results_csv, results_markdown, run_experiment, write_reports,
    ExperimentError, ExperimentOutcome, ResultRow,
};
pub use metrics::{geo_std, shifted_geomean, EmptyValues};
