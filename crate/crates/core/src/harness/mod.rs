//! Experiment orchestration: configuration, repeated seeded runs,
//! metrics and persisted logs.

pub mod config;
pub mod curves;
pub mod experiment;
pub mod metrics;
pub mod runlog;

pub use config::{ExperimentConfig, PRESETS};
pub use curves::{experiment_curve, write_curves, CurveMetric, Series};
pub use experiment::{
    load_summary, run_experiment, run_repetition, run_summaries, summarize_repetition,
    write_experiment, ExperimentSummary,
};
pub use metrics::{MeanSd, SlidingMean};
pub use runlog::{RepSummary, RunLog, StepRow};
