//! Experiment harness around `desr-core`: WAV ingestion, segment
//! extraction, corruption/reconstruction benchmarks, hyper-parameter
//! sweeps, and CSV/WAV/JSON result emission.

pub mod error;
pub mod experiment;
pub mod segment;
pub mod wav;

pub use error::CliError;
pub use experiment::{
    aggregate_rows, manifest_json, mask_from_csv, mask_to_csv, results_from_csv, results_to_csv,
    run_experiment, summary_to_csv, sweep, sweep_to_csv, trajectories_to_csv, AggregateRow,
    CorruptionKind, ExperimentConfig, ExperimentOutcome, MethodSpec, ProposedParams, ResultRow,
    SignalSource, SweepCell, TrajectoryPoint,
};
pub use segment::{extract_segments, Segment};
pub use wav::{load_wav, write_wav, LoadedWav};
